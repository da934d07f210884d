#pragma once

#include <cstdint>

namespace specrules {

// Joint counts for a judged rule Q -> C=c against a conditioning antecedent X.
// Every count involving C is taken at C = polarity_q, i.e. n_c is the number
// of rows where the consequent literal holds, not where the raw attribute is 1.
// X and Q themselves always denote presence of their (conjunctive) antecedents.
//
// polarity_x records the conditioning rule's own consequent value; it plays no
// role in the counts, only in how a caller interprets the pair.
struct PairCounts {
  std::uint64_t n = 0;
  std::uint64_t n_x = 0;
  std::uint64_t n_q = 0;
  std::uint64_t n_c = 0;
  std::uint64_t n_xq = 0;
  std::uint64_t n_xc = 0;
  std::uint64_t n_qc = 0;
  std::uint64_t n_xqc = 0;
  int polarity_q = 1;
  int polarity_x = 1;

  // The eight disjoint cells of the X/Q/C cube, derived from the marginals.
  // Callers that build counts by hand should check consistent() first.
  std::uint64_t cell_xqc() const { return n_xqc; }
  std::uint64_t cell_xq_nc() const { return n_xq - n_xqc; }
  std::uint64_t cell_x_nq_c() const { return n_xc - n_xqc; }
  std::uint64_t cell_x_nq_nc() const { return n_x - n_xq - n_xc + n_xqc; }
  std::uint64_t cell_nx_qc() const { return n_qc - n_xqc; }
  std::uint64_t cell_nx_q_nc() const { return n_q - n_xq - n_qc + n_xqc; }
  std::uint64_t cell_nx_nq_c() const { return n_c - n_xc - n_qc + n_xqc; }
  std::uint64_t cell_nx_nq_nc() const {
    return n - n_x - n_q - n_c + n_xq + n_xc + n_qc - n_xqc;
  }

  bool consistent() const {
    // All eight cells non-negative; evaluate in signed space to catch
    // underflow before the unsigned accessors would wrap.
    const auto i = [](std::uint64_t v) { return static_cast<std::int64_t>(v); };
    return i(n_xqc) >= 0 && i(n_xq) >= i(n_xqc) && i(n_xc) >= i(n_xqc) &&
           i(n_qc) >= i(n_xqc) && i(n_x) + i(n_xqc) >= i(n_xq) + i(n_xc) &&
           i(n_q) + i(n_xqc) >= i(n_xq) + i(n_qc) &&
           i(n_c) + i(n_xqc) >= i(n_xc) + i(n_qc) &&
           i(n) + i(n_xq) + i(n_xc) + i(n_qc) >=
               i(n_x) + i(n_q) + i(n_c) + i(n_xqc);
  }
};

}  // namespace specrules
