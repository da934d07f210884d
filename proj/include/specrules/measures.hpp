#pragma once

#include <cstdint>
#include <utility>

#include "specrules/counts.hpp"

namespace specrules {

// Read-only view over a shared table of log-factorials (natural log). Views
// stay valid for the life of the process; the backing store only grows.
class LogFactTable {
 public:
  LogFactTable(const double* data, std::uint64_t entries)
      : data_(data), entries_(entries) {}

  double at(std::uint64_t i) const { return data_[i]; }
  std::uint64_t entries() const { return entries_; }

  // log C(n, k); requires k <= n < entries().
  double log_binom(std::uint64_t n, std::uint64_t k) const {
    return data_[n] - data_[k] - data_[n - k];
  }

 private:
  const double* data_;
  std::uint64_t entries_;
};

// Table with entries for 0! .. max_n!. Thread-safe, cached per size class.
LogFactTable log_fact_table(std::uint64_t max_n);

// ---------------------------------------------------------------------------
// Dependency measures. All "mi" values are count-scaled natural-log mutual
// information: n * I(Q;C) for the 2x2 table of antecedent-conjunction
// indicator vs consequent literal, so magnitudes grow with data size and
// twice the value is the G-statistic.
// ---------------------------------------------------------------------------

// P(q,c) - P(q)P(c) from counts; 0 when n == 0.
double leverage(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
                std::uint64_t n_qc);

// n * I(Q;C) for the 2x2 table (n, n_q, n_c, n_qc); 0*log 0 := 0.
// Throws std::invalid_argument when the margins admit no table.
double rule_mi(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
               std::uint64_t n_qc);

// Within-stratum leverages of (Q, C-literal) given X and given not-X,
// normalized by total n. A stratum with zero rows contributes 0.
std::pair<double, double> conditional_leverages(const PairCounts& pc);

// Exact integer signs of the two conditional leverages (no rounding).
int delta1_sign(const PairCounts& pc);
int delta2_sign(const PairCounts& pc);

// Exact integer sign of n*n_qc - n_q*n_c.
int delta_sign(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
               std::uint64_t n_qc);

// The two stratum terms of count-scaled conditional MI (X-stratum, rest).
std::pair<double, double> conditional_mi_terms(const PairCounts& pc);

// n * I(Q;C | X) = sum of the stratum terms.
double conditional_mi(const PairCounts& pc);

// Conditional MI with each stratum term negated when that stratum's
// conditional leverage is negative; <= 0 exactly when both leverages are <= 0.
double signed_conditional_mi(const PairCounts& pc);

// Exact conditional-independence tail probability for the pair: probability
// of seeing at least n_qc joint rows given all one-way margins within both
// X-strata, under independent per-stratum hypergeometric draws.
// Throws std::invalid_argument on inconsistent counts.
double birch_p(const PairCounts& pc);

// Specialization XZ -> C judged against its generalization X -> C: the
// not-X stratum is empty of antecedent rows, so the tail collapses to a
// single hypergeometric inside cov(X).
double birch_p_nested_super(std::uint64_t n_x, std::uint64_t n_xc,
                            std::uint64_t n_xz, std::uint64_t n_xzc);

// Generalization Q -> C judged against its specialization QZ -> C: inside
// cov(QZ) the antecedent is constant, so the tail collapses to a single
// hypergeometric over the complement stratum. n_q_notz / n_q_notzc are the
// Q rows (and Q&C rows) falling outside cov(QZ).
double birch_p_nested_sub(std::uint64_t n, std::uint64_t n_c,
                          std::uint64_t n_qz, std::uint64_t n_qzc,
                          std::uint64_t n_q_notz, std::uint64_t n_q_notzc);

// Log of the joint point probability of the stratum pair (i, j) under the
// same double-hypergeometric model; -infinity when (i, j) is infeasible.
double log_hypergeom_point(const PairCounts& pc, std::uint64_t i,
                           std::uint64_t j);

// Largest rule MI any positively dependent rule with antecedent support
// <= n_q against a consequent literal of count n_c can reach: max over joint
// counts s of the containment table (n, s, n_c, s). Only admissible on the
// attraction side, which is the only side the miner admits.
double mi_upper_bound(std::uint64_t n_q, std::uint64_t n_c, std::uint64_t n);

// ---------------------------------------------------------------------------
// The measure pair the engine ranks and judges with. The ranking measure and
// its conditional partner must be order-compatible: conditioning preserves
// rule distances (chain rule), which the tests assert.
// ---------------------------------------------------------------------------
enum class MeasureTag { signed_mutual_information };

struct MeasureKind {
  MeasureTag tag = MeasureTag::signed_mutual_information;
  const char* name() const { return "signed_mutual_information"; }
  const char* scale() const { return "count_scaled_natural_log"; }
};

}  // namespace specrules
