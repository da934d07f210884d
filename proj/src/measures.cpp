#include "specrules/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace specrules {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

std::mutex g_table_mutex;
// Keyed by entry count; never erased, so returned views stay valid. Sizes are
// rounded up to powers of two to keep the number of distinct tables small.
std::map<std::uint64_t, std::unique_ptr<std::vector<double>>>& tables() {
  static auto* m =
      new std::map<std::uint64_t, std::unique_ptr<std::vector<double>>>();
  return *m;
}

// One hypergeometric stratum: `draws` antecedent rows drawn from `pop` rows
// of which `succ` carry the consequent literal.
struct Stratum {
  std::uint64_t pop, succ, draws;

  std::uint64_t lo() const {
    return draws + succ > pop ? draws + succ - pop : 0;
  }
  std::uint64_t hi() const { return std::min(draws, succ); }

  double log_pmf(std::uint64_t i, const LogFactTable& lf) const {
    return lf.log_binom(succ, i) + lf.log_binom(pop - succ, draws - i) -
           lf.log_binom(pop, draws);
  }
};

// Upper tail P(N >= t) of a single stratum, exact in log space.
double stratum_tail(const Stratum& s, std::uint64_t t) {
  if (s.succ > s.pop || s.draws > s.pop)
    throw std::invalid_argument("hypergeometric margins exceed population");
  if (t <= s.lo()) return 1.0;
  if (t > s.hi())
    throw std::invalid_argument("observed count outside feasible range");
  const LogFactTable lf = log_fact_table(s.pop);
  double acc = kNegInf;
  for (std::uint64_t i = t; i <= s.hi(); ++i)
    acc = logaddexp(acc, s.log_pmf(i, lf));
  return std::min(1.0, std::exp(acc));
}

// Count-scaled MI of a 2x2 table given as margins; 0*log 0 := 0. The sum is
// clamped at zero: it is a mutual information, and only rounding can push it
// below.
double mi_table(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
                std::uint64_t n_qc) {
  if (n_q > n || n_c > n || n_qc > std::min(n_q, n_c) ||
      n_q + n_c > n + n_qc)
    throw std::invalid_argument("2x2 margins admit no table");
  // A constant row or column variable carries no information; return exact
  // zero rather than the rounding noise the general formula would produce.
  if (n_q == 0 || n_q == n || n_c == 0 || n_c == n) return 0.0;
  const double ln_n = std::log(static_cast<double>(n));
  const auto term = [&](std::uint64_t cell, std::uint64_t rm,
                        std::uint64_t cm) {
    if (cell == 0) return 0.0;
    return static_cast<double>(cell) *
           (std::log(static_cast<double>(cell)) + ln_n -
            std::log(static_cast<double>(rm)) -
            std::log(static_cast<double>(cm)));
  };
  const std::uint64_t a = n_qc, b = n_q - n_qc, c = n_c - n_qc,
                      d = n - n_q - n_c + n_qc;
  const double v = term(a, n_q, n_c) + term(b, n_q, n - n_c) +
                   term(c, n - n_q, n_c) + term(d, n - n_q, n - n_c);
  return std::max(0.0, v);
}

int sign_of(__int128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

void require_consistent(const PairCounts& pc) {
  if (!pc.consistent())
    throw std::invalid_argument("pair counts are not jointly realizable");
}

}  // namespace

LogFactTable log_fact_table(std::uint64_t max_n) {
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto& m = tables();
  auto it = m.lower_bound(max_n + 1);
  if (it == m.end()) {
    std::uint64_t entries = 256;
    while (entries < max_n + 1) entries *= 2;
    auto table = std::make_unique<std::vector<double>>(entries);
    for (std::uint64_t i = 0; i < entries; ++i)
      (*table)[i] = std::lgamma(static_cast<double>(i) + 1.0);
    it = m.emplace(entries, std::move(table)).first;
  }
  return LogFactTable(it->second->data(), it->first);
}

double leverage(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
                std::uint64_t n_qc) {
  if (n == 0) return 0.0;
  const double dn = static_cast<double>(n);
  return static_cast<double>(n_qc) / dn -
         (static_cast<double>(n_q) / dn) * (static_cast<double>(n_c) / dn);
}

double rule_mi(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
               std::uint64_t n_qc) {
  return mi_table(n, n_q, n_c, n_qc);
}

std::pair<double, double> conditional_leverages(const PairCounts& pc) {
  require_consistent(pc);
  const double dn = static_cast<double>(pc.n);
  double d1 = 0.0, d2 = 0.0;
  if (pc.n_x > 0) {
    d1 = (static_cast<double>(pc.n_xqc) -
          static_cast<double>(pc.n_xq) * static_cast<double>(pc.n_xc) /
              static_cast<double>(pc.n_x)) /
         dn;
  }
  const std::uint64_t m = pc.n - pc.n_x;
  if (m > 0) {
    d2 = (static_cast<double>(pc.n_qc - pc.n_xqc) -
          static_cast<double>(pc.n_q - pc.n_xq) *
              static_cast<double>(pc.n_c - pc.n_xc) / static_cast<double>(m)) /
         dn;
  }
  return {d1, d2};
}

int delta1_sign(const PairCounts& pc) {
  if (pc.n_x == 0) return 0;
  return sign_of(static_cast<__int128>(pc.n_xqc) * pc.n_x -
                 static_cast<__int128>(pc.n_xq) * pc.n_xc);
}

int delta2_sign(const PairCounts& pc) {
  const std::uint64_t m = pc.n - pc.n_x;
  if (m == 0) return 0;
  return sign_of(static_cast<__int128>(pc.n_qc - pc.n_xqc) * m -
                 static_cast<__int128>(pc.n_q - pc.n_xq) *
                     (pc.n_c - pc.n_xc));
}

int delta_sign(std::uint64_t n, std::uint64_t n_q, std::uint64_t n_c,
               std::uint64_t n_qc) {
  return sign_of(static_cast<__int128>(n) * n_qc -
                 static_cast<__int128>(n_q) * n_c);
}

std::pair<double, double> conditional_mi_terms(const PairCounts& pc) {
  require_consistent(pc);
  const double t1 = mi_table(pc.n_x, pc.n_xq, pc.n_xc, pc.n_xqc);
  const double t2 = mi_table(pc.n - pc.n_x, pc.n_q - pc.n_xq,
                             pc.n_c - pc.n_xc, pc.n_qc - pc.n_xqc);
  return {t1, t2};
}

double conditional_mi(const PairCounts& pc) {
  const auto [t1, t2] = conditional_mi_terms(pc);
  return t1 + t2;
}

double signed_conditional_mi(const PairCounts& pc) {
  const auto [t1, t2] = conditional_mi_terms(pc);
  // A stratum at exact independence has zero MI by definition; drop the
  // rounding noise so the sign guarantee below is exact.
  const int g1 = delta1_sign(pc), g2 = delta2_sign(pc);
  const double s1 = g1 == 0 ? 0.0 : (g1 < 0 ? -t1 : t1);
  const double s2 = g2 == 0 ? 0.0 : (g2 < 0 ? -t2 : t2);
  return s1 + s2;
}

double birch_p(const PairCounts& pc) {
  require_consistent(pc);
  const Stratum s1{pc.n_x, pc.n_xc, pc.n_xq};
  const Stratum s2{pc.n - pc.n_x, pc.n_c - pc.n_xc, pc.n_q - pc.n_xq};
  const std::uint64_t t = pc.n_qc;
  if (t <= s1.lo() + s2.lo()) return 1.0;

  const LogFactTable lf = log_fact_table(pc.n);

  // Suffix log-tails of the second stratum: tail2[j - lo2] = log P(J >= j).
  const std::uint64_t lo2 = s2.lo(), hi2 = s2.hi();
  std::vector<double> tail2(hi2 - lo2 + 2);
  tail2.back() = kNegInf;
  for (std::uint64_t j = hi2 + 1; j-- > lo2;)
    tail2[j - lo2] = logaddexp(tail2[j - lo2 + 1], s2.log_pmf(j, lf));

  double acc = kNegInf;
  for (std::uint64_t i = s1.lo(); i <= s1.hi(); ++i) {
    const std::uint64_t jmin = std::max(lo2, t > i ? t - i : 0);
    if (jmin > hi2) continue;  // this i cannot reach the threshold
    acc = logaddexp(acc, s1.log_pmf(i, lf) + tail2[jmin - lo2]);
  }
  return std::min(1.0, std::exp(acc));
}

double birch_p_nested_super(std::uint64_t n_x, std::uint64_t n_xc,
                            std::uint64_t n_xz, std::uint64_t n_xzc) {
  if (n_xc > n_x || n_xz > n_x || n_xzc > std::min(n_xz, n_xc) ||
      n_xz + n_xc > n_x + n_xzc)
    throw std::invalid_argument("nested-super margins admit no table");
  return stratum_tail(Stratum{n_x, n_xc, n_xz}, n_xzc);
}

double birch_p_nested_sub(std::uint64_t n, std::uint64_t n_c,
                          std::uint64_t n_qz, std::uint64_t n_qzc,
                          std::uint64_t n_q_notz, std::uint64_t n_q_notzc) {
  if (n_qz > n || n_c > n || n_qzc > std::min(n_qz, n_c))
    throw std::invalid_argument("nested-sub margins admit no table");
  const std::uint64_t pop = n - n_qz;
  const std::uint64_t succ = n_c - n_qzc;
  if (n_q_notz > pop || succ > pop ||
      n_q_notzc > std::min(n_q_notz, succ))
    throw std::invalid_argument("nested-sub margins admit no table");
  return stratum_tail(Stratum{pop, succ, n_q_notz}, n_q_notzc);
}

double log_hypergeom_point(const PairCounts& pc, std::uint64_t i,
                           std::uint64_t j) {
  require_consistent(pc);
  const Stratum s1{pc.n_x, pc.n_xc, pc.n_xq};
  const Stratum s2{pc.n - pc.n_x, pc.n_c - pc.n_xc, pc.n_q - pc.n_xq};
  if (i < s1.lo() || i > s1.hi() || j < s2.lo() || j > s2.hi()) return kNegInf;
  const LogFactTable lf = log_fact_table(pc.n);
  return s1.log_pmf(i, lf) + s2.log_pmf(j, lf);
}

double mi_upper_bound(std::uint64_t n_q, std::uint64_t n_c, std::uint64_t n) {
  if (n_q > n || n_c > n)
    throw std::invalid_argument("margins exceed row count");
  double best = 0.0;
  const std::uint64_t top = std::min(n_q, n_c);
  for (std::uint64_t s = 0; s <= top; ++s)
    best = std::max(best, mi_table(n, s, n_c, s));
  return best;
}

}  // namespace specrules
