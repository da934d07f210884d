#include "specrules/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "specrules/errors.hpp"
#include "specrules/measures.hpp"
#include "specrules/miner.hpp"

namespace specrules {

namespace {

struct StratumPlan {
  std::uint64_t rows, q, c, qc;
  bool cells_ok() const {
    return q <= rows && c <= rows && qc <= std::min(q, c) &&
           q + c <= rows + qc;
  }
  // Within-stratum association of q and c, exact integer sign.
  __int128 delta_scaled() const {
    return static_cast<__int128>(qc) * rows - static_cast<__int128>(q) * c;
  }
};

std::uint64_t round_count(double x, std::uint64_t hi) {
  const double v = std::llround(std::max(0.0, x));
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(v), hi);
}

}  // namespace

std::pair<Dataset, PlantTruth> plant_simpson(const PlantSpec& spec) {
  if (spec.n < 8) throw std::invalid_argument("plant needs n >= 8");
  const auto frac = [](double v) { return v > 0.0 && v < 1.0; };
  if (!frac(spec.p_x) || !frac(spec.p_q_given_x) || !frac(spec.p_q_given_notx) ||
      !frac(spec.p_c_given_x) || !frac(spec.p_c_given_notx))
    throw std::invalid_argument("plant probabilities must lie strictly in (0,1)");
  if (spec.delta1 > 0.0 || spec.delta2 > 0.0)
    throw std::invalid_argument("planted conditional leverages must be <= 0");
  if (spec.noise_density < 0.0 || spec.noise_density > 1.0)
    throw std::invalid_argument("noise density must lie in [0,1]");

  const std::uint64_t n = spec.n;
  const std::uint64_t n_x = round_count(spec.p_x * n, n);
  if (n_x == 0 || n_x == n)
    throw UnrealizableError("confounder stratum rounds to empty");
  const std::uint64_t m = n - n_x;

  StratumPlan sx{n_x, round_count(spec.p_q_given_x * n_x, n_x),
                 round_count(spec.p_c_given_x * n_x, n_x), 0};
  StratumPlan sv{m, round_count(spec.p_q_given_notx * m, m),
                 round_count(spec.p_c_given_notx * m, m), 0};

  const double t1 =
      static_cast<double>(sx.q) * sx.c / n_x + spec.delta1 * n;
  const double t2 = static_cast<double>(sv.q) * sv.c / m + spec.delta2 * n;

  // Try joint counts near the target until every exact constraint holds:
  // both strata feasible with non-positive association, positive marginal
  // association of q and c, and the confounder genuinely driving both.
  const std::int64_t offsets[] = {0, -1, 1, -2, 2, -3, 3};
  std::string why = "no integer table near the requested plant";
  for (std::int64_t e1 : offsets) {
    const std::int64_t base1 = std::llround(t1) + e1;
    if (base1 < 0) continue;
    sx.qc = static_cast<std::uint64_t>(base1);
    if (!sx.cells_ok() || sx.delta_scaled() > 0) continue;
    for (std::int64_t e2 : offsets) {
      const std::int64_t base2 = std::llround(t2) + e2;
      if (base2 < 0) continue;
      sv.qc = static_cast<std::uint64_t>(base2);
      if (!sv.cells_ok() || sv.delta_scaled() > 0) continue;

      const std::uint64_t n_q = sx.q + sv.q;
      const std::uint64_t n_c = sx.c + sv.c;
      const std::uint64_t n_qc = sx.qc + sv.qc;
      if (n_q == 0 || n_q == n || n_c == 0 || n_c == n) {
        why = "planted attribute is degenerate";
        continue;
      }
      if (delta_sign(n, n_q, n_c, n_qc) <= 0) {
        why = "marginal association does not stay positive";
        continue;
      }
      if (delta_sign(n, n_x, n_q, sx.q) <= 0 ||
          delta_sign(n, n_x, n_c, sx.c) <= 0) {
        why = "confounder does not drive both planted attributes";
        continue;
      }

      // Found an exact realization; lay out rows block-wise per stratum.
      const std::size_t attrs = 3 + spec.noise_attrs;
      std::vector<std::string> names;
      std::vector<BitVec> cols(attrs, BitVec(n));
      for (std::size_t a = 0; a < attrs; ++a)
        names.push_back(std::to_string(a + 1));

      const auto fill = [&](std::uint64_t row0, const StratumPlan& s) {
        // cells in order: qc, q only, c only, neither
        std::uint64_t r = row0;
        for (std::uint64_t i = 0; i < s.qc; ++i, ++r) {
          cols[1].set(r);
          cols[2].set(r);
        }
        for (std::uint64_t i = 0; i < s.q - s.qc; ++i, ++r) cols[1].set(r);
        for (std::uint64_t i = 0; i < s.c - s.qc; ++i, ++r) cols[2].set(r);
      };
      for (std::uint64_t r = 0; r < n_x; ++r) cols[0].set(r);
      fill(0, sx);
      fill(n_x, sv);

      std::mt19937_64 rng(spec.seed);
      for (std::size_t a = 0; a < spec.noise_attrs; ++a)
        for (std::uint64_t r = 0; r < n; ++r) {
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          if (u < spec.noise_density) cols[3 + a].set(r);
        }

      Dataset d(std::move(names), std::move(cols), n);
      PlantTruth truth;
      truth.counts.n = n;
      truth.counts.n_x = n_x;
      truth.counts.n_q = n_q;
      truth.counts.n_c = n_c;
      truth.counts.n_xq = sx.q;
      truth.counts.n_xc = sx.c;
      truth.counts.n_qc = n_qc;
      truth.counts.n_xqc = sx.qc;
      truth.delta_qc = leverage(n, n_q, n_c, n_qc);
      const auto [d1, d2] = conditional_leverages(truth.counts);
      truth.delta1 = d1;
      truth.delta2 = d2;
      return {std::move(d), truth};
    }
  }
  throw UnrealizableError(why);
}

Dataset plant_equivalent(const Dataset& d, AttrId source, EquivMode mode) {
  if (source >= d.attr_count())
    throw std::invalid_argument("source attribute out of range");

  std::vector<std::string> names;
  std::vector<BitVec> cols;
  names.reserve(d.attr_count() + 1);
  cols.reserve(d.attr_count() + 1);
  bool all_numeric = true;
  std::uint64_t max_id = 0;
  for (AttrId a = 0; a < d.attr_count(); ++a) {
    names.push_back(d.attr_name(a));
    cols.push_back(d.column(a));
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(d.attr_name(a), &used);
      if (used != d.attr_name(a).size()) all_numeric = false;
      max_id = std::max(max_id, v);
    } catch (...) {
      all_numeric = false;
    }
  }
  // Keep transaction-format writability: numeric datasets get the next id.
  if (all_numeric)
    names.push_back(std::to_string(max_id + 1));
  else
    names.push_back(d.attr_name(source) +
                    (mode == EquivMode::copy ? "_copy" : "_not"));
  cols.push_back(mode == EquivMode::copy ? d.column(source)
                                         : d.column(source).complemented());
  return Dataset(std::move(names), std::move(cols), d.n());
}

double brute_force_birch(const PairCounts& pc) {
  if (pc.n > 200)
    throw std::invalid_argument("reference tail is capped at n = 200");
  if (!pc.consistent())
    throw std::invalid_argument("pair counts are not jointly realizable");

  // Binomial coefficients by Pascal's rule: long double additions only, an
  // arithmetic path disjoint from the log-space production code.
  static const auto* C = [] {
    auto* t = new std::vector<std::vector<long double>>(201);
    for (std::size_t i = 0; i <= 200; ++i) {
      (*t)[i].assign(i + 1, 1.0L);
      for (std::size_t j = 1; j < i; ++j)
        (*t)[i][j] = (*t)[i - 1][j - 1] + (*t)[i - 1][j];
    }
    return t;
  }();
  const auto choose = [&](std::uint64_t a, std::uint64_t b) -> long double {
    if (b > a) return 0.0L;
    return (*C)[a][b];
  };

  const std::uint64_t pop1 = pc.n_x, succ1 = pc.n_xc, draws1 = pc.n_xq;
  const std::uint64_t pop2 = pc.n - pc.n_x, succ2 = pc.n_c - pc.n_xc,
                      draws2 = pc.n_q - pc.n_xq;
  const long double denom =
      choose(pop1, draws1) * choose(pop2, draws2);
  long double num = 0.0L;
  for (std::uint64_t i = 0; i <= std::min(draws1, succ1); ++i) {
    if (draws1 - i > pop1 - succ1) continue;
    for (std::uint64_t j = 0; j <= std::min(draws2, succ2); ++j) {
      if (draws2 - j > pop2 - succ2) continue;
      if (i + j < pc.n_qc) continue;
      num += choose(succ1, i) * choose(pop1 - succ1, draws1 - i) *
             choose(succ2, j) * choose(pop2 - succ2, draws2 - j);
    }
  }
  return static_cast<double>(num / denom);
}

TopKList brute_force_top_k(const Dataset& d, const MinerConfig& cfg) {
  if (d.attr_count() > 16)
    throw std::invalid_argument("reference search is capped at 16 attributes");
  if (!d.usable_for_mining())
    throw std::invalid_argument("dataset not minable");
  if (cfg.consequents)
    for (AttrId c : *cfg.consequents)
      if (c >= d.attr_count())
        throw std::invalid_argument("consequent id out of range");

  std::vector<AttrId> live;
  for (AttrId a = 0; a < d.attr_count(); ++a)
    if (!d.degenerate(a)) live.push_back(a);

  const auto permitted = [&](AttrId c) {
    if (!cfg.consequents) return true;
    return std::find(cfg.consequents->begin(), cfg.consequents->end(), c) !=
           cfg.consequents->end();
  };

  // Candidate tables for one subset/consequent choice, own arithmetic.
  struct Cand {
    std::uint64_t sup, j1;
  };
  const auto table_for = [&](const std::vector<AttrId>& attrs,
                             AttrId c) -> Cand {
    BitVec cover = d.column(attrs[0]);
    for (std::size_t i = 1; i < attrs.size(); ++i)
      cover.and_with(d.column(attrs[i]));
    return Cand{cover.count(), BitVec::and_count(cover, d.column(c))};
  };
  const auto sign128 = [](std::uint64_t n, std::uint64_t q, std::uint64_t c,
                          std::uint64_t qc) -> int {
    const __int128 v =
        static_cast<__int128>(n) * qc - static_cast<__int128>(q) * c;
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };

  TopKList list(cfg.k);
  const std::uint32_t full = 1u << live.size();
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    std::vector<AttrId> attrs;
    for (std::size_t i = 0; i < live.size(); ++i)
      if (mask & (1u << i)) attrs.push_back(live[i]);
    if (cfg.max_antecedent && attrs.size() > *cfg.max_antecedent) continue;

    for (AttrId c : live) {
      if (!permitted(c)) continue;
      if (std::find(attrs.begin(), attrs.end(), c) != attrs.end()) continue;
      const Cand t = table_for(attrs, c);
      if (t.sup == 0) continue;
      const int ds = sign128(d.n(), t.sup, d.attr_support(c), t.j1);
      if (ds == 0) continue;
      const int pol = ds > 0 ? 1 : 0;
      if (pol == 0 && cfg.polarity == MinerConfig::Polarity::positive_only)
        continue;
      if (attrs.size() == 1 && c < attrs[0] && permitted(attrs[0]))
        continue;  // stored in the reversed canonical orientation
      const std::uint64_t n_lit =
          pol == 1 ? d.attr_support(c) : d.n() - d.attr_support(c);
      const std::uint64_t lit = pol == 1 ? t.j1 : t.sup - t.j1;
      const double m = rule_mi(d.n(), t.sup, n_lit, lit);

      // Redundant against any same-literal positive proper-subset rule?
      bool redundant = false;
      for (std::uint32_t sub = (mask - 1) & mask; sub != 0 && !redundant;
           sub = (sub - 1) & mask) {
        std::vector<AttrId> sattrs;
        for (std::size_t i = 0; i < live.size(); ++i)
          if (sub & (1u << i)) sattrs.push_back(live[i]);
        const Cand st = table_for(sattrs, c);
        const std::uint64_t slit = pol == 1 ? st.j1 : st.sup - st.j1;
        if (sign128(d.n(), st.sup, n_lit, slit) <= 0) continue;
        if (rule_mi(d.n(), st.sup, n_lit, slit) >= m) redundant = true;
      }
      if (redundant) continue;

      Rule r;
      r.antecedent = AttributeSet(attrs);
      r.consequent = c;
      r.polarity = pol;
      r.n_q = t.sup;
      r.n_c = n_lit;
      r.n_qc = lit;
      r.goodness = m;
      r.lev = leverage(d.n(), t.sup, n_lit, lit);
      list.offer(r);
    }
  }
  return list;
}

}  // namespace specrules
