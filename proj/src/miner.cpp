#include "specrules/miner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "specrules/errors.hpp"
#include "specrules/measures.hpp"

namespace specrules {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool consequent_permitted(AttrId c, const MinerConfig& cfg) {
  if (!cfg.consequents) return true;
  const auto& v = *cfg.consequents;
  return std::find(v.begin(), v.end(), c) != v.end();
}

// Everything one mining run keeps between nodes: admission state, the lazy
// per-consequent-literal bound tables, and the redundancy memos.
struct Search {
  const Dataset& d;
  const MinerConfig& cfg;
  TopKList topk;
  std::vector<AttrId> live;            // non-degenerate attributes, ascending
  std::vector<char> permitted;         // candidate consequents

  // bound_table[c][pol][m] = max over t <= m of the containment-table MI
  // with consequent-literal count n_lit; monotone in m, so it bounds every
  // descendant whose literal joint count can still reach m.
  std::map<std::pair<AttrId, int>, std::vector<double>> bound_tables;

  // measure memo: antecedent/consequent/polarity -> goodness, or -inf when
  // the subset is not a positive-leverage rule at that polarity.
  std::map<std::tuple<std::vector<AttrId>, AttrId, int>, double> m_memo;
  // best goodness over all proper nonempty subsets (the redundancy bar)
  std::map<std::tuple<std::vector<AttrId>, AttrId, int>, double> g_memo;

  Search(const Dataset& ds, const MinerConfig& c) : d(ds), cfg(c), topk(c.k) {}

  std::uint64_t literal_count(AttrId c, int pol) const {
    return pol == 1 ? d.attr_support(c) : d.n() - d.attr_support(c);
  }

  const std::vector<double>& bound_table(AttrId c, int pol) {
    auto it = bound_tables.find({c, pol});
    if (it != bound_tables.end()) return it->second;
    const std::uint64_t n_lit = literal_count(c, pol);
    std::vector<double> t(n_lit + 1);
    double best = 0.0;
    for (std::uint64_t m = 0; m <= n_lit; ++m) {
      best = std::max(best, rule_mi(d.n(), m, n_lit, m));
      t[m] = best;
    }
    return bound_tables.emplace(std::make_pair(c, pol), std::move(t))
        .first->second;
  }

  double subset_measure(const std::vector<AttrId>& attrs, AttrId c, int pol) {
    auto key = std::make_tuple(attrs, c, pol);
    auto it = m_memo.find(key);
    if (it != m_memo.end()) return it->second;
    const AttributeSet s(attrs);
    const std::uint64_t sup = d.support(s);
    const std::uint64_t j1 = BitVec::and_count(d.cover(s), d.column(c));
    const std::uint64_t lit = pol == 1 ? j1 : sup - j1;
    const std::uint64_t n_lit = literal_count(c, pol);
    double m = kNegInf;
    if (delta_sign(d.n(), sup, n_lit, lit) > 0)
      m = rule_mi(d.n(), sup, n_lit, lit);
    m_memo.emplace(std::move(key), m);
    return m;
  }

  // Best goodness among proper nonempty subsets with the same consequent
  // literal; recursive over maximal subsets so shared ancestors memoize.
  double best_parent(const std::vector<AttrId>& attrs, AttrId c, int pol) {
    if (attrs.size() <= 1) return kNegInf;
    auto key = std::make_tuple(attrs, c, pol);
    auto it = g_memo.find(key);
    if (it != g_memo.end()) return it->second;
    double best = kNegInf;
    std::vector<AttrId> sub;
    sub.reserve(attrs.size() - 1);
    for (std::size_t drop = 0; drop < attrs.size(); ++drop) {
      sub.clear();
      for (std::size_t i = 0; i < attrs.size(); ++i)
        if (i != drop) sub.push_back(attrs[i]);
      best = std::max(best, subset_measure(sub, c, pol));
      best = std::max(best, best_parent(sub, c, pol));
    }
    g_memo.emplace(std::move(key), best);
    return best;
  }

  // Evaluate every rule rooted at this node. joint1[c] = |cover & column c|.
  void visit_rules(const AttributeSet& node, std::uint64_t sup,
                   const std::vector<std::uint64_t>& joint1) {
    for (AttrId c : live) {
      if (!permitted[c] || node.contains(c)) continue;
      const int ds = delta_sign(d.n(), sup, d.attr_support(c), joint1[c]);
      if (ds == 0) continue;
      const int pol = ds > 0 ? 1 : 0;
      if (pol == 0 && cfg.polarity == MinerConfig::Polarity::positive_only)
        continue;
      // Canonical orientation for single-single pairs: antecedent is the
      // smaller id, unless the reversed form is not expressible under cfg.
      if (node.size() == 1 && c < node.members()[0] &&
          consequent_permitted(node.members()[0], cfg))
        continue;
      const std::uint64_t n_lit = literal_count(c, pol);
      const std::uint64_t lit = pol == 1 ? joint1[c] : sup - joint1[c];
      const double m = rule_mi(d.n(), sup, n_lit, lit);
      if (topk.full() && m < topk.tau()) continue;
      if (subset_best(node, c, pol) >= m) continue;  // redundant
      Rule r;
      r.antecedent = node;
      r.consequent = c;
      r.polarity = pol;
      r.n_q = sup;
      r.n_c = n_lit;
      r.n_qc = lit;
      r.goodness = m;
      r.lev = leverage(d.n(), sup, n_lit, lit);
      topk.offer(r);
    }
  }

  double subset_best(const AttributeSet& node, AttrId c, int pol) {
    if (node.size() == 1) return kNegInf;
    return best_parent(node.members(), c, pol);
  }

  bool depth_allows_children(std::size_t depth) const {
    return !cfg.max_antecedent || depth < *cfg.max_antecedent;
  }

  // Admissible goodness cap for any descendant of a node with support
  // child_sup whose parent already shows joint1 rows of each literal.
  bool child_worth_visiting(const AttributeSet& node, std::uint64_t child_sup,
                            const std::vector<std::uint64_t>& parent_joint1,
                            std::uint64_t parent_sup, AttrId added) {
    if (!cfg.prune || !topk.full()) return true;
    const double tau = topk.tau();
    for (AttrId c : live) {
      if (!permitted[c] || c == added || node.contains(c)) continue;
      const std::uint64_t cap1 = std::min(parent_joint1[c], child_sup);
      if (bound_table(c, 1)[cap1] >= tau) return true;
      if (cfg.polarity == MinerConfig::Polarity::both) {
        const std::uint64_t cap0 =
            std::min(parent_sup - parent_joint1[c], child_sup);
        if (bound_table(c, 0)[cap0] >= tau) return true;
      }
    }
    return false;
  }

  void joint_counts(const BitVec& cover, std::vector<std::uint64_t>& out) {
    out.assign(d.attr_count(), 0);
    for (AttrId c : live)
      out[c] = BitVec::and_count(cover, d.column(c));
  }

  void dfs(const AttributeSet& node, const BitVec& cover, std::uint64_t sup,
           const std::vector<std::uint64_t>& joint1) {
    if (!depth_allows_children(node.size())) return;
    for (AttrId a : live) {
      if (a <= node.members().back()) continue;
      const std::uint64_t child_sup = BitVec::and_count(cover, d.column(a));
      if (child_sup == 0) continue;
      if (!child_worth_visiting(node, child_sup, joint1, sup, a)) continue;
      AttributeSet child = node.with(a);
      BitVec child_cover = cover;
      child_cover.and_with(d.column(a));
      std::vector<std::uint64_t> child_joint1;
      joint_counts(child_cover, child_joint1);
      visit_rules(child, child_sup, child_joint1);
      dfs(child, child_cover, child_sup, child_joint1);
    }
  }

  void run() {
    // Shallow antecedents first so tau is meaningful before deep descent:
    // every single, every pair, then depth-first from each pair.
    std::vector<std::uint64_t> joint1;
    for (AttrId a : live) {
      joint_counts(d.column(a), joint1);
      visit_rules(AttributeSet::singleton(a), d.attr_support(a), joint1);
    }
    if (!depth_allows_children(1)) return;
    for (AttrId a : live) {
      for (AttrId b : live) {
        if (b <= a) continue;
        const std::uint64_t sup =
            BitVec::and_count(d.column(a), d.column(b));
        if (sup == 0) continue;
        BitVec cover = d.column(a);
        cover.and_with(d.column(b));
        joint_counts(cover, joint1);
        visit_rules(AttributeSet({a, b}), sup, joint1);
      }
    }
    if (!depth_allows_children(2)) return;
    for (AttrId a : live) {
      for (AttrId b : live) {
        if (b <= a) continue;
        const std::uint64_t sup =
            BitVec::and_count(d.column(a), d.column(b));
        if (sup == 0) continue;
        BitVec cover = d.column(a);
        cover.and_with(d.column(b));
        joint_counts(cover, joint1);
        dfs(AttributeSet({a, b}), cover, sup, joint1);
      }
    }
  }
};

void validate_config(const Dataset& d, const MinerConfig& cfg) {
  if (!d.usable_for_mining())
    throw std::invalid_argument(
        "dataset not minable: need >= 2 rows and >= 2 non-degenerate "
        "attributes");
  if (cfg.max_antecedent && *cfg.max_antecedent == 0)
    throw std::invalid_argument("max antecedent size must be >= 1");
  if (cfg.consequents) {
    if (cfg.consequents->empty())
      throw std::invalid_argument("empty consequent restriction");
    for (AttrId c : *cfg.consequents)
      if (c >= d.attr_count())
        throw std::invalid_argument("consequent id out of range");
  }
}

}  // namespace

std::optional<Rule> evaluate_candidate(const Dataset& d,
                                       const AttributeSet& antecedent,
                                       AttrId consequent,
                                       const MinerConfig& cfg) {
  if (antecedent.empty()) return std::nullopt;
  if (consequent >= d.attr_count())
    throw std::invalid_argument("consequent id out of range");
  if (antecedent.contains(consequent)) return std::nullopt;
  if (d.degenerate(consequent)) return std::nullopt;
  for (AttrId a : antecedent.members())
    if (d.degenerate(a)) return std::nullopt;
  if (!consequent_permitted(consequent, cfg)) return std::nullopt;

  const std::uint64_t sup = d.support(antecedent);
  if (sup == 0) return std::nullopt;
  const std::uint64_t j1 =
      BitVec::and_count(d.cover(antecedent), d.column(consequent));
  const int ds = delta_sign(d.n(), sup, d.attr_support(consequent), j1);
  if (ds == 0) return std::nullopt;
  const int pol = ds > 0 ? 1 : 0;
  if (pol == 0 && cfg.polarity == MinerConfig::Polarity::positive_only)
    return std::nullopt;
  if (antecedent.size() == 1 && consequent < antecedent.members()[0] &&
      consequent_permitted(antecedent.members()[0], cfg))
    return std::nullopt;  // stored in the reversed canonical orientation

  const std::uint64_t n_lit =
      pol == 1 ? d.attr_support(consequent) : d.n() - d.attr_support(consequent);
  const std::uint64_t lit = pol == 1 ? j1 : sup - j1;
  Rule r;
  r.antecedent = antecedent;
  r.consequent = consequent;
  r.polarity = pol;
  r.n_q = sup;
  r.n_c = n_lit;
  r.n_qc = lit;
  r.goodness = rule_mi(d.n(), sup, n_lit, lit);
  r.lev = leverage(d.n(), sup, n_lit, lit);
  return r;
}

bool is_redundant(const Dataset& d, const Rule& candidate) {
  const auto& attrs = candidate.antecedent.members();
  if (attrs.size() <= 1) return false;
  if (attrs.size() > 20)
    throw std::invalid_argument("antecedent too large for direct subset scan");
  const std::uint64_t n_lit = candidate.n_c;
  for (std::uint32_t mask = 1; mask + 1 < (1u << attrs.size()); ++mask) {
    std::vector<AttrId> sub;
    for (std::size_t i = 0; i < attrs.size(); ++i)
      if (mask & (1u << i)) sub.push_back(attrs[i]);
    const AttributeSet s(sub);
    const std::uint64_t sup = d.support(s);
    const std::uint64_t j1 =
        BitVec::and_count(d.cover(s), d.column(candidate.consequent));
    const std::uint64_t lit = candidate.polarity == 1 ? j1 : sup - j1;
    if (delta_sign(d.n(), sup, n_lit, lit) <= 0) continue;
    if (rule_mi(d.n(), sup, n_lit, lit) >= candidate.goodness) return true;
  }
  return false;
}

std::vector<AttributeSet> expand_frontier(const Dataset& d,
                                          const AttributeSet& node,
                                          double tau, const MinerConfig& cfg) {
  if (node.empty()) throw std::invalid_argument("cannot expand empty node");
  for (AttrId a : node.members())
    if (a >= d.attr_count())
      throw std::invalid_argument("attribute id out of range");
  std::vector<AttributeSet> out;
  if (cfg.max_antecedent && node.size() >= *cfg.max_antecedent) return out;

  const BitVec cover = d.cover(node);
  const std::uint64_t sup = cover.count();
  for (AttrId a = node.members().back() + 1; a < d.attr_count(); ++a) {
    if (d.degenerate(a)) continue;
    const std::uint64_t child_sup = BitVec::and_count(cover, d.column(a));
    if (child_sup == 0) continue;
    bool keep = !cfg.prune;
    for (AttrId c = 0; c < d.attr_count() && !keep; ++c) {
      if (d.degenerate(c) || c == a || node.contains(c)) continue;
      if (!consequent_permitted(c, cfg)) continue;
      const std::uint64_t j1 = BitVec::and_count(cover, d.column(c));
      const std::uint64_t cap1 = std::min(j1, child_sup);
      if (mi_upper_bound(cap1, d.attr_support(c), d.n()) >= tau) keep = true;
      if (!keep && cfg.polarity == MinerConfig::Polarity::both) {
        const std::uint64_t cap0 = std::min(sup - j1, child_sup);
        if (mi_upper_bound(cap0, d.n() - d.attr_support(c), d.n()) >= tau)
          keep = true;
      }
    }
    if (keep) out.push_back(node.with(a));
  }
  return out;
}

TopKList mine_top_k(const Dataset& d, const MinerConfig& cfg) {
  validate_config(d, cfg);
  Search search(d, cfg);
  for (AttrId a = 0; a < d.attr_count(); ++a)
    if (!d.degenerate(a)) search.live.push_back(a);
  search.permitted.assign(d.attr_count(), 0);
  for (AttrId a : search.live)
    if (consequent_permitted(a, cfg)) search.permitted[a] = 1;
  search.run();
  return std::move(search.topk);
}

}  // namespace specrules
