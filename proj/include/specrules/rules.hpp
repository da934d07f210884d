#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "specrules/dataset.hpp"

namespace specrules {

// A mined dependency rule: antecedent conjunction -> consequent = polarity.
// n_c and n_qc are taken toward the polarity (n_c counts rows where the
// consequent literal holds). Stored rules always have leverage > 0.
struct Rule {
  AttributeSet antecedent;
  AttrId consequent = 0;
  int polarity = 1;
  std::uint64_t n_q = 0;
  std::uint64_t n_c = 0;
  std::uint64_t n_qc = 0;
  double goodness = 0.0;  // count-scaled MI of the rule table
  double lev = 0.0;       // leverage toward the polarity

  bool operator==(const Rule& o) const {
    return antecedent == o.antecedent && consequent == o.consequent &&
           polarity == o.polarity;
  }
};

// Deterministic total order, best rule first: goodness desc, antecedent
// support desc, antecedent size asc, antecedent lexicographic asc,
// consequent id asc, polarity asc. Every ranking and every output listing
// uses this single order, so ties cannot reshuffle between runs.
bool rank_before(const Rule& a, const Rule& b);

struct RankLess {
  bool operator()(const Rule& a, const Rule& b) const {
    return rank_before(a, b);
  }
};

// Bounded best-K container. offer() keeps the best K rules under rank_before
// and tracks boundary ties: candidates whose goodness equals the final
// threshold but which lost their slot purely on tie-break.
class TopKList {
 public:
  explicit TopKList(std::size_t k);

  // Validates strict rank order and size <= k; used by rule-file readers.
  static TopKList from_sorted(std::vector<Rule> rules, std::size_t k);

  std::size_t k() const { return k_; }
  bool full() const { return set_.size() >= k_; }
  std::size_t size() const { return set_.size(); }

  // Admission threshold: goodness of the worst kept rule once full,
  // -infinity before that.
  double tau() const {
    return full() ? std::prev(set_.end())->goodness
                  : -std::numeric_limits<double>::infinity();
  }

  // True if the rule was admitted (possibly ejecting the previous worst).
  bool offer(const Rule& r);

  // Best-first snapshot.
  std::vector<Rule> rules() const { return {set_.begin(), set_.end()}; }

  // How many rules tied with tau() lost only on tie-break (ejected or
  // rejected while the boundary goodness equaled the final tau).
  std::size_t boundary_ties() const;

 private:
  std::size_t k_;
  std::set<Rule, RankLess> set_;
  std::vector<double> edge_goodness_;  // goodness of tie-break losers
};

struct MinerConfig {
  std::size_t k = 100;
  std::optional<std::size_t> max_antecedent;          // nullopt: unbounded
  std::optional<std::vector<AttrId>> consequents;     // nullopt: all attrs
  enum class Polarity { both, positive_only };
  Polarity polarity = Polarity::both;
  unsigned threads = 1;
  bool prune = true;  // disable only to self-check the bound
};

}  // namespace specrules
