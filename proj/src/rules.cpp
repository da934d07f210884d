#include "specrules/rules.hpp"

#include <stdexcept>

#include "specrules/errors.hpp"

namespace specrules {

bool rank_before(const Rule& a, const Rule& b) {
  if (a.goodness != b.goodness) return a.goodness > b.goodness;
  if (a.n_q != b.n_q) return a.n_q > b.n_q;
  if (a.antecedent.size() != b.antecedent.size())
    return a.antecedent.size() < b.antecedent.size();
  if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
  if (a.consequent != b.consequent) return a.consequent < b.consequent;
  return a.polarity < b.polarity;
}

TopKList::TopKList(std::size_t k) : k_(k) {
  if (k == 0) throw std::invalid_argument("top-k size must be positive");
}

TopKList TopKList::from_sorted(std::vector<Rule> rules, std::size_t k) {
  TopKList list(k);
  if (rules.size() > k)
    throw DataError("rule list longer than its declared capacity");
  for (std::size_t i = 1; i < rules.size(); ++i)
    if (!rank_before(rules[i - 1], rules[i]))
      throw DataError("rule list is not in strict rank order at row " +
                      std::to_string(i + 1));
  for (Rule& r : rules) list.set_.insert(std::move(r));
  return list;
}

bool TopKList::offer(const Rule& r) {
  if (!full()) return set_.insert(r).second;
  auto worst = std::prev(set_.end());
  if (!rank_before(r, *worst)) {
    // Rejected; remember it if only the tie-break decided and it is not
    // just a repeat of the kept boundary rule.
    if (r.goodness == worst->goodness && !set_.contains(r))
      edge_goodness_.push_back(r.goodness);
    return false;
  }
  if (!set_.insert(r).second) return false;  // repeat of a kept rule
  worst = std::prev(set_.end());
  edge_goodness_.push_back(worst->goodness);
  set_.erase(worst);
  return true;
}

std::size_t TopKList::boundary_ties() const {
  if (!full()) return 0;
  const double t = tau();
  std::size_t c = 0;
  for (double g : edge_goodness_)
    if (g == t) ++c;
  return c;
}

}  // namespace specrules
