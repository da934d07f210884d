#pragma once

#include <vector>

#include "specrules/rules.hpp"

namespace specrules {

// Exhaustive-equivalent top-K search over antecedent sets. Results are
// exactly the best K admissible rules under rank_before: positive-leverage,
// non-redundant, canonically oriented. Throws std::invalid_argument for
// unusable datasets, k == 0, and malformed config (bad consequent ids,
// zero antecedent budget).
TopKList mine_top_k(const Dataset& d, const MinerConfig& cfg);

// A candidate is redundant when some rule on a proper subset of its
// antecedent (same consequent and polarity, positive leverage) already
// reaches at least the candidate's goodness. Direct recomputation, no memo;
// the miner uses an equivalent memoized path that tests cross-check.
bool is_redundant(const Dataset& d, const Rule& candidate);

// Children of a search node worth visiting at admission threshold tau:
// canonical extensions (strictly larger attr id), nonzero support, and an
// admissible goodness bound >= tau for at least one permitted consequent.
// A child with no permitted consequent left is dropped at any tau, since its
// subtree cannot produce a rule; with pruning disabled children are kept on
// support alone.
std::vector<AttributeSet> expand_frontier(const Dataset& d,
                                          const AttributeSet& node, double tau,
                                          const MinerConfig& cfg);

// Shared admission rule for miner and oracles: evaluates the candidate
// antecedent/consequent pair on the dataset and returns the canonically
// oriented Rule if it is admissible (positive leverage in some permitted
// polarity, canonical orientation for single-single pairs), or nullopt.
std::optional<Rule> evaluate_candidate(const Dataset& d,
                                       const AttributeSet& antecedent,
                                       AttrId consequent,
                                       const MinerConfig& cfg);

}  // namespace specrules
