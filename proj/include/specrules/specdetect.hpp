#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specrules/measures.hpp"
#include "specrules/rules.hpp"

namespace specrules {

enum class VerdictKind {
  non_specious,
  type0_equivalent,       // antecedents cover the same rows (or exact complement)
  type1_superfluous,      // generalization of a better nested rule
  type2_reversal,         // marginal dependency reverses inside both strata
  type3_insignificant,    // conditional signal below the theta threshold
};

const char* verdict_name(VerdictKind k);

enum class EquivForm { direct, complement };

// Evidence attached to a specious verdict, all computed on the aligned pair.
struct ConditionalStats {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double mi_s = 0.0;
  double p_b = 1.0;
};

struct Verdict {
  VerdictKind kind = VerdictKind::non_specious;
  // Rank index (0-based) of the mediator inside the judged rule list.
  std::optional<std::size_t> mediator;
  std::optional<ConditionalStats> evidence;
  std::optional<EquivForm> equivalence_form;
};

// A judged/conditioning pair brought into the shared-consequent frame:
// judged rule Q -> consequent = polarity_q, conditioning rule
// X -> consequent = polarity_x. reversed_* record whether each side had to
// swap its single-attribute antecedent with the shared attribute.
struct AlignedPair {
  AttributeSet q;
  AttributeSet x;
  AttrId consequent = 0;
  int polarity_q = 1;
  int polarity_x = 1;
  bool reversed_i = false;
  bool reversed_j = false;
};

// Brings two rules into a shared frame when they touch: same consequent,
// or one rule's consequent equals the other's single-attribute antecedent.
// nullopt when the rules share nothing alignable.
std::optional<AlignedPair> align_pair(const Rule& judged, const Rule& cond);

// Cross-polarity pairs are only worth judging when the two antecedents are
// non-positively associated; a positive association with an opposing
// consequent cannot explain the judged rule away.
bool orientation_keep(const AlignedPair& ap, const Dataset& d);

enum class EquivCheck { not_equivalent, direct, complement };

// cov(X) == cov(Q), or the two covers partition the rows exactly.
EquivCheck check_equivalence(const PairCounts& pc);

// Outcome of judging one aligned pair. `pending` marks the pathological
// reversal margins (n_x == n_xc == n_c) where pruning is only justified if an
// information-preserving rule survives elsewhere in the list; the caller
// resolves those against the surviving set.
struct PairOutcome {
  enum class Status { none, verdict, pending };
  Status status = Status::none;
  Verdict verdict;  // filled for verdict and pending (kind type2_reversal)
};

// Applies the case ladder to one aligned pair: equivalence, then nested
// generalization, then two-sided reversal, then insignificant conditional
// signal. Does not consult other rules; see PairOutcome for the one case
// that must.
PairOutcome classify_pair(const AlignedPair& ap, const Dataset& d,
                          double theta);

// Marginal leverage can survive a two-sided reversal only below this cap:
// delta(Q,C) <= delta(X,Q) * delta(X,C) / (P(x) * P(not x)). Exact integer
// arithmetic on counts toward the judged polarity.
bool ys_bound_holds(const PairCounts& pc);

struct DetectConfig {
  double theta = 0.5;   // conditional-signal threshold (count-scaled MI)
  double alpha = 0.05;  // reporting threshold for the exact tail probability
  unsigned threads = 1;
};

// Judges every rule against all better-ranked rules; the first applicable
// verdict in scan order wins and fixes the mediator, where a pathological
// pending counts only if justified: a rule carrying its X'/Q' dependency
// must itself have drawn no definite verdict. Verdicts depend only on the
// static rule list, so per-rule work parallelizes without changing output.
std::vector<Verdict> spec_detect(const TopKList& rules, const Dataset& d,
                                 const DetectConfig& cfg);

}  // namespace specrules
