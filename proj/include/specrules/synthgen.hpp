#pragma once

#include <cstdint>
#include <utility>

#include "specrules/dataset.hpp"
#include "specrules/rules.hpp"

namespace specrules {

// Recipe for a planted reversal: a confounder X drives both Q and C, while
// inside each X-stratum Q and C are (weakly) negatively associated. The
// rounded integer counts are verified exactly; nearby joint counts are tried
// when rounding breaks a constraint.
struct PlantSpec {
  std::uint64_t n = 1000;
  double p_x = 0.5;
  double p_q_given_x = 0.75;
  double p_q_given_notx = 0.25;
  double p_c_given_x = 0.75;
  double p_c_given_notx = 0.25;
  // Target within-stratum conditional leverages (fractions of n), <= 0.
  double delta1 = -0.00625;
  double delta2 = -0.00625;
  std::size_t noise_attrs = 0;
  double noise_density = 0.3;
  std::uint64_t seed = 0;
};

// Ground truth emitted alongside a planted dataset.
struct PlantTruth {
  AttrId x = 0;  // confounder column
  AttrId q = 1;  // planted antecedent
  AttrId c = 2;  // planted consequent
  int polarity = 1;
  PairCounts counts;   // counts of (X, Q, C=1) as planted
  double delta_qc = 0; // positive marginal leverage of Q -> C
  double delta1 = 0;   // realized conditional leverages (<= 0)
  double delta2 = 0;
};

// Deterministic in the spec (same spec -> identical dataset bytes).
// Throws UnrealizableError when no nearby integer table satisfies the plant.
std::pair<Dataset, PlantTruth> plant_simpson(const PlantSpec& spec);

enum class EquivMode { copy, complement };

// Returns a new dataset with one appended column equal to (or the exact
// complement of) the source attribute; name is derived from the source.
Dataset plant_equivalent(const Dataset& d, AttrId source, EquivMode mode);

// Independent slow path for the exact conditional tail probability: direct
// double sum of two hypergeometric pmfs built from a long-double Pascal
// triangle (additions only). Guard: n <= 200.
double brute_force_birch(const PairCounts& pc);

// Exhaustive top-K reference: enumerates every antecedent set and consequent,
// applies the shared admission rule and the direct redundancy test, and keeps
// the best K under rank_before. Guard: attr_count <= 16.
TopKList brute_force_top_k(const Dataset& d, const MinerConfig& cfg);

}  // namespace specrules
