#pragma once
// Shared randomized-fixture generators and the independent all-pairs
// detector. Everything here is deliberately naive — linear scans, direct
// recomputation, no caching, no early-outs beyond what the semantics demand —
// so the optimized engine has something honest to be compared against.

#include <cstdint>
#include <random>
#include <vector>

#include "specrules/dataset.hpp"
#include "specrules/rules.hpp"
#include "specrules/specdetect.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

// Consistent random 2x2x2 table: n rows thrown into the eight cells with
// random weights; occasionally cells are zeroed to hit degenerate strata and
// empty margins.
specrules::PairCounts random_pair_counts(Rng& rng, std::uint64_t max_n);

// Random binary dataset with 2..max_attrs attributes and 4..max_rows rows.
// Some columns are noisy copies or complements of earlier ones so that real
// dependencies (and equivalences) actually occur.
specrules::Dataset random_dataset(Rng& rng, std::size_t max_attrs,
                                  std::uint64_t max_rows);

// Plain transcription of the detection semantics: for each rule, walk every
// better-ranked rule in order; align, filter by orientation, run the case
// ladder; the first definite verdict wins. Pending reversal cases prune when
// some rule without a definite verdict carries the X'/Q' dependency.
std::vector<specrules::Verdict> brute_force_detect(
    const std::vector<specrules::Rule>& rules, const specrules::Dataset& d,
    double theta);

}  // namespace testsupport
