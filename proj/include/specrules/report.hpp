#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specrules/rules.hpp"
#include "specrules/specdetect.hpp"

namespace specrules {

// Fixed-precision outputs: floating columns carry 6 significant digits.
std::string fmt_g6(double v);

// rank, antecedent (names joined with '&'), consequent, polarity, n_q, n_c,
// n_qc, M, leverage. One row per rule, best first.
void write_rules_tsv(const std::string& path, const std::vector<Rule>& rules,
                     const Dataset& d);

// Parses a rules TSV back against its dataset: names are resolved, counts
// and measure values recomputed (full precision) and cross-checked against
// the file, and strict rank order enforced. Throws DataError on any mismatch.
TopKList read_rules_tsv(const std::string& path, const Dataset& d);

// Rule columns plus verdict, mediator_rank, delta1, delta2, mi_s, p_b,
// equivalence_form ('-' where not applicable).
void write_verdicts_tsv(const std::string& path,
                        const std::vector<Rule>& rules,
                        const std::vector<Verdict>& verdicts,
                        const Dataset& d);

struct RunMeta {
  std::string input_path;
  std::string input_format;           // "fimi" | "csv"
  std::optional<std::string> rules_path;  // set when rules came from a file
  MinerConfig miner;
  std::optional<DetectConfig> detect;
  std::optional<double> tau;
  std::optional<std::size_t> boundary_ties;
  double load_ms = 0.0;
  double mine_ms = 0.0;               // or rule-file read time
  double detect_ms = 0.0;
  double total_ms = 0.0;
};

// Machine-readable run summary. With verdicts: per-kind counts and
// proportions, aggregate profiles of specious (reversal/nested/weak kinds)
// vs unflagged rules, evidence means, and the count of weak-signal prunes
// whose exact tail probability still fell below alpha (expected 0).
std::string summary_json(const Dataset& d, const std::vector<Rule>& rules,
                         const std::vector<Verdict>* verdicts,
                         const RunMeta& meta);

}  // namespace specrules
