// Command-line front end: mine / detect / synth. Talks to the engine
// exclusively through the shared-library C API.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specrules/specrules.h"

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct DatasetFree {
  void operator()(sr_dataset* p) const { sr_dataset_free(p); }
};
struct RulesFree {
  void operator()(sr_rules* p) const { sr_rules_free(p); }
};
struct VerdictsFree {
  void operator()(sr_verdicts* p) const { sr_verdicts_free(p); }
};
struct StringFree {
  void operator()(char* p) const { sr_string_free(p); }
};
using DatasetPtr = std::unique_ptr<sr_dataset, DatasetFree>;
using RulesPtr = std::unique_ptr<sr_rules, RulesFree>;
using VerdictsPtr = std::unique_ptr<sr_verdicts, VerdictsFree>;
using StringPtr = std::unique_ptr<char, StringFree>;

// Exit codes: 0 success, 1 usage error, 2 data/IO error, 3 unrealizable spec.
int exit_code_for(sr_status st) {
  switch (st) {
    case SR_OK:
      return 0;
    case SR_ERR_INVALID:
      return 1;
    case SR_ERR_UNREALIZABLE:
      return 3;
    default:
      return 2;
  }
}

int fail_api(sr_status st) {
  std::fprintf(stderr, "specrules: %s\n", sr_last_error());
  return exit_code_for(st);
}

int usage_error(const std::string& msg) {
  std::fprintf(stderr, "specrules: %s\n", msg.c_str());
  return 1;
}

sr_format format_of(const std::string& name) {
  return name == "csv" ? SR_FORMAT_CSV : SR_FORMAT_FIMI;
}

// Empty path means stdout.
int emit_text(const std::string& path, const char* text) {
  if (path.empty()) {
    std::fputs(text, stdout);
    return 0;
  }
  std::ofstream out(path);
  out << text;
  out.close();
  if (!out) {
    std::fprintf(stderr, "specrules: cannot write %s\n", path.c_str());
    return 2;
  }
  return 0;
}

bool resolve_attrs(const sr_dataset* d, const std::vector<std::string>& names,
                   std::vector<uint32_t>& ids, std::string& err) {
  ids.clear();
  for (const std::string& name : names) {
    const int64_t idx = sr_dataset_attr_index(d, name.c_str());
    if (idx < 0) {
      err = "unknown attribute: " + name;
      return false;
    }
    ids.push_back(static_cast<uint32_t>(idx));
  }
  return true;
}

struct MineOpts {
  std::string input;
  std::string format = "fimi";
  std::size_t top_k = 100;
  std::size_t max_antecedent = 0;  // 0 = unbounded
  std::vector<std::string> consequents;
  std::string polarity = "both";
  unsigned threads = 1;
  std::string output;
  std::string summary;  // empty = stdout
};

void add_miner_flags(CLI::App* cmd, MineOpts& o) {
  cmd->add_option("--top-k", o.top_k, "How many rules to keep")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-antecedent", o.max_antecedent,
                  "Cap on antecedent size (0 = unbounded)")
      ->capture_default_str();
  cmd->add_option("--consequents", o.consequents,
                  "Restrict consequents to these attribute names")
      ->delimiter(',');
  cmd->add_option("--polarity", o.polarity,
                  "Consequent polarities to consider")
      ->check(CLI::IsMember({"both", "positive"}))
      ->capture_default_str();
}

void add_io_flags(CLI::App* cmd, MineOpts& o, const char* output_help) {
  cmd->add_option("-i,--input", o.input, "Input dataset path")->required();
  cmd->add_option("--format", o.format, "Input format")
      ->check(CLI::IsMember({"fimi", "csv"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("-o,--output", o.output, output_help)->required();
  cmd->add_option("--summary", o.summary,
                  "Write the run summary JSON here instead of stdout");
}

int load_dataset(const MineOpts& o, DatasetPtr& d, double& load_ms) {
  const auto t0 = Clock::now();
  sr_dataset* raw = nullptr;
  const sr_status st =
      sr_dataset_load(o.input.c_str(), format_of(o.format), &raw);
  if (st != SR_OK) return fail_api(st);
  d.reset(raw);
  load_ms = ms_since(t0);
  return 0;
}

int mine_rules(const DatasetPtr& d, const MineOpts& o, RulesPtr& rules,
               double& mine_ms) {
  std::vector<uint32_t> cons;
  std::string err;
  if (!resolve_attrs(d.get(), o.consequents, cons, err))
    return usage_error(err);
  const sr_miner_config mc{o.top_k,
                           o.max_antecedent,
                           cons.empty() ? nullptr : cons.data(),
                           cons.size(),
                           o.polarity == "positive" ? 1 : 0,
                           o.threads};
  const auto t0 = Clock::now();
  sr_rules* raw = nullptr;
  const sr_status st = sr_mine(d.get(), &mc, &raw);
  if (st != SR_OK) return fail_api(st);
  rules.reset(raw);
  mine_ms = ms_since(t0);
  return 0;
}

int run_mine(const MineOpts& o) {
  const auto t_total = Clock::now();
  DatasetPtr d;
  RulesPtr rules;
  double load_ms = 0, mine_ms = 0;
  if (int rc = load_dataset(o, d, load_ms)) return rc;
  if (int rc = mine_rules(d, o, rules, mine_ms)) return rc;

  sr_status st = sr_rules_write_tsv(rules.get(), d.get(), o.output.c_str());
  if (st != SR_OK) return fail_api(st);

  const json meta = {{"input_path", o.input},   {"input_format", o.format},
                     {"threads", o.threads},    {"load_ms", load_ms},
                     {"mine_ms", mine_ms},      {"total_ms", ms_since(t_total)}};
  char* text = nullptr;
  st = sr_summary_json(d.get(), rules.get(), nullptr, 0.0, 0.0,
                       meta.dump().c_str(), &text);
  if (st != SR_OK) return fail_api(st);
  StringPtr owned(text);
  return emit_text(o.summary, text);
}

int run_detect(const MineOpts& o, const std::string& rules_path, double theta,
               double alpha) {
  const auto t_total = Clock::now();
  DatasetPtr d;
  RulesPtr rules;
  double load_ms = 0, mine_ms = 0;
  if (int rc = load_dataset(o, d, load_ms)) return rc;

  if (!rules_path.empty()) {
    const auto t0 = Clock::now();
    sr_rules* raw = nullptr;
    const sr_status st = sr_rules_read_tsv(rules_path.c_str(), d.get(), &raw);
    if (st != SR_OK) return fail_api(st);
    rules.reset(raw);
    mine_ms = ms_since(t0);
  } else {
    if (int rc = mine_rules(d, o, rules, mine_ms)) return rc;
  }

  const auto t0 = Clock::now();
  sr_verdicts* vraw = nullptr;
  sr_status st = sr_detect(d.get(), rules.get(), theta, alpha, o.threads, &vraw);
  if (st != SR_OK) return fail_api(st);
  VerdictsPtr verdicts(vraw);
  const double detect_ms = ms_since(t0);

  st = sr_verdicts_write_tsv(verdicts.get(), rules.get(), d.get(),
                             o.output.c_str());
  if (st != SR_OK) return fail_api(st);

  json meta = {{"input_path", o.input},   {"input_format", o.format},
               {"threads", o.threads},    {"load_ms", load_ms},
               {"mine_ms", mine_ms},      {"detect_ms", detect_ms},
               {"total_ms", ms_since(t_total)}};
  if (!rules_path.empty()) meta["rules_path"] = rules_path;
  char* text = nullptr;
  st = sr_summary_json(d.get(), rules.get(), verdicts.get(), theta, alpha,
                       meta.dump().c_str(), &text);
  if (st != SR_OK) return fail_api(st);
  StringPtr owned(text);
  return emit_text(o.summary, text);
}

struct SynthOpts {
  std::string kind;
  std::string output;
  std::string format = "fimi";
  std::string truth;  // default: <output>.truth.json
  // reversal plant
  uint64_t rows = 1000;
  double p_x = 0.5;
  double p_q_given_x = 0.75, p_q_given_notx = 0.25;
  double p_c_given_x = 0.75, p_c_given_notx = 0.25;
  double delta1 = -0.00625, delta2 = -0.00625;
  std::size_t noise_attrs = 0;
  double noise_density = 0.3;
  uint64_t seed = 0;
  // equivalence plant
  std::string input;
  std::string source_attr;
  std::string mode = "copy";
};

int write_synth_outputs(const SynthOpts& s, sr_dataset* d, char* truth) {
  const sr_status st = sr_dataset_write(d, s.output.c_str(), format_of(s.format));
  if (st != SR_OK) return fail_api(st);
  const std::string tp = s.truth.empty() ? s.output + ".truth.json" : s.truth;
  return emit_text(tp, truth);
}

int run_synth(const SynthOpts& s) {
  if (s.kind == "simpson") {
    const sr_plant_spec ps{s.rows,          s.p_x,
                           s.p_q_given_x,   s.p_q_given_notx,
                           s.p_c_given_x,   s.p_c_given_notx,
                           s.delta1,        s.delta2,
                           s.noise_attrs,   s.noise_density,
                           s.seed};
    sr_dataset* draw = nullptr;
    char* traw = nullptr;
    const sr_status st = sr_plant_simpson(&ps, &draw, &traw);
    if (st != SR_OK) return fail_api(st);
    DatasetPtr d(draw);
    StringPtr truth(traw);
    return write_synth_outputs(s, d.get(), truth.get());
  }

  // kind == "equiv": append a copy or complement of an existing column.
  if (s.input.empty()) return usage_error("synth --kind equiv needs --input");
  if (s.source_attr.empty())
    return usage_error("synth --kind equiv needs --source-attr");
  sr_dataset* raw = nullptr;
  sr_status st = sr_dataset_load(s.input.c_str(), format_of(s.format), &raw);
  if (st != SR_OK) return fail_api(st);
  DatasetPtr src(raw);
  const int64_t source = sr_dataset_attr_index(src.get(), s.source_attr.c_str());
  if (source < 0) return usage_error("unknown attribute: " + s.source_attr);

  sr_dataset* draw = nullptr;
  char* traw = nullptr;
  st = sr_plant_equivalent(src.get(), static_cast<uint32_t>(source),
                           s.mode == "copy" ? SR_EQUIV_COPY
                                            : SR_EQUIV_COMPLEMENT,
                           &draw, &traw);
  if (st != SR_OK) return fail_api(st);
  DatasetPtr d(draw);
  StringPtr truth(traw);
  return write_synth_outputs(s, d.get(), truth.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-K statistical dependency rules, with detection of rules "
               "whose dependency vanishes or reverses under conditioning"};
  app.require_subcommand(1);

  MineOpts mine_opts;
  CLI::App* mine = app.add_subcommand("mine", "Mine the top-K dependency rules");
  add_io_flags(mine, mine_opts, "Write the ranked rules TSV here");
  add_miner_flags(mine, mine_opts);

  MineOpts detect_opts;
  std::string rules_path;
  double theta = 0.5, alpha = 0.05;
  CLI::App* detect = app.add_subcommand(
      "detect", "Judge each mined rule against the better-ranked rules");
  add_io_flags(detect, detect_opts, "Write the per-rule verdict TSV here");
  add_miner_flags(detect, detect_opts);
  detect->add_option("--rules", rules_path,
                     "Reuse a rules TSV from a previous mine run "
                     "(otherwise mines first)");
  detect->add_option("--theta", theta,
                     "Conditional-signal threshold (count-scaled MI)")
      ->capture_default_str();
  detect->add_option("--alpha", alpha,
                     "Reporting threshold for the exact tail probability")
      ->capture_default_str();

  SynthOpts synth_opts;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a dataset with planted structure");
  synth->add_option("--kind", synth_opts.kind, "What to plant")
      ->check(CLI::IsMember({"simpson", "equiv"}))
      ->required();
  synth->add_option("-o,--output", synth_opts.output, "Output dataset path")
      ->required();
  synth->add_option("--format", synth_opts.format,
                    "Dataset format (for --input and --output)")
      ->check(CLI::IsMember({"fimi", "csv"}))
      ->capture_default_str();
  synth->add_option("--truth", synth_opts.truth,
                    "Ground-truth sidecar path (default <output>.truth.json)");
  synth->add_option("--rows", synth_opts.rows, "Rows to generate")
      ->capture_default_str();
  synth->add_option("--p-x", synth_opts.p_x, "Confounder marginal")
      ->capture_default_str();
  synth->add_option("--p-q-given-x", synth_opts.p_q_given_x,
                    "P(antecedent | confounder)")
      ->capture_default_str();
  synth->add_option("--p-q-given-notx", synth_opts.p_q_given_notx,
                    "P(antecedent | no confounder)")
      ->capture_default_str();
  synth->add_option("--p-c-given-x", synth_opts.p_c_given_x,
                    "P(consequent | confounder)")
      ->capture_default_str();
  synth->add_option("--p-c-given-notx", synth_opts.p_c_given_notx,
                    "P(consequent | no confounder)")
      ->capture_default_str();
  synth->add_option("--delta1", synth_opts.delta1,
                    "Target conditional leverage inside the confounder stratum")
      ->capture_default_str();
  synth->add_option("--delta2", synth_opts.delta2,
                    "Target conditional leverage outside it")
      ->capture_default_str();
  synth->add_option("--noise-attrs", synth_opts.noise_attrs,
                    "Independent noise attributes to append")
      ->capture_default_str();
  synth->add_option("--noise-density", synth_opts.noise_density,
                    "Bernoulli density of the noise attributes")
      ->capture_default_str();
  synth->add_option("--seed", synth_opts.seed, "Noise RNG seed")
      ->capture_default_str();
  synth->add_option("-i,--input", synth_opts.input,
                    "Source dataset (--kind equiv)");
  synth->add_option("--source-attr", synth_opts.source_attr,
                    "Attribute to duplicate (--kind equiv)");
  synth->add_option("--mode", synth_opts.mode, "Duplicate form (--kind equiv)")
      ->check(CLI::IsMember({"copy", "complement"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // normalize CLI11's parse-error codes
  }

  if (mine->parsed()) return run_mine(mine_opts);
  if (detect->parsed()) return run_detect(detect_opts, rules_path, theta, alpha);
  return run_synth(synth_opts);
}
