// C ABI over the engine: opaque handles, status codes, thread-local error
// text. All exceptions stop at this boundary.
#include "specrules/specrules.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "specrules/dataset.hpp"
#include "specrules/errors.hpp"
#include "specrules/measures.hpp"
#include "specrules/miner.hpp"
#include "specrules/report.hpp"
#include "specrules/rules.hpp"
#include "specrules/specdetect.hpp"
#include "specrules/synthgen.hpp"

using nlohmann::json;

struct sr_dataset {
  specrules::Dataset impl;
};

struct sr_rules {
  std::vector<specrules::Rule> rules;
  // Admission threshold and tie-break losses; ties are only known for lists
  // this process mined (a rules file carries no rejection history).
  std::optional<double> tau;
  std::optional<std::size_t> ties;
  specrules::MinerConfig cfg;
};

struct sr_verdicts {
  std::vector<specrules::Verdict> verdicts;
};

namespace {

thread_local std::string g_last_error;

sr_status fail(sr_status st, std::string msg) {
  g_last_error = std::move(msg);
  return st;
}

sr_status invalid(const char* msg) { return fail(SR_ERR_INVALID, msg); }

template <class F>
sr_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SR_OK;
  } catch (const specrules::IoError& e) {
    return fail(SR_ERR_IO, e.what());
  } catch (const specrules::DataError& e) {
    return fail(SR_ERR_DATA, e.what());
  } catch (const specrules::UnrealizableError& e) {
    return fail(SR_ERR_UNREALIZABLE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SR_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(SR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SR_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Ids coming over the C boundary are unchecked; reject before they can index
// out of range.
specrules::AttributeSet make_set(const sr_dataset* d, const std::uint32_t* ids,
                                 std::size_t len) {
  std::vector<specrules::AttrId> v;
  v.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (ids[i] >= d->impl.attr_count())
      throw std::invalid_argument("attribute id out of range: " +
                                  std::to_string(ids[i]));
    v.push_back(ids[i]);
  }
  return specrules::AttributeSet(std::move(v));
}

specrules::PairCounts from_c(const sr_pair_counts& pc) {
  if ((pc.polarity_q != 0 && pc.polarity_q != 1) ||
      (pc.polarity_x != 0 && pc.polarity_x != 1))
    throw std::invalid_argument("polarity must be 0 or 1");
  specrules::PairCounts out;
  out.n = pc.n;
  out.n_x = pc.n_x;
  out.n_q = pc.n_q;
  out.n_c = pc.n_c;
  out.n_xq = pc.n_xq;
  out.n_xc = pc.n_xc;
  out.n_qc = pc.n_qc;
  out.n_xqc = pc.n_xqc;
  out.polarity_q = pc.polarity_q;
  out.polarity_x = pc.polarity_x;
  return out;
}

specrules::MinerConfig from_c(const sr_dataset* d, const sr_miner_config& c) {
  specrules::MinerConfig cfg;
  cfg.k = c.top_k;
  if (c.max_antecedent > 0) cfg.max_antecedent = c.max_antecedent;
  if (c.consequents != nullptr && c.consequents_len > 0) {
    std::vector<specrules::AttrId> ids;
    ids.reserve(c.consequents_len);
    for (std::size_t i = 0; i < c.consequents_len; ++i) {
      if (c.consequents[i] >= d->impl.attr_count())
        throw std::invalid_argument("consequent id out of range: " +
                                    std::to_string(c.consequents[i]));
      ids.push_back(c.consequents[i]);
    }
    cfg.consequents = std::move(ids);
  }
  cfg.polarity = c.positive_only
                     ? specrules::MinerConfig::Polarity::positive_only
                     : specrules::MinerConfig::Polarity::both;
  cfg.threads = c.threads == 0 ? 1 : c.threads;
  return cfg;
}

specrules::TopKList as_topk(const sr_rules* r) {
  return specrules::TopKList::from_sorted(r->rules,
                                          std::max<std::size_t>(r->rules.size(), 1));
}

double opt_number(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number())
    throw std::invalid_argument(std::string("meta_json: ") + key +
                                " must be a number");
  return it->get<double>();
}

std::string opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return "";
  if (!it->is_string())
    throw std::invalid_argument(std::string("meta_json: ") + key +
                                " must be a string");
  return it->get<std::string>();
}

}  // namespace

extern "C" {

const char* sr_last_error(void) { return g_last_error.c_str(); }

const char* sr_version(void) { return "0.1.0"; }

void sr_string_free(char* s) { delete[] s; }

/* ---------------------------------------------------------------- datasets */

sr_status sr_dataset_load(const char* path, sr_format format,
                          sr_dataset** out) {
  if (!path || !out) return invalid("sr_dataset_load: null argument");
  if (format != SR_FORMAT_FIMI && format != SR_FORMAT_CSV)
    return invalid("sr_dataset_load: unknown format");
  return guarded([&] {
    specrules::Dataset d = format == SR_FORMAT_FIMI
                               ? specrules::Dataset::load_fimi(path)
                               : specrules::Dataset::load_csv(path);
    *out = new sr_dataset{std::move(d)};
  });
}

sr_status sr_dataset_write(const sr_dataset* d, const char* path,
                           sr_format format) {
  if (!d || !path) return invalid("sr_dataset_write: null argument");
  if (format != SR_FORMAT_FIMI && format != SR_FORMAT_CSV)
    return invalid("sr_dataset_write: unknown format");
  return guarded([&] {
    if (format == SR_FORMAT_FIMI)
      d->impl.write_fimi(path);
    else
      d->impl.write_csv(path);
  });
}

void sr_dataset_free(sr_dataset* d) { delete d; }

uint64_t sr_dataset_rows(const sr_dataset* d) { return d ? d->impl.n() : 0; }

uint32_t sr_dataset_attrs(const sr_dataset* d) {
  return d ? static_cast<uint32_t>(d->impl.attr_count()) : 0;
}

const char* sr_dataset_attr_name(const sr_dataset* d, uint32_t attr) {
  if (!d || attr >= d->impl.attr_count()) return nullptr;
  return d->impl.attr_name(attr).c_str();
}

int64_t sr_dataset_attr_index(const sr_dataset* d, const char* name) {
  if (!d || !name) return -1;
  auto idx = d->impl.attr_index(name);
  return idx ? static_cast<int64_t>(*idx) : -1;
}

double sr_dataset_mean_transaction_length(const sr_dataset* d) {
  return d ? d->impl.mean_transaction_length() : 0.0;
}

sr_status sr_dataset_support(const sr_dataset* d, const uint32_t* attrs,
                             size_t len, uint64_t* out) {
  if (!d || !out || (len > 0 && !attrs))
    return invalid("sr_dataset_support: null argument");
  return guarded([&] { *out = d->impl.support(make_set(d, attrs, len)); });
}

sr_status sr_dataset_pair_counts(const sr_dataset* d, const uint32_t* x,
                                 size_t x_len, const uint32_t* q, size_t q_len,
                                 uint32_t consequent, int polarity,
                                 sr_pair_counts* out) {
  if (!d || !out || (x_len > 0 && !x) || (q_len > 0 && !q))
    return invalid("sr_dataset_pair_counts: null argument");
  if (polarity != 0 && polarity != 1)
    return invalid("sr_dataset_pair_counts: polarity must be 0 or 1");
  return guarded([&] {
    if (consequent >= d->impl.attr_count())
      throw std::invalid_argument("consequent id out of range");
    specrules::PairCounts pc = d->impl.pair_counts(
        make_set(d, x, x_len), make_set(d, q, q_len), consequent, polarity);
    *out = sr_pair_counts{pc.n,    pc.n_x,  pc.n_q,  pc.n_c,
                          pc.n_xq, pc.n_xc, pc.n_qc, pc.n_xqc,
                          pc.polarity_q, pc.polarity_x};
  });
}

/* ---------------------------------------------------------------- measures */

sr_status sr_leverage(uint64_t n, uint64_t n_q, uint64_t n_c, uint64_t n_qc,
                      double* out) {
  if (!out) return invalid("sr_leverage: null out");
  return guarded([&] { *out = specrules::leverage(n, n_q, n_c, n_qc); });
}

sr_status sr_rule_mi(uint64_t n, uint64_t n_q, uint64_t n_c, uint64_t n_qc,
                     double* out) {
  if (!out) return invalid("sr_rule_mi: null out");
  return guarded([&] { *out = specrules::rule_mi(n, n_q, n_c, n_qc); });
}

sr_status sr_conditional_leverages(const sr_pair_counts* pc, double* delta1,
                                   double* delta2) {
  if (!pc || !delta1 || !delta2)
    return invalid("sr_conditional_leverages: null argument");
  return guarded([&] {
    auto [d1, d2] = specrules::conditional_leverages(from_c(*pc));
    *delta1 = d1;
    *delta2 = d2;
  });
}

sr_status sr_conditional_mi(const sr_pair_counts* pc, double* out) {
  if (!pc || !out) return invalid("sr_conditional_mi: null argument");
  return guarded([&] { *out = specrules::conditional_mi(from_c(*pc)); });
}

sr_status sr_signed_conditional_mi(const sr_pair_counts* pc, double* out) {
  if (!pc || !out) return invalid("sr_signed_conditional_mi: null argument");
  return guarded([&] { *out = specrules::signed_conditional_mi(from_c(*pc)); });
}

sr_status sr_birch_p(const sr_pair_counts* pc, double* out) {
  if (!pc || !out) return invalid("sr_birch_p: null argument");
  return guarded([&] { *out = specrules::birch_p(from_c(*pc)); });
}

sr_status sr_mi_upper_bound(uint64_t n_q, uint64_t n_c, uint64_t n,
                            double* out) {
  if (!out) return invalid("sr_mi_upper_bound: null out");
  return guarded([&] { *out = specrules::mi_upper_bound(n_q, n_c, n); });
}

/* ------------------------------------------------------------------ mining */

sr_status sr_mine(const sr_dataset* d, const sr_miner_config* cfg,
                  sr_rules** out) {
  if (!d || !cfg || !out) return invalid("sr_mine: null argument");
  return guarded([&] {
    specrules::MinerConfig mc = from_c(d, *cfg);
    specrules::TopKList list = specrules::mine_top_k(d->impl, mc);
    auto* r = new sr_rules{list.rules(), std::nullopt, list.boundary_ties(),
                           std::move(mc)};
    if (list.full()) r->tau = list.tau();
    *out = r;
  });
}

void sr_rules_free(sr_rules* r) { delete r; }

size_t sr_rules_count(const sr_rules* r) { return r ? r->rules.size() : 0; }

double sr_rules_tau(const sr_rules* r) {
  if (!r || !r->tau) return -std::numeric_limits<double>::infinity();
  return *r->tau;
}

size_t sr_rules_boundary_ties(const sr_rules* r) {
  return r && r->ties ? *r->ties : 0;
}

sr_status sr_rules_get(const sr_rules* r, size_t rank, sr_rule_info* out) {
  if (!r || !out) return invalid("sr_rules_get: null argument");
  if (rank >= r->rules.size()) return invalid("sr_rules_get: rank out of range");
  const specrules::Rule& rule = r->rules[rank];
  out->antecedent = rule.antecedent.members().data();
  out->antecedent_len = rule.antecedent.size();
  out->consequent = rule.consequent;
  out->polarity = rule.polarity;
  out->n_q = rule.n_q;
  out->n_c = rule.n_c;
  out->n_qc = rule.n_qc;
  out->goodness = rule.goodness;
  out->leverage = rule.lev;
  return SR_OK;
}

sr_status sr_rules_write_tsv(const sr_rules* r, const sr_dataset* d,
                             const char* path) {
  if (!r || !d || !path) return invalid("sr_rules_write_tsv: null argument");
  return guarded([&] { specrules::write_rules_tsv(path, r->rules, d->impl); });
}

sr_status sr_rules_read_tsv(const char* path, const sr_dataset* d,
                            sr_rules** out) {
  if (!path || !d || !out) return invalid("sr_rules_read_tsv: null argument");
  return guarded([&] {
    specrules::TopKList list = specrules::read_rules_tsv(path, d->impl);
    specrules::MinerConfig cfg;
    cfg.k = list.k();
    auto* r = new sr_rules{list.rules(), std::nullopt, std::nullopt,
                           std::move(cfg)};
    if (list.full()) r->tau = list.tau();
    *out = r;
  });
}

/* --------------------------------------------------------------- detection */

sr_status sr_detect(const sr_dataset* d, const sr_rules* rules, double theta,
                    double alpha, unsigned threads, sr_verdicts** out) {
  if (!d || !rules || !out) return invalid("sr_detect: null argument");
  return guarded([&] {
    specrules::DetectConfig cfg;
    cfg.theta = theta;
    cfg.alpha = alpha;
    cfg.threads = threads == 0 ? 1 : threads;
    if (rules->rules.empty()) {
      *out = new sr_verdicts{};
      return;
    }
    *out = new sr_verdicts{
        specrules::spec_detect(as_topk(rules), d->impl, cfg)};
  });
}

void sr_verdicts_free(sr_verdicts* v) { delete v; }

size_t sr_verdicts_count(const sr_verdicts* v) {
  return v ? v->verdicts.size() : 0;
}

sr_status sr_verdicts_get(const sr_verdicts* v, size_t rank,
                          sr_verdict_info* out) {
  if (!v || !out) return invalid("sr_verdicts_get: null argument");
  if (rank >= v->verdicts.size())
    return invalid("sr_verdicts_get: rank out of range");
  const specrules::Verdict& verdict = v->verdicts[rank];
  switch (verdict.kind) {
    case specrules::VerdictKind::non_specious:
      out->kind = SR_VERDICT_NONE;
      break;
    case specrules::VerdictKind::type0_equivalent:
      out->kind = SR_VERDICT_EQUIVALENT;
      break;
    case specrules::VerdictKind::type1_superfluous:
      out->kind = SR_VERDICT_SUPERFLUOUS;
      break;
    case specrules::VerdictKind::type2_reversal:
      out->kind = SR_VERDICT_REVERSAL;
      break;
    case specrules::VerdictKind::type3_insignificant:
      out->kind = SR_VERDICT_INSIGNIFICANT;
      break;
  }
  out->mediator =
      verdict.mediator ? static_cast<int64_t>(*verdict.mediator) : -1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (verdict.evidence) {
    out->delta1 = verdict.evidence->delta1;
    out->delta2 = verdict.evidence->delta2;
    out->mi_s = verdict.evidence->mi_s;
    out->p_b = verdict.evidence->p_b;
  } else {
    out->delta1 = out->delta2 = out->mi_s = out->p_b = nan;
  }
  if (verdict.equivalence_form)
    out->equivalence_form =
        *verdict.equivalence_form == specrules::EquivForm::direct ? 0 : 1;
  else
    out->equivalence_form = -1;
  return SR_OK;
}

sr_status sr_verdicts_write_tsv(const sr_verdicts* v, const sr_rules* rules,
                                const sr_dataset* d, const char* path) {
  if (!v || !rules || !d || !path)
    return invalid("sr_verdicts_write_tsv: null argument");
  if (v->verdicts.size() != rules->rules.size())
    return invalid("sr_verdicts_write_tsv: verdicts do not match rules");
  return guarded([&] {
    specrules::write_verdicts_tsv(path, rules->rules, v->verdicts, d->impl);
  });
}

sr_status sr_summary_json(const sr_dataset* d, const sr_rules* rules,
                          const sr_verdicts* verdicts, double theta,
                          double alpha, const char* meta_json, char** out) {
  if (!d || !rules || !out) return invalid("sr_summary_json: null argument");
  if (verdicts && verdicts->verdicts.size() != rules->rules.size())
    return invalid("sr_summary_json: verdicts do not match rules");
  return guarded([&] {
    json meta = json::object();
    if (meta_json) {
      meta = json::parse(meta_json, nullptr, false);
      if (meta.is_discarded() || !meta.is_object())
        throw std::invalid_argument("meta_json: not a JSON object");
    }
    specrules::RunMeta rm;
    rm.input_path = opt_string(meta, "input_path");
    rm.input_format = opt_string(meta, "input_format");
    std::string rp = opt_string(meta, "rules_path");
    if (!rp.empty()) rm.rules_path = rp;
    rm.miner = rules->cfg;
    const double threads = opt_number(meta, "threads", rules->cfg.threads);
    rm.miner.threads = static_cast<unsigned>(threads);
    if (verdicts) {
      specrules::DetectConfig dc;
      dc.theta = theta;
      dc.alpha = alpha;
      dc.threads = static_cast<unsigned>(threads);
      rm.detect = dc;
    }
    rm.tau = rules->tau;
    rm.boundary_ties = rules->ties;
    rm.load_ms = opt_number(meta, "load_ms", 0.0);
    rm.mine_ms = opt_number(meta, "mine_ms", 0.0);
    rm.detect_ms = opt_number(meta, "detect_ms", 0.0);
    rm.total_ms = opt_number(meta, "total_ms", 0.0);
    *out = dup_string(specrules::summary_json(
        d->impl, rules->rules, verdicts ? &verdicts->verdicts : nullptr, rm));
  });
}

/* --------------------------------------------------------------- synthesis */

sr_status sr_plant_simpson(const sr_plant_spec* spec, sr_dataset** out,
                           char** truth_json) {
  if (!spec || !out) return invalid("sr_plant_simpson: null argument");
  return guarded([&] {
    specrules::PlantSpec ps;
    ps.n = spec->n;
    ps.p_x = spec->p_x;
    ps.p_q_given_x = spec->p_q_given_x;
    ps.p_q_given_notx = spec->p_q_given_notx;
    ps.p_c_given_x = spec->p_c_given_x;
    ps.p_c_given_notx = spec->p_c_given_notx;
    ps.delta1 = spec->delta1;
    ps.delta2 = spec->delta2;
    ps.noise_attrs = spec->noise_attrs;
    ps.noise_density = spec->noise_density;
    ps.seed = spec->seed;
    auto [ds, truth] = specrules::plant_simpson(ps);
    if (truth_json) {
      json t;
      t["x"] = truth.x;
      t["q"] = truth.q;
      t["c"] = truth.c;
      t["polarity"] = truth.polarity;
      t["counts"] = {{"n", truth.counts.n},       {"n_x", truth.counts.n_x},
                     {"n_q", truth.counts.n_q},   {"n_c", truth.counts.n_c},
                     {"n_xq", truth.counts.n_xq}, {"n_xc", truth.counts.n_xc},
                     {"n_qc", truth.counts.n_qc},
                     {"n_xqc", truth.counts.n_xqc}};
      t["delta_qc"] = truth.delta_qc;
      t["delta1"] = truth.delta1;
      t["delta2"] = truth.delta2;
      *truth_json = dup_string(t.dump(2) + "\n");
    }
    *out = new sr_dataset{std::move(ds)};
  });
}

sr_status sr_plant_equivalent(const sr_dataset* d, uint32_t source,
                              sr_equiv_mode mode, sr_dataset** out,
                              char** truth_json) {
  if (!d || !out) return invalid("sr_plant_equivalent: null argument");
  if (mode != SR_EQUIV_COPY && mode != SR_EQUIV_COMPLEMENT)
    return invalid("sr_plant_equivalent: unknown mode");
  return guarded([&] {
    specrules::Dataset ds = specrules::plant_equivalent(
        d->impl, source,
        mode == SR_EQUIV_COPY ? specrules::EquivMode::copy
                              : specrules::EquivMode::complement);
    const uint32_t planted = static_cast<uint32_t>(ds.attr_count() - 1);
    if (truth_json) {
      json t;
      t["source"] = source;
      t["source_name"] = d->impl.attr_name(source);
      t["planted"] = planted;
      t["planted_name"] = ds.attr_name(planted);
      t["mode"] = mode == SR_EQUIV_COPY ? "copy" : "complement";
      *truth_json = dup_string(t.dump(2) + "\n");
    }
    *out = new sr_dataset{std::move(ds)};
  });
}

}  // extern "C"
