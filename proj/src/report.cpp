#include "specrules/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specrules/errors.hpp"
#include "specrules/measures.hpp"

namespace specrules {

using nlohmann::json;

std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

constexpr const char* kRuleHeader =
    "rank\tantecedent\tconsequent\tpolarity\tn_q\tn_c\tn_qc\tM\tleverage";

std::string antecedent_names(const Rule& r, const Dataset& d) {
  std::string s;
  for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
    if (i) s += '&';
    s += d.attr_name(r.antecedent.members()[i]);
  }
  return s;
}

void write_rule_row(std::ostream& out, std::size_t rank, const Rule& r,
                    const Dataset& d) {
  out << rank << '\t' << antecedent_names(r, d) << '\t'
      << d.attr_name(r.consequent) << '\t' << r.polarity << '\t' << r.n_q
      << '\t' << r.n_c << '\t' << r.n_qc << '\t' << fmt_g6(r.goodness) << '\t'
      << fmt_g6(r.lev);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw DataError("bad " + what + " value: '" + s + "'");
  }
}

double parse_f64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw DataError("bad " + what + " value: '" + s + "'");
  }
}

bool close6(double file_v, double exact_v) {
  // Files carry 6 significant digits.
  return std::abs(file_v - exact_v) <=
         1e-4 * std::max(1.0, std::abs(exact_v));
}

}  // namespace

void write_rules_tsv(const std::string& path, const std::vector<Rule>& rules,
                     const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << kRuleHeader << '\n';
  for (std::size_t i = 0; i < rules.size(); ++i) {
    write_rule_row(out, i + 1, rules[i], d);
    out << '\n';
  }
  if (!out) throw IoError("write error on " + path);
}

TopKList read_rules_tsv(const std::string& path, const Dataset& d) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rules file: " + path);
  std::string line;
  if (!std::getline(in, line) || split(line, '\t')[0] != "rank")
    throw DataError(path + ": missing rules header");

  std::vector<Rule> rules;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 9)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 9 columns, got " + std::to_string(f.size()));
    const std::string where = path + ":" + std::to_string(lineno);
    if (parse_u64(f[0], "rank") != rules.size() + 1)
      throw DataError(where + ": rank must increase from 1");

    std::vector<AttrId> attrs;
    for (const std::string& name : split(f[1], '&')) {
      const auto idx = d.attr_index(name);
      if (!idx) throw DataError(where + ": unknown attribute '" + name + "'");
      attrs.push_back(*idx);
    }
    const auto cidx = d.attr_index(f[2]);
    if (!cidx) throw DataError(where + ": unknown attribute '" + f[2] + "'");

    Rule r;
    try {
      r.antecedent = AttributeSet(attrs);
    } catch (const std::invalid_argument&) {
      throw DataError(where + ": duplicate antecedent attribute");
    }
    r.consequent = *cidx;
    if (r.antecedent.contains(r.consequent))
      throw DataError(where + ": consequent inside antecedent");
    const std::uint64_t pol = parse_u64(f[3], "polarity");
    if (pol > 1) throw DataError(where + ": polarity must be 0 or 1");
    r.polarity = static_cast<int>(pol);

    // Recompute everything at full precision; the file must agree.
    const std::uint64_t sup = d.support(r.antecedent);
    const std::uint64_t j1 =
        BitVec::and_count(d.cover(r.antecedent), d.column(r.consequent));
    const std::uint64_t n_lit = r.polarity == 1
                                    ? d.attr_support(r.consequent)
                                    : d.n() - d.attr_support(r.consequent);
    const std::uint64_t lit = r.polarity == 1 ? j1 : sup - j1;
    if (parse_u64(f[4], "n_q") != sup || parse_u64(f[5], "n_c") != n_lit ||
        parse_u64(f[6], "n_qc") != lit)
      throw DataError(where + ": counts disagree with the dataset");
    if (delta_sign(d.n(), sup, n_lit, lit) <= 0)
      throw DataError(where + ": rule has no positive leverage at its polarity");
    r.n_q = sup;
    r.n_c = n_lit;
    r.n_qc = lit;
    r.goodness = rule_mi(d.n(), sup, n_lit, lit);
    r.lev = leverage(d.n(), sup, n_lit, lit);
    if (!close6(parse_f64(f[7], "M"), r.goodness) ||
        !close6(parse_f64(f[8], "leverage"), r.lev))
      throw DataError(where + ": measure values disagree with the dataset");
    rules.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("read error on " + path);
  if (rules.empty()) throw DataError(path + ": no rules");
  const std::size_t k = rules.size();
  return TopKList::from_sorted(std::move(rules), k);
}

void write_verdicts_tsv(const std::string& path,
                        const std::vector<Rule>& rules,
                        const std::vector<Verdict>& verdicts,
                        const Dataset& d) {
  if (rules.size() != verdicts.size())
    throw std::invalid_argument("rules/verdicts size mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << kRuleHeader
      << "\tverdict\tmediator_rank\tdelta1\tdelta2\tmi_s\tp_b\t"
         "equivalence_form\n";
  for (std::size_t i = 0; i < rules.size(); ++i) {
    write_rule_row(out, i + 1, rules[i], d);
    const Verdict& v = verdicts[i];
    out << '\t' << verdict_name(v.kind) << '\t';
    if (v.mediator)
      out << (*v.mediator + 1);
    else
      out << '-';
    if (v.evidence) {
      out << '\t' << fmt_g6(v.evidence->delta1) << '\t'
          << fmt_g6(v.evidence->delta2) << '\t' << fmt_g6(v.evidence->mi_s)
          << '\t' << fmt_g6(v.evidence->p_b);
    } else {
      out << "\t-\t-\t-\t-";
    }
    out << '\t';
    if (v.equivalence_form)
      out << (*v.equivalence_form == EquivForm::direct ? "direct"
                                                       : "complement");
    else
      out << '-';
    out << '\n';
  }
  if (!out) throw IoError("write error on " + path);
}

std::string summary_json(const Dataset& d, const std::vector<Rule>& rules,
                         const std::vector<Verdict>* verdicts,
                         const RunMeta& meta) {
  json j;
  j["dataset"] = {{"path", meta.input_path},
                  {"format", meta.input_format},
                  {"rows", d.n()},
                  {"attributes", d.attr_count()},
                  {"mean_transaction_length", d.mean_transaction_length()}};

  json cfg;
  cfg["top_k"] = meta.miner.k;
  cfg["max_antecedent"] =
      meta.miner.max_antecedent ? json(*meta.miner.max_antecedent) : json();
  if (meta.miner.consequents) {
    json names = json::array();
    for (AttrId a : *meta.miner.consequents) names.push_back(d.attr_name(a));
    cfg["consequents"] = names;
  } else {
    cfg["consequents"] = json();
  }
  cfg["polarity"] = meta.miner.polarity == MinerConfig::Polarity::both
                        ? "both"
                        : "positive";
  if (meta.detect) {
    cfg["theta"] = meta.detect->theta;
    cfg["alpha"] = meta.detect->alpha;
    cfg["threads"] = meta.detect->threads;
  } else {
    cfg["threads"] = meta.miner.threads;
  }
  if (meta.rules_path) cfg["rules_path"] = *meta.rules_path;
  j["config"] = cfg;

  j["measure"] = {{"name", MeasureKind{}.name()},
                  {"scale", MeasureKind{}.scale()}};
  j["rule_count"] = rules.size();
  // An underfull list has no admission threshold; -inf has no JSON value.
  if (meta.tau && std::isfinite(*meta.tau)) j["tau"] = *meta.tau;
  if (meta.boundary_ties) j["boundary_ties"] = *meta.boundary_ties;

  if (verdicts) {
    const auto& V = *verdicts;
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (const Verdict& v : V) counts[static_cast<int>(v.kind)]++;
    json jc, jp;
    const char* keys[5] = {"non_specious", "type0_equivalent",
                           "type1_superfluous", "type2_reversal",
                           "type3_insignificant"};
    for (int k = 0; k < 5; ++k) {
      jc[keys[k]] = counts[k];
      jp[keys[k]] = V.empty() ? 0.0
                              : static_cast<double>(counts[k]) /
                                    static_cast<double>(V.size());
    }
    j["verdicts"] = {
        {"counts", jc},
        {"proportions", jp},
        {"specious_proportion",
         V.empty() ? 0.0
                   : static_cast<double>(V.size() - counts[0]) /
                         static_cast<double>(V.size())}};

    // Profile of flagged (reversal/nested/weak — equivalences excluded) vs
    // unflagged rules.
    struct Agg {
      std::size_t c = 0;
      double mi = 0, freq = 0, conf = 0, nconf = 0, lev = 0, size = 0;
      json to_json() const {
        if (c == 0) return json{{"count", 0}};
        const double dc = static_cast<double>(c);
        return json{{"count", c},
                    {"mean_mi", mi / dc},
                    {"mean_frequency", freq / dc},
                    {"mean_confidence", conf / dc},
                    {"mean_neg_confidence", nconf / dc},
                    {"mean_leverage", lev / dc},
                    {"mean_antecedent_size", size / dc}};
      }
    };
    Agg flagged, clean;
    double pb_sum = 0, pb_min = 2.0, d1_sum = 0, d2_sum = 0, mis_sum = 0;
    std::size_t ev_count = 0, type3_low_pb = 0;
    for (std::size_t i = 0; i < V.size(); ++i) {
      const Rule& r = rules[i];
      const bool flag = V[i].kind != VerdictKind::non_specious &&
                        V[i].kind != VerdictKind::type0_equivalent;
      if (V[i].kind == VerdictKind::type0_equivalent) continue;
      Agg& a = flag ? flagged : clean;
      a.c++;
      a.mi += r.goodness;
      a.freq += static_cast<double>(r.n_qc);
      a.conf += static_cast<double>(r.n_qc) / static_cast<double>(r.n_q);
      const std::uint64_t rest = d.n() - r.n_q;
      a.nconf += rest == 0 ? 0.0
                           : static_cast<double>(d.n() - r.n_q - r.n_c +
                                                 r.n_qc) /
                                 static_cast<double>(rest);
      a.lev += r.lev;
      a.size += static_cast<double>(r.antecedent.size());
      if (flag && V[i].evidence) {
        ++ev_count;
        pb_sum += V[i].evidence->p_b;
        pb_min = std::min(pb_min, V[i].evidence->p_b);
        d1_sum += V[i].evidence->delta1;
        d2_sum += V[i].evidence->delta2;
        mis_sum += V[i].evidence->mi_s;
        if (V[i].kind == VerdictKind::type3_insignificant && meta.detect &&
            V[i].evidence->p_b < meta.detect->alpha)
          ++type3_low_pb;
      }
    }
    j["aggregates"] = {{"specious_non_equivalent", flagged.to_json()},
                       {"non_specious", clean.to_json()}};
    json ev;
    if (ev_count > 0) {
      const double dc = static_cast<double>(ev_count);
      ev = {{"count", ev_count},        {"mean_p_b", pb_sum / dc},
            {"min_p_b", pb_min},        {"mean_delta1", d1_sum / dc},
            {"mean_delta2", d2_sum / dc}, {"mean_mi_s", mis_sum / dc}};
    } else {
      ev = {{"count", 0}};
    }
    j["evidence"] = ev;
    j["type3_p_b_below_alpha"] = type3_low_pb;
  }

  j["timings_ms"] = {{"load", meta.load_ms},
                     {"mine_or_read", meta.mine_ms},
                     {"detect", meta.detect_ms},
                     {"total", meta.total_ms}};
  return j.dump(2) + "\n";
}

}  // namespace specrules
