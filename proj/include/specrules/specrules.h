/* C API for the dependency-rule mining and specious-rule detection engine.
 *
 * All functions return a status code; results come back through out
 * parameters. Handles are opaque and must be released with their matching
 * _free function. On failure, sr_last_error() returns a thread-local
 * human-readable message describing the most recent error in this thread.
 *
 * Strings returned through char** are owned by the library; release them
 * with sr_string_free. Borrowed pointers (attribute names, the antecedent
 * array inside sr_rule_info) remain valid while the providing handle lives.
 */
#ifndef SPECRULES_H
#define SPECRULES_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sr_status {
  SR_OK = 0,
  SR_ERR_INVALID = 1,       /* bad arguments / unusable configuration */
  SR_ERR_IO = 2,            /* file unreadable or unwritable */
  SR_ERR_DATA = 3,          /* malformed or inconsistent input content */
  SR_ERR_UNREALIZABLE = 4,  /* synthesis spec has no integer realization */
  SR_ERR_INTERNAL = 5
} sr_status;

const char* sr_last_error(void);
const char* sr_version(void);
void sr_string_free(char* s);

/* ------------------------------------------------------------- datasets -- */
typedef struct sr_dataset sr_dataset;

typedef enum sr_format { SR_FORMAT_FIMI = 0, SR_FORMAT_CSV = 1 } sr_format;

sr_status sr_dataset_load(const char* path, sr_format format,
                          sr_dataset** out);
sr_status sr_dataset_write(const sr_dataset* d, const char* path,
                           sr_format format);
void sr_dataset_free(sr_dataset* d);

uint64_t sr_dataset_rows(const sr_dataset* d);
uint32_t sr_dataset_attrs(const sr_dataset* d);
const char* sr_dataset_attr_name(const sr_dataset* d, uint32_t attr);
/* -1 when the name is unknown. */
int64_t sr_dataset_attr_index(const sr_dataset* d, const char* name);
double sr_dataset_mean_transaction_length(const sr_dataset* d);
sr_status sr_dataset_support(const sr_dataset* d, const uint32_t* attrs,
                             size_t len, uint64_t* out);

typedef struct sr_pair_counts {
  uint64_t n, n_x, n_q, n_c, n_xq, n_xc, n_qc, n_xqc;
  int polarity_q, polarity_x;
} sr_pair_counts;

sr_status sr_dataset_pair_counts(const sr_dataset* d, const uint32_t* x,
                                 size_t x_len, const uint32_t* q, size_t q_len,
                                 uint32_t consequent, int polarity,
                                 sr_pair_counts* out);

/* ------------------------------------------------------------- measures -- */
sr_status sr_leverage(uint64_t n, uint64_t n_q, uint64_t n_c, uint64_t n_qc,
                      double* out);
sr_status sr_rule_mi(uint64_t n, uint64_t n_q, uint64_t n_c, uint64_t n_qc,
                     double* out);
sr_status sr_conditional_leverages(const sr_pair_counts* pc, double* delta1,
                                   double* delta2);
sr_status sr_conditional_mi(const sr_pair_counts* pc, double* out);
sr_status sr_signed_conditional_mi(const sr_pair_counts* pc, double* out);
sr_status sr_birch_p(const sr_pair_counts* pc, double* out);
sr_status sr_mi_upper_bound(uint64_t n_q, uint64_t n_c, uint64_t n,
                            double* out);

/* --------------------------------------------------------------- mining -- */
typedef struct sr_rules sr_rules;

typedef struct sr_miner_config {
  size_t top_k;
  /* 0: unbounded antecedent size */
  size_t max_antecedent;
  /* NULL/0: all attributes are candidate consequents */
  const uint32_t* consequents;
  size_t consequents_len;
  /* nonzero: keep positive-polarity rules only */
  int positive_only;
  unsigned threads;
} sr_miner_config;

sr_status sr_mine(const sr_dataset* d, const sr_miner_config* cfg,
                  sr_rules** out);
void sr_rules_free(sr_rules* r);

size_t sr_rules_count(const sr_rules* r);
double sr_rules_tau(const sr_rules* r);
size_t sr_rules_boundary_ties(const sr_rules* r);

typedef struct sr_rule_info {
  /* attribute ids of the antecedent; pointer valid while handle lives */
  const uint32_t* antecedent;
  size_t antecedent_len;
  uint32_t consequent;
  int polarity;
  uint64_t n_q, n_c, n_qc;
  double goodness;
  double leverage;
} sr_rule_info;

sr_status sr_rules_get(const sr_rules* r, size_t rank, sr_rule_info* out);
sr_status sr_rules_write_tsv(const sr_rules* r, const sr_dataset* d,
                             const char* path);
sr_status sr_rules_read_tsv(const char* path, const sr_dataset* d,
                            sr_rules** out);

/* ------------------------------------------------------------ detection -- */
typedef struct sr_verdicts sr_verdicts;

typedef enum sr_verdict_kind {
  SR_VERDICT_NONE = 0,
  SR_VERDICT_EQUIVALENT = 1,
  SR_VERDICT_SUPERFLUOUS = 2,
  SR_VERDICT_REVERSAL = 3,
  SR_VERDICT_INSIGNIFICANT = 4
} sr_verdict_kind;

typedef struct sr_verdict_info {
  sr_verdict_kind kind;
  /* 0-based rank of the mediator rule; -1 when none */
  int64_t mediator;
  /* evidence values; NaN when not applicable */
  double delta1, delta2, mi_s, p_b;
  /* 0 direct, 1 complement, -1 not an equivalence verdict */
  int equivalence_form;
} sr_verdict_info;

sr_status sr_detect(const sr_dataset* d, const sr_rules* rules, double theta,
                    double alpha, unsigned threads, sr_verdicts** out);
void sr_verdicts_free(sr_verdicts* v);
size_t sr_verdicts_count(const sr_verdicts* v);
sr_status sr_verdicts_get(const sr_verdicts* v, size_t rank,
                          sr_verdict_info* out);
sr_status sr_verdicts_write_tsv(const sr_verdicts* v, const sr_rules* rules,
                                const sr_dataset* d, const char* path);

/* Run summary JSON (caller frees with sr_string_free). `meta_json` may carry
 * optional context written through to the summary: input_path, input_format,
 * rules_path, threads, load_ms, mine_ms, detect_ms, total_ms; pass NULL for
 * none. verdicts may be NULL for a mine-only summary. */
sr_status sr_summary_json(const sr_dataset* d, const sr_rules* rules,
                          const sr_verdicts* verdicts, double theta,
                          double alpha, const char* meta_json, char** out);

/* ------------------------------------------------------------ synthesis -- */
typedef struct sr_plant_spec {
  uint64_t n;
  double p_x;
  double p_q_given_x, p_q_given_notx;
  double p_c_given_x, p_c_given_notx;
  double delta1, delta2;
  size_t noise_attrs;
  double noise_density;
  uint64_t seed;
} sr_plant_spec;

/* truth_json (optional, may be NULL) receives the planted ground truth. */
sr_status sr_plant_simpson(const sr_plant_spec* spec, sr_dataset** out,
                           char** truth_json);

typedef enum sr_equiv_mode { SR_EQUIV_COPY = 0, SR_EQUIV_COMPLEMENT = 1 } sr_equiv_mode;

sr_status sr_plant_equivalent(const sr_dataset* d, uint32_t source,
                              sr_equiv_mode mode, sr_dataset** out,
                              char** truth_json);

#ifdef __cplusplus
}
#endif

#endif /* SPECRULES_H */
