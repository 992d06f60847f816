/* shapekit — geometric-morphometrics shape classification library.
 *
 * C API over the C++ core: opaque handles, integer status codes, and
 * generic result tables. Every function returns SK_OK on success; on
 * failure, sk_last_error() describes what went wrong (thread-local).
 * Handles are freed with their matching sk_*_free function.
 */
#ifndef SHAPEKIT_H
#define SHAPEKIT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sk_status {
  SK_OK = 0,
  SK_ERR_INVALID_INPUT = 1,
  SK_ERR_TEMPLATE_MISMATCH = 2,
  SK_ERR_DEGENERATE_CONFIGURATION = 3,
  SK_ERR_INSUFFICIENT_SAMPLE = 4,
  SK_ERR_SINGULAR_REGRESSOR = 5,
  SK_ERR_DEGENERATE_LABELS = 6,
  SK_ERR_PARSE = 7,
  SK_ERR_IO = 8,
  SK_ERR_VERSION_MISMATCH = 9,
  SK_ERR_INTEGRITY = 10,
  SK_ERR_INTERNAL = 11
} sk_status;

typedef struct sk_sample sk_sample; /* a set of landmark configurations */
typedef struct sk_model sk_model;   /* a frozen trained reference */
typedef struct sk_table sk_table;   /* a named-column result table */

const char* sk_version(void);
/* Message for the most recent failing call on this thread. */
const char* sk_last_error(void);

/* ---- samples ------------------------------------------------------- */

/* Reads a tpsDig-style file; labels_csv may be NULL. The labels file is a
 * CSV "id,label[,<covariate>...]" keyed by the record ID (falling back to
 * IMAGE, then to the 1-based record index "record-<i>"). */
sk_status sk_sample_read_tps(const char* tps_path, const char* labels_csv,
                             sk_sample** out);
/* Reads the aligned CSV written by sk_sample_to_table (id,label,csize,...). */
sk_status sk_sample_read_aligned_csv(const char* csv_path, sk_sample** out);
sk_status sk_sample_write_tps(const sk_sample* sample, const char* path);
void sk_sample_free(sk_sample* sample);
int sk_sample_size(const sk_sample* sample);
int sk_sample_landmarks(const sk_sample* sample);
/* id,label[,csize],x1,y1,...; csize (raw centroid size) appears for aligned
 * samples. Coordinate columns round-trip exactly. */
sk_status sk_sample_to_table(const sk_sample* sample, sk_table** out);

/* ---- pipeline configuration ---------------------------------------- */

enum { SK_TARGET_MEAN = 0, SK_TARGET_FUNCTIONAL_MEDIAN = 1 };
enum { SK_CLASSIFIER_LDA = 0, SK_CLASSIFIER_LR = 1, SK_CLASSIFIER_KNN = 2 };

typedef struct sk_config {
  int size_correction;       /* 0/1; allometric-regression residuals */
  int target;                /* SK_TARGET_* registration target */
  int classifier;            /* SK_CLASSIFIER_* */
  int knn_k;                 /* > 0 fixed; 0 = oracle over the candidates */
  const int* knn_candidates; /* may be NULL when knn_k > 0 */
  int n_knn_candidates;
  const int* drop_landmarks; /* 1-based collinearity removal; NULL = none */
  int n_drop;
  const char* positive_class; /* NULL = auto (SAM, then group-1) */
  unsigned long long seed;
} sk_config;

/* Defaults: size correction on, mean target, LDA, drop landmarks {2,3}. */
void sk_config_init(sk_config* config);

/* ---- alignment, training, classification --------------------------- */

/* Full generalized Procrustes alignment of a raw sample. */
sk_status sk_align(const sk_sample* raw, sk_sample** aligned_out);

/* Builds the frozen reference (fGPA + optional allometry + reference
 * target + classifier) from a labeled raw sample. */
sk_status sk_train(const sk_sample* raw, const sk_config* config, sk_model** out);
sk_status sk_model_save(const sk_model* model, const char* path);
sk_status sk_model_load(const char* path, sk_model** out);
void sk_model_free(sk_model* model);
int sk_model_warning_count(const sk_model* model);
const char* sk_model_warning(const sk_model* model, int index);

/* Out-of-sample classification of each record against the frozen
 * reference: id,predicted,score,fopa_residual_ss. */
sk_status sk_classify(const sk_model* model, const sk_sample* raw, sk_table** out);

/* ---- evaluation ------------------------------------------------------ */

typedef struct sk_metrics {
  double accuracy, sensitivity, specificity;
  long long tp, fn, tn, fp;
} sk_metrics;

/* Out-of-sample leave-one-out (fresh alignment, allometry, target and
 * classifier per fold). records_out may be NULL. */
sk_status sk_loo(const sk_sample* raw, const sk_config* config, sk_metrics* out,
                 sk_table** records_out);
/* In-sample variant: one global alignment, LOO over classifier training. */
sk_status sk_loo_in_sample(const sk_sample* raw, const sk_config* config,
                           sk_metrics* out);
/* Per-stratum out-of-sample LOO. strata_keys is a comma list of covariate
 * names; the derived key "age24" splits on age_months <= 24. */
sk_status sk_loo_stratified(const sk_sample* raw, const sk_config* config,
                            const char* strata_keys, sk_table** out);

/* PCA of aligned coordinates: per-specimen scores and a component summary
 * (eigenvalue + variance fraction). */
sk_status sk_pca(const sk_sample* aligned, int components, sk_table** scores_out,
                 sk_table** summary_out);

/* ---- alignment-free analyses ---------------------------------------- */

/* Arm ratio variables r1..r4 per record (20-landmark template). */
sk_status sk_ratios(const sk_sample* sample, sk_table** out);
/* LOO classification on the ratio variables (no alignment involved, so
 * in-sample and out-of-sample coincide); one row per stratum, "" = whole
 * sample, plus age strata when age_months is available. */
sk_status sk_ratio_loo(const sk_sample* sample, const sk_config* config,
                       sk_table** out);

/* EDMA global + local bootstrap tests between two labeled groups. */
sk_status sk_edma_tests(const sk_sample* sample, const char* numerator_label,
                        const char* denominator_label, int bootstrap_B,
                        double confidence, unsigned long long seed,
                        double* observed_T, double* p_value, sk_table** local_out);
/* Classical MDS of the log-T inter-individual distance matrix. */
sk_status sk_edma_mds(const sk_sample* sample, int dims, sk_table** out);

/* ---- simulation ------------------------------------------------------ */

/* Draws one scenario sample (see the scenario catalogue in the docs);
 * means_tps may be NULL to use the built-in fixture, noise_c <= 0 uses the
 * calibrated constant. */
sk_status sk_simulate_sample(const char* means_tps, int scenario, int n_per_group,
                             double noise_c, unsigned long long seed,
                             sk_sample** out);
/* Monte-Carlo study over scenarios x (LDA, LR, kNN(knn_k)) x (mean,
 * functional-median): average LOO metrics over `runs`. */
sk_status sk_simulate_study(const char* means_tps, const int* scenarios,
                            int n_scenarios, int runs, int n_per_group,
                            double noise_c, int knn_k, unsigned long long seed,
                            sk_table** out);
/* Sweep of the noise constant against the scenario-1 operating point. */
sk_status sk_calibrate_noise(const char* means_tps, const double* grid, int n_grid,
                             int runs, int n_per_group, unsigned long long seed,
                             sk_table** out, double* chosen_c);
/* fGPA mean shapes of two TPS datasets, written as a two-record fixture. */
sk_status sk_derive_mean_shapes(const char* tps_group1, const char* tps_group2,
                                const char* out_path);

/* ---- tables ---------------------------------------------------------- */

enum { SK_COL_TEXT = 0, SK_COL_METRIC = 1, SK_COL_COORDINATE = 2 };

int sk_table_rows(const sk_table* table);
int sk_table_cols(const sk_table* table);
const char* sk_table_name(const sk_table* table, int col);
int sk_table_col_kind(const sk_table* table, int col);
double sk_table_number(const sk_table* table, int row, int col);
const char* sk_table_text(const sk_table* table, int row, int col);
void sk_table_free(sk_table* table);

#ifdef __cplusplus
}
#endif

#endif /* SHAPEKIT_H */
