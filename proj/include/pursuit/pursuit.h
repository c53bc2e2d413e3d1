/* C interface to the projection-pursuit library.
 *
 * All functions return a pv_status; PV_OK means success. On failure,
 * pv_last_error() returns a thread-local description of the most recent
 * error. Objects are opaque handles released with their _free function.
 */
#ifndef PURSUIT_PURSUIT_H_
#define PURSUIT_PURSUIT_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pv_status {
    PV_OK = 0,
    PV_ERR_INVALID = 1, /* bad parameter or precondition violation */
    PV_ERR_IO = 2,      /* file read/write failure */
    PV_ERR_NUMERIC = 3, /* calibration or convergence failure */
} pv_status;

const char* pv_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */

typedef struct pv_dataset pv_dataset;

typedef enum pv_signal_law {
    PV_SIGNAL_IMBALANCED_CLUSTERS = 0,
    PV_SIGNAL_BERNOULLI_RADEMACHER = 1,
    PV_SIGNAL_GAUSSIAN_MIXTURE_SHIFT = 2,
} pv_signal_law;

typedef enum pv_ambient_law {
    PV_AMBIENT_GAUSSIAN = 0,
    PV_AMBIENT_RADEMACHER = 1,
    PV_AMBIENT_STUDENT_T2 = 2,
    PV_AMBIENT_SKEW_NORMAL = 3,
} pv_ambient_law;

typedef struct pv_planted_spec {
    int64_t d;
    pv_signal_law signal;
    double p;
    pv_ambient_law ambient;
    const double* u_star; /* optional fixed unit direction of length d */
} pv_planted_spec;

pv_status pv_dataset_planted(const pv_planted_spec* spec, int64_t n, uint64_t seed,
                             pv_dataset** out);
pv_status pv_dataset_mixture_shift(int64_t n, int64_t d, double p, double delta,
                                   double lambda, uint64_t seed, pv_dataset** out);
pv_status pv_dataset_anisotropic(int64_t n, int64_t d, double p, double lambda,
                                 uint64_t seed, pv_dataset** out);

pv_status pv_dataset_load_csv(const char* path, pv_dataset** out);
pv_status pv_dataset_save_csv(const pv_dataset* data, const char* path);
void pv_dataset_free(pv_dataset* data);

int64_t pv_dataset_rows(const pv_dataset* data);
int64_t pv_dataset_dim(const pv_dataset* data);
int pv_dataset_has_labels(const pv_dataset* data);
int pv_dataset_has_true_direction(const pv_dataset* data);
/* out must hold pv_dataset_dim(data) doubles. */
pv_status pv_dataset_true_direction(const pv_dataset* data, double* out);
pv_status pv_dataset_set_true_direction(pv_dataset* data, const double* u);

pv_status pv_dataset_whiten(const pv_dataset* data, pv_dataset** out);
pv_status pv_dataset_pca(const pv_dataset* data, int64_t k, pv_dataset** out);
pv_status pv_dataset_deflate(const pv_dataset* data, const double* u, pv_dataset** out);
/* Keeps rows [0, n_head) in the first output and the rest in the second. */
pv_status pv_dataset_split(const pv_dataset* data, int64_t n_head, pv_dataset** head,
                           pv_dataset** tail);

/* ------------------------------------------------------------------ */
/* Projection indices and gradient pursuit                             */

/* Tags: relu2, kurtosis, abs, absmax, skewness, approxentropy. */
pv_status pv_dataset_score(const pv_dataset* data, const double* u, const char* index,
                           double* out);

typedef enum pv_batch_strategy {
    PV_BATCH_FRESH_SLICES = 0,
    PV_BATCH_RESAMPLE = 1,
    PV_BATCH_AUTO = 2, /* fresh slices when the budget allows */
} pv_batch_strategy;

typedef struct pv_pursuit_config {
    int64_t batch_size; /* 0 with PV_BATCH_AUTO: derived from the dataset */
    int64_t n_init;
    int64_t steps; /* 0: recipe value ceil(2 log2 d) */
    double eta1;   /* 0: recipe value */
    double eta2;   /* 0: recipe value 0.5 */
    const char* phi;
    const char* psi; /* NULL: default pairing for phi */
    pv_batch_strategy strategy;
    double p_hint; /* imbalance used by the recipe, 0 defaults to 0.1 */
    uint64_t seed;
} pv_pursuit_config;

typedef struct pv_run_result pv_run_result;

pv_status pv_two_step(const pv_dataset* data, const pv_pursuit_config* config,
                      pv_run_result** out);
void pv_run_result_free(pv_run_result* result);
pv_status pv_run_result_direction(const pv_run_result* result, double* out);
int64_t pv_run_result_dim(const pv_run_result* result);
/* |<u_hat, u*>|, or -1 when the ground truth is unknown. */
double pv_run_result_alignment(const pv_run_result* result);
/* Full report (direction, psi trace, per-init scores) as a JSON document.
 * Free with pv_string_free. */
pv_status pv_run_result_report_json(const pv_run_result* result, char** out);

void pv_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Spectral baselines                                                  */

/* Tags: cov4max, cov4min, 3tensor, 3tensor-max. */
pv_status pv_recover_spectral(const pv_dataset* data, const char* method, double* u_out);

/* ------------------------------------------------------------------ */
/* Experiment harnesses                                                */

typedef struct pv_phase_spec {
    const int64_t* d_values;
    size_t num_d;
    const int64_t* n_values; /* total sample budgets */
    size_t num_n;
    int p_power_law;    /* 1: p = d^p_param, 0: p = p_param */
    double p_param;
    int trials;
    const char* method; /* index or spectral tag */
    pv_signal_law signal;
    uint64_t seed;
    int jobs;
} pv_phase_spec;

typedef struct pv_phase_cell {
    int64_t d, n;
    double p;
    double mean, stddev; /* NaN when every trial failed */
    int trials;
} pv_phase_cell;

typedef struct pv_phase_result pv_phase_result;

pv_status pv_run_phase_grid(const pv_phase_spec* spec, pv_phase_result** out);
void pv_phase_result_free(pv_phase_result* result);
size_t pv_phase_result_cells(const pv_phase_result* result);
/* Cells are ordered n-major: index = ni * num_d + di. */
pv_status pv_phase_result_cell(const pv_phase_result* result, size_t index,
                               pv_phase_cell* out);

typedef struct pv_compare_spec {
    int64_t d;
    double p;
    pv_signal_law signal;
    const int64_t* n_values;
    size_t num_n;
    const char* const* methods;
    size_t num_methods;
    int trials;
    uint64_t seed;
    int jobs;
} pv_compare_spec;

typedef struct pv_compare_row {
    const char* method; /* owned by the result */
    int64_t n;
    double mean, stddev;
    int trials;
} pv_compare_row;

typedef struct pv_compare_result pv_compare_result;

pv_status pv_run_compare(const pv_compare_spec* spec, pv_compare_result** out);
void pv_compare_result_free(pv_compare_result* result);
size_t pv_compare_result_rows(const pv_compare_result* result);
pv_status pv_compare_result_row(const pv_compare_result* result, size_t index,
                                pv_compare_row* out);

typedef struct pv_ig_spec {
    const char* method;
    int64_t pca_k;     /* 0 disables; applied when dim exceeds it */
    int whiten;
    int64_t n_init;
    int64_t directions;
    uint64_t seed;
} pv_ig_spec;

/* JSON report of per-projection information gain; free with pv_string_free. */
pv_status pv_run_ig(const pv_dataset* train, const pv_dataset* holdout,
                    const pv_ig_spec* spec, char** json_out);

/* ------------------------------------------------------------------ */
/* Hypothesis test                                                     */

pv_status pv_calibrate_threshold(int64_t d, int64_t n, double p, int trials, uint64_t seed,
                                 double* threshold_out);
/* decision_out: 1 = planted (H1), 0 = null (H0). */
pv_status pv_hypothesis_test(const pv_dataset* data, const double* u_hat, double threshold,
                             int* decision_out, double* statistic_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PURSUIT_PURSUIT_H_ */
