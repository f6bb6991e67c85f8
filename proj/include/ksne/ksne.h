/*
 * ksne C API.
 *
 * Every function returning ksne_status leaves a thread-local message behind
 * on failure (ksne_last_error) and, for pipeline commands, the stage that
 * failed (ksne_last_error_stage). Objects are opaque handles created by
 * *_new / output parameters and released with the matching *_free.
 * Matrices are row-major doubles.
 */
#ifndef KSNE_KSNE_H
#define KSNE_KSNE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KSNE_BUILDING_LIBRARY)
#    define KSNE_API __declspec(dllexport)
#  else
#    define KSNE_API __declspec(dllimport)
#  endif
#else
#  define KSNE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ksne_status {
    KSNE_OK = 0,
    KSNE_ERR_ARGUMENT = 1,
    KSNE_ERR_PARSE = 2,
    KSNE_ERR_FORMAT = 3,
    KSNE_ERR_VALIDATION = 4,
    KSNE_ERR_FEATURIZATION = 5,
    KSNE_ERR_DEGENERATE = 6,
    KSNE_ERR_UNSUPPORTED = 7,
    KSNE_ERR_DIVERGENCE = 8,
    KSNE_ERR_IO = 9,
    KSNE_ERR_INTERNAL = 10
} ksne_status;

KSNE_API const char* ksne_version(void);
KSNE_API const char* ksne_status_name(ksne_status status);

/* Message and pipeline stage of the last failure on this thread ("" if none). */
KSNE_API const char* ksne_last_error(void);
KSNE_API const char* ksne_last_error_stage(void);

/* Process exit code for a status: 0 ok, 2 usage/config/input, 3 numeric/runtime. */
KSNE_API int ksne_exit_code(ksne_status status);

/* Default worker count for parallel loops. */
KSNE_API void ksne_set_threads(int threads);

/* ---- run configuration (flat key=value; keys are the CLI flag names) ---- */

typedef struct ksne_config ksne_config;

KSNE_API ksne_config* ksne_config_new(void);
KSNE_API void ksne_config_free(ksne_config* config);
KSNE_API int ksne_config_is_key(const char* key);
/* Number of accepted keys and the key at index (NULL when out of range). */
KSNE_API size_t ksne_config_key_count(void);
KSNE_API const char* ksne_config_key_at(size_t index);
KSNE_API ksne_status ksne_config_set(ksne_config* config, const char* key, const char* value);
/* Reads key=value lines or the "config" object of a run manifest. */
KSNE_API ksne_status ksne_config_load(ksne_config* config, const char* path);
/* Copies the canonical value into buffer (NUL-terminated, truncated to capacity);
 * *needed receives the full length + 1 when non-NULL. */
KSNE_API ksne_status ksne_config_get(const ksne_config* config, const char* key, char* buffer, size_t capacity,
                                     size_t* needed);

/* ---- dense matrices ---- */

typedef struct ksne_matrix ksne_matrix;

/* values may be NULL for a zero matrix. */
KSNE_API ksne_matrix* ksne_matrix_new(size_t rows, size_t cols, const double* values);
KSNE_API void ksne_matrix_free(ksne_matrix* matrix);
KSNE_API size_t ksne_matrix_rows(const ksne_matrix* matrix);
KSNE_API size_t ksne_matrix_cols(const ksne_matrix* matrix);
KSNE_API const double* ksne_matrix_data(const ksne_matrix* matrix);

/* Square-matrix cache file: u64 LE N, then N*N f64 LE row-major. */
KSNE_API ksne_status ksne_matrix_save(const ksne_matrix* matrix, const char* path);
KSNE_API ksne_status ksne_matrix_load(const char* path, ksne_matrix** out);

/* ---- building blocks ---- */

KSNE_API ksne_status ksne_generate_circle(size_t n, double radius, double noise_std, uint64_t seed,
                                          ksne_matrix** out_points);

KSNE_API ksne_status ksne_joint_gaussian(const ksne_matrix* points, double perplexity, ksne_matrix** out_p);
/* sigma <= 0 selects the data-adaptive default. */
KSNE_API ksne_status ksne_kernel_laplacian(const ksne_matrix* points, double sigma, ksne_matrix** out_kernel);
KSNE_API ksne_status ksne_kernel_isolation(const ksne_matrix* points, size_t psi, size_t trees, uint64_t seed,
                                           ksne_matrix** out_kernel);
/* mode: "row-normalize" or "global-normalize". */
KSNE_API ksne_status ksne_kernel_to_joint(const ksne_matrix* kernel, const char* mode, ksne_matrix** out_p);

/* kind: "random", "pca", "ica" or "ensemble". Result is rescaled to std 1e-4. */
KSNE_API ksne_status ksne_initialize(const ksne_matrix* points, const char* kind, uint64_t seed,
                                     ksne_matrix** out_embedding);

typedef struct ksne_optimizer_params {
    double learning_rate;
    double momentum_early;
    double momentum_late;
    size_t momentum_switch_iter;
    size_t max_iters;
    size_t checkpoint_every;
    double early_exaggeration_factor;
    size_t early_exaggeration_iters;
    int adaptive_gains;
} ksne_optimizer_params;

KSNE_API void ksne_optimizer_params_default(ksne_optimizer_params* params);

typedef struct ksne_trajectory ksne_trajectory;

KSNE_API ksne_status ksne_optimize(const ksne_matrix* p, const ksne_matrix* init, const ksne_optimizer_params* params,
                                   ksne_trajectory** out);
KSNE_API void ksne_trajectory_free(ksne_trajectory* trajectory);
KSNE_API size_t ksne_trajectory_size(const ksne_trajectory* trajectory);
KSNE_API size_t ksne_trajectory_iteration(const ksne_trajectory* trajectory, size_t index);
KSNE_API double ksne_trajectory_kl(const ksne_trajectory* trajectory, size_t index);
/* Borrowed; valid until the trajectory is freed. */
KSNE_API const ksne_matrix* ksne_trajectory_embedding(const ksne_trajectory* trajectory, size_t index);

/* r_values (may be NULL) receives R(1..kmax). */
KSNE_API ksne_status ksne_quality_curve(const ksne_matrix* hd_points, const ksne_matrix* ld_points, size_t kmax,
                                        double* r_values, double* auc_rnx);

/* ---- pipeline commands ---- */

typedef struct ksne_embed_summary {
    size_t checkpoints;
    double final_auc_rnx;
    double best_auc_rnx;
    size_t best_iteration;
    size_t iterations_to_95;
    uint64_t init_seed;
    int ica_converged;
} ksne_embed_summary;

/* summary may be NULL. */
KSNE_API ksne_status ksne_cmd_embed(const ksne_config* config, ksne_embed_summary* summary);

typedef struct ksne_sweep_report ksne_sweep_report;

/* kernels / inits: comma-separated names. */
KSNE_API ksne_status ksne_cmd_sweep(const ksne_config* config, const char* kernels, const char* inits,
                                    ksne_sweep_report** out);
KSNE_API void ksne_sweep_report_free(ksne_sweep_report* report);
KSNE_API size_t ksne_sweep_report_rows(const ksne_sweep_report* report);
KSNE_API size_t ksne_sweep_report_failed(const ksne_sweep_report* report);
KSNE_API const char* ksne_sweep_report_table(const ksne_sweep_report* report);
KSNE_API const char* ksne_sweep_report_csv(const ksne_sweep_report* report);

/* iterations may be NULL when count is 0 (plots the last checkpoint). */
KSNE_API ksne_status ksne_cmd_plot(const char* run_dir, const size_t* iterations, size_t count, size_t* files_written);

typedef struct ksne_ingest_summary {
    size_t count;
    size_t dimension;
    size_t labels;
    char alphabet[257];
} ksne_ingest_summary;

KSNE_API ksne_status ksne_cmd_ingest(const ksne_config* config, const char* output_path, ksne_ingest_summary* summary);
KSNE_API ksne_status ksne_cmd_featurize(const ksne_config* config, const char* output_path);
KSNE_API ksne_status ksne_cmd_eval(const ksne_config* config, const char* embedding_path, const char* output_path,
                                   double* auc_rnx);

#ifdef __cplusplus
}
#endif

#endif
