/* C interface to the rsabc shared library. Every fallible call returns a
 * status code; the message for the most recent failure in the calling thread
 * is available from rsabc_last_error(). Returned strings stay valid until the
 * owning handle is mutated or freed. */
#ifndef RSABC_RSABC_H
#define RSABC_RSABC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RSABC_API __declspec(dllexport)
#else
#define RSABC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsabc_status {
    RSABC_OK = 0,
    RSABC_ERR_RUNTIME = 1, /* numerical, degeneracy, or i/o failure */
    RSABC_ERR_CONFIG = 2,  /* invalid configuration */
    RSABC_ERR_STARTUP = 3  /* sampler failed to initialize */
} rsabc_status;

typedef struct rsabc_config rsabc_config;
typedef struct rsabc_result rsabc_result;

RSABC_API const char* rsabc_version(void);

/* Message for the most recent failure in this thread; "" when none. */
RSABC_API const char* rsabc_last_error(void);

/* Parse and fully validate a JSON experiment config. On success *out owns a
 * new handle; free with rsabc_config_free. All validation problems are
 * reported together in the error message. */
RSABC_API rsabc_status rsabc_config_load(const char* path, rsabc_config** out);

/* As rsabc_config_load from an in-memory JSON document. base_dir anchors
 * relative paths inside the config and may be NULL for the process cwd. */
RSABC_API rsabc_status rsabc_config_load_string(const char* json_text,
                                                const char* base_dir,
                                                rsabc_config** out);

RSABC_API void rsabc_config_free(rsabc_config* cfg);

RSABC_API rsabc_status rsabc_config_set_seed(rsabc_config* cfg, uint64_t seed);
RSABC_API rsabc_status rsabc_config_set_output_dir(rsabc_config* cfg,
                                                   const char* dir);
RSABC_API uint64_t rsabc_config_seed(const rsabc_config* cfg);
RSABC_API const char* rsabc_config_output_dir(const rsabc_config* cfg);
RSABC_API const char* rsabc_config_name(const rsabc_config* cfg);

/* Deterministic per-replicate seed derived from a master seed; independent
 * replicates of one experiment use indices 0, 1, 2, ... */
RSABC_API uint64_t rsabc_derive_seed(uint64_t master_seed, uint64_t index);

/* Run the configured experiment (single- or multi-stage MCMC, or SMC) and
 * write all artifacts under the config's output directory. */
RSABC_API rsabc_status rsabc_run(const rsabc_config* cfg, rsabc_result** out);

/* Likelihood-curve sweep over a 1-parameter model. n_points = 0 and
 * n_reps = 0 select the defaults (50 points, 1000 replications). */
RSABC_API rsabc_status rsabc_sweep(const rsabc_config* cfg, double lo,
                                   double hi, size_t n_points, size_t n_reps,
                                   rsabc_result** out);

RSABC_API void rsabc_result_free(rsabc_result* res);

/* Artifact locations; "" when the artifact does not apply to the run mode. */
RSABC_API const char* rsabc_result_output_dir(const rsabc_result* res);
RSABC_API const char* rsabc_result_chain_path(const rsabc_result* res);
RSABC_API const char* rsabc_result_diagnostics_path(const rsabc_result* res);
RSABC_API const char* rsabc_result_sweep_path(const rsabc_result* res);

/* Recompute chain diagnostics from a stored chain file. Writes a JSON
 * document to out_path unless out_path is NULL; stores the worst-coordinate
 * effective sample size in *out_worst_ess unless it is NULL. */
RSABC_API rsabc_status rsabc_diagnose_chain_file(const char* chain_path,
                                                 size_t discard,
                                                 const char* out_path,
                                                 double* out_worst_ess);

#ifdef __cplusplus
}
#endif

#endif /* RSABC_RSABC_H */
