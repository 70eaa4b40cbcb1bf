#ifndef MDNMSAF_H
#define MDNMSAF_H

#include <stddef.h>

#if defined(_WIN32)
#define MDN_API __declspec(dllexport)
#else
#define MDN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdn_status {
  MDN_OK = 0,
  MDN_ERR_INVALID_ARGUMENT = 1,
  MDN_ERR_CONFIG = 2,
  MDN_ERR_IO = 3,
  MDN_ERR_UNSTABLE = 4,
  MDN_ERR_CAPACITY = 5,
  MDN_ERR_INTERNAL = 6
} mdn_status;

/* Experiment configuration (JSON document plus overrides). */
typedef struct mdn_config mdn_config;
/* Output of one experiment: CSV text, a summary and a divergence flag. */
typedef struct mdn_result mdn_result;

MDN_API const char* mdn_version(void);
/* Message of the most recent failure on the calling thread. */
MDN_API const char* mdn_last_error(void);
MDN_API const char* mdn_status_name(mdn_status status);

/* Default configuration. */
MDN_API mdn_status mdn_config_create(mdn_config** out);
/* Defaults merged with a JSON file. */
MDN_API mdn_status mdn_config_load(const char* path, mdn_config** out);
/* Defaults merged with JSON text. */
MDN_API mdn_status mdn_config_parse(const char* json_text, mdn_config** out);
/* Merges a JSON file into an existing configuration. */
MDN_API mdn_status mdn_config_merge_file(mdn_config* cfg, const char* path);
/* Dotted key override, e.g. ("step.mu", "0.01"). Validated on use. */
MDN_API mdn_status mdn_config_set(mdn_config* cfg, const char* key, const char* value);
/* Value at a dotted key: strings unquoted, other values as JSON text.
   Owned by cfg until the next call. */
MDN_API mdn_status mdn_config_get(mdn_config* cfg, const char* key, const char** out);
/* Fully resolved configuration as JSON; owned by cfg until the next call. */
MDN_API mdn_status mdn_config_json(mdn_config* cfg, const char** out);
MDN_API void mdn_config_free(mdn_config* cfg);

/* Monte-Carlo MSD curve (tracking when tracking_flip >= 0). CSV: n,msd_db */
MDN_API mdn_status mdn_run(const mdn_config* cfg, mdn_result** out);
/* mu x n_d grid. CSV: mu,n_d,sim_db,theory_db,diverged */
MDN_API mdn_status mdn_sweep(const mdn_config* cfg, mdn_result** out);
/* Comparison study (compare.figure, compare.input). CSV: n,msd_db,algorithm */
MDN_API mdn_status mdn_compare(const mdn_config* cfg, mdn_result** out);
/* Step bounds and theoretical MSD curve. CSV: n,msd_db,mu,n_d */
MDN_API mdn_status mdn_theory(const mdn_config* cfg, mdn_result** out);
/* Operation counts. CSV: algorithm,multiplications,additions,dmi */
MDN_API mdn_status mdn_complexity(const mdn_config* cfg, mdn_result** out);
/* Raw u, v, d of trial 0. CSV: n,node,u,v,d */
MDN_API mdn_status mdn_signals(const mdn_config* cfg, long samples, mdn_result** out);
/* Compiled-in topology presets, one name per line. */
MDN_API mdn_status mdn_presets_list(mdn_result** out);

MDN_API const char* mdn_result_csv(const mdn_result* r);
/* key=value lines. */
MDN_API const char* mdn_result_summary(const mdn_result* r);
MDN_API int mdn_result_diverged(const mdn_result* r);
/* Number of values in the primary numeric series (MSD in dB per sample). */
MDN_API size_t mdn_result_length(const mdn_result* r);
MDN_API const double* mdn_result_values(const mdn_result* r);
MDN_API mdn_status mdn_result_write_csv(const mdn_result* r, const char* path);
MDN_API void mdn_result_free(mdn_result* r);

#ifdef __cplusplus
}
#endif

#endif
