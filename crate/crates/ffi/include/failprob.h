#ifndef FAILPROB_H
#define FAILPROB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  FP_STATUS_INVALID_CONFIG = 2,
  FP_STATUS_PARSE = 3,
  FP_STATUS_NUMERICAL = 4,
  FP_STATUS_TOO_MANY_DISCARDS = 5,
  FP_STATUS_IO = 6,
  FP_STATUS_PANIC = 7,
} FpStatus;

/*
 Estimator configuration.
 */
typedef struct FpConfig FpConfig;

/*
 Factorized field and PDE problem for one configuration.
 */
typedef struct FpSimulation FpSimulation;

/*
 Summary of one estimate.
 */
typedef struct FpEstimate {
  double p_hat;
  double std;
  double rel_err;
  uint64_t n;
  uint64_t hits;
  uint64_t discarded;
  double wall_time_s;
} FpEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer
 stays valid until the next call into this library on the same thread.
 */
const char *fp_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fp_version(void);

/*
 Default configuration for `dim` = 1 or 2.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum FpStatus fp_config_new(uint32_t dim, struct FpConfig **out);

/*
 Configuration from TOML text using the command-line configuration keys.

 # Safety
 `toml` must be a NUL-terminated string and `out` writable.
 */
enum FpStatus fp_config_from_toml(const char *toml, struct FpConfig **out);

/*
 # Safety
 `config` must be null or a handle from `fp_config_new`/`fp_config_from_toml`
 that has not been freed.
 */
void fp_config_free(struct FpConfig *config);

/*
 Failure threshold `b`.

 # Safety
 `config` must be a live configuration handle.
 */
enum FpStatus fp_config_set_threshold(struct FpConfig *config, double value);

/*
 Number of samples.

 # Safety
 `config` must be a live configuration handle.
 */
enum FpStatus fp_config_set_samples(struct FpConfig *config, uint64_t value);

/*
 Master seed.

 # Safety
 `config` must be a live configuration handle.
 */
enum FpStatus fp_config_set_seed(struct FpConfig *config, uint64_t value);

/*
 Estimator, one of the `FpMethod` values.

 # Safety
 `config` must be a live configuration handle.
 */
enum FpStatus fp_config_set_method(struct FpConfig *config, uint32_t value);

/*
 Worker threads; 0 selects the default.

 # Safety
 `config` must be a live configuration handle.
 */
enum FpStatus fp_config_set_workers(struct FpConfig *config, uint32_t value);

/*
 Checks the configuration without running anything.

 # Safety
 `config` must be a live configuration handle.
 */
enum FpStatus fp_config_validate(const struct FpConfig *config);

/*
 Runs the configured estimator once.

 # Safety
 `config` must be a live handle and `out` writable.
 */
enum FpStatus fp_estimate(const struct FpConfig *config, struct FpEstimate *out);

/*
 Factorizes the covariance and sets up the PDE problem once, for repeated
 estimates at several thresholds.

 # Safety
 `config` must be a live handle and `out` writable.
 */
enum FpStatus fp_simulation_new(const struct FpConfig *config, struct FpSimulation **out);

/*
 # Safety
 `sim` must be null or a live simulation handle.
 */
void fp_simulation_free(struct FpSimulation *sim);

/*
 Number of grid nodes of the simulation, or 0 for a null handle.

 # Safety
 `sim` must be null or a live simulation handle.
 */
size_t fp_simulation_nodes(const struct FpSimulation *sim);

/*
 Estimates `P(sup |grad u| >= b)` with `n` samples, using the level and
 proposal settings of the configuration the simulation was built from.

 # Safety
 `sim` must be a live handle and `out` writable.
 */
enum FpStatus fp_simulation_estimate(const struct FpSimulation *sim,
                                     uint32_t method_code,
                                     double b,
                                     uint64_t n,
                                     uint64_t seed,
                                     struct FpEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAILPROB_H */
