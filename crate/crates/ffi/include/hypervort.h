#ifndef HYPERVORT_H
#define HYPERVORT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum HvStatus {
  HV_STATUS_OK = 0,
  HV_STATUS_NULL_POINTER = 1,
  HV_STATUS_INVALID_ARGUMENT = 2,
  HV_STATUS_INVALID_CONFIG = 3,
  HV_STATUS_BLOW_UP = 4,
  HV_STATUS_IO = 5,
  HV_STATUS_BUFFER_TOO_SMALL = 6,
  HV_STATUS_PANIC = 7,
  HV_STATUS_OTHER = 8,
} HvStatus;

/**
 * Configuration parsed from TOML.
 */
typedef struct HvConfig HvConfig;

/**
 * One trajectory advanced step by step.
 */
typedef struct HvSimulation HvSimulation;

typedef struct HvObservables {
  double energy;
  double enstrophy;
  double h1;
  double h2;
  double l3;
} HvObservables;

/**
 * Summary of a law comparison on enstrophy and energy.
 */
typedef struct HvLawSummary {
  double mean_weight;
  double weight_stderr;
  double effective_sample_size;
  double enstrophy_z;
  double energy_z;
  bool passed;
} HvLawSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, or 0 if none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t hv_last_error_message(char *buf, size_t len);

/**
 * Static NUL-terminated version string.
 */
const char *hv_version(void);

/**
 * Parse a TOML experiment description into a new handle.
 *
 * # Safety
 * `toml` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum HvStatus hv_config_from_toml(const char *toml, struct HvConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from [`hv_config_from_toml`] not yet freed.
 */
void hv_config_free(struct HvConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live config handle.
 */
enum HvStatus hv_config_set_seed(struct HvConfig *cfg, uint64_t seed);

/**
 * Start trajectory `path_id` of the configured ensemble at `t = 0`.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum HvStatus hv_simulation_new(const struct HvConfig *cfg,
                                uint64_t path_id,
                                struct HvSimulation **out);

/**
 * # Safety
 * `sim` must be null or a live simulation handle.
 */
void hv_simulation_free(struct HvSimulation *sim);

/**
 * Advance by `steps` time steps. The noise sequence matches the CLI's
 * `simulate` for the same seed and path id.
 *
 * # Safety
 * `sim` must be a live simulation handle.
 */
enum HvStatus hv_simulation_step(struct HvSimulation *sim, size_t steps);

/**
 * # Safety
 * `sim` must be a live simulation handle and `t` a valid pointer.
 */
enum HvStatus hv_simulation_time(const struct HvSimulation *sim, double *t);

/**
 * # Safety
 * `sim` must be a live simulation handle and `out` a valid pointer.
 */
enum HvStatus hv_simulation_observables(const struct HvSimulation *sim, struct HvObservables *out);

/**
 * Number of stored (half-lattice) modes.
 *
 * # Safety
 * `sim` must be a live simulation handle and `out` a valid pointer.
 */
enum HvStatus hv_simulation_mode_count(const struct HvSimulation *sim, size_t *out);

/**
 * Write the stored modes: `kx, ky, kz` into `k` (3 per mode) and
 * `re u1, im u1, re u2, im u2` of the vorticity into `coeffs` (4 per mode).
 * Either buffer may be null to skip it.
 *
 * # Safety
 * Non-null buffers must hold `3 * modes` and `4 * modes` elements, where
 * `modes` is given as `capacity` and must be at least the mode count.
 */
enum HvStatus hv_simulation_coefficients(const struct HvSimulation *sim,
                                         int32_t *k,
                                         double *coeffs,
                                         size_t capacity);

/**
 * Closed-form `E‖ζ(t)‖²_{H^a}` of the truncated OU process from zero.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HvStatus hv_ou_expected_sobolev_sq(double b,
                                        double c,
                                        size_t n,
                                        double a,
                                        double t,
                                        double *out);

/**
 * Compare the full and transport-only laws on enstrophy and energy with
 * `paths` samples per ensemble.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum HvStatus hv_compare_laws(const struct HvConfig *cfg, size_t paths, struct HvLawSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERVORT_H */
