#ifndef OQC_H
#define OQC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OqcStatus {
  OQC_STATUS_OK = 0,
  OQC_STATUS_NULL_POINTER = 1,
  /**
   * Malformed UTF-8 or JSON syntax.
   */
  OQC_STATUS_PARSE = 2,
  OQC_STATUS_DIMENSION = 3,
  OQC_STATUS_OUT_OF_RANGE = 4,
  /**
   * Any other validation or numerical failure.
   */
  OQC_STATUS_INVALID = 5,
  OQC_STATUS_BUFFER_TOO_SMALL = 6,
  OQC_STATUS_PANIC = 7,
} OqcStatus;

typedef enum OqcSimulationMode {
  OQC_SIMULATION_MODE_ONE_WAY = 0,
  OQC_SIMULATION_MODE_ROUNDS = 1,
  OQC_SIMULATION_MODE_INTERACTIVE = 2,
} OqcSimulationMode;

/**
 * Opaque density operator.
 */
typedef struct OqcDensity OqcDensity;

/**
 * Opaque ensemble of pure states.
 */
typedef struct OqcEnsemble OqcEnsemble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *oqc_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *oqc_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from an `oqc_*_to_json` call and not be freed twice.
 */
void oqc_string_free(char *s);

/**
 * Parses a density operator (or pure state) JSON document.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum OqcStatus oqc_density_from_json(const char *json, struct OqcDensity **out);

/**
 * # Safety
 * `rho` must be NULL or a live handle from this library.
 */
void oqc_density_free(struct OqcDensity *rho);

/**
 * Total dimension, or 0 for NULL.
 *
 * # Safety
 * `rho` must be NULL or a live handle.
 */
size_t oqc_density_dim(const struct OqcDensity *rho);

/**
 * # Safety
 * Handles must be live; `out` writable.
 */
enum OqcStatus oqc_entropy(const struct OqcDensity *rho, double *out);

/**
 * # Safety
 * Handles must be live; `out` writable.
 */
enum OqcStatus oqc_fidelity(const struct OqcDensity *rho,
                            const struct OqcDensity *sigma,
                            double *out);

/**
 * Max-relative entropy in bits; `+inf` when the support condition fails.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum OqcStatus oqc_dmax(const struct OqcDensity *rho, const struct OqcDensity *sigma, double *out);

/**
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum OqcStatus oqc_ensemble_from_json(const char *json, struct OqcEnsemble **out);

/**
 * Samples a hard ensemble, retrying up to `max_retries` batches until the
 * concentration checks pass.
 *
 * # Safety
 * `out` must be writable.
 */
enum OqcStatus oqc_hard_ensemble_build(size_t d,
                                       double delta,
                                       size_t m,
                                       double eps,
                                       uint64_t seed,
                                       size_t max_retries,
                                       struct OqcEnsemble **out);

/**
 * # Safety
 * `ens` must be NULL or a live handle.
 */
void oqc_ensemble_free(struct OqcEnsemble *ens);

/**
 * Number of states, or 0 for NULL.
 *
 * # Safety
 * `ens` must be NULL or a live handle.
 */
size_t oqc_ensemble_len(const struct OqcEnsemble *ens);

/**
 * Serializes the ensemble; release the result with [`oqc_string_free`].
 *
 * # Safety
 * `ens` must be live; `out` writable.
 */
enum OqcStatus oqc_ensemble_to_json(const struct OqcEnsemble *ens, char **out);

/**
 * Holevo capacity of the classical-quantum channel `j ↦ |Ψ_j><Ψ_j|`.
 *
 * # Safety
 * `ens` must be live; `out` writable.
 */
enum OqcStatus oqc_cq_capacity(const struct OqcEnsemble *ens, double *out);

/**
 * Simulation-cost lower bound; fails with `Invalid` when `eta` is outside
 * the admissibility gate of the mode. `rounds` is read only for `Rounds`.
 *
 * # Safety
 * `out` must be writable.
 */
enum OqcStatus oqc_simulation_cost_lower(double d,
                                         double delta,
                                         double eta,
                                         enum OqcSimulationMode mode,
                                         uint32_t rounds,
                                         double *out);

/**
 * Elias-delta codeword of `n ≥ 1`, packed MSB-first. `bit_len` receives the
 * codeword length; when `cap` bytes are too few nothing is written to `buf`
 * and `BufferTooSmall` is returned.
 *
 * # Safety
 * `buf` must hold `cap` bytes (may be NULL when `cap` is 0); `bit_len` writable.
 */
enum OqcStatus oqc_elias_encode(uint64_t n, uint8_t *buf, size_t cap, size_t *bit_len);

/**
 * Decodes one Elias-delta codeword from the first `bit_len` bits of `buf`.
 *
 * # Safety
 * `buf` must hold `ceil(bit_len / 8)` bytes; outputs writable.
 */
enum OqcStatus oqc_elias_decode(const uint8_t *buf,
                                size_t bit_len,
                                uint64_t *value,
                                size_t *consumed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OQC_H */
