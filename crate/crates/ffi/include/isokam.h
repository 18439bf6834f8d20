#ifndef ISOKAM_H
#define ISOKAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum IsokamStatus {
  ISOKAM_STATUS_OK = 0,
  ISOKAM_STATUS_NULL_POINTER = 1,
  ISOKAM_STATUS_INVALID_UTF8 = 2,
  ISOKAM_STATUS_INVALID_INPUT = 3,
  /**
   * Output buffer too small; the required length was written.
   */
  ISOKAM_STATUS_BUFFER_TOO_SMALL = 4,
  /**
   * A Dolgopyat scan found resonant modes (a finding, not a failure of the call).
   */
  ISOKAM_STATUS_DOLGOPYAT_FAILS = 5,
  ISOKAM_STATUS_OBSTRUCTION_TOO_LARGE = 6,
  /**
   * Divergence, or no convergence within max_steps.
   */
  ISOKAM_STATUS_DIVERGED = 7,
  ISOKAM_STATUS_VERIFICATION_FAILED = 8,
  /**
   * Any other numerical failure, such as ill conditioning or a failed composition.
   */
  ISOKAM_STATUS_NUMERICAL = 9,
  ISOKAM_STATUS_PANIC = 10,
} IsokamStatus;

/**
 * Operator whose block spectrum is requested.
 */
typedef enum IsokamOperator {
  ISOKAM_OPERATOR_D0D0_STAR = 0,
  ISOKAM_OPERATOR_D1_STAR_D1 = 1,
  ISOKAM_OPERATOR_BOX = 2,
} IsokamOperator;

typedef enum IsokamFlavor {
  ISOKAM_FLAVOR_D0 = 0,
  ISOKAM_FLAVOR_BOX = 1,
  ISOKAM_FLAVOR_RELATIONS = 2,
  ISOKAM_FLAVOR_DOLGOPYAT = 3,
} IsokamFlavor;

/**
 * Opaque group presentation plus isometric action.
 */
typedef struct IsokamModel IsokamModel;

/**
 * Opaque real vector field given by Fourier coefficients.
 */
typedef struct IsokamSpectrum IsokamSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *isokam_last_error(void);

/**
 * Release a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void isokam_string_free(char *s);

/**
 * Build a model from a name such as "circle:golden" or "periodic:2,3".
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IsokamStatus isokam_model_from_name(const char *name, struct IsokamModel **out);

/**
 * Build a model from JSON `{generators, relations, action: {kind, ...}}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IsokamStatus isokam_model_from_json(const char *json, struct IsokamModel **out);

/**
 * # Safety
 * `m` must come from a model constructor and not have been freed already. NULL is ignored.
 */
void isokam_model_free(struct IsokamModel *m);

/**
 * Number of generators and torus dimension (sphere models report 2).
 *
 * # Safety
 * All pointers must be valid.
 */
enum IsokamStatus isokam_model_shape(const struct IsokamModel *m, size_t *generators, size_t *dim);

/**
 * Serialize a model to JSON.
 *
 * # Safety
 * `m` and `out` must be valid; free the result with `isokam_string_free`.
 */
enum IsokamStatus isokam_model_to_json(const struct IsokamModel *m, char **out);

/**
 * Parse a spectrum from `{dim, modes: [{k, re, im}]}` (canonical frequencies only).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IsokamStatus isokam_spectrum_from_json(const char *json, struct IsokamSpectrum **out);

/**
 * # Safety
 * `s` and `out` must be valid; free the result with `isokam_string_free`.
 */
enum IsokamStatus isokam_spectrum_to_json(const struct IsokamSpectrum *s, char **out);

/**
 * # Safety
 * `s` must come from a spectrum constructor and not have been freed already. NULL is ignored.
 */
void isokam_spectrum_free(struct IsokamSpectrum *s);

/**
 * L^2 norm, Sobolev norm of order `sobolev_r` and weighted (analytic) norm of radius
 * `radius` in manifold dimension `n`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum IsokamStatus isokam_spectrum_norms(const struct IsokamSpectrum *s,
                                        double sobolev_r,
                                        double radius,
                                        size_t n,
                                        double *l2,
                                        double *sobolev,
                                        double *weighted);

/**
 * Ascending eigenvalues of one operator on the block with key `sq_norm`.
 * Writes the count to `len`; when `capacity` is too small nothing else is written and
 * `BufferTooSmall` is returned. `kernel_dim` receives the number of eigenvalues at or
 * below the kernel threshold.
 *
 * # Safety
 * `m`, `len` and `kernel_dim` must be valid; `values` must hold `capacity` doubles (or be NULL
 * when `capacity` is 0).
 */
enum IsokamStatus isokam_block_eigenvalues(const struct IsokamModel *m,
                                           enum IsokamOperator op,
                                           uint64_t sq_norm,
                                           double *values,
                                           size_t capacity,
                                           size_t *len,
                                           size_t *kernel_dim);

/**
 * Diophantine scan up to `max_sq_norm`; the report is written as JSON.
 * Returns `DolgopyatFails` (with the report written) when a resonant mode is found.
 *
 * # Safety
 * `m` and `out` must be valid; free the result with `isokam_string_free`.
 */
enum IsokamStatus isokam_diophantine_scan(const struct IsokamModel *m,
                                          enum IsokamFlavor flavor,
                                          uint64_t max_sq_norm,
                                          char **out);

/**
 * Integer coefficients y_1..y_J (J = floor(n/2)) of the cyclic decomposition of order n.
 * Same buffer protocol as `isokam_block_eigenvalues`.
 *
 * # Safety
 * `len` must be valid; `y` must hold `capacity` integers (or be NULL when `capacity` is 0).
 */
enum IsokamStatus isokam_cyclic_coefficients(uint64_t n, int64_t *y, size_t capacity, size_t *len);

/**
 * Run the KAM iteration from a JSON run description (same schema as the CLI `kam`
 * command). Once the run has started the final report JSON is always written, and the
 * status names the failure if there was one. Invalid descriptions fail before any output.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` valid; free the result with
 * `isokam_string_free`.
 */
enum IsokamStatus isokam_run_kam(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOKAM_H */
