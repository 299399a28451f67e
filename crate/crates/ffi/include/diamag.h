#ifndef DIAMAG_H
#define DIAMAG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DIAMAG_BOSE 1

#define DIAMAG_FERMI -1

#define DIAMAG_METHOD_EIG_FD 0

#define DIAMAG_METHOD_CONTOUR_FD 1

#define DIAMAG_METHOD_HELLMANN 2

typedef enum DiamagStatus {
  DIAMAG_OK = 0,
  /**
   * A required pointer argument was null.
   */
  DIAMAG_ERR_NULL = 1,
  /**
   * An argument is outside the admissible region.
   */
  DIAMAG_ERR_DOMAIN = 2,
  /**
   * Bad enumeration value or unsupported request.
   */
  DIAMAG_ERR_CONFIG = 3,
  /**
   * A numerical routine failed or refused.
   */
  DIAMAG_ERR_NUMERICAL = 4,
  /**
   * Internal panic; the library state is unaffected but the call failed.
   */
  DIAMAG_ERR_PANIC = 5,
} DiamagStatus;

/**
 * Eigenvalues of the discretized box Hamiltonian at a fixed field.
 */
typedef struct DiamagSpectrum DiamagSpectrum;

typedef struct DiamagComplex {
  double re;
  double im;
} DiamagComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *diamag_last_error(void);

/**
 * `f_sigma(zeta)` for the given statistics.
 */
enum DiamagStatus diamag_f_value(double sigma,
                                 struct DiamagComplex zeta,
                                 int32_t statistics,
                                 struct DiamagComplex *result);

/**
 * Bulk pressure from the Landau-level sum.
 */
enum DiamagStatus diamag_bulk_pressure(double beta,
                                       double omega,
                                       int32_t statistics,
                                       struct DiamagComplex z,
                                       struct DiamagComplex *result);

/**
 * `d^order P / d omega^order` of the bulk gas. `error_estimate` may be null.
 */
enum DiamagStatus diamag_bulk_chi(double beta,
                                  double omega,
                                  int32_t statistics,
                                  struct DiamagComplex z,
                                  uint32_t order,
                                  struct DiamagComplex *result,
                                  double *error_estimate);

/**
 * Spectrum of the Dirichlet box of side `side` with `n` interior points per
 * axis of the cross-section. `beta` sets how many longitudinal levels are
 * kept. Release the handle with `diamag_spectrum_free`.
 */
enum DiamagStatus diamag_spectrum_new(double side,
                                      size_t n,
                                      double beta,
                                      double omega,
                                      struct DiamagSpectrum **handle);

/**
 * # Safety
 * `handle` must be null or come from `diamag_spectrum_new` and not have been freed.
 */
void diamag_spectrum_free(struct DiamagSpectrum *handle);

/**
 * Number of levels held by `handle`.
 */
enum DiamagStatus diamag_spectrum_len(const struct DiamagSpectrum *handle, size_t *len);

/**
 * Copies up to `capacity` levels in increasing order into `buffer` and
 * stores the number copied in `written` (which may be null).
 */
enum DiamagStatus diamag_spectrum_copy(const struct DiamagSpectrum *handle,
                                       double *buffer,
                                       size_t capacity,
                                       size_t *written);

/**
 * Box pressure from the level sum over `handle` (at the field it was built with).
 */
enum DiamagStatus diamag_finite_pressure(const struct DiamagSpectrum *handle,
                                         double beta,
                                         int32_t statistics,
                                         struct DiamagComplex z,
                                         struct DiamagComplex *result);

/**
 * `d^order P_L / d omega^order` in the box, with one of the
 * `DIAMAG_METHOD_*` codes. `error_estimate` may be null.
 */
enum DiamagStatus diamag_finite_chi(double side,
                                    size_t n,
                                    double beta,
                                    double omega,
                                    int32_t statistics,
                                    struct DiamagComplex z,
                                    uint32_t order,
                                    int32_t method_code,
                                    struct DiamagComplex *result,
                                    double *error_estimate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIAMAG_H */
