#ifndef SON_EXPM_H
#define SON_EXPM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Evaluation route for [`son_expm`].
 */
typedef enum SonMethod {
  /**
   * Closed form, companion route on degenerate spectra.
   */
  SON_METHOD_CLOSED = 0,
  /**
   * Reported by the closed route when it took the companion fallback.
   */
  SON_METHOD_FALLBACK = 1,
  SON_METHOD_TAYLOR = 2,
  SON_METHOD_COMPANION = 3,
} SonMethod;

/**
 * Status codes. The non-zero values match the command-line exit codes.
 */
typedef enum SonStatus {
  SON_STATUS_OK = 0,
  /**
   * Bad dimension, length, index or non-finite input.
   */
  SON_STATUS_USAGE = 2,
  /**
   * Input violates a mathematical precondition.
   */
  SON_STATUS_INVARIANT = 3,
  /**
   * A numerical procedure failed.
   */
  SON_STATUS_NUMERICAL = 4,
  /**
   * A required pointer was null.
   */
  SON_STATUS_NULL_POINTER = 5,
  /**
   * An output buffer is too small.
   */
  SON_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * Internal panic caught at the boundary.
   */
  SON_STATUS_PANIC = 7,
} SonStatus;

/**
 * Opaque exponential result.
 */
typedef struct SonRotation SonRotation;

/**
 * Opaque so(n) element.
 */
typedef struct SonVector SonVector;

/**
 * Normalized invariants. Entries that do not apply to `n` are NaN.
 */
typedef struct SonInvariants {
  size_t n;
  double v_norm;
  double xi;
  double zeta;
  double eta;
  double chi;
  double eta7;
  double eta9;
  bool in_region;
} SonInvariants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length without the NUL, or 0
 * when there is none.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t son_last_error_message(char *buf, size_t cap);

/**
 * Number of coefficients of so(n), `n(n-1)/2`; 0 for unsupported `n`.
 */
size_t son_algebra_dim(size_t n);

/**
 * Creates an so(n) element from `len` coefficients in generator order.
 *
 * # Safety
 * `v` must point to `len` readable doubles; `out` must be writable.
 */
enum SonStatus son_vector_new(size_t n, const double *v, size_t len, struct SonVector **out);

/**
 * # Safety
 * `v` must be null or a handle from [`son_vector_new`] not yet freed.
 */
void son_vector_free(struct SonVector *v);

/**
 * Exponential with the default degeneracy threshold, or `delta` when it is
 * non-negative.
 *
 * # Safety
 * `v` must be a live handle; `out` must be writable.
 */
enum SonStatus son_expm(const struct SonVector *v,
                        enum SonMethod method,
                        double delta,
                        struct SonRotation **out);

/**
 * G2 exponential of 14 parameters.
 *
 * # Safety
 * `w` must point to `len` readable doubles; `out` must be writable.
 */
enum SonStatus son_expm_g2(const double *w, size_t len, struct SonRotation **out);

/**
 * Writes the 21 so(7) coefficients of a g2 element into `out`.
 *
 * # Safety
 * `w` must point to `len` readable doubles, `out` to `cap` writable ones.
 */
enum SonStatus son_embed_g2(const double *w, size_t len, double *out, size_t cap);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
void son_rotation_free(struct SonRotation *r);

/**
 * Matrix dimension n; 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t son_rotation_dim(const struct SonRotation *r);

/**
 * Route that produced the matrix.
 *
 * # Safety
 * `r` must be a live handle.
 */
enum SonMethod son_rotation_method(const struct SonRotation *r);

/**
 * Copies the matrix row-major into `out`, which must hold `n*n` doubles.
 *
 * # Safety
 * `r` must be a live handle and `out` must point to `cap` writable doubles.
 */
enum SonStatus son_rotation_copy(const struct SonRotation *r, double *out, size_t cap);

/**
 * `‖RᵀR - I‖_F`.
 *
 * # Safety
 * `r` must be a live handle.
 */
double son_rotation_orthogonality_residual(const struct SonRotation *r);

/**
 * Largest violation of the octonion structure constants under `r` (7x7 only).
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum SonStatus son_g2_automorphism_residual(const struct SonRotation *r, double *out);

/**
 * Largest g2 constraint residual of an so(7) element.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum SonStatus son_g2_constraint_residual(const struct SonVector *v, double *out);

/**
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum SonStatus son_invariants(const struct SonVector *v, struct SonInvariants *out);

/**
 * Torus angles, descending. `count` receives `n / 2`; `out` must hold that
 * many doubles.
 *
 * # Safety
 * `v` must be a live handle, `out` must point to `cap` writable doubles and
 * `count` must be writable.
 */
enum SonStatus son_torus_angles(const struct SonVector *v, double *out, size_t cap, size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SON_EXPM_H */
