#ifndef GROUNDSTATE_H
#define GROUNDSTATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_ARGUMENT = 2,
  GS_STATUS_NO_GROUND_STATE = 3,
  GS_STATUS_NUMERICAL = 4,
  GS_STATUS_NOT_FOUND = 5,
  GS_STATUS_IO = 6,
  GS_STATUS_BUFFER_TOO_SMALL = 7,
  GS_STATUS_PANIC = 8,
} GsStatus;

typedef enum GsVerdict {
  GS_VERDICT_HOLDS = 0,
  GS_VERDICT_FAILS = 1,
  GS_VERDICT_INCONCLUSIVE = 2,
} GsVerdict;

/*
 A located ground state with its functionals.
 */
typedef struct GsGroundState GsGroundState;

/*
 `S, N, P, I` and the four norms they are built from.
 */
typedef struct GsFunctionals {
  double action;
  double nehari;
  double pohozaev;
  double i_func;
  double grad_sq;
  double mass;
  double lp1;
  double l2s;
} GsFunctionals;

/*
 Rescaled data: coefficients of the rescaled equation and the distance to `W`.
 */
typedef struct GsRescaled {
  double alpha;
  double beta;
  double h1dot_dist;
  double residual;
} GsRescaled;

/*
 Outcome of the Pucci–Serrin check. The witness fields are meaningful only
 when `has_witness` is true.
 */
typedef struct GsPsSummary {
  enum GsVerdict verdict;
  /*
   `A_2, A_{p+1}, A_{q+1}, A_{2p}, A_{p+q}`.
   */
  double coefficients[5];
  double g_min;
  double u_min;
  bool has_witness;
  double witness_omega;
  double witness_u;
  double witness_g;
} GsPsSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null if none failed yet.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *gs_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *gs_version(void);

/*
 Solve `-Δu + ωu = u^p + u^{(d+2)/(d-2)}` with default tolerances. On success
 `*out` owns a new handle; release it with [`gs_ground_state_free`].

 # Safety
 `out` must be null or valid for one pointer write.
 */
enum GsStatus gs_solve(uint32_t d, double p, double omega, struct GsGroundState **out);

/*
 Release a handle from [`gs_solve`]; null is ignored.

 # Safety
 `h` must be null or a handle not yet freed.
 */
void gs_ground_state_free(struct GsGroundState *h);

/*
 The central height `u(0)`.

 # Safety
 `h` must be a live handle and `out` valid for one write.
 */
enum GsStatus gs_ground_state_m_star(const struct GsGroundState *h, double *out);

/*
 Number of stored profile nodes.

 # Safety
 `h` must be a live handle and `out` valid for one write.
 */
enum GsStatus gs_ground_state_len(const struct GsGroundState *h, size_t *out);

/*
 Copy the nodes `r`, values `u` and derivatives `u'` into caller buffers of
 capacity `cap`. Fails with `GS_STATUS_BUFFER_TOO_SMALL` if `cap` is below
 [`gs_ground_state_len`].

 # Safety
 Each buffer must be valid for `cap` writes.
 */
enum GsStatus gs_ground_state_copy_profile(const struct GsGroundState *h,
                                           double *r,
                                           double *u,
                                           double *du,
                                           size_t cap);

/*
 `u(r)` and `u'(r)` at any `r >= 0`, including the core and tail models.

 # Safety
 `h` must be a live handle; `u` and `du` valid for one write each.
 */
enum GsStatus gs_ground_state_eval(const struct GsGroundState *h, double r, double *u, double *du);

/*
 # Safety
 `h` must be a live handle and `out` valid for one write.
 */
enum GsStatus gs_ground_state_functionals(const struct GsGroundState *h, struct GsFunctionals *out);

/*
 # Safety
 `h` must be a live handle and `out` valid for one write.
 */
enum GsStatus gs_ground_state_rescaled(const struct GsGroundState *h, struct GsRescaled *out);

/*
 `W(r)`, the Talenti bubble normalized by `W(0) = 1`.

 # Safety
 `out` must be valid for one write.
 */
enum GsStatus gs_talenti(uint32_t d, double r, double *out);

/*
 `ΛW(r) = (d-2)/2 W + r W'`.

 # Safety
 `out` must be valid for one write.
 */
enum GsStatus gs_lambda_w(uint32_t d, double r, double *out);

/*
 Large-frequency limit of `β/α`; `GS_STATUS_INVALID_ARGUMENT` when a norm of `W` diverges.

 # Safety
 `out` must be valid for one write.
 */
enum GsStatus gs_limit_constant(uint32_t d, double p, double *out);

/*
 Run the Pucci–Serrin check with the default scan.

 # Safety
 `out` must be valid for one write.
 */
enum GsStatus gs_pscheck(uint32_t d, double p, double omega, struct GsPsSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROUNDSTATE_H */
