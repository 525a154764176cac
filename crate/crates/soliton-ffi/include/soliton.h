/* C ABI for the soliton library. See include/soliton.h consumers note in the README. */

#pragma once

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible entry point.
 */
typedef enum SolitonStatus {
  SOLITON_STATUS_OK = 0,
  /*
   A pointer argument was null or a scalar argument was not finite.
   */
  SOLITON_STATUS_ERR_INVALID_ARGUMENT = 1,
  /*
   The bundle document violates the spec invariants.
   */
  SOLITON_STATUS_ERR_INVALID_SPEC = 2,
  /*
   The evaluation point lies outside the domain of the quantity.
   */
  SOLITON_STATUS_ERR_DOMAIN = 3,
  /*
   An internal integrator or quadrature could not meet its tolerance.
   */
  SOLITON_STATUS_ERR_NUMERICS = 4,
  /*
   The input was not valid JSON for the expected schema.
   */
  SOLITON_STATUS_ERR_JSON = 5,
  /*
   A panic was caught at the boundary (a bug; please report).
   */
  SOLITON_STATUS_ERR_INTERNAL = 6,
} SolitonStatus;

/*
 Opaque momentum-profile handle.
 */
typedef struct SolitonProfile SolitonProfile;

/*
 Message behind the most recent failure on this thread.  The pointer stays
 valid until the next failing call on the same thread; never free it.
 */
const char *soliton_last_error(void);

/*
 Build a profile from a JSON bundle document.  On success writes a handle
 to `out`; the caller owns it and must release it with
 `soliton_profile_free`.

 # Safety
 `spec_json` must be a valid NUL-terminated UTF-8 string; `out` must be a
 valid pointer.
 */
enum SolitonStatus soliton_profile_build(const char *spec_json, struct SolitonProfile **out);

/*
 Release a profile handle.  Null is a no-op.

 # Safety
 `profile` must be a handle from `soliton_profile_build` that has not been
 freed already.
 */
void soliton_profile_free(struct SolitonProfile *profile);

/*
 Momentum profile `phi(tau)` for `tau >= 0`.

 # Safety
 `profile` must be a live handle; `out` a valid pointer.
 */
enum SolitonStatus soliton_eval_phi(const struct SolitonProfile *profile, double tau, double *out);

/*
 ODE-implied derivative `phi'(tau)`.

 # Safety
 `profile` must be a live handle; `out` a valid pointer.
 */
enum SolitonStatus soliton_eval_phi_prime(const struct SolitonProfile *profile,
                                          double tau,
                                          double *out);

/*
 Soliton ODE residual at `tau > 0` (the ground-truth correctness signal).

 # Safety
 `profile` must be a live handle; `out` a valid pointer.
 */
enum SolitonStatus soliton_ode_residual(const struct SolitonProfile *profile,
                                        double tau,
                                        double *out);

/*
 The series/closed-form switch point of the evaluation.

 # Safety
 `profile` must be a live handle.
 */
double soliton_tau_switch(const struct SolitonProfile *profile);

/*
 Large-tau limit `-rhs/mu` of the profile (meaningful for `mu < 0`).

 # Safety
 `profile` must be a live handle.
 */
double soliton_asymptote(const struct SolitonProfile *profile);

/*
 Full geometry report as a JSON string written to `out_json` (release it
 with `soliton_string_free`).  Runs the default diagnostic grid; for
 `mu < 0` a potential table over the default window feeds the
 volume-growth fit.

 # Safety
 `profile` must be a live handle; `out_json` a valid pointer.
 */
enum SolitonStatus soliton_geometry_report_json(const struct SolitonProfile *profile,
                                                char **out_json);

/*
 Release a string returned through a `char**` out-parameter.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void soliton_string_free(char *s);
