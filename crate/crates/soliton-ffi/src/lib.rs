//! C ABI for the soliton library.
//!
//! Profiles are built from the same JSON bundle document the CLI accepts
//! (`{"kind": "line"|"vector", "base_eigenvalues": [...], "mu": ..., "K": ...}`)
//! and handed out as opaque pointers.  Every fallible call returns a
//! [`SolitonStatus`]; the per-thread message behind the most recent failure
//! is available from `soliton_last_error`.
//!
//! Memory rules: handles from `soliton_profile_build` are released with
//! `soliton_profile_free`; strings returned through `char**` out-params are
//! released with `soliton_string_free`.  Handles are immutable and safe to
//! share across threads; the error message is thread-local.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use soliton::config::{BundleConfig, ProfileInput};
use soliton::export::to_json_string;
use soliton::geometry::{default_grid, geometry_report};
use soliton::potential::invert_legendre;
use soliton::profile::{build_profile, MomentumProfile};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolitonStatus {
    Ok = 0,
    /// A pointer argument was null or a scalar argument was not finite.
    ErrInvalidArgument = 1,
    /// The bundle document violates the spec invariants.
    ErrInvalidSpec = 2,
    /// The evaluation point lies outside the domain of the quantity.
    ErrDomain = 3,
    /// An internal integrator or quadrature could not meet its tolerance.
    ErrNumerics = 4,
    /// The input was not valid JSON for the expected schema.
    ErrJson = 5,
    /// A panic was caught at the boundary (a bug; please report).
    ErrInternal = 6,
}

/// Opaque momentum-profile handle.
pub struct SolitonProfile {
    inner: MomentumProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn classify(err: &soliton::Error) -> SolitonStatus {
    use soliton::Error::*;
    match err {
        InvalidSpec(_) | ZeroMu => SolitonStatus::ErrInvalidSpec,
        Domain(_) | Gauge(_) | OrderMismatch { .. } | NotApplicable(_) | InsufficientRange(_) => {
            SolitonStatus::ErrDomain
        }
        StepFailure(_) | ToleranceNotMet(_) => SolitonStatus::ErrNumerics,
    }
}

fn guard<F: FnOnce() -> SolitonStatus>(f: F) -> SolitonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SolitonStatus::ErrInternal
        }
    }
}

/// Message behind the most recent failure on this thread.  The pointer stays
/// valid until the next failing call on the same thread; never free it.
#[no_mangle]
pub extern "C" fn soliton_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a profile from a JSON bundle document.  On success writes a handle
/// to `out`; the caller owns it and must release it with
/// `soliton_profile_free`.
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated UTF-8 string; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soliton_profile_build(
    spec_json: *const c_char,
    out: *mut *mut SolitonProfile,
) -> SolitonStatus {
    guard(|| {
        if spec_json.is_null() || out.is_null() {
            set_error("null argument");
            return SolitonStatus::ErrInvalidArgument;
        }
        let text = match unsafe { CStr::from_ptr(spec_json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("spec_json is not UTF-8");
                return SolitonStatus::ErrInvalidArgument;
            }
        };
        let cfg: BundleConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(&format!("bundle JSON: {e}"));
                return SolitonStatus::ErrJson;
            }
        };
        let spec = match cfg.resolve() {
            Ok(ProfileInput::Bundle(s)) => s,
            Ok(ProfileInput::Reference) => {
                set_error("the reference profile has no closed form to build");
                return SolitonStatus::ErrInvalidSpec;
            }
            Err(e) => {
                set_error(&e);
                return SolitonStatus::ErrInvalidSpec;
            }
        };
        match build_profile(&spec) {
            Ok(p) => {
                unsafe {
                    *out = Box::into_raw(Box::new(SolitonProfile { inner: p }));
                }
                SolitonStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                classify(&e)
            }
        }
    })
}

/// Release a profile handle.  Null is a no-op.
///
/// # Safety
/// `profile` must be a handle from `soliton_profile_build` that has not been
/// freed already.
#[no_mangle]
pub unsafe extern "C" fn soliton_profile_free(profile: *mut SolitonProfile) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}

unsafe fn eval_into(
    profile: *const SolitonProfile,
    out: *mut f64,
    f: impl FnOnce(&MomentumProfile) -> soliton::Result<f64>,
) -> SolitonStatus {
    if profile.is_null() || out.is_null() {
        set_error("null argument");
        return SolitonStatus::ErrInvalidArgument;
    }
    match f(unsafe { &(*profile).inner }) {
        Ok(v) => {
            unsafe { *out = v };
            SolitonStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            classify(&e)
        }
    }
}

/// Momentum profile `phi(tau)` for `tau >= 0`.
///
/// # Safety
/// `profile` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soliton_eval_phi(
    profile: *const SolitonProfile,
    tau: f64,
    out: *mut f64,
) -> SolitonStatus {
    guard(|| unsafe { eval_into(profile, out, |p| p.eval_phi(tau)) })
}

/// ODE-implied derivative `phi'(tau)`.
///
/// # Safety
/// `profile` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soliton_eval_phi_prime(
    profile: *const SolitonProfile,
    tau: f64,
    out: *mut f64,
) -> SolitonStatus {
    guard(|| unsafe { eval_into(profile, out, |p| p.eval_phi_prime(tau)) })
}

/// Soliton ODE residual at `tau > 0` (the ground-truth correctness signal).
///
/// # Safety
/// `profile` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soliton_ode_residual(
    profile: *const SolitonProfile,
    tau: f64,
    out: *mut f64,
) -> SolitonStatus {
    guard(|| unsafe { eval_into(profile, out, |p| p.ode_residual(tau)) })
}

/// The series/closed-form switch point of the evaluation.
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn soliton_tau_switch(profile: *const SolitonProfile) -> f64 {
    if profile.is_null() {
        return f64::NAN;
    }
    unsafe { (*profile).inner.tau_switch() }
}

/// Large-tau limit `-rhs/mu` of the profile (meaningful for `mu < 0`).
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn soliton_asymptote(profile: *const SolitonProfile) -> f64 {
    if profile.is_null() {
        return f64::NAN;
    }
    let p = unsafe { &(*profile).inner };
    -(p.rhs() as f64) / p.mu_f64()
}

/// Full geometry report as a JSON string written to `out_json` (release it
/// with `soliton_string_free`).  Runs the default diagnostic grid; for
/// `mu < 0` a potential table over the default window feeds the
/// volume-growth fit.
///
/// # Safety
/// `profile` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soliton_geometry_report_json(
    profile: *const SolitonProfile,
    out_json: *mut *mut c_char,
) -> SolitonStatus {
    guard(|| {
        if profile.is_null() || out_json.is_null() {
            set_error("null argument");
            return SolitonStatus::ErrInvalidArgument;
        }
        let p = unsafe { &(*profile).inner };
        let table = if p.mu_f64() < 0.0 {
            match invert_legendre(p, 1.0, -20.0, 600.0, 4096) {
                Ok(t) => Some(t),
                Err(e) => {
                    set_error(&e.to_string());
                    return classify(&e);
                }
            }
        } else {
            None
        };
        match geometry_report(p, table.as_ref(), &default_grid()) {
            Ok(rep) => {
                let json = to_json_string(&rep);
                let c = CString::new(json).unwrap_or_default();
                unsafe { *out_json = c.into_raw() };
                SolitonStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                classify(&e)
            }
        }
    })
}

/// Release a string returned through a `char**` out-parameter.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn soliton_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
