//! Independent brute-force validators.
//!
//! Nothing here touches the `nu`-formula code path: `Q` and `Q'/Q` are
//! rebuilt directly from the eigenvalue factors, the profile integral is done
//! by adaptive quadrature of the untransformed solution formula, and the ODE
//! march integrates the soliton equation numerically from a single
//! series-anchored initial value.  Agreement of these routes with the closed
//! form is the ground truth the library is accepted against.

use crate::bundle::{BundleKind, BundleSpec};
use crate::polyalg::rational_to_f64;
use crate::profile::MomentumProfile;
use crate::quad::adaptive_simpson;
use crate::rk::{integrate_to, RkOptions};
use crate::{Error, Result};

/// Quadrature floor for vector bundles: below this the formula is 0/0.
pub const VB_TAU_FLOOR: f64 = 1e-4;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub quad_tolerance: f64,
    pub rk_rel_tol: f64,
    pub rk_abs_tol: f64,
    pub fd_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            quad_tolerance: 1e-12,
            rk_rel_tol: 1e-10,
            rk_abs_tol: 1e-12,
            fd_step: 1e-5,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.quad_tolerance,
            self.rk_rel_tol,
            self.rk_abs_tol,
            self.fd_step,
        ];
        if all.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Domain("oracle tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `Q(x)` straight from the eigenvalue factors.
fn q_from_factors(spec: &BundleSpec, x: f64) -> f64 {
    match spec.kind {
        BundleKind::Line => spec
            .base_eigenvalues
            .iter()
            .map(|lambda| 1.0 + rational_to_f64(lambda) * x)
            .product(),
        BundleKind::Vector => {
            let base: f64 = spec
                .base_eigenvalues
                .iter()
                .map(|beta| {
                    let b = rational_to_f64(beta);
                    (1.0 + b) - b * x
                })
                .product();
            x.powi(spec.vanishing_order() as i32) * base
        }
    }
}

/// `Q'/Q` as a sum of logarithmic derivatives of the factors.
fn q_log_derivative(spec: &BundleSpec, x: f64) -> f64 {
    match spec.kind {
        BundleKind::Line => spec
            .base_eigenvalues
            .iter()
            .map(|lambda| {
                let l = rational_to_f64(lambda);
                l / (1.0 + l * x)
            })
            .sum(),
        BundleKind::Vector => {
            let base: f64 = spec
                .base_eigenvalues
                .iter()
                .map(|beta| {
                    let b = rational_to_f64(beta);
                    -b / ((1.0 + b) - b * x)
                })
                .sum();
            spec.vanishing_order() as f64 / x + base
        }
    }
}

/// `phi(tau)` by adaptive quadrature of the solution formula
///
/// ```text
/// phi(tau) = [ ∫_0^tau rhs e^{mu (tau - x)} Q(x) dx + K e^{mu tau} ] / Q(tau),
/// ```
///
/// written with the exponential factored so that no intermediate overflows
/// for `mu < 0`.  Independent of the `nu` antiderivative.
pub fn phi_by_quadrature(spec: &BundleSpec, tau: f64, cfg: &OracleConfig) -> Result<f64> {
    cfg.validate()?;
    spec.validate()?;
    let floor = match spec.kind {
        BundleKind::Line => 0.0,
        BundleKind::Vector => VB_TAU_FLOOR,
    };
    if !(tau > floor) {
        return Err(Error::Domain(format!(
            "quadrature oracle needs tau > {floor}, got {tau}"
        )));
    }
    let mu = spec.mu_f64();
    let rhs = spec.rhs() as f64;
    let integrand = |x: f64| -> Result<f64> {
        Ok(rhs * (mu * (tau - x)).exp() * q_from_factors(spec, x))
    };
    // coarse magnitude pass for the absolute tolerance
    let mut coarse = 0.0;
    let panels = 64;
    let h = tau / panels as f64;
    for i in 0..panels {
        let x0 = i as f64 * h;
        let xm = x0 + 0.5 * h;
        let x1 = x0 + h;
        coarse += h / 6.0 * (integrand(x0)? + 4.0 * integrand(xm)? + integrand(x1)?);
    }
    let abs_tol = cfg.quad_tolerance * coarse.abs().max(f64::MIN_POSITIVE);
    let integral = adaptive_simpson(integrand, 0.0, tau, abs_tol)?;
    let k_term = spec.k_f64() * (mu * tau).exp();
    Ok((integral + k_term) / q_from_factors(spec, tau))
}

/// Sampled curve from marching the soliton ODE.
#[derive(Clone, Debug)]
pub struct OdeMarchResult {
    pub taus: Vec<f64>,
    pub phis: Vec<f64>,
    /// max |march - eval_phi| over the samples
    pub max_deviation: f64,
}

/// March `phi' = rhs - (Q'/Q - mu) phi` forward from the switch point, with
/// the series value as initial condition, and record the deviation from the
/// closed-form evaluation at each sample.
pub fn phi_by_ode_march(
    profile: &MomentumProfile,
    tau_max: f64,
    cfg: &OracleConfig,
) -> Result<OdeMarchResult> {
    let tau0 = profile.tau_switch();
    if !(tau_max > tau0) {
        return Err(Error::Domain(format!(
            "tau_max = {tau_max} must exceed the march origin {tau0}"
        )));
    }
    let samples = 256;
    let lo = tau0.ln();
    let hi = tau_max.ln();
    let mut taus: Vec<f64> = (0..samples)
        .map(|i| (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp())
        .collect();
    // exp(ln(tau0)) can land an ulp off the march origin
    taus[0] = tau0;
    let phis = phi_by_ode_march_at(profile, &taus, cfg)?;
    let mut max_dev = 0.0f64;
    for (t, p) in taus.iter().zip(&phis) {
        max_dev = max_dev.max((p - profile.eval_phi(*t)?).abs());
    }
    Ok(OdeMarchResult {
        taus,
        phis,
        max_deviation: max_dev,
    })
}

/// March the soliton ODE to the given checkpoints (all >= the switch point,
/// ascending). Exposed for the validation command.
pub fn phi_by_ode_march_at(
    profile: &MomentumProfile,
    taus: &[f64],
    cfg: &OracleConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let spec = profile.spec().clone();
    let tau0 = profile.tau_switch();
    if taus.iter().any(|t| *t < tau0) {
        return Err(Error::Domain(format!(
            "march checkpoints must lie at or beyond tau_switch = {tau0}"
        )));
    }
    let y0 = profile.series().eval_f64(tau0);
    let mu = spec.mu_f64();
    let rhs = spec.rhs() as f64;
    let opts = RkOptions {
        rel_tol: cfg.rk_rel_tol,
        abs_tol: cfg.rk_abs_tol,
        max_steps: 4_000_000,
    };
    integrate_to(
        |t, y| Ok(rhs - (q_log_derivative(&spec, t) - mu) * y),
        tau0,
        y0,
        taus,
        &opts,
    )
}

/// |central finite difference - analytic| for a scalar function at `tau`.
pub fn fd_derivative_check<F>(mut f: F, analytic: f64, tau: f64, cfg: &OracleConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    let h = cfg.fd_step;
    let central = (f(tau + h)? - f(tau - h)?) / (2.0 * h);
    Ok((central - analytic).abs())
}
