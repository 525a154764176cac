//! Closed-form momentum profiles.
//!
//! For a curvature polynomial `Q` with coefficients `b_j`, the soliton ODE
//!
//! ```text
//! phi'(tau) + (Q'/Q - mu) phi(tau) = rhs        (rhs = 1 or m)
//! ```
//!
//! has the explicit solution `phi = [(nu(0)+K) e^{mu tau} - nu(tau)] / Q(tau)`
//! where `nu` collects the exact antiderivative data
//!
//! ```text
//! nu(tau) = rhs * sum_j sum_{l=0}^{j} b_j (j!/l!) tau^l / mu^{j+1-l}.
//! ```
//!
//! Near `tau = 0` the numerator vanishes to order `s+1` (`s` the vanishing
//! order of `Q`), so the quotient extends smoothly across the zero section but
//! its naive evaluation loses all significance.  Below an adaptive switch
//! point the profile is therefore evaluated from its exact Taylor series;
//! above it, from the closed form with the numerator carried in double-double
//! precision.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bundle::BundleSpec;
use crate::polyalg::dd::{self, Dd};
use crate::polyalg::{
    factorial, rational_to_dd, rational_to_f64, series_divide, Rational, RationalPolynomial,
    TailBound, TruncatedSeries,
};
use crate::{Error, Result};

/// Default order of the profile Taylor series past the vanishing order.
const DEFAULT_SERIES_TERMS: usize = 24;
/// Hard cap on the adaptive series extension.
const MAX_SERIES_TERMS: usize = 220;

/// Evaluable momentum profile of a steady soliton.
///
/// Immutable after construction; all evaluations are pure.
#[derive(Clone, Debug)]
pub struct MomentumProfile {
    spec: BundleSpec,
    q: RationalPolynomial,
    q_hat: RationalPolynomial,
    q_prime: RationalPolynomial,
    vanishing_order: usize,
    nu: RationalPolynomial,
    nu_prime: RationalPolynomial,
    nu0: Rational,
    rhs: u32,
    series: TruncatedSeries,
    tau_switch: f64,
    spec_k_is_zero: bool,
    // evaluation caches
    mu_f: f64,
    mu_dd: Dd,
    nu0k_dd: Dd,
    nu_dd: Vec<Dd>,
    nu_prime_dd: Vec<Dd>,
    q_dd: Vec<Dd>,
    q_prime_dd: Vec<Dd>,
}

/// Large-`tau` behaviour of a profile: the limit `-rhs/mu` and an empirical
/// constant certifying the `O(1/tau)` approach rate.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticReport {
    pub limit: f64,
    pub rate_constant: f64,
}

/// Anything the Legendre inversion can consume: a positive momentum-like
/// function with a one-sided derivative at the origin.
pub trait RadialProfile {
    fn phi(&self, tau: f64) -> Result<f64>;
    fn phi_prime(&self, tau: f64) -> Result<f64>;
    /// Continuous extension of `x / phi(x)` at `x = 0`.
    fn integrand_at_zero(&self) -> f64;
}

/// Build the momentum profile of a bundle spec.
///
/// Fails on spec invariant violations and on `mu = 0` (the closed form
/// divides by powers of `mu`).  `mu > 0` is accepted — the profile solves the
/// ODE either way — and the completeness diagnostics downstream report the
/// failure.
pub fn build_profile(spec: &BundleSpec) -> Result<MomentumProfile> {
    spec.validate()?;
    let rhs = spec.rhs();
    let q = spec.q_polynomial();
    let (s, q_hat) = q.factor_out_tau();
    debug_assert_eq!(s, spec.vanishing_order());
    let q_prime = q.derivative();

    let nu = build_nu(&q, &spec.mu, rhs);
    let nu0 = nu.coeff(0);
    let nu_prime = nu.derivative();
    let nu0k = &nu0 + &spec.k_const;

    let (tau_switch, tau_star) = switch_points(&q_hat);
    let (series, bound) =
        profile_series(&q, s, &nu, &nu0k, &spec.mu, rhs, tau_switch, tau_star)?;

    let profile = MomentumProfile {
        spec: spec.clone(),
        mu_f: rational_to_f64(&spec.mu),
        mu_dd: rational_to_dd(&spec.mu),
        nu0k_dd: rational_to_dd(&nu0k),
        nu_dd: nu.to_dd_coeffs(),
        nu_prime_dd: nu_prime.to_dd_coeffs(),
        q_dd: q.to_dd_coeffs(),
        q_prime_dd: q_prime.to_dd_coeffs(),
        series: series.with_remainder_bound(bound),
        tau_switch,
        q,
        q_hat,
        q_prime,
        vanishing_order: s,
        nu,
        nu_prime,
        nu0,
        rhs,
        spec_k_is_zero: spec.k_const.is_zero(),
    };
    Ok(profile)
}

/// `nu(tau) = rhs * sum_{j: b_j != 0} sum_{l=0}^{j} b_j (j!/l!) tau^l / mu^{j+1-l}`.
fn build_nu(q: &RationalPolynomial, mu: &Rational, rhs: u32) -> RationalPolynomial {
    let deg = q.degree();
    let rhs_r = Rational::from_integer(BigInt::from(rhs));
    // inverse powers of mu: mu_inv_pow[p] = mu^{-p}
    let mu_inv = Rational::one() / mu;
    let mut mu_inv_pow = Vec::with_capacity(deg + 2);
    mu_inv_pow.push(Rational::one());
    for p in 1..=deg + 1 {
        mu_inv_pow.push(&mu_inv_pow[p - 1] * &mu_inv);
    }
    let mut coeffs = vec![Rational::zero(); deg + 1];
    for j in 0..=deg {
        let b_j = q.coeff(j);
        if b_j.is_zero() {
            continue;
        }
        let j_fact = factorial(j);
        for l in 0..=j {
            // b_j * (j!/l!) / mu^{j+1-l}
            let ratio = Rational::new(j_fact.clone(), factorial(l));
            coeffs[l] += &b_j * ratio * &mu_inv_pow[j + 1 - l];
        }
    }
    RationalPolynomial::from_coeffs(coeffs).scale(&rhs_r)
}

/// Choose the series/closed-form switch point and the majorant anchor.
///
/// `rho` solves `Qhat(rho) = 2 Qhat(0)` (the coefficients of `Qhat` are
/// nonnegative, so the left side is increasing); the coefficient majorant of
/// the quotient series converges up to `rho`, which also sits below the true
/// convergence radius.  The switch point stays at half of that, capped at the
/// default 1/2.
fn switch_points(q_hat: &RationalPolynomial) -> (f64, f64) {
    if q_hat.degree() == 0 {
        return (0.5, 1.0);
    }
    let q0 = 2.0 * q_hat.eval_f64(0.0);
    let mut hi = 1.0f64;
    while q_hat.eval_f64(hi) < q0 && hi < 1e8 {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_hat.eval_f64(mid) < q0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = lo;
    let tau_switch = (rho / 2.0).min(0.5);
    let tau_star = (2.0 * tau_switch).min(0.999 * rho);
    (tau_switch, tau_star)
}

/// Exact Taylor series of `phi` at 0 together with a rigorous tail bound.
///
/// The numerator coefficients are `(nu(0)+K) mu^l / l! - nu_l`; the series is
/// their formal quotient by `Q`.  The tail bound comes from a coefficient
/// majorant: with `A(x) = sum_i |n_{s+i}| x^i` and `Qhat` having nonnegative
/// coefficients, every quotient coefficient obeys `|c_i| <= C_i` where
/// `sum C_i x^i = A(x) / (2 Qhat(0) - Qhat(x))`, so the tail past order `N`
/// at `tau <= tau_star` is at most `(tau/tau_star)^{N+1} * C(tau_star)`.
#[allow(clippy::too_many_arguments)]
fn profile_series(
    q: &RationalPolynomial,
    s: usize,
    nu: &RationalPolynomial,
    nu0k: &Rational,
    mu: &Rational,
    rhs: u32,
    tau_switch: f64,
    tau_star: f64,
) -> Result<(TruncatedSeries, TailBound)> {
    let (_, q_hat) = q.factor_out_tau();
    let qhat0 = q_hat.eval_f64(0.0);
    let mu_abs = rational_to_f64(mu).abs();
    let rhs_over_mu = rhs as f64 / mu_abs;
    let nu0k_abs = rational_to_f64(nu0k).abs();
    // majorant of the shifted numerator at tau_star
    let a_star =
        (nu0k_abs * (mu_abs * tau_star).exp() + nu.eval_abs_f64(tau_star)) / tau_star.powi(s as i32);
    let denom = 2.0 * qhat0 - q_hat.eval_f64(tau_star);
    debug_assert!(denom > 0.0);
    let c_star = 1.05 * a_star / denom;

    // tail target: small enough for every downstream tolerance, large
    // enough that branch-consistency checks never race f64 rounding noise
    let target = 1e-13 * (1.0 + rhs_over_mu);
    let ratio = tau_switch / tau_star;
    let mut terms = DEFAULT_SERIES_TERMS;
    while c_star * ratio.powi(terms as i32 + 1) > target && terms < MAX_SERIES_TERMS {
        terms += 1;
    }

    let order = s + terms;
    let mut num_coeffs = Vec::with_capacity(order + 1);
    let mut mu_pow_over_fact = Rational::one(); // mu^l / l!
    for l in 0..=order {
        if l > 0 {
            mu_pow_over_fact = mu_pow_over_fact * mu / Rational::from_integer(BigInt::from(l));
        }
        num_coeffs.push(nu0k * &mu_pow_over_fact - nu.coeff(l));
    }
    let numerator = TruncatedSeries::from_coeffs(num_coeffs, order);
    let series = series_divide(&numerator, q, s)?;
    let bound = TailBound {
        scale: c_star,
        tau_star,
        exponent: (terms + 1) as u32,
    };
    Ok((series, bound))
}

impl MomentumProfile {
    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn q(&self) -> &RationalPolynomial {
        &self.q
    }

    pub fn q_hat(&self) -> &RationalPolynomial {
        &self.q_hat
    }

    pub fn q_prime(&self) -> &RationalPolynomial {
        &self.q_prime
    }

    pub fn nu(&self) -> &RationalPolynomial {
        &self.nu
    }

    pub fn nu_prime(&self) -> &RationalPolynomial {
        &self.nu_prime
    }

    pub fn nu0(&self) -> &Rational {
        &self.nu0
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn tau_switch(&self) -> f64 {
        self.tau_switch
    }

    pub fn rhs(&self) -> u32 {
        self.rhs
    }

    pub fn vanishing_order(&self) -> usize {
        self.vanishing_order
    }

    pub fn mu_f64(&self) -> f64 {
        self.mu_f
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::Domain(format!("tau = {tau} outside [0, inf)")));
        }
        Ok(())
    }

    /// The profile value `phi(tau)`.
    ///
    /// Series branch below the switch point, closed form (double-double
    /// numerator) above; the two agree at the switch point within the series
    /// remainder bound.
    pub fn eval_phi(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        if tau < self.tau_switch {
            Ok(self.series.eval_f64(tau))
        } else {
            Ok(self.phi_closed_dd(tau).to_f64())
        }
    }

    /// `phi(tau)` with the internal double-double value exposed
    /// (series branch evaluates in f64 and widens).
    pub(crate) fn eval_phi_dd(&self, tau: f64) -> Result<Dd> {
        self.check_tau(tau)?;
        if tau < self.tau_switch {
            Ok(Dd::from_f64(self.series.eval_f64(tau)))
        } else {
            Ok(self.phi_closed_dd(tau))
        }
    }

    fn phi_closed_dd(&self, tau: f64) -> Dd {
        let e = (self.mu_dd * tau).exp();
        let num = self.nu0k_dd * e - dd::horner(&self.nu_dd, tau);
        num / dd::horner(&self.q_dd, tau)
    }

    /// The ODE-implied derivative `phi' = rhs - (Q'/Q - mu) phi`.
    ///
    /// At `tau = 0` this is the limit value: 1 for extending (`K = 0`)
    /// profiles, `rhs - (Q'(0) - mu) K` for line bundles with `K > 0`.
    pub fn eval_phi_prime(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        if tau == 0.0 {
            return Ok(if self.spec_k_is_zero {
                1.0
            } else {
                // line bundle with K > 0: Q(0) = 1
                let k = rational_to_f64(&self.spec.k_const);
                self.rhs as f64 - (self.q_prime.eval_f64(0.0) - self.mu_f) * k
            });
        }
        let phi = self.eval_phi_dd(tau)?;
        let qv = dd::horner(&self.q_dd, tau);
        let qp = dd::horner(&self.q_prime_dd, tau);
        let factor = qp / qv - self.mu_dd;
        Ok((Dd::from_f64(self.rhs as f64) - factor * phi).to_f64())
    }

    /// `phi'` along a path independent of the ODE rearrangement: the formal
    /// series derivative below the switch point, the analytic derivative of
    /// the closed form above it.
    pub(crate) fn phi_prime_independent(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        if tau < self.tau_switch {
            return Ok(self.series.eval_derivative_f64(tau));
        }
        let e = (self.mu_dd * tau).exp();
        let num_prime = self.nu0k_dd * self.mu_dd * e - dd::horner(&self.nu_prime_dd, tau);
        let qv = dd::horner(&self.q_dd, tau);
        let qp = dd::horner(&self.q_prime_dd, tau);
        let phi = self.phi_closed_dd(tau);
        Ok((num_prime / qv - qp / qv * phi).to_f64())
    }

    /// Residual of the soliton ODE with `phi'` from the independent path;
    /// its magnitude is the ground-truth correctness signal for the closed
    /// form and the series.
    pub fn ode_residual(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("ode_residual needs tau > 0, got {tau}")));
        }
        let phi_prime = self.phi_prime_independent(tau)?;
        let phi = self.eval_phi_dd(tau)?;
        let qv = dd::horner(&self.q_dd, tau);
        let qp = dd::horner(&self.q_prime_dd, tau);
        let factor = qp / qv - self.mu_dd;
        Ok((Dd::from_f64(phi_prime) + factor * phi - self.rhs as f64).to_f64())
    }

    /// Large-`tau` report: the exact limit `-rhs/mu` and the sampled supremum
    /// of `tau * |phi - limit|` over `[tau_max/2, tau_max]`, certifying the
    /// `O(1/tau)` rate.  Requires `mu < 0`.
    pub fn asymptotic_report(&self, tau_max: f64) -> Result<AsymptoticReport> {
        if self.mu_f > 0.0 {
            return Err(Error::NotApplicable(
                "mu > 0: phi grows exponentially and has no asymptote".into(),
            ));
        }
        let min_span = 10.0 * self.q.degree().max(1) as f64;
        if !(tau_max >= min_span) {
            return Err(Error::InsufficientRange(format!(
                "tau_max = {tau_max} < {min_span} = 10 deg(Q)"
            )));
        }
        let limit = rational_to_f64(
            &(-Rational::from_integer(BigInt::from(self.rhs)) / &self.spec.mu),
        );
        let samples = 256;
        let lo = (tau_max / 2.0).ln();
        let hi = tau_max.ln();
        let mut rate: f64 = 0.0;
        for i in 0..samples {
            let t = (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp();
            let phi = self.eval_phi(t)?;
            rate = rate.max(t * (phi - limit).abs());
        }
        Ok(AsymptoticReport {
            limit,
            rate_constant: rate,
        })
    }
}

impl RadialProfile for MomentumProfile {
    fn phi(&self, tau: f64) -> Result<f64> {
        self.eval_phi(tau)
    }

    fn phi_prime(&self, tau: f64) -> Result<f64> {
        self.eval_phi_prime(tau)
    }

    fn integrand_at_zero(&self) -> f64 {
        if self.spec_k_is_zero {
            1.0 // phi ~ tau, so x/phi(x) -> 1/phi'(0) = 1
        } else {
            0.0 // phi(0) = K > 0
        }
    }
}
