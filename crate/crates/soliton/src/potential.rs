//! Legendre inversion: reconstruct the radial Kähler potential from a
//! momentum profile.
//!
//! The momentum variable and the potential are linked by `d tau/dt =
//! phi(tau)` with `tau = f'(t)`; the potential itself is recovered from
//! `f(t) = ∫_0^{tau(t)} x / phi(x) dx`.  The t-origin is a free translation
//! (the zero section sits at `t = -infinity`); it is fixed by prescribing
//! `tau(0) = gauge_tau0`, default 1, which makes tables reproducible.

use crate::profile::RadialProfile;
use crate::quad::{adaptive_simpson, adaptive_simpson_rel};
use crate::rk::{integrate_to, RkOptions};
use crate::{Error, Result};

/// Floor below which the backward march stops: `tau` decays exponentially in
/// `t` and would underflow long before `t_min` is reached for extreme inputs.
const TAU_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug)]
pub struct PotentialRow {
    pub t: f64,
    pub tau: f64,
    pub f: f64,
    pub fpp: f64,
    pub fppp: f64,
}

/// Sampled Legendre inversion: `(t, tau = f', f, f'' = phi, f''' = phi' phi)`
/// rows with `tau` strictly increasing in `t`.
#[derive(Clone, Debug)]
pub struct PotentialTable {
    pub gauge_tau0: f64,
    pub rows: Vec<PotentialRow>,
    pub t_min: f64,
    pub t_max: f64,
}

/// Integrator/quadrature knobs for the inversion.
#[derive(Clone, Copy, Debug)]
pub struct InvertOptions {
    pub rk_rel_tol: f64,
    pub rk_abs_tol: f64,
    pub quad_tol: f64,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions {
            rk_rel_tol: 1e-10,
            rk_abs_tol: 1e-12,
            quad_tol: 1e-12,
        }
    }
}

/// The non-soliton reference profile `phi(tau) = tau` (for which the
/// inversion is exactly `tau(t) = gauge * e^t`, `f(t) = tau(t)`).
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferencePhi;

impl RadialProfile for ReferencePhi {
    fn phi(&self, tau: f64) -> Result<f64> {
        if tau < 0.0 {
            return Err(Error::Domain(format!("tau = {tau} < 0")));
        }
        Ok(tau)
    }

    fn phi_prime(&self, _tau: f64) -> Result<f64> {
        Ok(1.0)
    }

    fn integrand_at_zero(&self) -> f64 {
        1.0
    }
}

/// Invert `d tau/dt = phi(tau)` with `tau(0) = gauge_tau0` on a uniform
/// `t`-grid of `samples` points over `[t_min, t_max]`, filling the potential
/// by cumulative quadrature of `x / phi(x)`.
pub fn invert_legendre<P: RadialProfile>(
    profile: &P,
    gauge_tau0: f64,
    t_min: f64,
    t_max: f64,
    samples: usize,
) -> Result<PotentialTable> {
    invert_legendre_with(profile, gauge_tau0, t_min, t_max, samples, &InvertOptions::default())
}

pub fn invert_legendre_with<P: RadialProfile>(
    profile: &P,
    gauge_tau0: f64,
    t_min: f64,
    t_max: f64,
    samples: usize,
    opts: &InvertOptions,
) -> Result<PotentialTable> {
    if !(gauge_tau0 > 0.0) {
        return Err(Error::Gauge(format!(
            "gauge tau(0) must be positive, got {gauge_tau0}"
        )));
    }
    if !(t_min < 0.0 && 0.0 < t_max) {
        return Err(Error::Domain(format!(
            "need t_min < 0 < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }

    let grid: Vec<f64> = (0..samples)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (samples - 1) as f64)
        .collect();
    let rk = RkOptions {
        rel_tol: opts.rk_rel_tol,
        abs_tol: opts.rk_abs_tol,
        max_steps: 4_000_000,
    };

    let rhs = |_t: f64, tau: f64| -> Result<f64> {
        if tau <= 0.0 {
            return Err(Error::StepFailure(format!("tau left (0, inf): {tau}")));
        }
        profile.phi(tau)
    };

    let forward_nodes: Vec<f64> = grid.iter().copied().filter(|t| *t >= 0.0).collect();
    let backward_nodes: Vec<f64> = {
        let mut v: Vec<f64> = grid.iter().copied().filter(|t| *t < 0.0).collect();
        v.reverse(); // descending from 0 toward t_min
        v
    };

    let forward_taus = integrate_to(rhs, 0.0, gauge_tau0, &forward_nodes, &rk)?;
    let backward_taus = integrate_to(rhs, 0.0, gauge_tau0, &backward_nodes, &rk)?;

    let mut rows: Vec<PotentialRow> = Vec::with_capacity(samples);
    for (t, tau) in backward_nodes
        .iter()
        .rev()
        .zip(backward_taus.iter().rev())
        .chain(forward_nodes.iter().zip(forward_taus.iter()))
    {
        if *tau < TAU_FLOOR {
            // clamp: drop rows the series floor cannot represent
            rows.clear();
            continue;
        }
        let fpp = profile.phi(*tau)?;
        let fppp = profile.phi_prime(*tau)? * fpp;
        rows.push(PotentialRow {
            t: *t,
            tau: *tau,
            f: f64::NAN, // filled below
            fpp,
            fppp,
        });
    }
    if rows.len() < 2 {
        return Err(Error::StepFailure(
            "tau underflow left fewer than 2 usable rows".into(),
        ));
    }
    for pair in rows.windows(2) {
        if !(pair[1].tau > pair[0].tau) {
            return Err(Error::StepFailure(format!(
                "tau not strictly increasing at t = {}",
                pair[1].t
            )));
        }
    }

    // potential integrand, patched at the removable singularity
    let integrand = |x: f64| -> Result<f64> {
        if x == 0.0 {
            return Ok(profile.integrand_at_zero());
        }
        Ok(x / profile.phi(x)?)
    };

    let mut f_acc = adaptive_simpson_rel(integrand, 0.0, rows[0].tau, opts.quad_tol)?;
    rows[0].f = f_acc;
    for i in 1..rows.len() {
        let (a, b) = (rows[i - 1].tau, rows[i].tau);
        let coarse = 0.5 * (integrand(a)? + integrand(b)?) * (b - a);
        let seg = adaptive_simpson(
            integrand,
            a,
            b,
            opts.quad_tol * coarse.abs().max(1e-3),
        )?;
        f_acc += seg;
        rows[i].f = f_acc;
    }

    let t_min_actual = rows.first().map(|r| r.t).unwrap_or(t_min);
    let t_max_actual = rows.last().map(|r| r.t).unwrap_or(t_max);
    Ok(PotentialTable {
        gauge_tau0,
        rows,
        t_min: t_min_actual,
        t_max: t_max_actual,
    })
}

/// Self-consistency defect of the inversion: the maximum over interior rows
/// of |df/dt - tau| with df/dt a centered finite difference of the `f`
/// column.  Zero by convention for tables too short to difference.
pub fn legendre_consistency(table: &PotentialTable) -> f64 {
    let rows = &table.rows;
    if rows.len() < 3 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 1..rows.len() - 1 {
        let df = (rows[i + 1].f - rows[i - 1].f) / (rows[i + 1].t - rows[i - 1].t);
        worst = worst.max((df - rows[i].tau).abs());
    }
    worst
}

/// Empirical growth constants of the potential on the far end of the table.
#[derive(Clone, Copy, Debug)]
pub struct GrowthReport {
    /// `sup f''` and `inf f''` over `t >= t_lower`.
    pub fpp_sup: f64,
    pub fpp_inf: f64,
    /// `sup f'/t` and `inf f'/t` over `t >= max(t_lower, 1)`.
    pub fprime_over_t_sup: f64,
    pub fprime_over_t_inf: f64,
    /// `sup (1 + f') |f'''|` — the j = 1 derivative-decay constant.
    pub weighted_fppp_sup: f64,
    /// Cutoff used for the suprema: the first `t > 0` with `f'(t) >= 1`.
    pub t_lower: f64,
}

/// Bounds realizing `C^{-1} <= f'' <= C`, `C^{-1} t <= f' <= C t` and the
/// `j = 1` case of the derivative decay on the sampled table.
pub fn potential_growth_report(table: &PotentialTable) -> Result<GrowthReport> {
    let last = table
        .rows
        .last()
        .ok_or_else(|| Error::InsufficientRange("empty table".into()))?;
    if last.tau < 10.0 {
        return Err(Error::InsufficientRange(format!(
            "need f'(t_max) >= 10, got {}",
            last.tau
        )));
    }
    let t_lower = table
        .rows
        .iter()
        .find(|r| r.t > 0.0 && r.tau >= 1.0)
        .map(|r| r.t)
        .ok_or_else(|| Error::InsufficientRange("no row with t > 0 and f' >= 1".into()))?;

    let mut fpp_sup = f64::NEG_INFINITY;
    let mut fpp_inf = f64::INFINITY;
    let mut ratio_sup = f64::NEG_INFINITY;
    let mut ratio_inf = f64::INFINITY;
    let mut weighted = 0.0f64;
    for r in &table.rows {
        if r.t < t_lower {
            continue;
        }
        fpp_sup = fpp_sup.max(r.fpp);
        fpp_inf = fpp_inf.min(r.fpp);
        weighted = weighted.max((1.0 + r.tau) * r.fppp.abs());
        if r.t >= t_lower.max(1.0) {
            ratio_sup = ratio_sup.max(r.tau / r.t);
            ratio_inf = ratio_inf.min(r.tau / r.t);
        }
    }
    Ok(GrowthReport {
        fpp_sup,
        fpp_inf,
        fprime_over_t_sup: ratio_sup,
        fprime_over_t_inf: ratio_inf,
        weighted_fppp_sup: weighted,
        t_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::BundleSpec;
    use crate::polyalg::{rat_int, Rational};
    use crate::profile::build_profile;
    use num_traits::Zero;

    #[test]
    fn reference_profile_is_exponential() {
        // d tau/dt = tau, tau(0) = 1 -> tau = e^t, f = e^t
        let table = invert_legendre(&ReferencePhi, 1.0, -3.0, 3.0, 301).unwrap();
        for r in &table.rows {
            let exact = r.t.exp();
            assert!((r.tau - exact).abs() / exact < 1e-9, "t = {}", r.t);
            assert!((r.f - exact).abs() / exact < 1e-8, "f at t = {}", r.t);
        }
    }

    #[test]
    fn gauge_is_initial_condition() {
        let spec = BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap();
        let p = build_profile(&spec).unwrap();
        // grid contains t = 0 when samples is odd and symmetric
        let table = invert_legendre(&p, 2.5, -4.0, 4.0, 9).unwrap();
        let mid = table.rows.iter().find(|r| r.t == 0.0).unwrap();
        assert_eq!(mid.tau, 2.5);
    }

    #[test]
    fn consistency_defect_small_for_reference() {
        // defect = h^2/6 max f''' = h^2/6 e^{t_max}; the window keeps that
        // below 1e-8 at 10^4 samples
        let table = invert_legendre(&ReferencePhi, 1.0, -1.5, 0.3, 10_001).unwrap();
        assert!(legendre_consistency(&table) < 1e-8);
    }

    #[test]
    fn consistency_defect_second_order() {
        // the defect is the FD truncation error, O(h^2)
        let coarse = invert_legendre(&ReferencePhi, 1.0, -1.0, 1.0, 501).unwrap();
        let fine = invert_legendre(&ReferencePhi, 1.0, -1.0, 1.0, 1001).unwrap();
        let ratio = legendre_consistency(&coarse) / legendre_consistency(&fine);
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn single_row_defect_is_zero() {
        let table = PotentialTable {
            gauge_tau0: 1.0,
            rows: vec![PotentialRow {
                t: 0.0,
                tau: 1.0,
                f: 0.5,
                fpp: 1.0,
                fppp: 0.0,
            }],
            t_min: 0.0,
            t_max: 0.0,
        };
        assert_eq!(legendre_consistency(&table), 0.0);
    }

    #[test]
    fn gauge_error() {
        assert!(matches!(
            invert_legendre(&ReferencePhi, 0.0, -1.0, 1.0, 10),
            Err(Error::Gauge(_))
        ));
    }

    #[test]
    fn tau_minus_t_converges_for_q_one_plus_tau() {
        // d tau/dt = tau/(1+tau) -> tau + log tau = t + const, so tau - t
        // approaches a constant at large t
        let spec = BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap();
        let p = build_profile(&spec).unwrap();
        let table = invert_legendre(&p, 1.0, -5.0, 400.0, 2000).unwrap();
        let rows = &table.rows;
        // tau - t = const - log tau: the residual drift over the last stretch
        // is logarithmically small compared to the t-span
        let a = rows[rows.len() - 200].tau - rows[rows.len() - 200].t;
        let b = rows[rows.len() - 1].tau - rows[rows.len() - 1].t;
        let span = rows[rows.len() - 1].t - rows[rows.len() - 200].t;
        assert!((a - b).abs() < 0.01 * span, "drift {}", (a - b).abs());
    }

    #[test]
    fn growth_report_flat_line() {
        // Q = 1: f'' = 1 - e^{-tau} in (0, 1), f'/t -> 1
        let spec =
            BundleSpec::line(vec![rat_int(0), rat_int(0)], rat_int(-1), Rational::zero()).unwrap();
        let p = build_profile(&spec).unwrap();
        let table = invert_legendre(&p, 1.0, -5.0, 200.0, 2000).unwrap();
        let rep = potential_growth_report(&table).unwrap();
        assert!(rep.fpp_sup <= 1.0 + 1e-9);
        assert!(rep.fpp_inf > 0.0);
        assert!(rep.fprime_over_t_sup.is_finite() && rep.fprime_over_t_sup > 0.0);
        assert!(rep.fprime_over_t_inf > 0.7);
        assert!(rep.weighted_fppp_sup.is_finite() && rep.weighted_fppp_sup > 0.0);
        // f'/t -> 1: the last row sits close to the limit
        let last = table.rows.last().unwrap();
        assert!((last.tau / last.t - 1.0).abs() < 0.05);
    }

    #[test]
    fn fppp_nonnegative_for_constructed_profiles() {
        for spec in [
            BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap(),
            BundleSpec::vector(2, vec![], rat_int(-1)).unwrap(),
        ] {
            let p = build_profile(&spec).unwrap();
            let table = invert_legendre(&p, 1.0, -5.0, 120.0, 1000).unwrap();
            for r in &table.rows {
                assert!(r.fppp >= -1e-12, "f''' = {} at t = {}", r.fppp, r.t);
            }
        }
    }

    #[test]
    fn fpp_approaches_minus_rhs_over_mu() {
        // f'' = phi(tau) -> -rhs/mu; within 2% once f' >= 100/|mu|
        for (spec, limit) in [
            (
                BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap(),
                1.0,
            ),
            (BundleSpec::vector(2, vec![], rat_int(-1)).unwrap(), 2.0),
        ] {
            let p = build_profile(&spec).unwrap();
            let table = invert_legendre(&p, 1.0, -5.0, 400.0, 2000).unwrap();
            let mut checked = 0;
            for r in &table.rows {
                if r.tau >= 100.0 {
                    assert!(
                        (r.fpp - limit).abs() / limit < 0.02,
                        "f'' = {} at tau = {}",
                        r.fpp,
                        r.tau
                    );
                    checked += 1;
                }
            }
            assert!(checked > 10);
        }
    }

    #[test]
    fn fppp_column_matches_fd_of_fpp() {
        // f''' = phi' phi equals d(f'')/dt row-wise
        let spec = BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap();
        let p = build_profile(&spec).unwrap();
        let table = invert_legendre(&p, 1.0, -3.0, 10.0, 4001).unwrap();
        let rows = &table.rows;
        for i in (1..rows.len() - 1).step_by(97) {
            let fd = (rows[i + 1].fpp - rows[i - 1].fpp) / (rows[i + 1].t - rows[i - 1].t);
            assert!(
                (fd - rows[i].fppp).abs() < 1e-5,
                "t = {}: FD {fd} vs f''' {}",
                rows[i].t,
                rows[i].fppp
            );
        }
    }

    #[test]
    fn gauge_covariance() {
        // (tau, f'') as functions of tau are gauge-invariant; the t-column
        // shifts by the travel time between the two gauge values
        let spec = BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap();
        let p = build_profile(&spec).unwrap();
        let t1 = invert_legendre(&p, 1.0, -4.0, 30.0, 1500).unwrap();
        let t2 = invert_legendre(&p, 2.0, -4.0, 30.0, 1500).unwrap();

        // travel time from tau=1 to tau=2: Delta = ∫_1^2 dx/phi work
        let delta = adaptive_simpson(
            |x| Ok(1.0 / p.eval_phi(x).unwrap()),
            1.0,
            2.0,
            1e-12,
        )
        .unwrap();

        // tau_2(t) == tau_1(t + Delta): check by interpolating table 1
        let interp = |t: f64| -> Option<f64> {
            let rows = &t1.rows;
            let i = rows.iter().position(|r| r.t > t)?;
            if i == 0 {
                return None;
            }
            let (a, b) = (&rows[i - 1], &rows[i]);
            Some(a.tau + (b.tau - a.tau) * (t - a.t) / (b.t - a.t))
        };
        let mut checked = 0;
        for r in t2.rows.iter().step_by(100) {
            if let Some(tau1) = interp(r.t + delta) {
                assert!(
                    (tau1 - r.tau).abs() / r.tau < 1e-3,
                    "gauge covariance broke at t = {}",
                    r.t
                );
                checked += 1;
            }
        }
        assert!(checked > 5);

        // and f'' against tau agrees across gauges by construction
        for r in t2.rows.iter().step_by(200) {
            assert!((r.fpp - p.eval_phi(r.tau).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_identity_t_of_tau() {
        // t(tau_b) - t(tau_a) = ∫ dx/phi(x)
        let spec = BundleSpec::line(vec![rat_int(1)], rat_int(-1), Rational::zero()).unwrap();
        let p = build_profile(&spec).unwrap();
        let table = invert_legendre(&p, 1.0, -2.0, 20.0, 2000).unwrap();
        let rows = &table.rows;
        for (i, j) in [(100, 900), (300, 1500), (50, 1999)] {
            let (a, b) = (&rows[i], &rows[j]);
            let integral =
                adaptive_simpson(|x| Ok(1.0 / p.eval_phi(x).unwrap()), a.tau, b.tau, 1e-12)
                    .unwrap();
            assert!(
                ((b.t - a.t) - integral).abs() < 1e-7,
                "pair ({i}, {j}): {} vs {}",
                b.t - a.t,
                integral
            );
        }
    }
}
