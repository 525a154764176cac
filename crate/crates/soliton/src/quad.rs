//! Adaptive Simpson quadrature with Richardson extrapolation.
//!
//! Interval halving with the classic `(S_left + S_right - S)/15` acceptance
//! test and correction term.  The tolerance is absolute; callers derive it
//! from a coarse magnitude estimate when they want relative control.  An
//! evaluation budget turns unattainable tolerances into a clean error
//! instead of an exponential subdivision.

use crate::{Error, Result};

const MAX_DEPTH: usize = 48;
const MAX_EVALS: usize = 4_000_000;

/// `∫_a^b f` to absolute tolerance `tol` (`a <= b`).
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature over non-finite interval".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return Err(Error::Domain("quadrature needs a <= b".into()));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    let mut evals = 3usize;
    recurse(&mut f, a, b, fa, fm, fb, whole, tol, 0, &mut evals)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    evals: &mut usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    *evals += 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-15 * (1.0 + a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH || *evals >= MAX_EVALS {
        return Err(Error::ToleranceNotMet(format!(
            "adaptive Simpson gave up on [{a}, {b}] at depth {depth} after {} evaluations \
             (residual {:e})",
            *evals,
            delta.abs() / 15.0
        )));
    }
    let half_tol = 0.5 * tol;
    let l = recurse(f, a, m, fa, flm, fm, left, half_tol, depth + 1, evals)?;
    let r = recurse(f, m, b, fm, frm, fb, right, half_tol, depth + 1, evals)?;
    Ok(l + r)
}

/// `∫_a^b f` to relative tolerance `rel`, using a coarse composite pass to
/// set the absolute scale.
pub fn adaptive_simpson_rel<F>(mut f: F, a: f64, b: f64, rel: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    // coarse magnitude estimate: 64-panel composite Simpson on |f|
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut coarse = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        coarse += h / 6.0 * (f(x0)?.abs() + 4.0 * f(xm)?.abs() + f(x1)?.abs());
    }
    let scale = coarse.max(f64::MIN_POSITIVE);
    adaptive_simpson(f, a, b, rel * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        // Simpson integrates cubics exactly
        let v = adaptive_simpson(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_reference() {
        let v = adaptive_simpson(|x| Ok(x.exp()), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn relative_variant_handles_large_scale() {
        // ∫_0^10 e^x = e^10 - 1 ~ 22025
        let v = adaptive_simpson_rel(|x| Ok(x.exp()), 0.0, 10.0, 1e-12).unwrap();
        let exact = 10f64.exp() - 1.0;
        assert!(((v - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn peaked_integrand() {
        // narrow Gaussian-like peak: ∫_0^1 1/(1e-4 + (x-1/2)^2) dx
        let c = 1e-4f64;
        let f = |x: f64| Ok(1.0 / (c + (x - 0.5) * (x - 0.5)));
        let exact = 2.0 / c.sqrt() * (0.5 / c.sqrt()).atan();
        let v = adaptive_simpson_rel(f, 0.0, 1.0, 1e-11).unwrap();
        assert!(((v - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn unattainable_tolerance_fails_fast() {
        use std::time::Instant;
        let start = Instant::now();
        let r = adaptive_simpson(|x| Ok((x * 37.0).sin().exp()), 0.0, 10.0, 1e-25);
        assert!(matches!(r, Err(Error::ToleranceNotMet(_))));
        assert!(start.elapsed().as_secs_f64() < 20.0);
    }
}
