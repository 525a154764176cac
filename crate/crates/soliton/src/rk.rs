//! Adaptive scalar Runge–Kutta integration (Dormand–Prince 5(4)).
//!
//! Used by the Legendre inversion (`d tau/dt = phi(tau)`) and by the ODE-march
//! oracle.  Scalar right-hand sides only; checkpointed output by clamping the
//! step at each requested node, which keeps results deterministic for a fixed
//! tolerance.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct RkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order weights (same as the last A row) and the embedded error weights.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `(t0, y0)`, reporting `y` at each checkpoint.
///
/// Checkpoints must move monotonically away from `t0` (increasing or
/// decreasing); the integration direction follows them.
pub fn integrate_to<F>(
    mut f: F,
    t0: f64,
    y0: f64,
    checkpoints: &[f64],
    opts: &RkOptions,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut out = Vec::with_capacity(checkpoints.len());
    if checkpoints.is_empty() {
        return Ok(out);
    }
    let dir = (checkpoints[checkpoints.len() - 1] - t0).signum();
    let dir = if dir == 0.0 { 1.0 } else { dir };

    let mut t = t0;
    let mut y = y0;
    let mut h = dir * 1e-4 * (1.0 + t0.abs());
    let mut steps = 0usize;

    for &target in checkpoints {
        if (target - t) * dir < 0.0 {
            return Err(Error::StepFailure(format!(
                "checkpoints not monotone: {target} lies behind t = {t}"
            )));
        }
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepFailure(format!(
                    "step budget exhausted at t = {t} ({} steps)",
                    opts.max_steps
                )));
            }
            // clamp the working step to land exactly on the target, but keep
            // the free step size so a sliver landing does not collapse the
            // subsequent march
            let lands_on_target = h.abs() >= (target - t).abs();
            let h_try = if lands_on_target { target - t } else { h };
            if !lands_on_target && h_try.abs() < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::StepFailure(format!(
                    "step size underflow at t = {t} (h = {h_try:e})"
                )));
            }

            let mut k = [0.0f64; 7];
            k[0] = f(t, y)?;
            for stage in 0..6 {
                let mut yi = y;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    yi += h_try * A[stage][j] * kj;
                }
                k[stage + 1] = f(t + C[stage] * h_try, yi)?;
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for j in 0..7 {
                y5 += h_try * B5[j] * k[j];
                err += h_try * E[j] * k[j];
            }
            let scale = opts.abs_tol + opts.rel_tol * y.abs().max(y5.abs());
            let err_norm = (err / scale).abs();
            if err_norm <= 1.0 {
                // t + h_try can miss a clamped target by an ulp
                t = if lands_on_target { target } else { t + h_try };
                y = y5;
                if !y.is_finite() {
                    return Err(Error::StepFailure(format!(
                        "solution became non-finite at t = {t}"
                    )));
                }
            }
            let factor = if err_norm > 0.0 {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = if lands_on_target {
                // keep the free step across an accepted clamped landing;
                // shrink it if even the clamped step was rejected
                if err_norm <= 1.0 {
                    h
                } else {
                    h * factor.min(1.0)
                }
            } else {
                h_try * factor
            };
        }
        out.push(y);
    }
    Ok(out)
}
