//! Command implementations behind the `soliton` binary.
//!
//! Exit-code contract:
//! * 0 — success
//! * 2 — configuration error (unreadable file, malformed JSON, unknown keys)
//! * 3 — bundle-spec validation error
//! * 4 — integrator failure
//! * 5 — tolerance violation in `validate`

use std::fmt;
use std::path::{Path, PathBuf};

use crate::config::{OutputFormat, ProfileInput, RunConfig};
use crate::export::{to_json_string, write_output, Table};
use crate::geometry::geometry_report;
use crate::oracle::{phi_by_ode_march_at, phi_by_quadrature, VB_TAU_FLOOR};
use crate::potential::{invert_legendre_with, PotentialTable, ReferencePhi};
use crate::profile::{build_profile, MomentumProfile};
use crate::{bundle::BundleKind, Error};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Spec(String),
    Integrator(String),
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Spec(_) => 3,
            CliError::Integrator(_) => 4,
            CliError::Tolerance(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Spec(m) => write!(f, "spec error: {m}"),
            CliError::Integrator(m) => write!(f, "integrator error: {m}"),
            CliError::Tolerance(m) => write!(f, "tolerance violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn classify(err: Error) -> CliError {
    match err {
        Error::InvalidSpec(_) | Error::ZeroMu | Error::NotApplicable(_) => {
            CliError::Spec(err.to_string())
        }
        Error::StepFailure(_) | Error::ToleranceNotMet(_) => CliError::Integrator(err.to_string()),
        other => CliError::Spec(other.to_string()),
    }
}

/// Command-line overrides applied on top of the config document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub tau_max: Option<f64>,
    pub samples: Option<usize>,
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text).map_err(CliError::Config)?;
    if let Some(out) = &overrides.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(fmt) = overrides.format {
        cfg.output.format = fmt;
    }
    if let Some(tau_max) = overrides.tau_max {
        cfg.grid.tau_max = tau_max;
    }
    if let Some(samples) = overrides.samples {
        cfg.grid.samples = samples;
    }
    Ok(cfg)
}

fn bundle_profile(cfg: &RunConfig) -> Result<MomentumProfile, CliError> {
    match cfg.bundle.resolve().map_err(CliError::Spec)? {
        ProfileInput::Bundle(spec) => build_profile(&spec).map_err(classify),
        ProfileInput::Reference => Err(CliError::Spec(
            "the reference profile is only valid for the potential subcommand".into(),
        )),
    }
}

fn emit_table(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    let bytes = match cfg.output.format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            table
                .write_csv(&mut buf)
                .map_err(|e| CliError::Config(format!("write failed: {e}")))?;
            buf
        }
        OutputFormat::Json => to_json_string(table).into_bytes(),
    };
    write_output(cfg.output.path.as_deref(), &bytes)
        .map_err(|e| CliError::Config(format!("write failed: {e}")))
}

/// `solve`: tabulate tau, phi, phi', and the ODE residual over the grid.
pub fn cmd_solve(config: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let cfg = load_config(config, overrides)?;
    let profile = bundle_profile(&cfg)?;
    let grid = cfg.grid.build().map_err(CliError::Config)?;

    let mut table = Table::new(&["tau", "phi", "phi_prime", "ode_residual"]);
    for &tau in &grid {
        let phi = profile.eval_phi(tau).map_err(classify)?;
        let phi_prime = profile.eval_phi_prime(tau).map_err(classify)?;
        let resid = if tau > 0.0 {
            profile.ode_residual(tau).map_err(classify)?
        } else {
            0.0
        };
        table.push(vec![tau, phi, phi_prime, resid]);
    }
    emit_table(&cfg, &table)?;
    log::info!("solve: {} grid points written", grid.len());
    Ok(())
}

/// `potential`: tabulate the Legendre inversion (t, tau, f, f'', f''').
pub fn cmd_potential(config: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let cfg = load_config(config, overrides)?;
    let p = &cfg.potential;
    let opts = cfg.tolerances.invert();

    let table: PotentialTable = match cfg.bundle.resolve().map_err(CliError::Spec)? {
        ProfileInput::Reference => {
            invert_legendre_with(&ReferencePhi, p.gauge_tau0, p.t_min, p.t_max, p.samples, &opts)
                .map_err(|e| match e {
                    Error::Gauge(m) | Error::Domain(m) => CliError::Spec(m),
                    other => CliError::Integrator(other.to_string()),
                })?
        }
        ProfileInput::Bundle(spec) => {
            if spec.mu_f64() >= 0.0 {
                return Err(CliError::Spec(
                    "potential inversion requires mu < 0 (tau(t) blows up in finite t otherwise)"
                        .into(),
                ));
            }
            let profile = build_profile(&spec).map_err(classify)?;
            invert_legendre_with(&profile, p.gauge_tau0, p.t_min, p.t_max, p.samples, &opts)
                .map_err(|e| match e {
                    Error::Gauge(m) | Error::Domain(m) => CliError::Spec(m),
                    other => CliError::Integrator(other.to_string()),
                })?
        }
    };

    let mut out = Table::new(&["t", "tau", "f", "fpp", "fppp"]);
    for r in &table.rows {
        out.push(vec![r.t, r.tau, r.f, r.fpp, r.fppp]);
    }
    emit_table(&cfg, &out)?;
    log::info!("potential: {} rows written", table.rows.len());
    Ok(())
}

/// Numeric evidence backing the report verdicts: the diagnostic grid and the
/// traces the checks ran over.
#[derive(serde::Serialize)]
struct ReportEvidence {
    tau: Vec<f64>,
    phi: Vec<f64>,
    phi_prime: Vec<f64>,
    ode_residual: Vec<f64>,
    /// `e^{mu tau} H(tau)` (same sign as H); empty when mu >= 0.
    h_scaled: Vec<f64>,
    /// Ricci fiber coefficient `-mu phi' phi` per grid point.
    ricci_fiber: Vec<f64>,
    /// Smallest base Ricci coefficient per grid point.
    ricci_base_min: Vec<f64>,
}

#[derive(serde::Serialize)]
struct ReportDocument {
    #[serde(flatten)]
    report: crate::geometry::GeometryReport,
    evidence: ReportEvidence,
}

/// `report`: geometric verdicts as JSON plus a human-readable summary.
pub fn cmd_report(config: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let cfg = load_config(config, overrides)?;
    let profile = bundle_profile(&cfg)?;
    let grid = cfg.grid.build().map_err(CliError::Config)?;

    let table = if profile.mu_f64() < 0.0 {
        let p = &cfg.potential;
        Some(
            invert_legendre_with(
                &profile,
                p.gauge_tau0,
                p.t_min,
                p.t_max,
                p.samples,
                &cfg.tolerances.invert(),
            )
            .map_err(|e| CliError::Integrator(e.to_string()))?,
        )
    } else {
        None
    };

    let report = geometry_report(&profile, table.as_ref(), &grid).map_err(classify)?;

    // evidence traces over the same grid (clamped like the report for mu > 0)
    let mu = profile.mu_f64();
    let ev_grid: Vec<f64> = if mu < 0.0 {
        grid.clone()
    } else {
        grid.iter().copied().filter(|t| *t <= 690.0 / mu).collect()
    };
    let mut evidence = ReportEvidence {
        tau: ev_grid.clone(),
        phi: Vec::new(),
        phi_prime: Vec::new(),
        ode_residual: Vec::new(),
        h_scaled: Vec::new(),
        ricci_fiber: Vec::new(),
        ricci_base_min: Vec::new(),
    };
    for &tau in &ev_grid {
        evidence.phi.push(profile.eval_phi(tau).map_err(classify)?);
        evidence
            .phi_prime
            .push(profile.eval_phi_prime(tau).map_err(classify)?);
        evidence.ode_residual.push(if tau > 0.0 {
            profile.ode_residual(tau).map_err(classify)?
        } else {
            0.0
        });
        let c = crate::geometry::ricci_components(&profile, tau).map_err(classify)?;
        evidence.ricci_fiber.push(c.fiber_coefficient);
        evidence
            .ricci_base_min
            .push(c.base_coefficients.iter().copied().fold(0.0, f64::min));
    }
    if mu < 0.0 {
        let sign = crate::geometry::ricci_sign_check(&profile, &ev_grid).map_err(classify)?;
        evidence.h_scaled = sign.h_scaled_trace.iter().map(|(_, h)| *h).collect();
    }

    println!("extends across zero section: {}", report.extends_across_zero_section);
    println!("  {}", report.extension_reason);
    println!("complete:                    {}", report.complete);
    println!("  {}", report.completeness_reason);
    match report.ricci_nonnegative {
        Some(v) => println!("Ricci non-negative:          {v}"),
        None => println!("Ricci non-negative:          (not analyzed, mu >= 0)"),
    }
    match report.ricci_strictly_positive_offsection {
        Some(v) => println!("Ricci positive off-section:  {v}"),
        None => println!("Ricci positive off-section:  (no claim: {})", report.strict_positivity_note),
    }
    println!("asymptote -rhs/mu:           {}", report.asymptote);
    if let Some(v) = report.volume_growth_exponent {
        println!(
            "volume growth exponent:      {v:.4} (predicted {})",
            report.volume_growth_predicted
        );
    }
    if let Some(v) = report.weight_identity_sup {
        println!("weight identity sup:         {v:.6}");
    }
    println!("soliton residual sup:        {:.3e}", report.residual_sup);
    if let Some(a) = &report.base_metric_assertion {
        println!("note: {a}");
    }

    let json = to_json_string(&ReportDocument { report, evidence });
    if cfg.output.path.is_some() {
        write_output(cfg.output.path.as_deref(), json.as_bytes())
            .map_err(|e| CliError::Config(format!("write failed: {e}")))?;
    }
    Ok(())
}

/// `validate`: closed form against the quadrature and ODE-march oracles.
///
/// Exit 0 iff the quadrature relative error stays below `100 *
/// quad_tolerance` (1e-10 at defaults) and the march absolute error below
/// `1e4 * rk_abs_tol` (1e-8 at defaults) at every applicable grid point.
pub fn cmd_validate(config: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let cfg = load_config(config, overrides)?;
    let profile = bundle_profile(&cfg)?;
    let spec = profile.spec().clone();
    let grid = cfg.grid.build().map_err(CliError::Config)?;
    let oracle_cfg = cfg.tolerances.oracle();

    let quad_threshold = 100.0 * oracle_cfg.quad_tolerance;
    let march_threshold = 1e4 * oracle_cfg.rk_abs_tol;

    let quad_floor = match spec.kind {
        BundleKind::Line => 0.0,
        BundleKind::Vector => VB_TAU_FLOOR,
    };

    let march_taus: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|t| *t >= profile.tau_switch())
        .collect();
    let march_phis =
        phi_by_ode_march_at(&profile, &march_taus, &oracle_cfg).map_err(|e| match e {
            Error::StepFailure(m) => CliError::Integrator(m),
            other => CliError::Integrator(other.to_string()),
        })?;
    let mut march_iter = march_taus.iter().zip(march_phis.iter()).peekable();

    // march deviation is reported as NaN below the march origin; the
    // quadrature column likewise below its floor
    let mut table = Table::new(&["tau", "phi", "quad_rel_err", "march_abs_err"]);
    let mut quad_worst = 0.0f64;
    let mut march_worst = 0.0f64;
    for &tau in &grid {
        let phi = profile.eval_phi(tau).map_err(classify)?;
        let quad_err = if tau > quad_floor {
            let q = phi_by_quadrature(&spec, tau, &oracle_cfg).map_err(|e| match e {
                Error::ToleranceNotMet(m) => CliError::Tolerance(m),
                other => CliError::Integrator(other.to_string()),
            })?;
            let err = (phi - q).abs() / q.abs().max(f64::MIN_POSITIVE);
            quad_worst = quad_worst.max(err);
            err
        } else {
            f64::NAN
        };
        let march_err = match march_iter.peek() {
            Some((t, y)) if **t == tau => {
                let err = (phi - **y).abs();
                march_iter.next();
                march_worst = march_worst.max(err);
                err
            }
            _ => f64::NAN,
        };
        table.push(vec![tau, phi, quad_err, march_err]);
    }
    emit_table(&cfg, &table)?;

    println!("validate: worst quadrature rel err {quad_worst:.3e} (threshold {quad_threshold:.3e})");
    println!("validate: worst ODE-march abs err  {march_worst:.3e} (threshold {march_threshold:.3e})");
    if quad_worst > quad_threshold || march_worst > march_threshold {
        return Err(CliError::Tolerance(format!(
            "oracle disagreement: quadrature {quad_worst:.3e} vs {quad_threshold:.3e}, \
             march {march_worst:.3e} vs {march_threshold:.3e}"
        )));
    }
    Ok(())
}
