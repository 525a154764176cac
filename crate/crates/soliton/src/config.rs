//! Run configuration: a single JSON document with a strict schema
//! (unknown keys are an error).
//!
//! Rational-valued fields (`mu`, `K`, eigenvalues) accept an integer, a
//! float, or a `"p/q"` / decimal string.  Floats are canonicalized to the
//! exact rational they denote, so every downstream computation stays exact.

use std::path::PathBuf;

use serde::Deserialize;

use crate::bundle::BundleSpec;
use crate::oracle::OracleConfig;
use crate::polyalg::{f64_to_rational, parse_rational, rat_int, Rational};
use crate::potential::InvertOptions;
use num_traits::Zero;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bundle: BundleConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

/// A rational-valued config entry: integer, float, or string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RationalValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RationalValue {
    pub fn to_rational(&self) -> Result<Rational, String> {
        match self {
            RationalValue::Int(n) => Ok(rat_int(*n)),
            RationalValue::Float(x) => {
                f64_to_rational(*x).ok_or_else(|| format!("non-finite number {x}"))
            }
            RationalValue::Text(s) => {
                parse_rational(s).ok_or_else(|| format!("cannot parse rational from {s:?}"))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKindConfig {
    Line,
    Vector,
    /// Debug profile `phi(tau) = tau` (potential subcommand only).
    Reference,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    pub kind: ProfileKindConfig,
    /// Rank; required for vector bundles, defaults to 1 for line bundles.
    #[serde(default)]
    pub m: Option<u32>,
    /// Base dimension; optional, must match the eigenvalue count if given.
    #[serde(default)]
    pub d: Option<u32>,
    #[serde(default)]
    pub base_eigenvalues: Vec<RationalValue>,
    #[serde(default)]
    pub mu: Option<RationalValue>,
    #[serde(default, rename = "K")]
    pub k: Option<RationalValue>,
}

/// A parsed bundle document: a soliton spec or the debug reference profile.
#[derive(Clone, Debug)]
pub enum ProfileInput {
    Bundle(BundleSpec),
    Reference,
}

impl BundleConfig {
    pub fn resolve(&self) -> Result<ProfileInput, String> {
        if self.kind == ProfileKindConfig::Reference {
            return Ok(ProfileInput::Reference);
        }
        let eigenvalues: Vec<Rational> = self
            .base_eigenvalues
            .iter()
            .map(|v| v.to_rational())
            .collect::<Result<_, _>>()?;
        let mu = self
            .mu
            .as_ref()
            .ok_or_else(|| "bundle.mu is required".to_string())?
            .to_rational()?;
        let k = match &self.k {
            Some(v) => v.to_rational()?,
            None => Rational::zero(),
        };
        let spec = match self.kind {
            ProfileKindConfig::Line => {
                if let Some(m) = self.m {
                    if m != 1 {
                        return Err("line bundles have rank m = 1".into());
                    }
                }
                BundleSpec::line(eigenvalues, mu, k).map_err(|e| e.to_string())?
            }
            ProfileKindConfig::Vector => {
                let m = self.m.ok_or_else(|| "bundle.m is required for vector bundles".to_string())?;
                if let Some(d) = self.d {
                    if d as usize != self.base_eigenvalues.len() {
                        return Err(format!(
                            "bundle.d = {d} does not match {} eigenvalues",
                            self.base_eigenvalues.len()
                        ));
                    }
                }
                if !k.is_zero() {
                    return Err("vector bundles require K = 0".into());
                }
                BundleSpec::vector(m, eigenvalues, mu).map_err(|e| e.to_string())?
            }
            ProfileKindConfig::Reference => unreachable!(),
        };
        Ok(ProfileInput::Bundle(spec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_tau_min")]
    pub tau_min: f64,
    #[serde(default = "default_tau_max")]
    pub tau_max: f64,
    #[serde(default = "default_grid_samples")]
    pub samples: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_tau_min() -> f64 {
    1e-3
}
fn default_tau_max() -> f64 {
    1e3
}
fn default_grid_samples() -> usize {
    512
}
fn default_spacing() -> Spacing {
    Spacing::Log
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            tau_min: default_tau_min(),
            tau_max: default_tau_max(),
            samples: default_grid_samples(),
            spacing: default_spacing(),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Vec<f64>, String> {
        if self.samples < 2 {
            return Err("grid.samples must be at least 2".into());
        }
        if !(self.tau_min < self.tau_max) {
            return Err(format!(
                "grid needs tau_min < tau_max, got [{}, {}]",
                self.tau_min, self.tau_max
            ));
        }
        match self.spacing {
            Spacing::Log => {
                if !(self.tau_min > 0.0) {
                    return Err("log spacing needs tau_min > 0".into());
                }
                let (lo, hi) = (self.tau_min.ln(), self.tau_max.ln());
                Ok((0..self.samples)
                    .map(|i| (lo + (hi - lo) * i as f64 / (self.samples - 1) as f64).exp())
                    .collect())
            }
            Spacing::Linear => {
                if self.tau_min < 0.0 {
                    return Err("grid needs tau_min >= 0".into());
                }
                Ok((0..self.samples)
                    .map(|i| {
                        self.tau_min
                            + (self.tau_max - self.tau_min) * i as f64
                                / (self.samples - 1) as f64
                    })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(default = "default_gauge")]
    pub gauge_tau0: f64,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_potential_samples")]
    pub samples: usize,
}

fn default_gauge() -> f64 {
    1.0
}
fn default_t_min() -> f64 {
    -20.0
}
fn default_t_max() -> f64 {
    600.0
}
fn default_potential_samples() -> usize {
    4096
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig {
            gauge_tau0: default_gauge(),
            t_min: default_t_min(),
            t_max: default_t_max(),
            samples: default_potential_samples(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output file; stdout when omitted.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default = "default_quad_tolerance")]
    pub quad_tolerance: f64,
    #[serde(default = "default_rk_rel_tol")]
    pub rk_rel_tol: f64,
    #[serde(default = "default_rk_abs_tol")]
    pub rk_abs_tol: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

fn default_quad_tolerance() -> f64 {
    1e-12
}
fn default_rk_rel_tol() -> f64 {
    1e-10
}
fn default_rk_abs_tol() -> f64 {
    1e-12
}
fn default_fd_step() -> f64 {
    1e-5
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            quad_tolerance: default_quad_tolerance(),
            rk_rel_tol: default_rk_rel_tol(),
            rk_abs_tol: default_rk_abs_tol(),
            fd_step: default_fd_step(),
        }
    }
}

impl ToleranceConfig {
    pub fn oracle(&self) -> OracleConfig {
        OracleConfig {
            quad_tolerance: self.quad_tolerance,
            rk_rel_tol: self.rk_rel_tol,
            rk_abs_tol: self.rk_abs_tol,
            fd_step: self.fd_step,
        }
    }

    pub fn invert(&self) -> InvertOptions {
        InvertOptions {
            rk_rel_tol: self.rk_rel_tol,
            rk_abs_tol: self.rk_abs_tol,
            quad_tol: self.quad_tolerance,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }
}
