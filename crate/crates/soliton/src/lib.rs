//! Steady Kähler–Ricci solitons on line and vector bundles via the momentum
//! construction.
//!
//! The crate builds the momentum profile `phi(tau)` of a steady soliton in
//! closed form from a bundle description (curvature eigenvalues, soliton
//! parameter `mu`, integration constant `K`), reconstructs the radial Kähler
//! potential `f(t)` by inverting the Legendre relation `d tau/dt = phi(tau)`,
//! and verifies every checkable geometric property of the resulting metric:
//! extension across the zero section, completeness, Ricci sign, asymptotics,
//! volume growth and the weight-function identities.
//!
//! Layout:
//! * [`polyalg`] — exact rational polynomial/series arithmetic (the substrate
//!   for `Q`, `nu` and the removable-singularity series), plus double-double
//!   float helpers for cancellation-free evaluation.
//! * [`bundle`] — user-facing bundle descriptions and their validation.
//! * [`profile`] — the closed-form momentum profile and its evaluation.
//! * [`potential`] — Legendre inversion producing sampled potential tables.
//! * [`geometry`] — geometric verdicts (extension, completeness, Ricci sign,
//!   volume growth, weight identities).
//! * [`oracle`] — independent brute-force validators (quadrature, ODE march,
//!   finite differences) that never touch the closed-form code path.
//! * [`config`], [`export`], [`cli`] — configuration ingestion and
//!   deterministic CSV/JSON export behind the `soliton` binary.

// `!(x > 0.0)` is the NaN-rejecting domain guard throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod cli;
pub mod config;
pub mod export;
pub mod geometry;
pub mod oracle;
pub mod polyalg;
pub mod potential;
pub mod profile;
pub mod quad;
pub mod rk;

pub use bundle::{BundleKind, BundleSpec};
pub use geometry::{GeometryReport, RicciComponents};
pub use oracle::OracleConfig;
pub use polyalg::{Rational, RationalPolynomial, TruncatedSeries};
pub use potential::PotentialTable;
pub use profile::MomentumProfile;

/// Errors shared across the construction and diagnostic modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A bundle description violates its invariants (eigenvalue signs,
    /// rank/dimension constraints, negative `K`, ...).
    #[error("invalid bundle spec: {0}")]
    InvalidSpec(String),

    /// The explicit ODE solution requires `mu != 0`.
    #[error("soliton parameter mu must be nonzero")]
    ZeroMu,

    /// An evaluation was requested outside the domain of the quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// `series_divide` was asked to strip more powers of tau than the
    /// numerator vanishes to.
    #[error("order mismatch: numerator vanishes to order {found}, need >= {need}")]
    OrderMismatch { need: usize, found: usize },

    /// The Legendre inversion needs a strictly positive gauge value.
    #[error("gauge error: {0}")]
    Gauge(String),

    /// An adaptive integrator could not meet its tolerance.
    #[error("integration failure: {0}")]
    StepFailure(String),

    /// Quadrature failed to converge to the requested tolerance.
    #[error("quadrature tolerance not met: {0}")]
    ToleranceNotMet(String),

    /// The requested diagnostic is undefined for this profile (e.g. the
    /// asymptote of an incomplete `mu > 0` soliton).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A table or grid does not span the range the diagnostic needs.
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
