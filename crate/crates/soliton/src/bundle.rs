//! User-facing bundle descriptions.
//!
//! A [`BundleSpec`] pins down everything the construction needs: the kind of
//! total space (canonical line bundle over a compact base, or a holomorphic
//! vector bundle of rank `m >= 2`), the constant curvature eigenvalues, the
//! soliton parameter `mu` and the integration constant `K`.

use num_traits::{Signed, Zero};

use crate::polyalg::{rational_to_f64, Rational, RationalPolynomial};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleKind {
    /// Canonical bundle `K_M -> M`; eigenvalue inputs are the (constant)
    /// eigenvalues `lambda_j >= 0` of `Ric(omega_M)`, so `beta_j = -lambda_j`.
    Line,
    /// Rank `m >= 2` vector bundle `E -> D`; eigenvalue inputs are the base
    /// eigenvalues `beta_j` of the curvature endomorphism, each in `(-1, 0]`.
    Vector,
}

/// Geometry description feeding the momentum construction.
#[derive(Clone, Debug)]
pub struct BundleSpec {
    pub kind: BundleKind,
    /// Rank; 1 for line bundles.
    pub m: u32,
    /// Base dimension of `D` (vector bundles); unused for line bundles,
    /// where the dimension of `M` is the eigenvalue count.
    pub d: u32,
    /// Line: `lambda_j >= 0` of `Ric(omega_M)`. Vector: `beta_j in (-1, 0]`.
    pub base_eigenvalues: Vec<Rational>,
    /// Soliton parameter, nonzero. Negative values produce complete metrics.
    pub mu: Rational,
    /// Integration constant `K >= 0`; must be 0 for vector bundles
    /// (`Q(0) = 0` would make `phi` singular at the zero section otherwise).
    pub k_const: Rational,
}

impl BundleSpec {
    /// Canonical line bundle over a base with `Ric(omega_M)` eigenvalues
    /// `lambda_j >= 0`.
    pub fn line(ric_eigenvalues: Vec<Rational>, mu: Rational, k_const: Rational) -> Result<Self> {
        let spec = BundleSpec {
            kind: BundleKind::Line,
            m: 1,
            d: 0,
            base_eigenvalues: ric_eigenvalues,
            mu,
            k_const,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Rank-`m` vector bundle over a `d`-dimensional base with curvature
    /// eigenvalues `beta_j in (-1, 0]`, one per base dimension.
    pub fn vector(m: u32, base_eigenvalues: Vec<Rational>, mu: Rational) -> Result<Self> {
        let spec = BundleSpec {
            kind: BundleKind::Vector,
            m,
            d: base_eigenvalues.len() as u32,
            base_eigenvalues,
            mu,
            k_const: Rational::zero(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_zero() {
            return Err(Error::ZeroMu);
        }
        if self.k_const.is_negative() {
            return Err(Error::InvalidSpec("K must be nonnegative".into()));
        }
        match self.kind {
            BundleKind::Line => {
                if self.m != 1 {
                    return Err(Error::InvalidSpec("line bundles have rank m = 1".into()));
                }
                for lambda in &self.base_eigenvalues {
                    if lambda.is_negative() {
                        return Err(Error::InvalidSpec(format!(
                            "Ricci eigenvalue {lambda} < 0; the curvature form -gamma must be \
                             positive semi-definite"
                        )));
                    }
                }
            }
            BundleKind::Vector => {
                if self.m < 2 {
                    return Err(Error::InvalidSpec("vector bundles need rank m >= 2".into()));
                }
                if self.d as usize != self.base_eigenvalues.len() {
                    return Err(Error::InvalidSpec(format!(
                        "base dimension d = {} does not match {} eigenvalues",
                        self.d,
                        self.base_eigenvalues.len()
                    )));
                }
                for beta in &self.base_eigenvalues {
                    if beta.is_positive() {
                        return Err(Error::InvalidSpec(format!(
                            "base eigenvalue {beta} > 0; gamma must be negative semi-definite"
                        )));
                    }
                    if !(beta + Rational::from_integer(1.into())).is_positive() {
                        return Err(Error::InvalidSpec(format!(
                            "base eigenvalue {beta} <= -1; positivity of the reference metric \
                             requires 1 + beta_j > 0"
                        )));
                    }
                }
                if !self.k_const.is_zero() {
                    return Err(Error::InvalidSpec(
                        "vector bundles require K = 0 (Q(0) = 0)".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// ODE right-hand side: 1 for line bundles, `m` for vector bundles.
    pub fn rhs(&self) -> u32 {
        match self.kind {
            BundleKind::Line => 1,
            BundleKind::Vector => self.m,
        }
    }

    /// Vanishing order `s` of `Q` at `tau = 0`: 0 for line bundles,
    /// `m - 1` for vector bundles.
    pub fn vanishing_order(&self) -> usize {
        match self.kind {
            BundleKind::Line => 0,
            BundleKind::Vector => (self.m - 1) as usize,
        }
    }

    /// The curvature polynomial.
    ///
    /// Line: `Q = prod_j (1 - beta_j tau)` with `beta_j = -lambda_j`.
    /// Vector: `Q = tau^{m-1} prod_j (1 + beta_j - beta_j tau)`.
    pub fn q_polynomial(&self) -> RationalPolynomial {
        match self.kind {
            BundleKind::Line => {
                let betas: Vec<Rational> =
                    self.base_eigenvalues.iter().map(|l| -l.clone()).collect();
                RationalPolynomial::from_roots(&betas)
            }
            BundleKind::Vector => {
                let mut qhat = RationalPolynomial::one();
                for beta in &self.base_eigenvalues {
                    let factor = RationalPolynomial::from_coeffs(vec![
                        Rational::from_integer(1.into()) + beta,
                        -beta.clone(),
                    ]);
                    qhat = qhat.mul(&factor);
                }
                qhat.mul_monomial(self.vanishing_order())
            }
        }
    }

    /// All eigenvalues of the curvature endomorphism on `M`, one per complex
    /// direction: line bundles list `beta_j = -lambda_j`; vector bundles
    /// append the `m - 1` fibre eigenvalues, each `-1`.
    pub fn gamma_eigenvalues(&self) -> Vec<Rational> {
        match self.kind {
            BundleKind::Line => self.base_eigenvalues.iter().map(|l| -l.clone()).collect(),
            BundleKind::Vector => {
                let mut all: Vec<Rational> = self.base_eigenvalues.clone();
                let minus_one = -Rational::from_integer(1.into());
                all.resize(all.len() + (self.m - 1) as usize, minus_one);
                all
            }
        }
    }

    pub fn mu_f64(&self) -> f64 {
        rational_to_f64(&self.mu)
    }

    pub fn k_f64(&self) -> f64 {
        rational_to_f64(&self.k_const)
    }
}
