//! Exact univariate polynomial and power-series arithmetic over the
//! rationals, with float evaluation.
//!
//! Everything the construction hinges on — the curvature polynomial `Q`, its
//! reduced form `Qhat`, the antiderivative data `nu`, and the Taylor series
//! of the momentum profile at the removable singularity — lives here as exact
//! rational data.  Exactness is not a luxury: the series numerator
//! `(nu(0)+K) e^{mu tau} - nu(tau)` cancels to order `s+1` while its terms
//! carry factorial-sized coefficients, so any fixed-precision representation
//! would destroy the low-order coefficients that the extension criteria
//! (`phi(0) = 0`, `phi'(0) = 1`) are read from.
//!
//! All types are immutable values and all operations are pure.

pub mod dd;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};
use dd::Dd;

/// Arbitrary-precision rational number.
///
/// `num_rational::BigRational` maintains exactly the invariants we need:
/// strictly positive denominator and `gcd(|num|, den) = 1` after every
/// operation.
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest-f64 value of a rational.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite f64 (every finite f64 is rational).
pub fn f64_to_rational(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Rational rounded to double-double: `hi` is the nearest f64, `lo` the
/// nearest f64 of the exact remainder.
pub fn rational_to_dd(r: &Rational) -> Dd {
    let hi = rational_to_f64(r);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rem = r - f64_to_rational(hi).expect("finite");
    Dd::new(hi, rational_to_f64(&rem))
}

/// Parse "p/q", an integer, or a plain decimal string into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().ok()?;
        let den: BigInt = q.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let frac: BigInt = frac_part.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let abs = Rational::new(int.abs() * &den + frac, den);
        return Some(if neg { -abs } else { abs });
    }
    let num: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(num))
}

/// `n!` as a [`BigInt`].
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Dense univariate polynomial with exact rational coefficients;
/// `coeffs[i]` multiplies `tau^i`.
///
/// The trailing coefficient is nonzero unless the polynomial is zero, so
/// `degree() == coeffs.len() - 1` whenever it is meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RationalPolynomial {
            coeffs: vec![Rational::one()],
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Build from raw coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    /// The product `prod_j (1 - beta_j tau)` over the given eigenvalues.
    ///
    /// Zero eigenvalues contribute trivial factors, so the degree equals the
    /// number of nonzero entries and the constant term is always 1.
    pub fn from_roots(eigenvalues: &[Rational]) -> Self {
        let mut p = Self::one();
        for beta in eigenvalues {
            if beta.is_zero() {
                continue;
            }
            p = p.mul(&Self::from_coeffs(vec![Rational::one(), -beta.clone()]));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial by convention.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `tau^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Exact formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `tau^power`.
    pub fn mul_monomial(&self, power: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        RationalPolynomial { coeffs }
    }

    /// Split `p = tau^s * phat` with `phat(0) != 0`; returns `(s, phat)`.
    /// The zero polynomial splits as `(0, 0)`.
    pub fn factor_out_tau(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, Self::zero());
        }
        let s = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0);
        (
            s,
            RationalPolynomial {
                coeffs: self.coeffs[s..].to_vec(),
            },
        )
    }

    /// Horner evaluation in f64; relative error a few ulps times the degree
    /// when no cancellation occurs.
    pub fn eval_f64(&self, tau: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * tau + rational_to_f64(c);
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, tau: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * tau + c;
        }
        acc
    }

    /// Coefficients rounded to double-double, for compensated Horner.
    pub fn to_dd_coeffs(&self) -> Vec<Dd> {
        self.coeffs.iter().map(rational_to_dd).collect()
    }

    /// Sum of absolute coefficient values at `tau >= 0` (a coefficient-wise
    /// majorant of |p|).
    pub fn eval_abs_f64(&self, tau: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * tau + rational_to_f64(c).abs();
        }
        acc
    }
}

/// Rigorous tail bound for a truncated series: `bound(tau) = scale *
/// (tau/tau_star)^exponent` for `tau <= tau_star`, infinite beyond.
///
/// Monotone increasing in `tau` and zero at `tau = 0`.
#[derive(Clone, Copy, Debug)]
pub struct TailBound {
    pub scale: f64,
    pub tau_star: f64,
    pub exponent: u32,
}

impl TailBound {
    pub fn eval(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return f64::NAN;
        }
        if tau == 0.0 {
            return 0.0;
        }
        if tau > self.tau_star {
            return f64::INFINITY;
        }
        self.scale * (tau / self.tau_star).powi(self.exponent as i32)
    }
}

/// Power series truncated at a fixed order, with exact rational coefficients
/// and an optional rigorous remainder bound.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
    truncation_order: usize,
    remainder: Option<TailBound>,
}

impl TruncatedSeries {
    /// Series from coefficients `c_0..c_n`; entries beyond `order` are
    /// dropped, missing ones are zero. No remainder bound is attached.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, Rational::zero());
        TruncatedSeries {
            coeffs,
            truncation_order: order,
            remainder: None,
        }
    }

    pub fn with_remainder_bound(mut self, bound: TailBound) -> Self {
        self.remainder = Some(bound);
        self
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Index of the first nonzero coefficient, or `None` for the zero series.
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Tail bound at `tau`; infinite when no bound is attached.
    pub fn remainder_bound(&self, tau: f64) -> f64 {
        match &self.remainder {
            Some(b) => b.eval(tau),
            None => {
                if tau == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Horner evaluation of the truncated polynomial part. At `tau = 0` this
    /// returns coefficient 0 exactly.
    pub fn eval_f64(&self, tau: f64) -> f64 {
        if tau == 0.0 {
            return rational_to_f64(&self.coeff(0));
        }
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * tau + rational_to_f64(c);
        }
        acc
    }

    /// Evaluate the formal derivative of the truncated part.
    pub fn eval_derivative_f64(&self, tau: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * tau + (i as f64) * rational_to_f64(c);
        }
        acc
    }

    /// Multiply by a polynomial, truncating at this series' order.
    pub fn mul_polynomial(&self, p: &RationalPolynomial) -> Self {
        let order = self.truncation_order;
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in p.coeffs().iter().enumerate() {
                if i + j > order {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        TruncatedSeries {
            coeffs,
            truncation_order: order,
            remainder: None,
        }
    }
}

/// Exact formal quotient `numerator / denominator` where `denominator =
/// tau^shift * dhat` with `dhat(0) != 0`.
///
/// The numerator must vanish at least to order `shift`; the quotient is
/// truncated at `numerator.truncation_order() - shift`.
pub fn series_divide(
    numerator: &TruncatedSeries,
    denominator: &RationalPolynomial,
    shift: usize,
) -> Result<TruncatedSeries> {
    let (den_shift, dhat) = denominator.factor_out_tau();
    if denominator.is_zero() || den_shift != shift {
        return Err(Error::Domain(format!(
            "denominator must be tau^{shift} times a unit, got vanishing order {den_shift}"
        )));
    }
    let low = numerator.low_order();
    match low {
        Some(found) if found < shift => {
            return Err(Error::OrderMismatch { need: shift, found });
        }
        _ => {}
    }
    if numerator.truncation_order() < shift {
        return Err(Error::OrderMismatch {
            need: shift,
            found: numerator.truncation_order(),
        });
    }

    let order = numerator.truncation_order() - shift;
    let d0 = dhat.coeff(0);
    let mut q = vec![Rational::zero(); order + 1];
    for i in 0..=order {
        let mut acc = numerator.coeff(i + shift);
        for j in 1..=i.min(dhat.degree()) {
            acc -= dhat.coeff(j) * &q[i - j];
        }
        q[i] = acc / &d0;
    }
    Ok(TruncatedSeries {
        coeffs: q,
        truncation_order: order,
        remainder: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn from_roots_trivial_cases() {
        // empty product of nonzero factors
        let q = RationalPolynomial::from_roots(&[rat_int(0), rat_int(0), rat_int(0)]);
        assert_eq!(q, RationalPolynomial::one());

        // single linear factors
        let q = RationalPolynomial::from_roots(&[rat_int(-1), rat_int(0)]);
        assert_eq!(q.coeffs(), &[rat_int(1), rat_int(1)]);
        let q = RationalPolynomial::from_roots(&[rat_int(-2)]);
        assert_eq!(q.coeffs(), &[rat_int(1), rat_int(2)]);
    }

    #[test]
    fn derivative_cases() {
        let p = RationalPolynomial::from_coeffs(vec![rat_int(1), rat_int(2)]);
        assert_eq!(p.derivative(), RationalPolynomial::constant(rat_int(2)));
        assert_eq!(RationalPolynomial::one().derivative(), RationalPolynomial::zero());
        let cube = RationalPolynomial::from_coeffs(vec![
            rat_int(0),
            rat_int(0),
            rat_int(0),
            rat_int(1),
        ]);
        assert_eq!(
            cube.derivative(),
            RationalPolynomial::from_coeffs(vec![rat_int(0), rat_int(0), rat_int(3)])
        );
    }

    #[test]
    fn eval_simple_points() {
        let p = RationalPolynomial::from_coeffs(vec![rat_int(1), rat_int(2)]);
        assert_eq!(p.eval_f64(0.5), 2.0);
        let q = RationalPolynomial::from_coeffs(vec![rat_int(1), rat_int(1)]);
        assert_eq!(q.eval_f64(0.0), 1.0);
    }

    #[test]
    fn series_divide_monomial() {
        // (tau^2 - tau^3/3) / tau -> tau - tau^2/3
        let num = TruncatedSeries::from_coeffs(
            vec![Rational::zero(), Rational::zero(), Rational::one(), -r(1, 3)],
            3,
        );
        let den = RationalPolynomial::from_coeffs(vec![Rational::zero(), Rational::one()]);
        let q = series_divide(&num, &den, 1).unwrap();
        assert_eq!(q.truncation_order(), 2);
        assert_eq!(q.coeff(0), Rational::zero());
        assert_eq!(q.coeff(1), Rational::one());
        assert_eq!(q.coeff(2), -r(1, 3));
    }

    #[test]
    fn series_divide_exponential_numerator() {
        // 2(e^{-tau} - 1 + tau) = tau^2 - tau^3/3 + tau^4/12 - tau^5/60 + ...
        // divided by tau: tau - tau^2/3 + tau^3/12 - ...
        let order = 6;
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (l, c) in coeffs.iter_mut().enumerate().skip(2) {
            let sign = if l % 2 == 0 { 1 } else { -1 };
            *c = Rational::new(BigInt::from(2 * sign), factorial(l));
        }
        let num = TruncatedSeries::from_coeffs(coeffs, order);
        let den = RationalPolynomial::from_coeffs(vec![Rational::zero(), Rational::one()]);
        let q = series_divide(&num, &den, 1).unwrap();
        assert_eq!(q.coeff(1), Rational::one());
        assert_eq!(q.coeff(2), -r(1, 3));
        assert_eq!(q.coeff(3), r(1, 12));
        assert_eq!(q.coeff(4), -r(1, 60));
    }

    #[test]
    fn series_divide_order_mismatch() {
        let num = TruncatedSeries::from_coeffs(vec![Rational::one()], 3);
        let den = RationalPolynomial::from_coeffs(vec![Rational::zero(), Rational::one()]);
        match series_divide(&num, &den, 1) {
            Err(Error::OrderMismatch { need: 1, found: 0 }) => {}
            other => panic!("expected order mismatch, got {other:?}"),
        }
    }

    #[test]
    fn tail_bound_monotone_and_zero_at_origin() {
        let b = TailBound {
            scale: 1e-10,
            tau_star: 1.0,
            exponent: 25,
        };
        assert_eq!(b.eval(0.0), 0.0);
        assert!(b.eval(0.25) < b.eval(0.5));
        assert!(b.eval(0.5) < b.eval(1.0));
        assert!(b.eval(1.5).is_infinite());
    }

    proptest! {
        #[test]
        fn rational_field_axioms(
            an in -50i64..50, ad in 1i64..20,
            bn in -50i64..50, bd in 1i64..20,
            cn in -50i64..50, cd in 1i64..20,
        ) {
            let a = r(an, ad);
            let b = r(bn, bd);
            let c = r(cn, cd);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }

        #[test]
        fn from_roots_unit_constant_and_degree(
            eigs in proptest::collection::vec((-12i64..=0, 1i64..6), 0..6)
        ) {
            let eigs: Vec<Rational> = eigs.into_iter().map(|(n, d)| r(n, d)).collect();
            let q = RationalPolynomial::from_roots(&eigs);
            prop_assert_eq!(q.coeff(0), Rational::one());
            let nonzero = eigs.iter().filter(|b| !b.is_zero()).count();
            prop_assert_eq!(q.degree(), nonzero);
        }

        #[test]
        fn eval_matches_factor_product(
            eigs in proptest::collection::vec((-12i64..=0, 1i64..6), 0..6),
            t in 0.0f64..8.0,
        ) {
            let eigs: Vec<Rational> = eigs.into_iter().map(|(n, d)| r(n, d)).collect();
            let q = RationalPolynomial::from_roots(&eigs);
            let horner = q.eval_f64(t);
            let product: f64 = eigs
                .iter()
                .map(|b| 1.0 - rational_to_f64(b) * t)
                .product();
            let scale = product.abs().max(1e-300);
            prop_assert!(((horner - product) / scale).abs() < 1e-14 * (q.degree().max(1) as f64));
        }

        #[test]
        fn eval_f64_matches_exact_rational(
            coeffs in proptest::collection::vec((-30i64..30, 1i64..8), 1..8),
            tn in -20i64..20, td in 1i64..10,
        ) {
            let p = RationalPolynomial::from_coeffs(
                coeffs.into_iter().map(|(n, d)| r(n, d)).collect(),
            );
            let t = r(tn, td);
            let exact = rational_to_f64(&p.eval_rational(&t));
            let approx = p.eval_f64(rational_to_f64(&t));
            let scale = exact.abs().max(1.0);
            prop_assert!(
                ((approx - exact) / scale).abs() <= 1e-14 * (p.degree().max(1) as f64)
            );
        }

        #[test]
        fn divide_then_multiply_is_identity(
            num_coeffs in proptest::collection::vec((-20i64..20, 1i64..6), 1..8),
            den_coeffs in proptest::collection::vec((-6i64..6, 1i64..4), 0..4),
            shift in 0usize..3,
        ) {
            // denominator tau^shift * (1 + higher terms): unit constant term
            let mut den = vec![Rational::one()];
            den.extend(den_coeffs.into_iter().map(|(n, d)| r(n, d)));
            let dhat = RationalPolynomial::from_coeffs(den);
            let den_poly = dhat.mul_monomial(shift);

            // numerator must vanish to order >= shift
            let mut coeffs = vec![Rational::zero(); shift];
            coeffs.extend(num_coeffs.into_iter().map(|(n, d)| r(n, d)));
            let order = coeffs.len() + 3;
            let num = TruncatedSeries::from_coeffs(coeffs, order);

            let q = series_divide(&num, &den_poly, shift).unwrap();
            let back = q.mul_polynomial(&dhat);
            for i in 0..=q.truncation_order() {
                prop_assert_eq!(back.coeff(i), num.coeff(i + shift));
            }
        }
    }
}
