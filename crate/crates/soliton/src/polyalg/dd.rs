//! Double-double (compensated) arithmetic.
//!
//! The closed form `phi = [(nu(0)+K) e^{mu tau} - nu(tau)] / Q(tau)` subtracts
//! two terms that can exceed the result by many orders of magnitude (the
//! numerator vanishes to order `s+1` at `tau = 0` while both terms stay
//! `O(nu(0))`).  Evaluating the numerator in plain f64 loses up to
//! `log10(kappa)` digits, where `kappa` is the ratio of the largest term to
//! the result; for steep eigenvalue sets `kappa` reaches 1e13 and beyond.
//! Carrying ~32 significant digits through the numerator keeps every
//! downstream residual far below its tolerance.
//!
//! Algorithms are the classic error-free transformations (Dekker, Knuth);
//! `two_prod` relies on `f64::mul_add`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum of two floats with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// ln 2 to double-double precision (split representation, so the f64
    /// head is necessarily the approximate constant).
    #[allow(clippy::approx_constant)]
    pub const LN2: Dd = Dd {
        hi: 6.931471805599453e-1,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Renormalizing constructor for a raw (hi, lo) pair.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// e^x to ~31 significant digits.
    ///
    /// Range reduction x = k ln2 + r with |r| <= ln2/2, Taylor series for
    /// e^r, exact scaling by 2^k.  Underflows to zero below -745 and
    /// saturates to +inf above 709, matching f64::exp.
    pub fn exp(self) -> Dd {
        let x = self;
        if x.hi < -745.0 {
            return Dd::ZERO;
        }
        if x.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if x.hi == 0.0 && x.lo == 0.0 {
            return Dd::ONE;
        }
        let k = (x.hi / Dd::LN2.hi).round();
        let r = x - Dd::LN2 * k;
        // Taylor: e^r = sum r^n / n!, |r| <= 0.347 so 30 terms give < 1e-35.
        // n stays exact as f64, so the dd division keeps each coefficient
        // exact to working precision (a rounded 1/n multiplier would cap the
        // whole sum at ~1e-17 relative).
        let mut sum = Dd::ONE + r;
        let mut term = r;
        for n in 2..32 {
            term = term * r / Dd::from_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        // exact power-of-two scaling (subnormal tail loses digits only where
        // f64::exp itself is already subnormal)
        let scale = k.exp2();
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }
}

impl Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, rhs: f64) -> Dd {
        self + Dd::from_f64(rhs)
    }
}

impl Sub for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, rhs: f64) -> Dd {
        self + Dd::from_f64(-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        let e = e + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;

    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * q1;
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * q2;
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo + q3)
    }
}

/// Horner evaluation of a polynomial with double-double coefficients at a
/// f64 point (coefficient of x^i at index i).
pub fn horner(coeffs: &[Dd], x: f64) -> Dd {
    let mut acc = Dd::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc * x + *c;
    }
    acc
}
