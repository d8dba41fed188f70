//! Scalar arithmetic shared by every module.
//!
//! Two backends implement [`Scalar`]: [`Rational`] (arbitrary-size exact
//! rationals) and `f64`. A computation is generic over one backend and never
//! mixes the two. Every comparison made by a check goes through
//! [`approx_zero`], which is exact equality for rationals and a
//! [`Tolerance`] test for floats.

mod mat;

pub use mat::{Mat, SingularMatrix};

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Exact rational with arbitrary-size numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Relative pivot threshold below which a float pivot block is singular.
pub const FLOAT_PIVOT_THRESHOLD: f64 = 1e-12;

/// Absolute and relative tolerance for float comparisons.
///
/// `x` is treated as zero when `|x| <= abs_tol + rel_tol * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, Error> {
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be nonnegative, got abs={abs_tol} rel={rel_tol}"
            )));
        }
        Ok(Tolerance { abs_tol, rel_tol })
    }
}

/// Field element of one arithmetic backend.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    /// True for the exact rational backend.
    const EXACT: bool;
    /// Backend name as used in configs and reports.
    const NAME: &'static str;

    fn from_rational(r: &Rational) -> Self;

    fn from_int(v: i64) -> Self;

    fn abs(&self) -> Self;

    fn to_f64(&self) -> f64;

    /// Rendering used in reports: `p/q` for rationals, scientific for floats.
    fn render(&self) -> String;

    /// Zero test under the backend's comparison policy.
    fn approx_zero(&self, scale: &Self, tol: &Tolerance) -> bool;

    /// Whether an elimination pivot of magnitude `self` is unusable, relative
    /// to the magnitude `scale` of the block it came from.
    fn negligible_pivot(&self, scale: &Self) -> bool;

    /// `∫ x^k e^{-x²} dx` over the real line, when representable.
    fn gaussian_moment(k: usize) -> Option<Self>;

    /// `e^{-x}` when representable in this backend.
    fn exp_neg(&self) -> Option<Self>;

    fn is_finite(&self) -> bool;

    fn power(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc *= self;
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn approx_zero(&self, _scale: &Self, _tol: &Tolerance) -> bool {
        self.is_zero()
    }

    fn negligible_pivot(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    fn gaussian_moment(_k: usize) -> Option<Self> {
        None
    }

    fn exp_neg(&self) -> Option<Self> {
        if self.is_zero() {
            Some(Self::one())
        } else {
            None
        }
    }

    fn is_finite(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        if *self == 0.0 {
            "0".to_string()
        } else {
            format!("{self:e}")
        }
    }

    fn approx_zero(&self, scale: &Self, tol: &Tolerance) -> bool {
        f64::abs(*self) <= tol.abs_tol + tol.rel_tol * scale
    }

    fn negligible_pivot(&self, scale: &Self) -> bool {
        !(f64::abs(*self) >= FLOAT_PIVOT_THRESHOLD * scale) || *scale == 0.0
    }

    fn gaussian_moment(k: usize) -> Option<Self> {
        if k % 2 == 1 {
            return Some(0.0);
        }
        // Γ((k+1)/2) via Γ(s+1) = s·Γ(s) from Γ(1/2) = √π
        let mut acc = std::f64::consts::PI.sqrt();
        let mut s = 0.5;
        for _ in 0..k / 2 {
            acc *= s;
            s += 1.0;
        }
        Some(acc)
    }

    fn exp_neg(&self) -> Option<Self> {
        Some((-*self).exp())
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// True iff `x` is zero under the backend's policy.
///
/// Exact backend: `x == 0` and the tolerance is ignored. Float backend:
/// `|x| <= abs_tol + rel_tol * scale`.
pub fn approx_zero<S: Scalar>(x: &S, scale: &S, tol: &Tolerance) -> bool {
    x.approx_zero(scale, tol)
}

/// Max-norm `max |A_ij|`, the residual metric of every identity check.
pub fn matrix_residual_norm<S: Scalar>(a: &Mat<S>) -> S {
    a.max_norm()
}

/// Parses `"p/q"`, `"p"` or a signed integer string into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let t = text.trim();
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim());
            let q = BigInt::from_str(q.trim());
            match (p, q) {
                (Ok(p), Ok(q)) if !q.is_zero() => Some(Rational::new(p, q)),
                _ => None,
            }
        }
        None => BigInt::from_str(t).ok().map(Rational::from_integer),
    };
    parsed.ok_or_else(|| Error::InvalidArgument(format!("not a rational: {text:?}")))
}

/// `p/q` shortcut for tests and built-in configurations.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approx_zero_examples() {
        let tol = Tolerance::default();
        assert!(approx_zero(&Rational::zero(), &Rational::one(), &tol));
        let third = ratio(1, 180);
        assert!(approx_zero(&(third.clone() - &third), &Rational::one(), &tol));
        let t = Tolerance::new(1e-12, 0.0).unwrap();
        assert!(approx_zero(&1e-14f64, &1.0, &t));
        assert!(!approx_zero(&1e-11f64, &1.0, &t));
        assert!(approx_zero(&0.0f64, &1.0, &t));
        // exact mode ignores the tolerance entirely
        let loose = Tolerance::new(1.0, 1.0).unwrap();
        assert!(!approx_zero(&ratio(1, 1_000_000), &Rational::one(), &loose));
    }

    #[test]
    fn residual_norm_examples() {
        let z: Mat<Rational> = Mat::zeros(2, 3);
        assert_eq!(matrix_residual_norm(&z), Rational::zero());
        let a = Mat::from_rows(vec![vec![ratio(1, 1), ratio(-2, 1)], vec![ratio(0, 1), ratio(1, 2)]]);
        assert_eq!(matrix_residual_norm(&a), ratio(2, 1));
        let i: Mat<Rational> = Mat::identity(3);
        assert_eq!(matrix_residual_norm(&(i.clone() - &i)), Rational::zero());
    }

    #[test]
    fn negative_tolerance_rejected() {
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), ratio(-7, 1));
        assert_eq!(parse_rational("-1/-3").unwrap(), ratio(1, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn gaussian_moments_match_gamma() {
        let pi = std::f64::consts::PI;
        assert!((f64::gaussian_moment(0).unwrap() - pi.sqrt()).abs() < 1e-15);
        assert_eq!(f64::gaussian_moment(3).unwrap(), 0.0);
        assert!((f64::gaussian_moment(2).unwrap() - pi.sqrt() / 2.0).abs() < 1e-15);
        // Γ(5/2) = 3√π/4
        assert!((f64::gaussian_moment(4).unwrap() - 0.75 * pi.sqrt()).abs() < 1e-15);
        assert!(Rational::gaussian_moment(0).is_none());
    }

    #[test]
    fn float_pivot_threshold() {
        assert!(1e-13f64.negligible_pivot(&1.0));
        assert!(!1e-11f64.negligible_pivot(&1.0));
        assert!(0.0f64.negligible_pivot(&0.0));
        assert!(f64::NAN.negligible_pivot(&1.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat() -> impl Strategy<Value = Rational> {
            (-50i64..50, 1i64..40).prop_map(|(p, q)| ratio(p, q))
        }

        proptest! {
            #[test]
            fn exact_field_laws(a in rat(), b in rat(), c in rat()) {
                prop_assert_eq!((a.clone() + &b) + &c, a.clone() + &(b.clone() + &c));
                prop_assert_eq!(a.clone() * &b, b.clone() * &a);
                if !a.is_zero() {
                    prop_assert_eq!(a.clone() * &(Rational::one() / &a), Rational::one());
                }
            }

            #[test]
            fn approx_zero_monotone(
                x in -1e-6f64..1e-6,
                s in 0.0f64..10.0,
                a1 in 0.0f64..1e-6, da in 0.0f64..1e-6,
                r1 in 0.0f64..1e-6, dr in 0.0f64..1e-6,
            ) {
                let t1 = Tolerance::new(a1, r1).unwrap();
                let t2 = Tolerance::new(a1 + da, r1 + dr).unwrap();
                if approx_zero(&x, &s, &t1) {
                    prop_assert!(approx_zero(&x, &s, &t2));
                }
            }
        }
    }
}
