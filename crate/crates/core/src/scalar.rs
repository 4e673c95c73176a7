//! Arithmetic backends.
//!
//! Every numeric routine in the crate is generic over [`Scalar`] so the same
//! code path runs in `f64` (with fixed tolerances) or in exact rational
//! arithmetic ([`Rational`]) for regression fixtures that must be bit-exact.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational number used by the rational mode.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and every tolerance collapses to zero.
    const EXACT: bool;

    fn from_f64(x: f64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// A tolerance expressed in this arithmetic: `tol` for floats, zero when exact.
    fn slack(tol: f64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// `|self| <= tol` (exact equality with zero in rational mode).
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= Self::slack(tol)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn slack(tol: f64) -> Self {
        tol
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    /// Exact binary value of the float; use [`Scalar::from_ratio`] for decimal literals.
    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite float")
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        })
    }

    fn slack(_tol: f64) -> Self {
        Self::zero()
    }
}

/// Sum of an iterator of scalars.
pub fn sum<T: Scalar>(items: impl IntoIterator<Item = T>) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}

/// Parse `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let negative = text.starts_with('-');
    let body = text.trim_start_matches(['-', '+']);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}
