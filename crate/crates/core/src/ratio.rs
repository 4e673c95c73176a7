//! Ratios with the 0/0 and x/0 conventions used for PoA and PoS.

use serde::Serialize;

use crate::scalar::Scalar;

/// Values this close to zero count as zero when forming a ratio.
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Finite,
    OneByConvention,
    Infinite,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ratio<T = f64> {
    Finite(T),
    /// Both numerator and denominator are zero.
    OneByConvention,
    /// Positive numerator over a zero denominator.
    Infinite,
}

impl<T: Scalar> Ratio<T> {
    pub fn of(numerator: &T, denominator: &T) -> Self {
        if denominator.is_negligible(ZERO_TOL) {
            if numerator.is_negligible(ZERO_TOL) {
                Ratio::OneByConvention
            } else {
                Ratio::Infinite
            }
        } else {
            Ratio::Finite(numerator.clone() / denominator.clone())
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ratio::Finite(v) => v.to_f64(),
            Ratio::OneByConvention => 1.0,
            Ratio::Infinite => f64::INFINITY,
        }
    }

    pub fn convention(&self) -> Convention {
        match self {
            Ratio::Finite(_) => Convention::Finite,
            Ratio::OneByConvention => Convention::OneByConvention,
            Ratio::Infinite => Convention::Infinite,
        }
    }

    /// Exact value when finite; `1` for the 0/0 convention.
    pub fn exact(&self) -> Option<T> {
        match self {
            Ratio::Finite(v) => Some(v.clone()),
            Ratio::OneByConvention => Some(T::one()),
            Ratio::Infinite => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(Ratio::of(&0.0, &0.0), Ratio::OneByConvention);
        assert_eq!(Ratio::of(&2.0, &0.0), Ratio::Infinite);
        assert_eq!(Ratio::of(&1.0, &4.0), Ratio::Finite(0.25));
        assert_eq!(Ratio::<f64>::Infinite.to_f64(), f64::INFINITY);
        assert_eq!(Ratio::<f64>::OneByConvention.to_f64(), 1.0);
    }
}
