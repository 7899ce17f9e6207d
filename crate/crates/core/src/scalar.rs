//! Field abstraction shared by the floating-point and exact-rational paths.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;

/// Minimal field interface needed to evaluate the curvature polynomials.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// The rational number `num/den`.
    fn ratio(num: i64, den: i64) -> Self;

    fn int(v: i64) -> Self {
        Self::ratio(v, 1)
    }
}

impl Scalar for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for BigRational {
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
}
