//! Scalar abstractions.
//!
//! Matrix assembly only needs field arithmetic, so it is written against
//! [`Scalar`] and runs over `f32`, `f64` and exact rationals alike.
//! Factorizations and sampling need square roots and logarithms and are
//! written against [`Real`].

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, NumAssign, Signed, ToPrimitive};

/// Field-like scalar used by the finite-element assembly code.
pub trait Scalar:
    Num
    + NumAssign
    + Signed
    + Copy
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// `false` for NaN and infinities; always `true` for exact types.
    fn is_finite_value(self) -> bool;

    /// Conversion from a small literal. Panics only if `Self` cannot
    /// represent small integers, which no implementor does.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("scalar literal out of range")
    }
}

/// Floating point scalar used by factorizations and samplers.
pub trait Real: Scalar + Float {}

impl Scalar for f32 {
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f64 {
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Real for f32 {}
impl Real for f64 {}

impl Scalar for Ratio<i64> {
    fn is_finite_value(self) -> bool {
        true
    }
}

impl Scalar for Ratio<i128> {
    fn is_finite_value(self) -> bool {
        true
    }
}

/// Largest absolute value of a slice, zero when empty.
pub(crate) fn max_abs<T: Scalar>(values: &[T]) -> T {
    values
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
}
