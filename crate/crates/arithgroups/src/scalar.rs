//! Scalar abstraction for the generic matrix type.

use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Ring scalar: enough structure for matrix products, powers and
/// determinants.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + Debug
        + Display
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + AddAssign
        + SubAssign
        + MulAssign
{
}

/// Field scalar: adds exact division, which Gaussian elimination needs.
///
/// `f64` satisfies the bounds but is only approximately a field; the
/// exact elimination routines are meaningful over `Rational` and other
/// genuinely exact types.
pub trait Field: Scalar + std::ops::Div<Output = Self> {
    /// Multiplicative inverse. Panics on zero; callers check first.
    fn field_inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl<T> Field for T where T: Scalar + std::ops::Div<Output = T> {}
