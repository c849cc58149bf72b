//! Scalar abstraction: everything in this crate is generic over the working
//! float type. `f64` is the type used by the CLI and the golden files; `f32`
//! instantiations exist mainly to keep the math honest about precision.

use num_traits::{Float, FloatConst, NumCast};
use rustfft::FftNum;
use std::fmt::{Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

/// Floating-point scalar usable for spectral fields: f32 or f64.
pub trait Real:
    FftNum
    + Float
    + FloatConst
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Sum
    + Display
    + LowerExp
{
    /// Shorthand for embedding an `f64` literal. Panics only if the literal
    /// is not representable, which cannot happen for finite constants.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `usize` as scalar, used for grid measures and quadrature weights.
pub fn from_usize<T: Real>(n: usize) -> T {
    <T as NumCast>::from(n).expect("usize fits in scalar")
}
