//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point weight / exponent type: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion from a count.
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }

    /// Absolute tolerance used when comparing accumulated weights against a
    /// threshold. Never smaller than `1e-9`; widened for narrow types so that a
    /// handful of rounding steps at magnitude `scale` stays inside it.
    fn weight_tolerance(scale: Self) -> Self {
        let floor = Self::lit(1e-9);
        let rounding = Self::epsilon() * Self::lit(64.0) * scale.abs().max(Self::one());
        floor.max(rounding)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
