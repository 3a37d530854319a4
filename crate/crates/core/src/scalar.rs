//! Floating point abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance on `‖x‖₂ = 1` for this precision.
    const UNIT_TOLERANCE: f64;

    /// Absolute tolerance on `Σ p = 1` for probability vectors and matrices.
    const SUM_TOLERANCE: f64;

    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const UNIT_TOLERANCE: f64 = 1e-9;
    const SUM_TOLERANCE: f64 = 1e-9;
}

impl Scalar for f32 {
    const UNIT_TOLERANCE: f64 = 1e-5;
    const SUM_TOLERANCE: f64 = 1e-4;
}
