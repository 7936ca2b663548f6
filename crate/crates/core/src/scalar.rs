//! Scalar abstraction for the numeric core.
//!
//! Everything numeric is generic over [`Real`], a thin alias over the
//! `num-traits` float stack. `f64` is the working type for the CLI and the
//! audit suites; `f32` instantiations compile and are exercised by a few
//! smoke tests, but the shipped tolerances assume `f64`.

use core::fmt::{Debug, Display};
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Lossy view as `f64`, used at reporting boundaries.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float widens to f64")
    }

    /// Converts a count into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in float")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}
