//! Scalar abstraction shared by the model, the engine and the analysis code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;

/// Floating point type usable for frequencies, granularities and estimates.
///
/// Implemented for `f32` and `f64`. The row-sum tolerance is the only
/// precision-dependent constant the model needs.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Maximum tolerated deviation of a real-valued row sum from 1.
    fn row_tolerance() -> Self;

    /// Uniform draw from `[0, 1)`.
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    fn row_tolerance() -> Self {
        1e-9
    }

    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }
}

impl Real for f32 {
    fn row_tolerance() -> Self {
        1e-5
    }

    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }
}
