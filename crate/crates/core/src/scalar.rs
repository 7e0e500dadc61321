//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
///
/// Everything in the crate is written against this trait; the concrete
/// aliases at the crate root pick `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance floor: `base` for f64, widened to a few ulps of the type otherwise.
    #[inline]
    fn tol(base: f64) -> Self {
        Self::lit(base).max(Self::default_epsilon() * Self::lit(1e3))
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn is_finite<T: Real>(x: T) -> bool {
    x.as_f64().is_finite()
}
