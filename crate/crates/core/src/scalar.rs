use std::fmt::{Debug, Display};

use num_traits::{AsPrimitive, Float, FromPrimitive};

/// Storage type for vector components.
///
/// Components are stored as `Self` but every reduction (dot products, norms)
/// accumulates in `f64`, so `f32` storage keeps the accumulated error bounded.
pub trait Scalar:
    Float + FromPrimitive + AsPrimitive<f64> + Debug + Display + Default + Send + Sync + 'static
{
    /// Narrow an `f64` into storage precision.
    fn from_f64_lossy(v: f64) -> Self;
}

impl Scalar for f32 {
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}
