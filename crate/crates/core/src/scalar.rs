//! Floating-point abstraction for the numerical kernels.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, Signed, ToPrimitive};

/// Scalar type the solvers, closures and the network are generic over.
///
/// `f32` and `f64` implement it. The `Signed + FromPrimitive + Send + Sync`
/// pile is what `rustfft` needs to treat the type as an FFT element, so
/// spectral differentiation works for any `Scalar` without extra bounds.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Signed
    + NumAssignOps
    + std::iter::Sum
    + for<'a> std::iter::Sum<&'a Self>
    + std::fmt::Debug
    + std::fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into `Self`.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 constant")
    }

    /// Converts an index or count into `Self`. Exact for counts below 2^53.
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    /// Widens to `f64` (lossless for `f32` and `f64`).
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("finite scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
