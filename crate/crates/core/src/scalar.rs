//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating point scalar: `f32` or `f64`.
///
/// Tolerances throughout the crate are stated for `f64`; the `f32`
/// instantiation is usable for coarse work (mesh Chern integers, model
/// evaluation) but will not meet the tight residual bounds.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an integer into the scalar type.
    #[inline]
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut t = theta % two_pi;
    if t < T::zero() {
        t += two_pi;
    }
    if t >= two_pi {
        t = T::zero();
    }
    t
}

/// Wraps an angle into `(-π, π]`.
pub fn principal_angle<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let mut t = wrap_angle(theta);
    if t > pi {
        t -= T::TAU();
    }
    t
}
