//! Scalar abstraction shared by the kernel and quadrature layers.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::Debug;

/// Floating-point scalar accepted by the generic numerics.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

#[inline]
pub(crate) fn usize_to<T: Real>(k: usize) -> T {
    T::from_usize(k).expect("integer representable")
}

/// Surface measure of the unit sphere S^{d-1} in R^d.
pub fn sphere_area(d: usize) -> f64 {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2); recurrence avoids a gamma function.
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

/// Lebesgue measure of the unit ball in R^d.
pub fn ball_volume(d: usize) -> f64 {
    if d == 0 {
        1.0
    } else {
        sphere_area(d) / d as f64
    }
}
