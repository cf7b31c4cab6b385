//! Real scalar abstraction shared by every numeric module.
//!
//! All estimator and LLR math is written against [`Real`], so the same code
//! runs in `f64` (the default used by the simulator) and `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Floating-point scalar usable as the real part of the complex entries.
pub trait Real: Float + FloatConst + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self;

    /// Lossy conversion back to `f64` for reporting and serialization.
    fn as_f64(self) -> f64;

    /// A tolerance of `base`, floored at a small multiple of machine epsilon
    /// so that `f64`-calibrated thresholds stay meaningful in `f32`.
    fn tol(base: f64) -> Self {
        Self::lit(base).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// Shorthand for building a complex number from two `f64` literals.
#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
