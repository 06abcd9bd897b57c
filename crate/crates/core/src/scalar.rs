//! Scalar abstraction shared by the numerical modules.

use nalgebra::RealField;
use num_complex::Complex;

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real: RealField + Copy + Default + Send + Sync + 'static {
    /// Convert an `f64` literal.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    fn to_f64(self) -> f64 {
        nalgebra::try_convert::<Self, f64>(self).unwrap_or(f64::NAN)
    }

    /// Machine epsilon for this precision.
    fn eps() -> Self;

    /// Widen a tolerance pinned for `f64` so it remains meaningful in lower precision.
    fn tolerance(base: f64) -> Self {
        Self::lit(base.max(Self::eps().to_f64() * 1e4))
    }
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{iθ}`
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn conj<T: Real>(z: C<T>) -> C<T> {
    Complex::new(z.re, -z.im)
}

#[inline]
pub fn abs2<T: Real>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> C<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

#[inline]
pub fn to_c64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}
