//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{ComplexField, RealField};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use num_complex::Complex;

/// Floating point type the engine is generic over (`f32` or `f64`).
///
/// Everything goes through `nalgebra::RealField`, which already carries the
/// elementary functions and the conversions from `f64` literals.
pub trait Real:
    RealField + Copy + Default + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    #[inline]
    fn of(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Widens (or keeps) the value as `f64`, used for reporting and hashing.
    #[inline]
    fn as_f64(self) -> f64 {
        nalgebra::try_convert::<Self, f64>(self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn mag(self) -> Self {
        ComplexField::abs(self)
    }

    #[inline]
    fn count(n: usize) -> Self {
        Self::of(n as f64)
    }

    #[inline]
    fn is_finite_value(self) -> bool {
        self.as_f64().is_finite()
    }

    #[inline]
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the engine scalar.
pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// `exp(i θ)` for real θ.
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

#[inline]
pub fn cexp<T: Real>(z: C<T>) -> C<T> {
    let r = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(r * c, r * s)
}

#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

/// Principal square root.
#[inline]
pub fn csqrt<T: Real>(z: C<T>) -> C<T> {
    ComplexField::sqrt(z)
}

#[inline]
pub fn cln<T: Real>(z: C<T>) -> C<T> {
    Complex::new(cabs(z).ln(), z.im.atan2(z.re))
}

/// Square root with non-negative imaginary part.
#[inline]
pub fn csqrt_upper<T: Real>(z: C<T>) -> C<T> {
    let w = csqrt(z);
    if w.im < T::zero() {
        -w
    } else {
        w
    }
}

#[inline]
pub fn c_to_f64<T: Real>(z: C<T>) -> C<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

#[inline]
pub fn c_from_f64<T: Real>(z: C<f64>) -> C<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}

/// `exp(-i(8λ³t + 2λx))`, the inverse time-evolution factor of the scattering data.
#[inline]
pub fn xi_inv<T: Real>(lambda: C<T>, x: T, t: T) -> C<T> {
    let l3 = lambda * lambda * lambda;
    let phase = l3 * T::of(8.0) * t + lambda * (T::of(2.0) * x);
    cexp(Complex::new(phase.im, -phase.re))
}
