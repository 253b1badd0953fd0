//! Scalar abstraction for the dense backend.
//!
//! Everything that carries amplitudes or matrix entries is generic over
//! [`Real`]; `f64` is the working precision for every tolerance quoted in the
//! test suite, `f32` is supported for cheap exploratory runs.

use nalgebra as na;
use num_complex::Complex;
use num_traits as nt;

/// Real scalar usable for complex amplitudes and Hermitian eigen-solves.
pub trait Real:
    na::RealField + Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + Send + Sync
{
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("finite f64 is representable")
    }

    /// Lossy conversion to `f64`.
    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).expect("real scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over `R`.
pub type C<R> = Complex<R>;

/// `i^k` for `k` taken mod 4.
pub(crate) fn i_pow<R: Real>(k: u8) -> C<R> {
    match k & 3 {
        0 => Complex::new(R::one(), R::zero()),
        1 => Complex::new(R::zero(), R::one()),
        2 => Complex::new(-R::one(), R::zero()),
        _ => Complex::new(R::zero(), -R::one()),
    }
}
