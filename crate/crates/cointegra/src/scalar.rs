//! Scalar abstraction used throughout the crate.
//!
//! All numerical routines are written against [`Scalar`], which is any real
//! field nalgebra can factorize (in practice `f32` or `f64`). Concrete type
//! aliases for the common `f64` instantiation live at the crate root.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {}

impl<T> Scalar for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("constant not representable in scalar type")
}

/// Complex number with the given real part and zero imaginary part.
#[inline]
pub fn cplx<S: Scalar>(re: f64, im: f64) -> Complex<S> {
    Complex::new(real(re), real(im))
}

/// Lossy conversion back to `f64`, mainly for reporting and serialization.
#[inline]
pub fn to_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().expect("scalar not representable as f64")
}
