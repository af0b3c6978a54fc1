//! A small complex-field abstraction so that each symbol formula is written
//! once and evaluated either in `f64` (sampling, geometry) or in
//! multiprecision (Taylor coefficients, inversion).

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::{Complex, Float};

pub trait ComplexScalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A value with the same precision as `like`.
    fn from_parts(re: f64, im: f64, like: &Self) -> Self;
    fn csqrt(&self) -> Self;
    fn cln(&self) -> Self;
    fn cexp(&self) -> Self;
    fn conj(&self) -> Self;
    fn re_f64(&self) -> f64;
    fn im_f64(&self) -> f64;
    fn abs_f64(&self) -> f64;
    /// `1 - |z|`, computed without cancellation where the representation allows.
    fn one_minus_abs(&self) -> f64;
    fn pi(like: &Self) -> Self;
    /// Rounds a multiprecision constant to the representation of `like`.
    fn from_mp(c: &Complex, like: &Self) -> Self;

    fn real(x: f64, like: &Self) -> Self {
        Self::from_parts(x, 0.0, like)
    }

    /// A user-supplied parameter: the decimal that `x` prints as, so
    /// `0.9` means nine tenths at any precision.
    fn param(x: f64, like: &Self) -> Self {
        Self::real(x, like)
    }

    fn i(like: &Self) -> Self {
        Self::from_parts(0.0, 1.0, like)
    }

    /// Principal power `exp(p log z)`.
    fn cpow(&self, p: f64) -> Self {
        (self.cln() * p).cexp()
    }

    fn is_exact_zero(&self) -> bool {
        self.re_f64() == 0.0 && self.im_f64() == 0.0
    }
}

impl ComplexScalar for Complex64 {
    fn from_parts(re: f64, im: f64, _like: &Self) -> Self {
        Complex64::new(re, im)
    }
    fn csqrt(&self) -> Self {
        self.sqrt()
    }
    fn cln(&self) -> Self {
        self.ln()
    }
    fn cexp(&self) -> Self {
        self.exp()
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn re_f64(&self) -> f64 {
        self.re
    }
    fn im_f64(&self) -> f64 {
        self.im
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
    fn one_minus_abs(&self) -> f64 {
        1.0 - self.norm()
    }
    fn pi(_like: &Self) -> Self {
        Complex64::new(std::f64::consts::PI, 0.0)
    }
    fn from_mp(c: &Complex, _like: &Self) -> Self {
        Complex64::new(c.real().to_f64(), c.imag().to_f64())
    }
    fn cpow(&self, p: f64) -> Self {
        self.powf(p)
    }
}

impl ComplexScalar for Complex {
    fn from_parts(re: f64, im: f64, like: &Self) -> Self {
        Complex::with_val(like.prec(), (re, im))
    }
    fn param(x: f64, like: &Self) -> Self {
        match rug::Float::parse(format!("{x}")) {
            Ok(p) => Complex::with_val(like.prec(), (p, 0)),
            Err(_) => <Self as ComplexScalar>::real(x, like),
        }
    }
    fn csqrt(&self) -> Self {
        self.clone().sqrt()
    }
    fn cln(&self) -> Self {
        self.clone().ln()
    }
    fn cexp(&self) -> Self {
        self.clone().exp()
    }
    fn conj(&self) -> Self {
        self.clone().conj()
    }
    fn re_f64(&self) -> f64 {
        self.real().to_f64()
    }
    fn im_f64(&self) -> f64 {
        self.imag().to_f64()
    }
    fn abs_f64(&self) -> f64 {
        Float::with_val(self.prec().0, self.abs_ref()).to_f64()
    }
    fn one_minus_abs(&self) -> f64 {
        let abs = Float::with_val(self.prec().0, self.abs_ref());
        Float::with_val(self.prec().0, 1 - abs).to_f64()
    }
    fn pi(like: &Self) -> Self {
        let p = like.prec().0;
        Complex::with_val(p, (Float::with_val(p, rug::float::Constant::Pi), 0))
    }
    fn from_mp(c: &Complex, like: &Self) -> Self {
        Complex::with_val(like.prec(), c)
    }
}

/// Modulus of a multiprecision complex value at its own precision.
pub fn abs_mp(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<T: ComplexScalar>(z: T) -> T {
        (z.cln()).cexp()
    }

    #[test]
    fn both_backends_agree_on_principal_branches() {
        let z = Complex64::new(-0.3, 0.4);
        let m = Complex::with_val(128, (-0.3, 0.4));
        let a = z.csqrt();
        let b = m.csqrt();
        assert!((a.re - b.re_f64()).abs() < 1e-15 && (a.im - b.im_f64()).abs() < 1e-15);
        let r = roundtrip(m.clone()) - m;
        assert!(r.abs_f64() < 1e-35);
        let p = Complex64::new(0.5, 0.5).cpow(0.5);
        let q = Complex::with_val(128, (0.5, 0.5)).cpow(0.5);
        assert!((p.re - q.re_f64()).abs() < 1e-15);
    }

    #[test]
    fn pi_at_precision() {
        let like = Complex::new(256);
        let p = Complex::pi(&like);
        assert_eq!(p.prec().0, 256);
        assert!((p.re_f64() - std::f64::consts::PI).abs() < 1e-15);
    }
}
