//! Scalar fields the polynomial machinery is generic over.
//!
//! Four fields are supported: `f64`, `Complex64`, `BigRational` and
//! `Complex<BigRational>`. The rational fields make every polynomial identity
//! checkable with zero tolerance; the complex fields carry the conjugate-pair
//! Askey-Wilson parameters.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const FLOAT_POLE_EPS: f64 = 1e-15;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    /// Exact conversion for the rational fields (every finite `f64` is a
    /// dyadic rational), plain conversion otherwise.
    fn from_f64(v: f64) -> Self;

    /// Modulus as a float, used for guards and stopping rules.
    fn modulus(&self) -> f64;

    fn conj(&self) -> Self {
        self.clone()
    }

    /// Non-negative integer power by repeated squaring.
    fn powu(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Zero test used for pole detection. Exact in the rational fields; the
    /// float fields treat anything below `1e-15` in modulus as a pole.
    fn near_zero(&self) -> bool {
        self.is_zero()
    }

    /// Division that reports a vanishing denominator instead of producing
    /// `inf`/`NaN` or panicking.
    fn checked_div(self, den: Self, what: &str) -> Result<Self> {
        if den.near_zero() {
            Err(Error::Pole(format!("{what} vanishes")))
        } else {
            Ok(self / den)
        }
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn modulus(&self) -> f64 {
        self.abs()
    }

    fn powu(&self, n: u32) -> Self {
        self.powi(n as i32)
    }

    fn near_zero(&self) -> bool {
        self.abs() <= FLOAT_POLE_EPS
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn near_zero(&self) -> bool {
        self.norm() <= FLOAT_POLE_EPS
    }
}

/// Exact rational from a finite float. Panics on NaN or infinity, which
/// never reach the rational routines.
pub fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        rational_from_f64(v)
    }

    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Scalar for Complex<BigRational> {
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_i64(v), BigRational::zero())
    }

    fn from_f64(v: f64) -> Self {
        Complex::new(rational_from_f64(v), BigRational::zero())
    }

    fn modulus(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}

/// Exact Gaussian rational from a float complex number.
pub fn gaussian_rational(z: Complex64) -> Complex<BigRational> {
    Complex::new(rational_from_f64(z.re), rational_from_f64(z.im))
}

/// Nearest float complex number of a Gaussian rational.
pub fn gaussian_to_f64(z: &Complex<BigRational>) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Collapse a complex value that must be real. The imaginary part has to be
/// below `1e-12 * (1 + |z|)`.
pub fn real_part_checked(z: Complex64) -> Result<f64> {
    let residue = z.im.abs();
    if residue <= 1e-12 * (1.0 + z.norm()) {
        Ok(z.re)
    } else {
        Err(Error::ImaginaryResidue { residue })
    }
}

/// `(-1)^n` in any field.
pub fn sign<S: Scalar>(n: usize) -> S {
    if n % 2 == 0 {
        S::one()
    } else {
        -S::one()
    }
}

/// `C(n, 2) = n(n-1)/2`.
pub fn choose2(n: usize) -> u32 {
    (n * n.saturating_sub(1) / 2) as u32
}
