//! Coefficient rings for series and coefficient-space computations.
//!
//! [`Complex64`] is the working type; [`Exact`] (complex numbers over
//! arbitrary-precision rationals) is used where an identity should hold with
//! no rounding at all.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Complex rationals.
pub type Exact = Complex<BigRational>;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(n: i64) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    /// Nearest double-precision complex value.
    fn to_complex64(&self) -> Complex64;

    fn modulus(&self) -> f64 {
        self.to_complex64().norm()
    }
}

impl Scalar for Complex64 {
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_complex64(&self) -> Complex64 {
        *self
    }
}

impl Scalar for Exact {
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.clone(), BigRational::zero())
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// `num / den + i·0` as an exact scalar.
pub fn exact_ratio(num: i64, den: i64) -> Exact {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

/// `(a/b) + i (c/d)` as an exact scalar.
pub fn exact_complex(re: (i64, i64), im: (i64, i64)) -> Exact {
    Complex::new(
        BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
        BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
    )
}

pub(crate) fn is_one<S: Scalar>(s: &S) -> bool {
    *s == S::one()
}
