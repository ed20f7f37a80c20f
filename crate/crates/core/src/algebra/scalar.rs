//! Coefficient rings: exact rationals and [`BigFloat`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::bigfloat::BigFloat;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Which coefficient field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    ExactRational,
    BigReal,
}

/// A commutative ring with unit. Polynomials over a ring are again a ring,
/// which is how polynomials in `x` with coefficients in `λ` are built.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_i64(value: i64) -> Self;
}

/// A field of numbers usable as polynomial and jet coefficients.
pub trait Scalar:
    Ring + PartialOrd + fmt::Display + Div<Output = Self> + for<'a> Div<&'a Self, Output = Self>
{
    const KIND: ScalarKind;

    /// Converts an exact rational. `precision_bits` is ignored by exact fields.
    fn from_rational(value: &Rational, precision_bits: u32) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Mantissa width for big reals, `None` for exact fields.
    fn precision_bits(&self) -> Option<u32>;

    /// `e^self`; exact fields only support `e^0`.
    fn exp(&self) -> Result<Self>;

    /// Square root, or `None` if negative (or, for exact fields, irrational).
    fn sqrt(&self) -> Option<Self>;

    fn is_exact() -> bool {
        Self::KIND == ScalarKind::ExactRational
    }

    /// A value of the same field and precision as `self`.
    fn like_rational(&self, value: &Rational) -> Self {
        Self::from_rational(value, self.precision_bits().unwrap_or(0))
    }
}

impl Ring for Rational {
    fn from_i64(value: i64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::ExactRational;

    fn from_rational(value: &Rational, _precision_bits: u32) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            BigFloat::from_rational(self, 64).to_f64()
        })
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn precision_bits(&self) -> Option<u32> {
        None
    }

    fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(Rational::one())
        } else {
            Err(Error::NotRepresentable(format!("exp({self}) is irrational")))
        }
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().magnitude();
        let d = self.denom().magnitude();
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(Rational::new(rn.into(), rd.into()))
        } else {
            None
        }
    }
}

impl Ring for BigFloat {
    fn from_i64(value: i64) -> Self {
        BigFloat::from_i64(value)
    }
}

impl Scalar for BigFloat {
    const KIND: ScalarKind = ScalarKind::BigReal;

    fn from_rational(value: &Rational, precision_bits: u32) -> Self {
        BigFloat::from_rational(value, precision_bits)
    }

    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }

    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }

    fn precision_bits(&self) -> Option<u32> {
        Some(self.precision())
    }

    fn exp(&self) -> Result<Self> {
        Ok(BigFloat::exp(self))
    }

    fn sqrt(&self) -> Option<Self> {
        BigFloat::sqrt(self)
    }
}

/// Shorthand for `a/b` as a rational.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}
