//! Binary floating point with a per-value mantissa width.
//!
//! A [`BigFloat`] stores `mantissa * 2^exponent` where `|mantissa| < 2^precision`.
//! Arithmetic rounds to nearest (ties to even) at the larger of the two operand
//! precisions, so mixing values never lowers the working precision. A value with
//! precision `0` is *exact*: it is never rounded by addition, subtraction or
//! multiplication. Integer literals produced through [`num_traits::Zero`],
//! [`num_traits::One`] and `from_i64` are exact and adopt the precision of
//! whatever they are combined with. Division of two exact values falls back to
//! [`DEFAULT_PRECISION`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Mantissa width used when nothing else fixes one.
pub const DEFAULT_PRECISION: u32 = 256;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

#[derive(Clone)]
pub struct BigFloat {
    mantissa: BigInt,
    exponent: i64,
    precision: u32,
}

fn round_magnitude(mag: BigUint, mut exponent: i64, precision: u32) -> (BigUint, i64) {
    let bits = mag.bits();
    let prec = precision as u64;
    if precision == 0 || bits <= prec {
        return (mag, exponent);
    }
    let shift = bits - prec;
    let half = mag.bit(shift - 1);
    let sticky = mag.trailing_zeros().is_some_and(|tz| tz < shift - 1);
    let mut q = mag >> shift;
    exponent += shift as i64;
    if half && (sticky || q.bit(0)) {
        q += 1u32;
        if q.bits() > prec {
            q >>= 1;
            exponent += 1;
        }
    }
    (q, exponent)
}

impl BigFloat {
    fn normalized(mantissa: BigInt, exponent: i64, precision: u32) -> Self {
        let (sign, mag) = mantissa.into_parts();
        if mag.is_zero() {
            return BigFloat { mantissa: BigInt::zero(), exponent: 0, precision };
        }
        let (mut mag, mut exponent) = round_magnitude(mag, exponent, precision);
        if let Some(tz) = mag.trailing_zeros() {
            if tz > 0 {
                mag >>= tz;
                exponent += tz as i64;
            }
        }
        BigFloat { mantissa: BigInt::from_biguint(sign, mag), exponent, precision }
    }

    /// Exact integer value (precision 0).
    pub fn from_integer(value: BigInt) -> Self {
        Self::normalized(value, 0, 0)
    }

    pub fn from_i64(value: i64) -> Self {
        Self::from_integer(BigInt::from(value))
    }

    /// Zero carrying the given precision.
    pub fn zero_with_precision(precision: u32) -> Self {
        BigFloat { mantissa: BigInt::zero(), exponent: 0, precision }
    }

    /// Rounds `value` to `precision` bits (`0` selects [`DEFAULT_PRECISION`]).
    pub fn from_rational(value: &BigRational, precision: u32) -> Self {
        let precision = if precision == 0 { DEFAULT_PRECISION } else { precision };
        Self::divide(value.numer(), 0, value.denom(), 0, precision)
    }

    /// Converts a finite `f64` exactly, then tags it with `precision`.
    pub fn from_f64(value: f64, precision: u32) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        if value == 0.0 {
            return Some(Self::zero_with_precision(precision));
        }
        let bits = value.to_bits();
        let negative = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let mut m = BigInt::from(mant);
        if negative {
            m = -m;
        }
        Some(Self::normalized(m, exp, precision))
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Same value re-tagged (and re-rounded) at `precision`.
    pub fn with_precision(&self, precision: u32) -> Self {
        Self::normalized(self.mantissa.clone(), self.exponent, precision)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mantissa: self.mantissa.abs(), exponent: self.exponent, precision: self.precision }
    }

    /// `floor(log2 |x|) + 1`, the binary exponent of the leading bit plus one.
    /// Meaningless for zero.
    pub fn top_bit(&self) -> i64 {
        self.exponent + self.mantissa.bits() as i64
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { mantissa: self.mantissa.clone(), exponent: self.exponent + k, precision: self.precision }
    }

    fn working_precision(&self, other: &Self) -> u32 {
        self.precision.max(other.precision)
    }

    fn add_signed(&self, other: &Self, negate_other: bool) -> Self {
        let precision = self.working_precision(other);
        if other.is_zero() {
            return self.with_precision(precision);
        }
        if self.is_zero() {
            let b = if negate_other { -other } else { other.clone() };
            return b.with_precision(precision);
        }
        if precision > 0 {
            // an addend below an eighth of an ulp of the other cannot change the rounded sum
            let window = precision as i64 + 3;
            let (ta, tb) = (self.top_bit(), other.top_bit());
            if tb < ta - window {
                return self.with_precision(precision);
            }
            if ta < tb - window {
                let b = if negate_other { -other } else { other.clone() };
                return b.with_precision(precision);
            }
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &other.mantissa << ((other.exponent - e) as usize);
        let m = if negate_other { a - b } else { a + b };
        Self::normalized(m, e, precision)
    }

    fn divide(na: &BigInt, ea: i64, nb: &BigInt, eb: i64, precision: u32) -> Self {
        assert!(!nb.is_zero(), "BigFloat division by zero");
        let sign = if na.sign() == nb.sign() { Sign::Plus } else { Sign::Minus };
        let ma = na.magnitude();
        let mb = nb.magnitude();
        if ma.is_zero() {
            return Self::zero_with_precision(precision);
        }
        let want = precision as i64 + 2 + mb.bits() as i64 - ma.bits() as i64;
        let mut shift = want.max(0);
        let (mut q, r) = (ma << (shift as usize)).div_rem(mb);
        if !r.is_zero() {
            q = (q << 1usize) + 1u32;
            shift += 1;
        }
        Self::normalized(BigInt::from_biguint(sign, q), ea - eb - shift, precision)
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let mut precision = self.working_precision(other);
        if precision == 0 {
            precision = DEFAULT_PRECISION;
        }
        Some(Self::divide(&self.mantissa, self.exponent, &other.mantissa, other.exponent, precision))
    }

    pub fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let precision = if self.precision == 0 { DEFAULT_PRECISION } else { self.precision };
        let mag = self.mantissa.magnitude();
        let mut k = (2 * precision as i64 + 4 - mag.bits() as i64).max(0);
        if (self.exponent - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let scaled = mag << (k as usize);
        let mut root = scaled.sqrt();
        let mut exp = (self.exponent - k) / 2;
        if &root * &root != scaled {
            root = (root << 1usize) + 1u32;
            exp -= 1;
        }
        Some(Self::normalized(BigInt::from(root), exp, precision))
    }

    /// `e^x` by halving the argument, summing the Taylor series and squaring back.
    pub fn exp(&self) -> Self {
        let precision = if self.precision == 0 { DEFAULT_PRECISION } else { self.precision };
        if self.is_zero() {
            return BigFloat::one().with_precision(precision);
        }
        let halvings = (self.top_bit() + 8).max(0);
        let work = precision + 32 + halvings as u32;
        let r = self.with_precision(work).mul_pow2(-halvings);
        let mut sum = BigFloat::one().with_precision(work);
        let mut term = sum.clone();
        let mut k = 1i64;
        loop {
            term = (&term * &r).checked_div(&BigFloat::from_i64(k)).expect("nonzero");
            if term.is_zero() || term.top_bit() < -(work as i64) - 4 {
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = &sum * &sum;
        }
        sum.with_precision(precision)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = BigFloat::one().with_precision(self.precision);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        result
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            (&self.mantissa >> (shift as usize), self.exponent + shift as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        ldexp(m.to_f64().unwrap_or(f64::NAN), e)
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << (self.exponent as usize))
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << ((-self.exponent) as usize))
        }
    }

    /// `round(|x| * 10^k)` as an integer.
    fn scaled_by_pow10(&self, k: i64) -> BigUint {
        let mut num = self.mantissa.magnitude().clone();
        let mut den = BigUint::one();
        if self.exponent >= 0 {
            num <<= self.exponent as usize;
        } else {
            den <<= (-self.exponent) as usize;
        }
        let ten = BigUint::from(10u32);
        if k >= 0 {
            num *= num_traits::pow(ten, k as usize);
        } else {
            den *= num_traits::pow(ten, (-k) as usize);
        }
        (num * 2u32 + &den) / (den * 2u32)
    }

    /// Fixed-point decimal rendering with `decimals` digits after the point.
    pub fn to_fixed(&self, decimals: usize) -> String {
        let digits = self.scaled_by_pow10(decimals as i64).to_string();
        let digits = if digits.len() <= decimals {
            format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = digits.split_at(digits.len() - decimals);
        let negative = self.is_negative() && digits.bytes().any(|b| b != b'0');
        let sign = if negative { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Scientific rendering with `digits` significant digits.
    pub fn to_scientific(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let mut e10 = ((self.top_bit() - 1) as f64 * LOG10_2).floor() as i64;
        let mut scaled;
        loop {
            scaled = self.scaled_by_pow10(digits as i64 - 1 - e10).to_string();
            if scaled.len() > digits {
                e10 += 1;
            } else if scaled.len() < digits {
                e10 -= 1;
            } else {
                break;
            }
        }
        let sign = if self.is_negative() { "-" } else { "" };
        let (lead, rest) = scaled.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{e10}")
        } else {
            format!("{sign}{lead}.{rest}e{e10}")
        }
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({} @{}b)", self.to_scientific(20), self.precision)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(decimals) => f.write_str(&self.to_fixed(decimals)),
            None => f.write_str(&self.to_scientific(17)),
        }
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mantissa == other.mantissa && self.exponent == other.exponent
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        let (ta, tb) = (self.top_bit(), other.top_bit());
        if ta != tb {
            let by_magnitude = ta.cmp(&tb);
            return Some(if sa > 0 { by_magnitude } else { by_magnitude.reverse() });
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &other.mantissa << ((other.exponent - e) as usize);
        Some(a.cmp(&b))
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        Self::zero_with_precision(0)
    }
    fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        Self::from_i64(1)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mantissa: -self.mantissa, exponent: self.exponent, precision: self.precision }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -self.clone()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $trait<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_signed(b, false));
forward_binop!(Sub, sub, |a, b| a.add_signed(b, true));
forward_binop!(Mul, mul, |a, b| {
    BigFloat::normalized(&a.mantissa * &b.mantissa, a.exponent + b.exponent, a.working_precision(b))
});
forward_binop!(Div, div, |a, b| a.checked_div(b).expect("BigFloat division by zero"));

impl AddAssign<&BigFloat> for BigFloat {
    fn add_assign(&mut self, rhs: &BigFloat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&BigFloat> for BigFloat {
    fn sub_assign(&mut self, rhs: &BigFloat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&BigFloat> for BigFloat {
    fn mul_assign(&mut self, rhs: &BigFloat) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64(v, 128).unwrap()
    }

    #[test]
    fn arithmetic_matches_f64_on_representable_values() {
        assert_eq!((bf(1.5) + bf(2.25)).to_f64(), 3.75);
        assert_eq!((bf(1.5) - bf(2.25)).to_f64(), -0.75);
        assert_eq!((bf(1.5) * bf(-2.0)).to_f64(), -3.0);
        assert_eq!((bf(1.0) / bf(4.0)).to_f64(), 0.25);
    }

    #[test]
    fn division_rounds_at_precision() {
        let third = BigFloat::from_i64(1).with_precision(200) / BigFloat::from_i64(3);
        let back = &third * &BigFloat::from_i64(3);
        let err = (back - BigFloat::from_i64(1)).abs();
        assert!(err.is_zero() || err.top_bit() <= -199);
        assert_eq!(third.precision(), 200);
    }

    #[test]
    fn precision_never_drops() {
        let a = BigFloat::from_f64(1.0, 64).unwrap();
        let b = BigFloat::from_f64(3.0, 512).unwrap();
        assert_eq!((&a + &b).precision(), 512);
        assert_eq!((&a * &b).precision(), 512);
        assert_eq!((&a / &b).precision(), 512);
    }

    #[test]
    fn absorbs_negligible_addend() {
        let big = BigFloat::from_f64(1.0, 64).unwrap();
        let tiny = BigFloat::from_f64(1.0, 64).unwrap().mul_pow2(-400);
        assert_eq!(&big + &tiny, big);
        assert_eq!(&tiny + &big, big);
    }

    #[test]
    fn exact_values_stay_exact() {
        let a = BigFloat::from_i64(3).powi(200);
        let b = &a + &BigFloat::from_i64(1);
        assert_eq!((b - a), BigFloat::from_i64(1));
    }

    #[test]
    fn exp_and_sqrt() {
        let one = BigFloat::from_i64(1).with_precision(256);
        let e = one.exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        let two = BigFloat::from_i64(2).with_precision(256);
        let r = two.sqrt().unwrap();
        let err = (&r * &r - &two).abs();
        assert!(err.top_bit() < -250);
        let e_minus = (-one.mul_pow2(3)).exp();
        assert!((e_minus.to_f64() - (-8f64).exp()).abs() < 1e-18);
        let ln_check = BigFloat::from_f64(0.25, 256).unwrap().exp();
        assert!((ln_check.to_f64() - 0.25f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn ordering() {
        assert!(bf(1.0) < bf(2.0));
        assert!(bf(-3.0) < bf(-2.0));
        assert!(bf(-1.0) < BigFloat::zero());
        assert!(bf(1e-300) > BigFloat::zero());
        assert_eq!(bf(2.0).partial_cmp(&BigFloat::from_i64(2)), Some(Ordering::Equal));
    }

    #[test]
    fn formatting() {
        let x = BigFloat::from_rational(&BigRational::new(1.into(), 3.into()), 128);
        assert_eq!(x.to_fixed(5), "0.33333");
        assert_eq!(format!("{:.3}", -x.clone()), "-0.333");
        assert_eq!(x.to_scientific(4), "3.333e-1");
        assert_eq!(BigFloat::from_i64(1000).to_scientific(2), "1.0e3");
        assert_eq!(BigFloat::from_i64(-2).to_fixed(0), "-2");
    }

    #[test]
    fn huge_magnitudes_survive() {
        let big = BigFloat::from_i64(10).with_precision(256).powi(400);
        assert!(big.to_f64().is_infinite());
        assert!(big.to_scientific(3).ends_with("e400"));
        let ratio = &big / &(big.clone() * BigFloat::from_i64(2));
        assert_eq!(ratio.to_f64(), 0.5);
    }
}
