//! Dense univariate polynomials over any [`Ring`].
//!
//! `Poly<Rational>` and `Poly<BigFloat>` are the usual polynomials in `x`.
//! Because `Poly<R>` is itself a ring, `Poly<Poly<Rational>>` ([`PolyXL`]) is a
//! polynomial in `x` whose coefficients are polynomials in the spectral
//! parameter `λ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::{Rational, Ring, Scalar};
use crate::error::{Error, Result};

/// Coefficients in ascending powers, never with a trailing zero.
#[derive(Clone, PartialEq)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

/// Polynomial in `x` over a scalar field.
pub type PolyX<S> = Poly<S>;

/// Polynomial in `x` whose coefficients are rational polynomials in `λ`.
pub type PolyXL = Poly<Poly<Rational>>;

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: R, k: usize) -> Self {
        let mut coeffs = vec![R::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(R::one(), 1)
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| R::from_i64(v)).collect())
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * &R::from_i64(k as i64))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&R) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Coefficients of `a(x0 + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, x0: &R) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for k in 0..n.saturating_sub(1) {
            for j in (k..n - 1).rev() {
                let carry = c[j + 1].clone() * x0;
                c[j] = c[j].clone() + carry;
            }
        }
        Self::new(c)
    }

    fn add_ref(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + &other.coeff(k)).collect())
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - &other.coeff(k)).collect())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = a.clone() * b;
                out[i + j] = std::mem::replace(&mut out[i + j], R::zero()) + &t;
            }
        }
        Self::new(out)
    }
}

impl<S: Scalar> Poly<S> {
    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead = divisor.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    let t = c.clone() * d;
                    rem[k + j] = rem[k + j].clone() - &t;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lead) => {
                let inv = S::one() / lead;
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![S::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / S::from_i64(k as i64 + 1));
        }
        Self::new(coeffs)
    }

    /// Converts rational coefficients into this field.
    pub fn from_rational_poly(p: &Poly<Rational>, precision_bits: u32) -> Self {
        p.map(|c| S::from_rational(c, precision_bits))
    }
}

impl Poly<Rational> {
    /// Lifts a polynomial in `x` to one with `λ`-constant coefficients.
    pub fn lift(&self) -> PolyXL {
        self.map(|c| Poly::constant(c.clone()))
    }
}

impl PolyXL {
    /// The polynomial `λ`, constant in `x`.
    pub fn lambda() -> Self {
        Poly::constant(Poly::x())
    }

    /// Substitutes a value for `λ`.
    pub fn bind_lambda<S: Scalar>(&self, value: &S) -> Poly<S> {
        self.map(|c| c.map(|r| value.like_rational(r)).eval(value))
    }

    /// Highest power of `λ` present.
    pub fn lambda_degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(|c| c.degree()).max()
    }
}

impl<R: Ring> Zero for Poly<R> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Ring> One for Poly<R> {
    fn one() -> Self {
        Self::constant(R::one())
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn from_i64(value: i64) -> Self {
        Self::constant(R::from_i64(value))
    }
}

impl<R: Ring> Neg for Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Self {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<R: Ring> Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        -self.clone()
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl<R: Ring> $trait<&Poly<R>> for &Poly<R> {
            type Output = Poly<R>;
            fn $method(self, rhs: &Poly<R>) -> Poly<R> {
                self.$imp(rhs)
            }
        }
        impl<R: Ring> $trait<Poly<R>> for Poly<R> {
            type Output = Poly<R>;
            fn $method(self, rhs: Poly<R>) -> Poly<R> {
                self.$imp(&rhs)
            }
        }
        impl<R: Ring> $trait<&Poly<R>> for Poly<R> {
            type Output = Poly<R>;
            fn $method(self, rhs: &Poly<R>) -> Poly<R> {
                self.$imp(rhs)
            }
        }
        impl<R: Ring> $trait<Poly<R>> for &Poly<R> {
            type Output = Poly<R>;
            fn $method(self, rhs: Poly<R>) -> Poly<R> {
                self.$imp(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, add_ref);
poly_binop!(Sub, sub, sub_ref);
poly_binop!(Mul, mul, mul_ref);

/// Rendering with one variable name per nesting level.
pub trait Render {
    fn render(&self, vars: &[&str]) -> String;
}

impl Render for Rational {
    fn render(&self, _vars: &[&str]) -> String {
        self.to_string()
    }
}

impl Render for super::bigfloat::BigFloat {
    fn render(&self, _vars: &[&str]) -> String {
        self.to_string()
    }
}

impl<R: Ring + Render> Render for Poly<R> {
    fn render(&self, vars: &[&str]) -> String {
        let (var, inner) = vars.split_first().map(|(v, r)| (*v, r)).unwrap_or(("x", &[][..]));
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut s = c.render(inner);
            let compound = s.trim_start_matches('-').contains(['+', '-'].as_ref());
            let negative = !compound && s.starts_with('-');
            if negative {
                s.remove(0);
            }
            if compound {
                s = format!("({s})");
            }
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let power = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&s);
            } else if s == "1" {
                out.push_str(&power);
            } else {
                out.push_str(&s);
                out.push_str(&power);
            }
        }
        out
    }
}

impl<R: Ring + Render> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&["x", "λ"]))
    }
}

impl<R: fmt::Debug> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Poly").field(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::ratio;

    fn q(v: &[i64]) -> Poly<Rational> {
        Poly::from_i64s(v)
    }

    /// λ-polynomial from integer coefficients.
    fn lam(v: &[i64]) -> Poly<Rational> {
        q(v)
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(q(&[1, 1]) * q(&[1, -1]), q(&[1, 0, -1]));
    }

    #[test]
    fn lambda_cancels() {
        let a = Poly::new(vec![lam(&[0, -1]), Poly::zero(), Poly::zero(), Poly::zero(), lam(&[1])]);
        let b = PolyXL::lambda();
        assert_eq!(a + b, q(&[0, 0, 0, 0, 1]).lift());
    }

    #[test]
    fn mixed_product_expansion() {
        // (2x)(4x^2 + 3 - λ) = 8x^3 + (6 - 2λ)x
        let two_x = q(&[0, 2]).lift();
        let rhs = Poly::new(vec![lam(&[3, -1]), Poly::zero(), lam(&[4])]);
        let prod = &two_x * &rhs;
        let expected = Poly::new(vec![Poly::zero(), lam(&[6, -2]), Poly::zero(), lam(&[8])]);
        assert_eq!(prod, expected);
        // cross-check by evaluation in both variables
        for (xv, lv) in [(ratio(1, 3), ratio(-2, 5)), (ratio(7, 2), ratio(3, 1)), (ratio(-5, 4), ratio(11, 7))] {
            let direct = two_x.bind_lambda(&lv).eval(&xv) * rhs.bind_lambda(&lv).eval(&xv);
            assert_eq!(prod.bind_lambda(&lv).eval(&xv), direct);
        }
        assert_eq!(prod.to_string(), "8x^3 + (-2λ + 6)x");
    }

    #[test]
    fn power_rule() {
        assert_eq!(q(&[0, 0, -2, 0, 1]).derivative(), q(&[0, -4, 0, 4]));
        assert_eq!(q(&[5]).derivative(), Poly::zero());
        assert_eq!(Poly::<Rational>::zero().degree(), None);
    }

    #[test]
    fn evaluation() {
        assert_eq!(q(&[-1, 0, 1]).eval(&ratio(2, 1)), ratio(3, 1));
        assert_eq!(Poly::<Rational>::zero().eval(&ratio(17, 3)), ratio(0, 1));
        assert_eq!(q(&[0, -4, 0, 4]).eval(&ratio(1, 2)), ratio(-3, 2));
    }

    #[test]
    fn bind_lambda_examples() {
        let a = Poly::new(vec![lam(&[0, -1]), Poly::zero(), Poly::zero(), Poly::zero(), lam(&[1])]);
        assert_eq!(a.bind_lambda(&ratio(2, 1)), q(&[-2, 0, 0, 0, 1]));
        // (1 - λ)(λ - 3) at λ = 1
        let c = Poly::constant(lam(&[1, -1]) * lam(&[-3, 1]));
        assert!(c.bind_lambda(&ratio(1, 1)).is_zero());
        let d = Poly::new(vec![Poly::zero(), lam(&[6, -2]), Poly::zero(), lam(&[8])]);
        assert_eq!(d.bind_lambda(&ratio(3, 1)), q(&[0, 0, 0, 8]));
    }

    #[test]
    fn division_and_gcd() {
        let a = q(&[-1, 0, 1]); // (x-1)(x+1)
        let b = q(&[-1, 1]);
        let (quot, rem) = a.div_rem(&b).unwrap();
        assert_eq!(quot, q(&[1, 1]));
        assert!(rem.is_zero());
        let g = (q(&[-2, 1]) * q(&[-3, 1])).gcd(&(q(&[-2, 1]) * q(&[5, 1])));
        assert_eq!(g, q(&[-2, 1]));
        assert!(a.div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn taylor_shift_is_binomial_expansion() {
        assert_eq!(q(&[0, 0, 1]).taylor_shift(&ratio(1, 1)), q(&[1, 2, 1]));
    }

    #[test]
    fn rendering() {
        assert_eq!(q(&[-1, 0, 1]).to_string(), "x^2 - 1");
        assert_eq!(q(&[0, -1]).to_string(), "-x");
        assert_eq!(Poly::<Rational>::zero().to_string(), "0");
    }
}
