//! Truncated Taylor expansions with a validity counter.
//!
//! A [`Jet`] holds `c_0 ..= c_N` about a center `x0`. Only the leading `valid`
//! coefficients are trustworthy: every differentiation consumes one, and any
//! binary operation keeps the smaller count. Differentiating a jet with no
//! trustworthy coefficients left is an error rather than a silent zero.


use super::poly::Poly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    center: S,
    coeffs: Vec<S>,
    valid: usize,
}

impl<S: Scalar> Jet<S> {
    /// Builds a jet from raw coefficients; `valid` is clamped to the stored length.
    pub fn from_coeffs(center: S, mut coeffs: Vec<S>, valid: usize) -> Self {
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        let valid = valid.min(coeffs.len());
        Jet { center, coeffs, valid }
    }

    pub fn constant(value: S, center: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = value;
        Jet { center, coeffs, valid: order + 1 }
    }

    /// Exact Taylor re-expansion of `a` about `center`, truncated at `order`.
    pub fn from_poly(a: &Poly<S>, center: &S, order: usize) -> Self {
        let shifted = a.taylor_shift(center);
        let coeffs = (0..=order).map(|k| shifted.coeff(k)).collect();
        Jet { center: center.clone(), coeffs, valid: order + 1 }
    }

    /// Series of `e^{s(x)}` from the linear recurrence `J' = s' J`, `J(x0) = e^{s(x0)}`.
    pub fn exp_of_poly(s: &Poly<S>, center: &S, order: usize) -> Result<Self> {
        let slope = Self::from_poly(&s.derivative(), center, order);
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(s.eval(center).exp()?);
        for k in 0..order {
            let mut acc = S::zero();
            for j in 0..=k {
                let sj = &slope.coeffs[j];
                if !sj.is_zero() {
                    acc = acc + &(sj.clone() * &coeffs[k - j]);
                }
            }
            coeffs.push(acc / S::from_i64(k as i64 + 1));
        }
        Ok(Jet { center: center.clone(), coeffs, valid: order + 1 })
    }

    pub fn center(&self) -> &S {
        &self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn valid(&self) -> usize {
        self.valid
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// `true` if every trustworthy coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs[..self.valid].iter().all(|c| c.is_zero())
    }

    /// Value at the center.
    pub fn value(&self) -> Result<S> {
        if self.valid == 0 {
            return Err(Error::JetExhausted { depth: None });
        }
        Ok(self.coeffs[0].clone())
    }

    /// `k`-th derivative at the center, `k! c_k`.
    pub fn derivative_value(&self, k: usize) -> Result<S> {
        if k >= self.valid {
            return Err(Error::JetExhausted { depth: None });
        }
        let factorial = (1..=k as i64).fold(S::one(), |acc, j| acc * S::from_i64(j));
        Ok(self.coeffs[k].clone() * factorial)
    }

    pub fn derivative(&self) -> Result<Self> {
        if self.valid == 0 {
            return Err(Error::JetExhausted { depth: None });
        }
        let coeffs: Vec<S> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * S::from_i64(k as i64))
            .collect();
        Ok(Self::from_coeffs(self.center.clone(), coeffs, self.valid - 1))
    }

    /// Antiderivative vanishing at the center; gains one trustworthy coefficient.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(S::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / S::from_i64(k as i64 + 1));
        }
        Jet { center: self.center.clone(), coeffs, valid: self.valid + 1 }
    }

    pub fn scale(&self, c: &S) -> Self {
        Jet {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|a| a.clone() * c).collect(),
            valid: self.valid,
        }
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        if self.center == other.center {
            Ok(())
        } else {
            Err(Error::CenterMismatch)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.check_center(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..len).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect();
        Ok(Jet { center: self.center.clone(), coeffs, valid: self.valid.min(other.valid) })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b)
    }

    /// Truncated Cauchy product; zero coefficients of the sparser factor are skipped.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let nonzero = |j: &Self| j.coeffs[..len].iter().filter(|c| !c.is_zero()).count();
        let (sparse, dense) = if nonzero(self) <= nonzero(other) { (self, other) } else { (other, self) };
        let mut out = vec![S::zero(); len];
        for (i, a) in sparse.coeffs[..len].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in dense.coeffs[..len - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = std::mem::replace(&mut out[i + j], S::zero()) + &(a.clone() * b);
                }
            }
        }
        Ok(Jet { center: self.center.clone(), coeffs: out, valid: self.valid.min(other.valid) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{ratio, Rational};
    use num_traits::{One, Zero};

    fn q(v: &[i64]) -> Poly<Rational> {
        Poly::from_i64s(v)
    }

    #[test]
    fn constant_derivative_is_zero_with_one_less_valid() {
        let c = Jet::constant(ratio(3, 1), Rational::zero(), 4);
        let d = c.derivative().unwrap();
        assert!(d.is_zero());
        assert_eq!(d.valid(), 4);
    }

    #[test]
    fn derivative_of_exp_x_squared() {
        let j = Jet::from_coeffs(
            Rational::zero(),
            vec![ratio(1, 1), ratio(0, 1), ratio(1, 1), ratio(0, 1), ratio(1, 2)],
            5,
        );
        let d = j.derivative().unwrap();
        assert_eq!(d.coeffs(), &[ratio(0, 1), ratio(2, 1), ratio(0, 1), ratio(2, 1)]);
        assert_eq!(d.valid(), 4);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let mut j = Jet::constant(ratio(1, 1), Rational::zero(), 1);
        j = j.derivative().unwrap();
        j = j.derivative().unwrap();
        assert_eq!(j.valid(), 0);
        assert_eq!(j.derivative(), Err(Error::JetExhausted { depth: None }));
        assert!(j.value().is_err());
    }

    #[test]
    fn from_poly_shifts_center() {
        let j = Jet::from_poly(&q(&[0, 0, 1]), &ratio(1, 1), 3);
        assert_eq!(j.coeffs(), &[ratio(1, 1), ratio(2, 1), ratio(1, 1), ratio(0, 1)]);
        assert_eq!(j.valid(), 4);
    }

    #[test]
    fn exp_series() {
        let j = Jet::exp_of_poly(&Poly::zero(), &Rational::zero(), 4).unwrap();
        assert_eq!(j.coeffs(), &[Rational::one(), Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()]);
        let j = Jet::exp_of_poly(&q(&[0, 0, 1]), &Rational::zero(), 4).unwrap();
        assert_eq!(j.coeffs(), &[ratio(1, 1), ratio(0, 1), ratio(1, 1), ratio(0, 1), ratio(1, 2)]);
        assert!(Jet::exp_of_poly(&q(&[0, 0, 1]), &ratio(1, 1), 4).is_err());
    }

    #[test]
    fn arithmetic_takes_minimum_validity() {
        let a = Jet::constant(ratio(2, 1), Rational::zero(), 5);
        let b = a.derivative().unwrap();
        assert_eq!(a.try_mul(&b).unwrap().valid(), 5);
        assert_eq!(a.try_add(&b).unwrap().order(), 4);
        let elsewhere = Jet::constant(ratio(2, 1), ratio(1, 1), 5);
        assert_eq!(a.try_add(&elsewhere), Err(Error::CenterMismatch));
    }

    #[test]
    fn product_matches_polynomial_product() {
        let a = q(&[1, 2, 3]);
        let b = q(&[-1, 0, 5, 7]);
        let x0 = ratio(2, 3);
        let prod = Jet::from_poly(&a, &x0, 6).try_mul(&Jet::from_poly(&b, &x0, 6)).unwrap();
        assert_eq!(prod, Jet::from_poly(&(&a * &b), &x0, 6));
    }
}
