//! `y'' = p y' + q y` with constant `p`, `q`.
//!
//! The AIM iterates satisfy `p_n = p p_{n-1} + q p_{n-2}` with `p_{-1} = 1`,
//! `p_0 = p`, hence
//!
//! ```text
//! p_n = C1 ρ1^n + C2 ρ2^n = (ρ2^{n+2} - ρ1^{n+2}) / Δ,   q_n = q p_{n-1}
//! ρ1 = (p - Δ)/2,  ρ2 = (p + Δ)/2,  Δ = √(p² + 4q),  C1 = -ρ1²/Δ,  C2 = ρ2²/Δ
//! ```
//!
//! A negative discriminant makes `Δ`, `ρ`, `C` complex; they are carried as
//! real pairs and `p_n` comes out real.

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// `re + i·im`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Pair<S> {
    fn real(re: S) -> Self {
        let im = re.like_rational(&Zero::zero());
        Pair { re, im }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|²`.
    pub fn norm_sqr(&self) -> S {
        self.re.clone() * &self.re + self.im.clone() * &self.im
    }

    fn div(&self, other: &Self) -> Option<Self> {
        let d = other.norm_sqr();
        if d.is_zero() {
            return None;
        }
        let re = (self.re.clone() * &other.re + self.im.clone() * &other.im) / &d;
        let im = (self.im.clone() * &other.re - self.re.clone() * &other.im) / d;
        Some(Pair { re, im })
    }

    fn halve(&self) -> Self {
        let two = self.re.like_rational(&crate::algebra::ratio(2, 1));
        Pair { re: self.re.clone() / &two, im: self.im.clone() / two }
    }

    fn pow(&self, mut n: usize) -> Self {
        let mut acc = Pair::real(self.re.like_rational(&One::one()));
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }
}

impl<S: Scalar> Add for &Pair<S> {
    type Output = Pair<S>;
    fn add(self, o: &Pair<S>) -> Pair<S> {
        Pair { re: self.re.clone() + &o.re, im: self.im.clone() + &o.im }
    }
}

impl<S: Scalar> Sub for &Pair<S> {
    type Output = Pair<S>;
    fn sub(self, o: &Pair<S>) -> Pair<S> {
        Pair { re: self.re.clone() - &o.re, im: self.im.clone() - &o.im }
    }
}

impl<S: Scalar> Mul for &Pair<S> {
    type Output = Pair<S>;
    fn mul(self, o: &Pair<S>) -> Pair<S> {
        Pair {
            re: self.re.clone() * &o.re - self.im.clone() * &o.im,
            im: self.re.clone() * &o.im + self.im.clone() * &o.re,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormConstants<S> {
    pub p: S,
    pub q: S,
    pub delta: Pair<S>,
    pub rho1: Pair<S>,
    pub rho2: Pair<S>,
    pub c1: Pair<S>,
    pub c2: Pair<S>,
    /// `|ρ1| = |ρ2|`: the ratio `q_n/p_n` has no limit.
    pub equal_modulus: bool,
}

impl<S: Scalar> ClosedFormConstants<S> {
    pub fn new(p: S, q: S) -> Result<Self> {
        let four = p.like_rational(&crate::algebra::ratio(4, 1));
        let disc = p.clone() * &p + four * &q;
        if disc.is_zero() {
            return Err(Error::DegenerateRoots);
        }
        let root = |v: &S| {
            v.sqrt().ok_or_else(|| Error::NotRepresentable(format!("sqrt({v}) is not in the coefficient field")))
        };
        let delta = if disc > S::zero() {
            Pair::real(root(&disc)?)
        } else {
            Pair { re: disc.like_rational(&Zero::zero()), im: root(&-disc)? }
        };
        let pp = Pair::real(p.clone());
        let rho1 = (&pp - &delta).halve();
        let rho2 = (&pp + &delta).halve();
        let zero = Pair::real(p.like_rational(&Zero::zero()));
        let c1 = (&zero - &(&rho1 * &rho1)).div(&delta).expect("nonzero discriminant");
        let c2 = (&rho2 * &rho2).div(&delta).expect("nonzero discriminant");
        let equal_modulus = rho1.norm_sqr() == rho2.norm_sqr();
        Ok(ClosedFormConstants { p, q, delta, rho1, rho2, c1, c2, equal_modulus })
    }

    /// `p_n` for `n ≥ -1`, passed as `n + 1`.
    fn p_shifted(&self, n_plus_one: usize) -> S {
        let top = &self.rho2.pow(n_plus_one + 1) - &self.rho1.pow(n_plus_one + 1);
        let v = top.div(&self.delta).expect("nonzero discriminant");
        v.re
    }

    pub fn p_n(&self, n: usize) -> S {
        self.p_shifted(n + 1)
    }

    pub fn q_n(&self, n: usize) -> S {
        self.q.clone() * self.p_shifted(n)
    }
}

/// `(p_n, q_n)` for constant `p`, `q`.
pub fn constant_coeff_closed_form<S: Scalar>(p: &S, q: &S, n: usize) -> Result<(S, S)> {
    let c = ClosedFormConstants::new(p.clone(), q.clone())?;
    Ok((c.p_n(n), c.q_n(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, BigFloat, Rational};

    #[test]
    fn three_minus_two() {
        let c = ClosedFormConstants::new(ratio(3, 1), ratio(-2, 1)).unwrap();
        assert_eq!(c.rho1, Pair::real(ratio(1, 1)));
        assert_eq!(c.rho2, Pair::real(ratio(2, 1)));
        assert_eq!(c.c1, Pair::real(ratio(-1, 1)));
        assert_eq!(c.c2, Pair::real(ratio(4, 1)));
        assert_eq!((c.p_n(0), c.q_n(0)), (ratio(3, 1), ratio(-2, 1)));
        assert_eq!((c.p_n(1), c.q_n(1)), (ratio(7, 1), ratio(-6, 1)));
        assert!(!c.equal_modulus);
    }

    #[test]
    fn zero_q() {
        let c = ClosedFormConstants::new(ratio(5, 1), Rational::zero()).unwrap();
        assert_eq!(c.rho1, Pair::real(Rational::zero()));
        assert!((0..6).all(|n| c.q_n(n).is_zero()));
    }

    #[test]
    fn equal_modulus_flagged() {
        let c = ClosedFormConstants::new(Rational::zero(), ratio(1, 1)).unwrap();
        assert_eq!(c.rho1, Pair::real(ratio(-1, 1)));
        assert!(c.equal_modulus);
    }

    #[test]
    fn degenerate_and_irrational() {
        assert_eq!(ClosedFormConstants::new(ratio(2, 1), ratio(-1, 1)).unwrap_err(), Error::DegenerateRoots);
        assert!(matches!(ClosedFormConstants::new(ratio(1, 1), ratio(1, 1)), Err(Error::NotRepresentable(_))));
    }

    #[test]
    fn complex_roots_give_real_iterates() {
        // p = 1, q = -1: p_n = p_{n-1} - p_{n-2}, period 6: 1, 1, 0, -1, -1, 0, 1, ...
        let c = ClosedFormConstants::new(BigFloat::from_i64(1).with_precision(128), BigFloat::from_i64(-1).with_precision(128)).unwrap();
        assert!(c.equal_modulus || (c.rho1.norm_sqr() - c.rho2.norm_sqr()).abs().top_bit() < -100);
        let expected = [1.0, 0.0, -1.0, -1.0, 0.0, 1.0, 1.0];
        for (n, e) in expected.iter().enumerate() {
            assert!((c.p_n(n).to_f64() - e).abs() < 1e-30, "n={n}");
        }
    }
}
