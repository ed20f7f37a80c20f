#![allow(dead_code)]

use aim_core::aim::OdeProblem;
use aim_core::algebra::{ratio, BigFloat, Jet, Poly, PolyXL, Rational};

pub fn poly(c: &[i64]) -> Poly<Rational> {
    Poly::from_i64s(c)
}

/// Polynomial in λ with integer coefficients, lowest first.
pub fn in_lambda(c: &[i64]) -> Poly<Rational> {
    Poly::from_i64s(c)
}

/// `y'' = 2x y' - 2m y` with `m` as the spectral parameter.
pub fn hermite_symbolic() -> OdeProblem<PolyXL> {
    OdeProblem::new(poly(&[0, 2]).lift(), PolyXL::constant(in_lambda(&[0, -2]))).unwrap()
}

pub fn hermite(m: Rational) -> OdeProblem<Poly<Rational>> {
    OdeProblem::new(poly(&[0, 2]), Poly::constant(-m * ratio(2, 1))).unwrap()
}

pub fn constants(p: i64, q: i64) -> OdeProblem<Poly<Rational>> {
    OdeProblem::new(poly(&[p]), poly(&[q])).unwrap()
}

pub fn harmonic() -> Poly<Rational> {
    poly(&[0, 0, 1])
}

pub fn quartic() -> Poly<Rational> {
    poly(&[0, 0, 0, 0, 1])
}

/// Jets of an exact problem at `x0` with `bits` of precision.
pub fn jets(problem: &OdeProblem<Poly<Rational>>, x0: &Rational, order: usize, bits: u32) -> OdeProblem<Jet<BigFloat>> {
    let c = BigFloat::from_rational(x0, bits);
    let lift = |p: &Poly<Rational>| Jet::from_poly(&Poly::from_rational_poly(p, bits), &c, order);
    OdeProblem::new(lift(&problem.p), lift(&problem.q)).unwrap()
}

/// `-2^{n+1} ∏_{k=0}^{n} (λ - k)`.
pub fn hermite_delta(n: usize) -> Poly<Rational> {
    let mut d = in_lambda(&[-(1i64 << (n + 1))]);
    for k in 0..=n as i64 {
        d = &d * &in_lambda(&[-k, 1]);
    }
    d
}
