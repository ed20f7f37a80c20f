//! Exact rational roots of rational polynomials.
//!
//! The squarefree part is scaled to a monic integer polynomial `h(y)` whose
//! rational roots are integers. Sturm sequences isolate the real roots of `h`
//! on integer intervals, and each candidate integer is tested exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::scalar::Rational;

/// Rational roots with multiplicities, plus the cofactor without rational roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalRoots {
    /// Sorted ascending.
    pub roots: Vec<(Rational, usize)>,
    /// Monic factor left after dividing out every rational root.
    pub residual: Poly<Rational>,
}

impl RationalRoots {
    /// `true` when the polynomial splits into rational linear factors.
    pub fn fully_rational(&self) -> bool {
        self.residual.degree() == Some(0)
    }
}

/// `f / gcd(f, f')`, monic.
pub fn square_free(f: &Poly<Rational>) -> Poly<Rational> {
    if f.degree().unwrap_or(0) == 0 {
        return f.monic();
    }
    let g = f.gcd(&f.derivative());
    f.div_rem(&g).expect("gcd is nonzero").0.monic()
}

/// Multiplies through by the common denominator and divides by the content.
pub fn primitive_integer_coeffs(f: &Poly<Rational>) -> Vec<BigInt> {
    let lcm = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &content).collect()
}

fn sturm_sequence(f: &Poly<Rational>) -> Vec<Poly<Rational>> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]).expect("nonzero");
        if r.is_zero() {
            break;
        }
        seq.push(-r);
    }
    seq
}

fn sign_variations(seq: &[Poly<Rational>], x: &Rational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| p.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Integer roots of a squarefree monic integer polynomial.
fn integer_roots(h: &Poly<Rational>) -> Vec<BigInt> {
    let seq = sturm_sequence(h);
    let bound = h
        .coeffs()
        .iter()
        .map(|c| c.abs().to_integer())
        .max()
        .unwrap_or_default()
        + BigInt::one();
    let mut found = Vec::new();
    let mut stack = vec![(-&bound - BigInt::one(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let (vlo, vhi) = (
            sign_variations(&seq, &Rational::from_integer(lo.clone())),
            sign_variations(&seq, &Rational::from_integer(hi.clone())),
        );
        if vlo <= vhi {
            continue;
        }
        if &hi - &lo == BigInt::one() {
            if h.eval(&Rational::from_integer(hi.clone())).is_zero() {
                found.push(hi);
            }
            continue;
        }
        let mid = (&lo + &hi).div_floor(&BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    found.sort();
    found
}

/// All rational roots of a nonzero polynomial, with multiplicity.
pub fn rational_roots(f: &Poly<Rational>) -> RationalRoots {
    assert!(!f.is_zero(), "rational_roots of the zero polynomial");
    let distinct = square_free(f);
    let mut candidates = Vec::new();
    if let Some(d) = distinct.degree().filter(|&d| d > 0) {
        let a = primitive_integer_coeffs(&distinct);
        let lead = a[d].clone();
        // h(y) = lead^(d-1) f(y / lead) is monic with integer coefficients
        let h = Poly::new(
            (0..=d)
                .map(|i| {
                    let scale = num_traits::pow(lead.clone(), d - i);
                    Rational::new(&a[i] * scale, lead.clone())
                })
                .collect(),
        );
        candidates = integer_roots(&h)
            .into_iter()
            .map(|y| Rational::new(y, lead.clone()))
            .collect();
    }
    let mut rest = f.clone();
    let mut roots = Vec::new();
    for r in candidates {
        let linear = Poly::new(vec![-r.clone(), Rational::one()]);
        let mut mult = 0;
        loop {
            let (quot, rem) = rest.div_rem(&linear).expect("nonzero");
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            mult += 1;
        }
        debug_assert!(mult > 0);
        roots.push((r, mult));
    }
    RationalRoots { roots, residual: rest.monic() }
}
