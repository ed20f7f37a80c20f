//! Exact detection of polynomial solutions and the spectral values that allow them.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_traits::{One, Zero};

use super::{delta, run_full, Iterate, OdeProblem};
use crate::algebra::roots::rational_roots;
use crate::algebra::{Poly, PolyXL, Rational, Render};
use crate::error::{Error, Result};

/// A rational `λ` at which every `x`-coefficient of `δ_n` vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRoot {
    pub value: Rational,
    pub multiplicity: usize,
    /// `p_{n-1} ≠ 0` after binding `λ`.
    pub p_prev_nonzero: bool,
    /// `δ_n` recomputed from scratch with `λ` bound is identically zero.
    pub verified: bool,
}

/// Outcome of the terminating condition at one depth.
#[derive(Debug, Clone)]
pub struct TerminationReport {
    pub n: usize,
    pub delta: PolyXL,
    /// `δ_n ≡ 0` for every `λ`.
    pub is_identically_zero: bool,
    /// `p_{n-1} ≢ 0` as a polynomial in `x` and `λ`.
    pub p_prev_nonzero: bool,
    pub lambda_roots: Vec<LambdaRoot>,
    /// Monic gcd (in `λ`) of the `x`-coefficients of `δ_n`; zero when `δ_n ≡ 0`.
    pub common_factor: Poly<Rational>,
    /// Part of the common factor without rational roots, if any remains.
    pub irrational_factor: Option<Poly<Rational>>,
}

impl TerminationReport {
    /// `δ_n` as `c · ∏ (λ - r)^k` when it is independent of `x` and splits over
    /// the rationals.
    pub fn factored(&self) -> Option<String> {
        if self.is_identically_zero {
            return Some("0".to_string());
        }
        if self.delta.degree() != Some(0) || self.irrational_factor.is_some() {
            return None;
        }
        let in_lambda = &self.delta.coeffs()[0];
        let lead = in_lambda.leading()?.clone();
        let mut out = lead.to_string();
        for root in &self.lambda_roots {
            let factor = if root.value.is_zero() {
                "λ".to_string()
            } else {
                format!("({})", Poly::new(vec![-root.value.clone(), Rational::one()]).render(&["λ"]))
            };
            out.push('*');
            out.push_str(&factor);
            if root.multiplicity > 1 {
                let _ = write!(out, "^{}", root.multiplicity);
            }
        }
        Some(out)
    }

    /// Roots that pass both the `p_{n-1} ≠ 0` condition and re-verification.
    pub fn accepted_roots(&self) -> impl Iterator<Item = &LambdaRoot> {
        self.lambda_roots.iter().filter(|r| r.p_prev_nonzero && r.verified)
    }
}

/// Monic gcd of the `x`-coefficients of `d`, a polynomial in `λ` whose roots
/// are exactly the `λ` at which `d` vanishes identically in `x`.
pub fn common_lambda_factor(d: &PolyXL) -> Poly<Rational> {
    d.coeffs().iter().fold(Poly::zero(), |acc, c| acc.gcd(c))
}

fn bind_problem(problem: &OdeProblem<PolyXL>, value: &Rational) -> OdeProblem<Poly<Rational>> {
    OdeProblem { p: problem.p.bind_lambda(value), q: problem.q.bind_lambda(value) }
}

/// For each `n` in `n_range`, factors `δ_n` over the rationals in `λ`.
///
/// A rational `λ` is reported when every `x`-coefficient of `δ_n` vanishes
/// there, i.e. it is a root of their gcd. Each root is re-verified by binding
/// it and recomputing `δ_n` from scratch.
pub fn terminating_scan(problem: &OdeProblem<PolyXL>, n_range: RangeInclusive<usize>) -> Result<Vec<TerminationReport>> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo == 0 {
        return Err(Error::InvalidArgument("delta_n is defined from n = 1".into()));
    }
    let seq = run_full(problem, hi)?;
    let mut reports = Vec::new();
    for n in lo..=hi {
        let d = seq.delta(n).clone();
        let p_prev = &seq.iterate(n - 1).p;
        let common = common_lambda_factor(&d);
        let is_identically_zero = d.is_zero();
        let mut lambda_roots = Vec::new();
        let mut irrational_factor = None;
        if !is_identically_zero {
            let split = rational_roots(&common);
            for (value, multiplicity) in split.roots {
                let bound = bind_problem(problem, &value);
                let check = run_full(&bound, n)?;
                let verified = check.delta(n).is_zero();
                let p_prev_nonzero = !p_prev.bind_lambda(&value).is_zero();
                lambda_roots.push(LambdaRoot { value, multiplicity, p_prev_nonzero, verified });
            }
            if !split.residual.is_constant() {
                irrational_factor = Some(split.residual);
            }
        }
        reports.push(TerminationReport {
            n,
            delta: d,
            is_identically_zero,
            p_prev_nonzero: !p_prev.is_zero(),
            lambda_roots,
            common_factor: common,
            irrational_factor,
        });
    }
    Ok(reports)
}

/// Basis of the polynomial solutions of degree at most `max_degree`, each
/// normalized to a monic leading coefficient.
pub fn polynomial_solutions(problem: &OdeProblem<Poly<Rational>>, max_degree: usize) -> Vec<Poly<Rational>> {
    let unknowns = max_degree + 1;
    // column j holds the residual of y = x^j
    let columns: Vec<Poly<Rational>> = (0..unknowns)
        .map(|j| {
            let y: Poly<Rational> = Poly::monomial(Rational::one(), j);
            let y1 = y.derivative();
            y1.derivative() - &problem.p * &y1 - &problem.q * &y
        })
        .collect();
    let rows = columns.iter().filter_map(|c| c.degree()).max().map_or(0, |d| d + 1);
    let mut m: Vec<Vec<Rational>> = (0..rows).map(|r| columns.iter().map(|c| c.coeff(r)).collect()).collect();

    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..unknowns {
        let Some(pr) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, pr);
        let inv = Rational::one() / &m[row][col];
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..unknowns {
                    let t = &f * &m[row][c];
                    m[r][c] = &m[r][c] - t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    (0..unknowns)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut y = vec![Rational::zero(); unknowns];
            y[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                y[pc] = -m[r][free].clone();
            }
            Poly::new(y).monic()
        })
        .collect()
}

/// Recomputes `δ_n` for a `λ`-free problem without early termination.
pub fn delta_exact(problem: &OdeProblem<Poly<Rational>>, n: usize) -> Result<Poly<Rational>> {
    let seq = run_full(problem, n)?;
    let prev: &Iterate<_> = seq.iterate(n - 1);
    delta(seq.iterate(n), prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    fn hermite() -> OdeProblem<PolyXL> {
        OdeProblem::new(Poly::from_i64s(&[0, 2]).lift(), PolyXL::lambda().scale(&Poly::constant(ratio(-2, 1)))).unwrap()
    }

    #[test]
    fn hermite_depth_three() {
        let reports = terminating_scan(&hermite(), 3..=3).unwrap();
        let r = &reports[0];
        let roots: Vec<_> = r.lambda_roots.iter().map(|l| l.value.clone()).collect();
        assert_eq!(roots, vec![ratio(0, 1), ratio(1, 1), ratio(2, 1), ratio(3, 1)]);
        assert!(r.lambda_roots.iter().all(|l| l.verified && l.p_prev_nonzero && l.multiplicity == 1));
        assert_eq!(r.factored().unwrap(), "-16*λ*(λ - 1)*(λ - 2)*(λ - 3)");
        assert!(r.irrational_factor.is_none());
    }

    #[test]
    fn harmonic_gauge_energies() {
        let problem = OdeProblem::new(Poly::from_i64s(&[0, 2]).lift(), Poly::constant(Poly::from_i64s(&[1, -1]))).unwrap();
        let reports = terminating_scan(&problem, 2..=2).unwrap();
        let roots: Vec<_> = reports[0].lambda_roots.iter().map(|l| l.value.clone()).collect();
        assert_eq!(roots, vec![ratio(1, 1), ratio(3, 1), ratio(5, 1)]);
    }

    #[test]
    fn zero_q_is_identically_terminated() {
        let problem = OdeProblem::new(Poly::from_i64s(&[0, 2]).lift(), Poly::zero()).unwrap();
        let reports = terminating_scan(&problem, 1..=3).unwrap();
        assert!(reports.iter().all(|r| r.is_identically_zero && r.p_prev_nonzero));
        let bound = OdeProblem::new(Poly::from_i64s(&[0, 2]), Poly::zero()).unwrap();
        assert_eq!(polynomial_solutions(&bound, 1), vec![Poly::one()]);
    }

    #[test]
    fn irrational_factor_is_reported() {
        // p = 1, q = λ² - 2: p1 = 1 + q, q1 = q, so δ_1 = -q²
        let q = Poly::constant(Poly::from_i64s(&[-2, 0, 1]));
        let problem = OdeProblem::new(Poly::from_i64s(&[1]).lift(), q).unwrap();
        let reports = terminating_scan(&problem, 1..=1).unwrap();
        let r = &reports[0];
        assert!(r.lambda_roots.is_empty());
        let factor = Poly::from_i64s(&[-2, 0, 1]);
        assert_eq!(r.irrational_factor, Some(&factor * &factor));
        assert!(r.factored().is_none());
    }

    #[test]
    fn hermite_polynomial_solution_by_nullspace() {
        let problem = OdeProblem::new(Poly::from_i64s(&[0, 2]), Poly::from_i64s(&[-4])).unwrap();
        // H2 = 4x^2 - 2, monic: x^2 - 1/2
        assert_eq!(polynomial_solutions(&problem, 3), vec![Poly::new(vec![ratio(-1, 2), ratio(0, 1), ratio(1, 1)])]);
        assert!(delta_exact(&problem, 2).unwrap().is_zero());
    }
}
