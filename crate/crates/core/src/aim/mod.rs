//! The asymptotic iteration method.
//!
//! For `y'' = p y' + q y`, differentiating `n` times gives
//! `y^(n+2) = p_n y' + q_n y` with
//!
//! ```text
//! p_n = p_{n-1}' + p p_{n-1} + q_{n-1}
//! q_n = q_{n-1}' + q p_{n-1}
//! p_0 = p, q_0 = q
//! ```
//!
//! The terminating quantity `δ_n = q_n p_{n-1} - q_{n-1} p_n` vanishes
//! identically exactly when a polynomial solution of degree at most `n` exists
//! (given `p_{n-1} ≠ 0`). For non-polynomial problems the ratio `q_n / p_n`
//! converges to a root `α` of the Riccati equation `α' - α² - p α + q = 0`, and
//! `y = exp(-∫α)` is a solution.
//!
//! Nothing here needs `q_{-1}`; the `p_{-1} = 1` convention only enters the
//! constant-coefficient closed form in [`crate::oracle`].

mod reconstruct;
mod terminate;

pub use reconstruct::{reconstruct_solutions, SolutionPair};
pub use terminate::{common_lambda_factor, delta_exact, polynomial_solutions, terminating_scan, LambdaRoot, TerminationReport};

use crate::algebra::{Jet, PointValue, Representation, Scalar};
use crate::error::{Error, Result};

/// `y'' = p(x) y' + q(x) y`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeProblem<R> {
    pub p: R,
    pub q: R,
}

impl<R: Representation> OdeProblem<R> {
    /// Checks that `p` and `q` can be combined (same jet center, for jets).
    pub fn new(p: R, q: R) -> Result<Self> {
        p.try_add(&q)?;
        Ok(OdeProblem { p, q })
    }
}

/// One `(p_n, q_n)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate<R> {
    pub p: R,
    pub q: R,
}

/// Iterates `(p_k, q_k)` for `k = 0..=n` and `δ_k` for `k = 1..=n`.
#[derive(Debug, Clone)]
pub struct AimSequence<R> {
    pub problem: OdeProblem<R>,
    iterates: Vec<Iterate<R>>,
    deltas: Vec<R>,
    terminated_at: Option<usize>,
}

impl<R: Representation> AimSequence<R> {
    /// Deepest `n` computed.
    pub fn depth(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn iterates(&self) -> &[Iterate<R>] {
        &self.iterates
    }

    pub fn iterate(&self, n: usize) -> &Iterate<R> {
        &self.iterates[n]
    }

    /// `δ_n` for `n >= 1`.
    pub fn delta(&self, n: usize) -> &R {
        assert!(n >= 1, "delta is defined from n = 1");
        &self.deltas[n - 1]
    }

    /// Depth at which `δ_n` vanished identically (exact representations only).
    pub fn terminated_at(&self) -> Option<usize> {
        self.terminated_at
    }

    /// Recomputes every `δ_k` from the stored iterates and compares.
    pub fn deltas_consistent(&self) -> Result<bool> {
        for n in 1..=self.depth() {
            let d = delta(&self.iterates[n], &self.iterates[n - 1])?;
            if d.try_sub(&self.deltas[n - 1])?.vanishes() {
                continue;
            }
            return Ok(false);
        }
        Ok(true)
    }
}

/// One step of the recurrence.
pub fn aim_step<R: Representation>(prev: &Iterate<R>, base: &OdeProblem<R>) -> Result<Iterate<R>> {
    let p = prev
        .p
        .differentiate()?
        .try_add(&base.p.try_mul(&prev.p)?)?
        .try_add(&prev.q)?;
    let q = prev.q.differentiate()?.try_add(&base.q.try_mul(&prev.p)?)?;
    Ok(Iterate { p, q })
}

/// `δ_n = q_n p_{n-1} - q_{n-1} p_n`.
pub fn delta<R: Representation>(current: &Iterate<R>, previous: &Iterate<R>) -> Result<R> {
    current.q.try_mul(&previous.p)?.try_sub(&previous.q.try_mul(&current.p)?)
}

fn tag_depth(err: Error, depth: usize) -> Error {
    match err {
        Error::JetExhausted { depth: None } => Error::JetExhausted { depth: Some(depth) },
        other => other,
    }
}

fn iterate_impl<R: Representation>(problem: &OdeProblem<R>, n_max: usize, early_stop: bool) -> Result<AimSequence<R>> {
    let mut iterates = vec![Iterate { p: problem.p.clone(), q: problem.q.clone() }];
    let mut deltas = Vec::with_capacity(n_max);
    let mut terminated_at = None;
    for n in 1..=n_max {
        let next = aim_step(&iterates[n - 1], problem).map_err(|e| tag_depth(e, n))?;
        let d = delta(&next, &iterates[n - 1]).map_err(|e| tag_depth(e, n))?;
        let stop = early_stop && R::EXACT && d.vanishes();
        iterates.push(next);
        deltas.push(d);
        if stop {
            terminated_at = Some(n);
            break;
        }
    }
    Ok(AimSequence { problem: problem.clone(), iterates, deltas, terminated_at })
}

/// Runs the recurrence to `n_max`, stopping early when an exact `δ_n` vanishes
/// identically. Numeric representations always run to `n_max`.
pub fn run<R: Representation>(problem: &OdeProblem<R>, n_max: usize) -> Result<AimSequence<R>> {
    iterate_impl(problem, n_max, true)
}

/// Like [`run`] but never stops early.
pub fn run_full<R: Representation>(problem: &OdeProblem<R>, n_max: usize) -> Result<AimSequence<R>> {
    iterate_impl(problem, n_max, false)
}

/// `q_n(x0) / p_n(x0)`.
pub fn alpha_at<S: Scalar, R: Representation + PointValue<S>>(seq: &AimSequence<R>, n: usize, x0: &S) -> Result<S> {
    let it = seq.iterate(n);
    let p = it.p.value_at(x0)?;
    if p.is_zero() {
        return Err(Error::PoleAtExpansionPoint { n });
    }
    Ok(it.q.value_at(x0)? / p)
}

/// Numerator and denominator of `α' - α² - p α + q` for `α = num / den`.
///
/// With `α = q_{n-1} / p_{n-1}` the numerator is exactly `δ_n` and the
/// denominator `p_{n-1}²`.
pub fn riccati_residual<R: Representation>(num: &R, den: &R, problem: &OdeProblem<R>) -> Result<(R, R)> {
    // (N'D - ND') - N² - pND + qD²  =  D(N' + qD) - N(D' + pD + N)
    let left = den.try_mul(&num.differentiate()?.try_add(&problem.q.try_mul(den)?)?)?;
    let right = num.try_mul(&den.differentiate()?.try_add(&problem.p.try_mul(den)?)?.try_add(num)?)?;
    Ok((left.try_sub(&right)?, den.try_mul(den)?))
}

/// Convergence of `q_n / p_n` at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvergenceStatus {
    /// Successive ratios settled below the tolerance.
    Converged,
    /// `δ_n` vanished identically; the ratio is exact.
    Terminated,
    /// Ratios hit poles or kept moving (e.g. `|ρ₁| = |ρ₂|` for constants).
    NonConvergent { poles: usize },
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport<S> {
    pub status: ConvergenceStatus,
    /// Last finite ratio.
    pub alpha: Option<S>,
    /// `|α_n - α_{n-1}|` over the final pair, when both are finite.
    pub last_change: Option<f64>,
    /// `q_k(x0)/p_k(x0)` for every computed `k`, `None` at poles.
    pub trail: Vec<Option<S>>,
}

/// Ratios `q_k(x0)/p_k(x0)` for `k = 0..=depth`.
pub fn ratio_trail<S: Scalar, R: Representation + PointValue<S>>(seq: &AimSequence<R>, x0: &S) -> Result<Vec<Option<S>>> {
    (0..=seq.depth())
        .map(|n| match alpha_at(seq, n, x0) {
            Ok(a) => Ok(Some(a)),
            Err(Error::PoleAtExpansionPoint { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Classifies the tail (`window` trailing ratios) of the ratio sequence.
pub fn diagnose_convergence<S: Scalar, R: Representation + PointValue<S>>(
    seq: &AimSequence<R>,
    x0: &S,
    window: usize,
    tol: f64,
) -> Result<ConvergenceReport<S>> {
    let trail = ratio_trail(seq, x0)?;
    let tail = &trail[trail.len().saturating_sub(window.max(2))..];
    let poles = tail.iter().filter(|a| a.is_none()).count();
    let alpha = trail.iter().rev().find_map(|a| a.clone());
    let changes: Vec<f64> = tail
        .windows(2)
        .filter_map(|w| match (&w[0], &w[1]) {
            (Some(a), Some(b)) => Some((b.clone() - a).abs().to_f64()),
            _ => None,
        })
        .collect();
    let last_change = changes.last().copied();
    let status = if seq.terminated_at().is_some() && poles == 0 {
        ConvergenceStatus::Terminated
    } else if poles == 0 && last_change.is_some_and(|c| c < tol) {
        ConvergenceStatus::Converged
    } else {
        ConvergenceStatus::NonConvergent { poles }
    };
    Ok(ConvergenceReport { status, alpha, last_change, trail })
}

/// `|δ_n / p_{n-1}²|` at `x0` for `n = 1..=depth`; `None` where `p_{n-1}(x0) = 0`.
pub fn residual_trail<S: Scalar, R: Representation + PointValue<S>>(seq: &AimSequence<R>, x0: &S) -> Result<Vec<Option<S>>> {
    (1..=seq.depth())
        .map(|n| {
            let p = seq.iterate(n - 1).p.value_at(x0)?;
            if p.is_zero() {
                return Ok(None);
            }
            let d = seq.delta(n).value_at(x0)?;
            Ok(Some((d / (p.clone() * &p)).abs()))
        })
        .collect()
}

/// `|y^(n+2)(x0) - p_n(x0) y'(x0) - q_n(x0) y(x0)|` for a jet `y`.
pub fn nth_derivative_identity_check<S: Scalar>(y: &Jet<S>, problem: &OdeProblem<Jet<S>>, n: usize) -> Result<S> {
    if y.valid() < n + 3 {
        return Err(Error::JetExhausted { depth: Some(n) });
    }
    let seq = run_full(problem, n)?;
    let it = seq.iterate(n);
    let lhs = y.derivative_value(n + 2)?;
    let rhs = it.p.value()? * y.derivative_value(1)? + it.q.value()? * y.derivative_value(0)?;
    Ok((lhs - rhs).abs())
}
