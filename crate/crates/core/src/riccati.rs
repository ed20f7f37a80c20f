//! Iterative Riccati recurrences on `f = A/B`.
//!
//! Both variants produce ratios `A_n / B_n` whose limits solve
//! `f' - f² - p f + q = 0`, and both share the terminating quantity
//! `δ_n = B_{n-1} A_n - B_n A_{n-1}`:
//!
//! ```text
//! v1:  A_n = A' + q B,          B_n = B' + A + p B
//! v2:  A_n = A' - p A + q B,    B_n = B' + A
//! ```
//!
//! v1 started from `(q, p)` reproduces the AIM iterates. v2 is v1 conjugated
//! by `e^u` with `u' = p`: running v2 from `(A_0 e^u, B_0 e^u)` gives
//! `(A_n e^u, B_n e^u)` where `(A_n, B_n)` are the v1 iterates. Started from
//! plain initial conditions, v2 on constant coefficients selects the Riccati
//! root of larger modulus, `-ρ₂`.

use std::fmt;

use crate::aim::OdeProblem;
use crate::algebra::{Jet, PointValue, Representation, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    V1,
    V2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" => Ok(Variant::V1),
            "v2" => Ok(Variant::V2),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}` (expected v1 or v2)"))),
        }
    }
}

/// How `(A_0, B_0)` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Initial {
    /// `(q, p)`.
    Aim,
    /// `(1, 1)`.
    Ones,
    /// `(q e^u, p e^u)` with `u' = p`, `u(x0) = 0`. Jets only.
    Gauged,
    Custom,
}

impl fmt::Display for Initial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Initial::Aim => "aim",
            Initial::Ones => "ones",
            Initial::Gauged => "gauged",
            Initial::Custom => "custom",
        })
    }
}

impl std::str::FromStr for Initial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aim" => Ok(Initial::Aim),
            "ones" => Ok(Initial::Ones),
            "gauged" => Ok(Initial::Gauged),
            other => Err(Error::InvalidArgument(format!("unknown initial condition `{other}` (expected aim, ones or gauged)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ABState<R> {
    pub variant: Variant,
    pub a: R,
    pub b: R,
    pub n: usize,
    pub initial: Initial,
}

impl<R: Representation> ABState<R> {
    pub fn new(variant: Variant, a: R, b: R, initial: Initial) -> Result<Self> {
        a.try_add(&b)?;
        Ok(ABState { variant, a, b, n: 0, initial })
    }

    /// `(q, p)` or `(1, 1)`. Gauged starts need jets; see [`gauged_initial`].
    pub fn start(variant: Variant, initial: Initial, problem: &OdeProblem<R>) -> Result<Self> {
        match initial {
            Initial::Aim => Self::new(variant, problem.q.clone(), problem.p.clone(), initial),
            Initial::Ones => {
                let one = problem.p.one_like();
                Self::new(variant, one.clone(), one, initial)
            }
            Initial::Gauged | Initial::Custom => Err(Error::InvalidArgument(format!(
                "`{initial}` initial conditions cannot be derived from the problem in this representation"
            ))),
        }
    }

    pub fn step(&self, problem: &OdeProblem<R>) -> Result<Self> {
        match self.variant {
            Variant::V1 => ab_step_v1(self, problem),
            Variant::V2 => ab_step_v2(self, problem),
        }
    }
}

fn tag_depth(err: Error, depth: usize) -> Error {
    match err {
        Error::JetExhausted { depth: None } => Error::JetExhausted { depth: Some(depth) },
        other => other,
    }
}

pub fn ab_step_v1<R: Representation>(state: &ABState<R>, problem: &OdeProblem<R>) -> Result<ABState<R>> {
    let n = state.n + 1;
    let go = || -> Result<(R, R)> {
        let a = state.a.differentiate()?.try_add(&problem.q.try_mul(&state.b)?)?;
        let b = state
            .b
            .differentiate()?
            .try_add(&state.a)?
            .try_add(&problem.p.try_mul(&state.b)?)?;
        Ok((a, b))
    };
    let (a, b) = go().map_err(|e| tag_depth(e, n))?;
    Ok(ABState { a, b, n, ..state.clone() })
}

pub fn ab_step_v2<R: Representation>(state: &ABState<R>, problem: &OdeProblem<R>) -> Result<ABState<R>> {
    let n = state.n + 1;
    let go = || -> Result<(R, R)> {
        let a = state
            .a
            .differentiate()?
            .try_sub(&problem.p.try_mul(&state.a)?)?
            .try_add(&problem.q.try_mul(&state.b)?)?;
        let b = state.b.differentiate()?.try_add(&state.a)?;
        Ok((a, b))
    };
    let (a, b) = go().map_err(|e| tag_depth(e, n))?;
    Ok(ABState { a, b, n, ..state.clone() })
}

/// `δ_n = B_{n-1} A_n - B_n A_{n-1}`.
pub fn ab_delta<R: Representation>(current: &ABState<R>, previous: &ABState<R>) -> Result<R> {
    previous.b.try_mul(&current.a)?.try_sub(&current.b.try_mul(&previous.a)?)
}

/// States `0..=n_max` and `δ_1..=δ_{n_max}`.
#[derive(Debug, Clone)]
pub struct ABSequence<R> {
    pub states: Vec<ABState<R>>,
    pub deltas: Vec<R>,
}

impl<R: Representation> ABSequence<R> {
    pub fn depth(&self) -> usize {
        self.states.len() - 1
    }

    pub fn state(&self, n: usize) -> &ABState<R> {
        &self.states[n]
    }

    pub fn delta(&self, n: usize) -> &R {
        assert!(n >= 1, "delta is defined from n = 1");
        &self.deltas[n - 1]
    }

    /// `A_n(x0) / B_n(x0)`.
    pub fn ratio_at<S: Scalar>(&self, n: usize, x0: &S) -> Result<S>
    where
        R: PointValue<S>,
    {
        let st = &self.states[n];
        let b = st.b.value_at(x0)?;
        if b.is_zero() {
            return Err(Error::PoleAtExpansionPoint { n });
        }
        Ok(st.a.value_at(x0)? / b)
    }
}

pub fn run_ab<R: Representation>(start: ABState<R>, problem: &OdeProblem<R>, n_max: usize) -> Result<ABSequence<R>> {
    let mut states = Vec::with_capacity(n_max + 1);
    let mut deltas = Vec::with_capacity(n_max);
    states.push(start);
    for n in 1..=n_max {
        let next = states[n - 1].step(problem)?;
        deltas.push(ab_delta(&next, &states[n - 1]).map_err(|e| tag_depth(e, n))?);
        states.push(next);
    }
    Ok(ABSequence { states, deltas })
}

/// `e^u` with `u' = p`, `u(x0) = 0`, from `E' = p E`.
pub fn exp_of_integral<S: Scalar>(p: &Jet<S>) -> Jet<S> {
    let len = p.coeffs().len();
    let mut coeffs: Vec<S> = Vec::with_capacity(len);
    coeffs.push(p.center().like_rational(&num_traits::One::one()));
    for k in 0..len - 1 {
        let mut acc = S::zero();
        for j in 0..=k {
            let pj = &p.coeffs()[j];
            if !pj.is_zero() {
                acc = acc + &(pj.clone() * &coeffs[k - j]);
            }
        }
        coeffs.push(acc / S::from_i64(k as i64 + 1));
    }
    Jet::from_coeffs(p.center().clone(), coeffs, p.valid() + 1)
}

/// Multiplies a state by `e^u`, `u' = p`, `u(x0) = 0`. Applied to a v1 state
/// this gives the v2 state reached from the gauged initial conditions.
pub fn gauge_map<S: Scalar>(state: &ABState<Jet<S>>, problem: &OdeProblem<Jet<S>>) -> Result<ABState<Jet<S>>> {
    let e = exp_of_integral(&problem.p);
    Ok(ABState {
        variant: Variant::V2,
        a: state.a.try_mul(&e)?,
        b: state.b.try_mul(&e)?,
        n: state.n,
        initial: Initial::Gauged,
    })
}

/// `(q e^u, p e^u)` for the given variant.
pub fn gauged_initial<S: Scalar>(variant: Variant, problem: &OdeProblem<Jet<S>>) -> Result<ABState<Jet<S>>> {
    let aim = ABState::start(variant, Initial::Aim, problem)?;
    let mut mapped = gauge_map(&aim, problem)?;
    mapped.variant = variant;
    Ok(mapped)
}
