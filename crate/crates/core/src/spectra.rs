//! Schrödinger eigenvalues from the roots of `δ_n(x0, E)`.
//!
//! `-ψ'' + Vψ = Eψ` with `ψ = e^{s} y` becomes `y'' = p y' + q y` where
//!
//! ```text
//! p = -2 s',   q = V - E - s'' - s'²
//! ```
//!
//! For even polynomial potentials the gauge `s = -β x²/2` with `β > 0` keeps
//! `ψ` normalizable. Eigenvalues are the stable roots in `E` of `δ_n` evaluated
//! at a single point `x0`, computed with big-real jets.
//!
//! With `x0 = 0` and an even potential, `p_n` and `q_n` alternate parity, so
//! `δ_{2k}` and `δ_{2k+1}` share their roots. Stability checks therefore
//! compare depths `n`, `n - s`, `n - 2s` with a stride `s` that defaults to 2.

use num_traits::{One, Zero};

use crate::aim::{run_full, OdeProblem};
use crate::algebra::{BigFloat, Jet, Poly, PolyXL, Rational, Ring, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// `p = -2s'`, `q = V - λ - s'' - s'²`.
pub fn gauge_transform(potential: &Poly<Rational>, gauge: &Poly<Rational>) -> OdeProblem<PolyXL> {
    let s1 = gauge.derivative();
    let s2 = s1.derivative();
    let p = s1.scale(&Rational::from_i64(-2));
    let q = potential - &s2 - &s1 * &s1;
    OdeProblem { p: p.lift(), q: q.lift() - PolyXL::lambda() }
}

/// `s = -β x² / 2`.
pub fn quadratic_gauge(beta: &Rational) -> Poly<Rational> {
    Poly::monomial(-beta / Rational::from_i64(2), 2)
}

/// Substitutes `y = v e^{-βx}`: `p̃ = p + 2β`, `q̃ = q - pβ - β²`. For constant
/// coefficients the characteristic roots move from `ρ` to `ρ + β`.
pub fn exp_linear_shift<R: Ring>(problem: &OdeProblem<Poly<R>>, beta: &R) -> OdeProblem<Poly<R>> {
    let b = Poly::constant(beta.clone());
    let p = &problem.p + &(&b + &b);
    let q = &problem.q - &(&problem.p * &b) - &(&b * &b);
    OdeProblem { p, q }
}

/// One `δ_k(x0, E)` together with what is needed to trust its sign.
#[derive(Debug, Clone)]
pub struct DeltaSample {
    pub n: usize,
    pub value: BigFloat,
    /// `max(|q_k p_{k-1}|, |q_{k-1} p_k|)` at `x0`; `value` lost this much to cancellation.
    pub scale: BigFloat,
    /// `p_{k-1}(x0) = 0`.
    pub pole: bool,
}

impl DeltaSample {
    /// Sign of `δ`, or 0 if it is zero or sits below the cancellation floor
    /// `scale · 2^-(P-8)`.
    pub fn sign(&self) -> i32 {
        if self.value.is_zero() {
            return 0;
        }
        if !self.scale.is_zero() {
            let guard = self.value.precision().max(16) as i64 - 8;
            if self.value.top_bit() < self.scale.top_bit() - guard {
                return 0;
            }
        }
        self.value.signum()
    }
}

/// A polynomial `y'' = p y' + q y` problem with `λ = E`, plus scan settings.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub ode: OdeProblem<PolyXL>,
    pub x0: Rational,
    pub n_max: usize,
    pub precision_bits: u32,
    /// `(E_min, E_max)`.
    pub window: (f64, f64),
    pub scan_step: f64,
    pub depth_stride: usize,
    pub execution: Execution,
}

impl SpectralProblem {
    pub fn new(ode: OdeProblem<PolyXL>) -> Self {
        SpectralProblem {
            ode,
            x0: Rational::zero(),
            n_max: 30,
            precision_bits: DEFAULT_PRECISION,
            window: (0.0, 10.0),
            scan_step: 0.5,
            depth_stride: 2,
            execution: Execution::default(),
        }
    }

    pub fn energy(&self, e: f64) -> Result<BigFloat> {
        BigFloat::from_f64(e, self.precision_bits).ok_or_else(|| Error::InvalidArgument(format!("energy {e} is not finite")))
    }

    fn jet_problem(&self, e: &BigFloat, order: usize) -> OdeProblem<Jet<BigFloat>> {
        let e = e.with_precision(self.precision_bits);
        let x0 = BigFloat::from_rational(&self.x0, self.precision_bits);
        let p = self.ode.p.bind_lambda(&e);
        let q = self.ode.q.bind_lambda(&e);
        OdeProblem { p: Jet::from_poly(&p, &x0, order), q: Jet::from_poly(&q, &x0, order) }
    }

    /// `δ_k(x0, E)` for `k = 1..=n` from a single run.
    pub fn delta_trail(&self, e: &BigFloat, n: usize) -> Result<Vec<DeltaSample>> {
        if n == 0 {
            return Err(Error::InvalidArgument("delta_n is defined from n = 1".into()));
        }
        let seq = run_full(&self.jet_problem(e, n + 2), n)?;
        let at = |k: usize| -> Result<(BigFloat, BigFloat)> {
            let it = seq.iterate(k);
            Ok((it.p.value()?, it.q.value()?))
        };
        let mut out = Vec::with_capacity(n);
        let (mut p_prev, mut q_prev) = at(0)?;
        for k in 1..=n {
            let (p, q) = at(k)?;
            let left = (&q * &p_prev).abs();
            let right = (&q_prev * &p).abs();
            let scale = if left > right { left } else { right };
            out.push(DeltaSample { n: k, value: seq.delta(k).value()?, scale, pole: p_prev.is_zero() });
            (p_prev, q_prev) = (p, q);
        }
        Ok(out)
    }

    pub fn delta_of_e(&self, e: &BigFloat, n: usize) -> Result<DeltaSample> {
        Ok(self.delta_trail(e, n)?.pop().expect("n >= 1"))
    }

    /// Sign changes of `E ↦ δ_n(x0, E)` on the scan grid.
    pub fn eigen_scan(&self, n: usize) -> Result<Vec<Bracket>> {
        eigen_scan_window(self, n, self.window, self.scan_step)
    }
}

/// `E` interval on which `δ_n` changes sign. `lo == hi` marks a grid point
/// where `δ_n` vanished to working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

fn scan_grid(window: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::InvalidWindow(format!("window [{lo}, {hi}] is empty")));
    }
    if !(step > 0.0) || step > hi - lo {
        return Err(Error::InvalidWindow(format!("scan step {step} does not fit window [{lo}, {hi}]")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
    if hi - grid[count] > 1e-9 * step {
        grid.push(hi);
    }
    Ok(grid)
}

fn brackets_from_signs(grid: &[f64], signs: &[i32]) -> Vec<Bracket> {
    let mut out = Vec::new();
    let mut prev: Option<(usize, i32)> = None;
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            out.push(Bracket { lo: grid[i], hi: grid[i] });
            prev = None;
            continue;
        }
        if let Some((j, sp)) = prev {
            if sp != s {
                out.push(Bracket { lo: grid[j], hi: grid[i] });
            }
        }
        prev = Some((i, s));
    }
    out
}

fn eigen_scan_window(problem: &SpectralProblem, n: usize, window: (f64, f64), step: f64) -> Result<Vec<Bracket>> {
    let grid = scan_grid(window, step)?;
    let signs: Vec<i32> = problem
        .execution
        .map(&grid, |&e| -> Result<i32> { Ok(problem.delta_of_e(&problem.energy(e)?, n)?.sign()) })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(brackets_from_signs(&grid, &signs))
}

/// Bisection on the sign of `δ_n`; `None` when the bracket shows no sign change.
fn bisect(problem: &SpectralProblem, n: usize, bracket: Bracket, tol: f64) -> Result<Option<BigFloat>> {
    let mut lo = problem.energy(bracket.lo)?;
    let mut hi = problem.energy(bracket.hi)?;
    if bracket.lo == bracket.hi {
        return Ok(Some(lo));
    }
    let s_lo = problem.delta_of_e(&lo, n)?.sign();
    let s_hi = problem.delta_of_e(&hi, n)?.sign();
    if s_lo == 0 {
        return Ok(Some(lo));
    }
    if s_hi == 0 {
        return Ok(Some(hi));
    }
    if s_lo == s_hi {
        return Ok(None);
    }
    let half = BigFloat::one().mul_pow2(-1);
    while (&hi - &lo).to_f64() > tol {
        let mid = (&lo + &hi) * &half;
        let sample = problem.delta_of_e(&mid, n)?;
        match sample.sign() {
            0 if sample.value.is_zero() => return Ok(Some(mid)),
            0 => {
                return Err(Error::SignChangeLost { energy: mid.to_f64(), precision_bits: problem.precision_bits });
            }
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(Some((&lo + &hi) * &half))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenStatus {
    Converged,
    Unstable,
    Spurious,
}

impl std::fmt::Display for EigenStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EigenStatus::Converged => "converged",
            EigenStatus::Unstable => "unstable",
            EigenStatus::Spurious => "spurious",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub energy: BigFloat,
    pub n_used: usize,
    /// `|δ_n(x0, E)|`.
    pub residual: BigFloat,
    /// Root of `δ_k` in the same bracket for `k = n - 2s, n - s, n`; `None` where it vanished.
    pub stability_window: Vec<(usize, Option<BigFloat>)>,
    pub status: EigenStatus,
    pub precision_bits: u32,
    pub bracket: Bracket,
    /// `p_{n-1}(x0) = 0` at the reported depth.
    pub pole_warning: bool,
}

impl EigenResult {
    /// Successive `|E(k) - E(k - s)|` over the stability window, newest last.
    pub fn changes(&self) -> Vec<f64> {
        self.stability_window
            .windows(2)
            .filter_map(|w| match (&w[0].1, &w[1].1) {
                (Some(a), Some(b)) => Some((b - a).abs().to_f64()),
                _ => None,
            })
            .collect()
    }
}

fn classify(window: &[(usize, Option<BigFloat>)], tol: f64) -> EigenStatus {
    if window.iter().any(|(_, e)| e.is_none()) {
        return EigenStatus::Spurious;
    }
    let d: Vec<f64> = window
        .windows(2)
        .map(|w| (w[1].1.as_ref().unwrap() - w[0].1.as_ref().unwrap()).abs().to_f64())
        .collect();
    let settle = 10.0 * tol;
    match d.as_slice() {
        [] => EigenStatus::Unstable,
        [d1] => {
            if *d1 < settle {
                EigenStatus::Converged
            } else {
                EigenStatus::Unstable
            }
        }
        [.., d2, d1] => {
            if *d1 < settle && *d2 < settle && *d1 <= d2.max(tol) {
                EigenStatus::Converged
            } else if *d1 > *d2 && *d1 >= settle {
                EigenStatus::Spurious
            } else {
                EigenStatus::Unstable
            }
        }
    }
}

/// Bisects `bracket` at depth `n`, then re-locates the root at `n - s` and
/// `n - 2s` in the same bracket to classify it.
pub fn eigen_refine(problem: &SpectralProblem, n: usize, bracket: Bracket, tol: f64) -> Result<EigenResult> {
    let energy = bisect(problem, n, bracket, tol)?.ok_or(Error::NoSignChange { lo: bracket.lo, hi: bracket.hi })?;
    let stride = problem.depth_stride.max(1);
    let mut stability_window = Vec::new();
    for back in [2, 1] {
        if let Some(k) = n.checked_sub(back * stride).filter(|&k| k >= 1) {
            stability_window.push((k, bisect(problem, k, bracket, tol)?));
        }
    }
    stability_window.push((n, Some(energy.clone())));
    let sample = problem.delta_of_e(&energy, n)?;
    Ok(EigenResult {
        status: classify(&stability_window, tol),
        energy,
        n_used: n,
        residual: sample.value.abs(),
        stability_window,
        precision_bits: problem.precision_bits,
        bracket,
        pole_warning: sample.pole,
    })
}

/// Scans the window at depth `n` and refines every bracket, sorted by energy.
pub fn eigenvalues(problem: &SpectralProblem, n: usize, tol: f64) -> Result<Vec<EigenResult>> {
    let brackets = problem.eigen_scan(n)?;
    let mut out: Vec<EigenResult> = problem
        .execution
        .map(&brackets, |b| eigen_refine(problem, n, *b, tol))
        .into_iter()
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.energy.partial_cmp(&b.energy).expect("finite"));
    Ok(out)
}

/// The `level`-th lowest root followed across increasing depths.
#[derive(Debug, Clone)]
pub struct TracePoint {
    pub n: usize,
    pub energy: Option<BigFloat>,
    pub residual: Option<BigFloat>,
}

/// Follows the `level`-th lowest root of `δ_n` through `depths`. After the
/// first depth the search starts in a window of one scan step around the
/// previous value, falling back to a full scan and the nearest root.
pub fn track_root(problem: &SpectralProblem, level: usize, depths: &[usize], tol: f64) -> Result<Vec<TracePoint>> {
    let mut out = Vec::with_capacity(depths.len());
    let mut prev: Option<f64> = None;
    for &n in depths {
        let mut found = None;
        if let Some(e) = prev {
            let local = Bracket { lo: e - problem.scan_step, hi: e + problem.scan_step };
            found = bisect(problem, n, local, tol)?;
        }
        if found.is_none() {
            let brackets = problem.eigen_scan(n)?;
            let pick = match prev {
                None => brackets.get(level).copied(),
                Some(e) => brackets.iter().copied().min_by(|a, b| {
                    let da = (0.5 * (a.lo + a.hi) - e).abs();
                    let db = (0.5 * (b.lo + b.hi) - e).abs();
                    da.partial_cmp(&db).expect("finite")
                }),
            };
            if let Some(b) = pick {
                found = bisect(problem, n, b, tol)?;
            }
        }
        let residual = match &found {
            Some(e) => Some(problem.delta_of_e(e, n)?.value.abs()),
            None => None,
        };
        prev = found.as_ref().map(BigFloat::to_f64).or(prev);
        out.push(TracePoint { n, energy: found, residual });
    }
    Ok(out)
}

/// First depth in `trace` at which the tracked root moved by less than `tol`.
pub fn first_settled_depth(trace: &[TracePoint], tol: f64) -> Option<usize> {
    trace.windows(2).find_map(|w| match (&w[0].energy, &w[1].energy) {
        (Some(a), Some(b)) if (b - a).abs().to_f64() < tol => Some(w[1].n),
        _ => None,
    })
}

#[derive(Debug, Clone)]
pub struct BetaRow {
    pub beta: Rational,
    pub trace: Vec<TracePoint>,
    pub settled_at: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct BetaReport {
    pub rows: Vec<BetaRow>,
    /// Index into `rows` of the winner; `None` when no candidate settled.
    pub best: Option<usize>,
}

impl BetaReport {
    pub fn best_beta(&self) -> Option<&Rational> {
        self.best.map(|i| &self.rows[i].beta)
    }

    pub fn all_diverged(&self) -> bool {
        self.best.is_none()
    }
}

/// For each `β`, tracks the `level`-th root of the problem gauged with
/// `s = -βx²/2` across `probes` and records the first depth at which it moves
/// by less than `tol`. The winner settles earliest; ties go to the smaller
/// final movement, then to the earlier candidate.
pub fn beta_tune(
    potential: &Poly<Rational>,
    template: &SpectralProblem,
    candidates: &[Rational],
    probes: &[usize],
    level: usize,
    tol: f64,
) -> Result<BetaReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("beta_tune needs at least one candidate".into()));
    }
    let rows: Vec<BetaRow> = template
        .execution
        .map(candidates, |beta| -> Result<BetaRow> {
            let mut problem = template.clone();
            problem.ode = gauge_transform(potential, &quadratic_gauge(beta));
            problem.execution = Execution::Sequential;
            let trace = track_root(&problem, level, probes, tol)?;
            let settled_at = first_settled_depth(&trace, tol);
            Ok(BetaRow { beta: beta.clone(), trace, settled_at })
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let last_move = |row: &BetaRow| -> f64 {
        let t = &row.trace;
        match (t.len() >= 2).then(|| (&t[t.len() - 2].energy, &t[t.len() - 1].energy)) {
            Some((Some(a), Some(b))) => (b - a).abs().to_f64(),
            _ => f64::INFINITY,
        }
    };
    let best = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.settled_at.map(|d| (i, d, last_move(r))))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal)).then(a.0.cmp(&b.0)))
        .map(|(i, _, _)| i);
    Ok(BetaReport { rows, best })
}

/// A Schrödinger problem `-ψ'' + Vψ = Eψ` with gauge exponent `s`.
#[derive(Debug, Clone)]
pub struct SchrodingerProblem {
    pub potential: Poly<Rational>,
    pub gauge: Poly<Rational>,
    pub spectral: SpectralProblem,
}

impl SchrodingerProblem {
    pub fn new(potential: Poly<Rational>, gauge: Poly<Rational>) -> Self {
        let spectral = SpectralProblem::new(gauge_transform(&potential, &gauge));
        SchrodingerProblem { potential, gauge, spectral }
    }

    /// Gauge `s = -βx²/2`.
    pub fn with_beta(potential: Poly<Rational>, beta: &Rational) -> Self {
        Self::new(potential, quadratic_gauge(beta))
    }

    pub fn ode(&self) -> &OdeProblem<PolyXL> {
        &self.spectral.ode
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    fn harmonic() -> SchrodingerProblem {
        SchrodingerProblem::with_beta(Poly::from_i64s(&[0, 0, 1]), &ratio(1, 1))
    }

    #[test]
    fn harmonic_gauge() {
        let ode = harmonic().spectral.ode;
        assert_eq!(ode.p, Poly::from_i64s(&[0, 2]).lift());
        assert_eq!(ode.q, Poly::constant(Poly::from_i64s(&[1, -1])));
    }

    #[test]
    fn quartic_gauge() {
        let ode = SchrodingerProblem::with_beta(Poly::from_i64s(&[0, 0, 0, 0, 1]), &ratio(3, 1)).spectral.ode;
        assert_eq!(ode.p, Poly::from_i64s(&[0, 6]).lift());
        // x^4 - 9x^2 + 3 - λ
        let expected = Poly::from_i64s(&[3, 0, -9, 0, 1]).lift() - PolyXL::lambda();
        assert_eq!(ode.q, expected);
    }

    #[test]
    fn identity_gauge() {
        let v = Poly::from_i64s(&[0, 0, 1]);
        let ode = gauge_transform(&v, &Poly::zero());
        assert!(ode.p.is_zero());
        assert_eq!(ode.q, v.lift() - PolyXL::lambda());
    }

    #[test]
    fn shift_examples() {
        let p01 = OdeProblem { p: Poly::<Rational>::zero(), q: Poly::from_i64s(&[1]) };
        let shifted = exp_linear_shift(&p01, &ratio(1, 1));
        assert_eq!(shifted.p, Poly::from_i64s(&[2]));
        assert!(shifted.q.is_zero());
        assert_eq!(exp_linear_shift(&p01, &Rational::zero()), p01);
        let c = OdeProblem { p: Poly::from_i64s(&[3]), q: Poly::from_i64s(&[-2]) };
        let s = exp_linear_shift(&c, &ratio(-3, 2));
        assert!(s.p.is_zero());
        assert_eq!(s.q, Poly::constant(ratio(1, 4)));
    }

    #[test]
    fn harmonic_delta_one() {
        let sp = harmonic().spectral;
        for (e, expected) in [(1.0, 0.0), (2.0, 1.0), (0.0, -3.0)] {
            let d = sp.delta_of_e(&sp.energy(e).unwrap(), 1).unwrap();
            assert_eq!(d.value.to_f64(), expected);
        }
    }

    #[test]
    fn scan_brackets_harmonic_levels() {
        let mut sp = harmonic().spectral;
        sp.window = (0.25, 12.25);
        let brackets = sp.eigen_scan(10).unwrap();
        let mids: Vec<f64> = brackets.iter().map(|b| 0.5 * (b.lo + b.hi)).collect();
        assert_eq!(mids, vec![1.0, 3.0, 5.0, 7.0, 9.0, 11.0]);
        sp.window = (100.0, 101.0);
        sp.scan_step = 0.5;
        assert!(sp.eigen_scan(10).unwrap().is_empty());
    }

    #[test]
    fn scan_rejects_bad_windows() {
        let mut sp = harmonic().spectral;
        sp.window = (1.0, 1.0);
        assert!(matches!(sp.eigen_scan(2), Err(Error::InvalidWindow(_))));
        sp.window = (0.0, 1.0);
        sp.scan_step = 2.0;
        assert!(matches!(sp.eigen_scan(2), Err(Error::InvalidWindow(_))));
    }

    #[test]
    fn refine_harmonic_ground_state() {
        let sp = harmonic().spectral;
        let r = eigen_refine(&sp, 10, Bracket { lo: 0.5, hi: 2.0 }, 1e-12).unwrap();
        assert!((r.energy.to_f64() - 1.0).abs() < 1e-12);
        assert_eq!(r.status, EigenStatus::Converged);
        assert_eq!(r.stability_window.iter().map(|w| w.0).collect::<Vec<_>>(), vec![6, 8, 10]);
    }

    #[test]
    fn root_missing_at_lower_depth_is_spurious() {
        // E = 21 is a root of δ_10 but not of δ_6 or δ_8
        let sp = harmonic().spectral;
        let r = eigen_refine(&sp, 10, Bracket { lo: 20.5, hi: 21.5 }, 1e-10).unwrap();
        assert_eq!(r.status, EigenStatus::Spurious);
    }

    #[test]
    fn classification() {
        let e = |v: f64| Some(BigFloat::from_f64(v, 64).unwrap());
        assert_eq!(classify(&[(1, e(1.0)), (2, e(1.0 + 1e-13)), (3, e(1.0))], 1e-12), EigenStatus::Converged);
        assert_eq!(classify(&[(1, e(1.0)), (2, e(1.1)), (3, e(1.5))], 1e-12), EigenStatus::Spurious);
        assert_eq!(classify(&[(1, e(1.0)), (2, e(1.5)), (3, e(1.6))], 1e-12), EigenStatus::Unstable);
        assert_eq!(classify(&[(1, None), (2, e(1.5)), (3, e(1.6))], 1e-12), EigenStatus::Spurious);
    }

    #[test]
    fn beta_tune_prefers_exact_gauge_for_harmonic() {
        let mut template = harmonic().spectral;
        template.window = (0.0, 4.0);
        template.scan_step = 0.25;
        let candidates = [ratio(1, 2), ratio(1, 1), ratio(2, 1)];
        let report = beta_tune(&Poly::from_i64s(&[0, 0, 1]), &template, &candidates, &[4, 6, 8, 10, 12], 0, 1e-8).unwrap();
        assert_eq!(report.best_beta(), Some(&ratio(1, 1)));
        let single = beta_tune(&Poly::from_i64s(&[0, 0, 1]), &template, &candidates[1..2], &[4, 6], 0, 1e-8).unwrap();
        assert_eq!(single.best, Some(0));
        assert_eq!(single.rows[0].settled_at, Some(6));
    }
}
