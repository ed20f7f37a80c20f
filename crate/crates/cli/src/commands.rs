//! One function per subcommand. Each writes CSV to `out` and a readable
//! table to `log`, and returns how the run ended.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use aim_core::aim::{diagnose_convergence, polynomial_solutions, run_full, terminating_scan, ConvergenceStatus, OdeProblem};
use aim_core::algebra::{BigFloat, Jet, Poly, PolyXL, Rational, Render};
use aim_core::error::Error;
use aim_core::oracle::{numerov_levels, ClosedFormConstants, NumerovConfig, Pair};
use aim_core::riccati::{gauged_initial, run_ab, ABState, Initial, Variant};
use aim_core::spectra::{
    beta_tune, eigenvalues, exp_linear_shift, gauge_transform, quadratic_gauge, track_root, BetaReport, EigenResult,
    EigenStatus, SpectralProblem,
};
use num_traits::Zero;

use crate::config::{to_f64, ConfigError, Gauge, Mode, ProblemConfig, Source};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(Error),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    NoConverged,
    Mismatch,
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_NO_CONVERGED: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::NoConverged) => EXIT_NO_CONVERGED,
        Ok(Outcome::Mismatch) => EXIT_MISMATCH,
        Err(CliError::Config(_)) => EXIT_CONFIG,
        Err(CliError::Compute(_) | CliError::Io(_)) => EXIT_COMPUTE,
    }
}

type Out<'a> = &'a mut dyn Write;

/// Runs the command selected by `cfg.mode`. `trace` is the per-depth trace
/// file for `eigen`.
pub fn dispatch(cfg: &ProblemConfig, trace: Option<&Path>, out: Out, log: Out) -> Result<Outcome, CliError> {
    match cfg.mode {
        Mode::Terminate => terminate(cfg, out, log),
        Mode::Eigen => eigen(cfg, trace, out, log),
        Mode::Riccati => riccati(cfg, out, log),
        Mode::Verify => verify(cfg, out, log),
        Mode::ShiftDemo => shift_demo(cfg, out, log),
    }
}

fn fixed_gauge(potential: &Poly<Rational>, gauge: &Gauge, mode: &str) -> Result<OdeProblem<PolyXL>, CliError> {
    let s = match gauge {
        Gauge::Exponent(s) => s.clone(),
        Gauge::Beta(b) => quadratic_gauge(b),
        Gauge::Tune(_) => return Err(CliError::Config(format!("{mode} needs a fixed `gauge` or `beta`, not `beta_candidates`"))),
    };
    Ok(gauge_transform(potential, &s))
}

/// The problem as polynomials in `x` and `λ`.
fn lambda_problem(cfg: &ProblemConfig) -> Result<OdeProblem<PolyXL>, CliError> {
    match &cfg.source {
        Source::Potential { potential, gauge } => fixed_gauge(potential, gauge, cfg.mode.as_str()),
        Source::Raw { p, q, q_lambda } => {
            let ql = Poly::new(q_lambda.coeffs().iter().map(|c| Poly::monomial(c.clone(), 1)).collect());
            Ok(OdeProblem { p: p.lift(), q: q.lift() + ql })
        }
    }
}

fn bind(problem: &OdeProblem<PolyXL>, value: &Rational) -> OdeProblem<Poly<Rational>> {
    OdeProblem { p: problem.p.bind_lambda(value), q: problem.q.bind_lambda(value) }
}

fn spectral(cfg: &ProblemConfig, ode: OdeProblem<PolyXL>) -> SpectralProblem {
    let mut sp = SpectralProblem::new(ode);
    sp.x0 = cfg.x0.clone();
    sp.n_max = cfg.n_max;
    sp.precision_bits = cfg.precision_bits;
    sp.window = (to_f64(&cfg.window.0), to_f64(&cfg.window.1));
    sp.scan_step = to_f64(&cfg.scan_step);
    sp.depth_stride = cfg.depth_stride;
    sp
}

fn csv_writer(out: Out) -> csv::Writer<Out> {
    csv::Writer::from_writer(out)
}

pub fn terminate(cfg: &ProblemConfig, out: Out, log: Out) -> Result<Outcome, CliError> {
    let problem = lambda_problem(cfg)?;
    let reports = terminating_scan(&problem, cfg.n_min..=cfg.n_max)?;
    let mut w = csv_writer(out);
    w.write_record([
        "n",
        "identically_zero",
        "p_prev_nonzero",
        "lambda_roots",
        "factored_delta",
        "irrational_factor",
        "polynomial_solution",
    ])?;
    writeln!(log, "{:>3}  {:<24}  {:<34}  polynomial solutions", "n", "λ roots", "δ_n")?;
    for r in &reports {
        let roots: Vec<String> = r.accepted_roots().map(|l| l.value.to_string()).collect();
        let mut solutions = Vec::new();
        if r.is_identically_zero {
            let free = bind(&problem, &Rational::zero());
            for y in polynomial_solutions(&free, r.n) {
                solutions.push(render_solution(&y));
            }
        } else {
            for root in r.accepted_roots() {
                for y in polynomial_solutions(&bind(&problem, &root.value), r.n) {
                    solutions.push(format!("λ={}: {}", root.value, render_solution(&y)));
                }
            }
        }
        let factored = r.factored().unwrap_or_default();
        let irrational = r.irrational_factor.as_ref().map(|f| f.render(&["λ"])).unwrap_or_default();
        w.write_record([
            r.n.to_string(),
            r.is_identically_zero.to_string(),
            r.p_prev_nonzero.to_string(),
            roots.join(";"),
            factored.clone(),
            irrational.clone(),
            solutions.join(";"),
        ])?;
        let shown = if factored.is_empty() { "(not fully rational)".to_string() } else { factored };
        writeln!(log, "{:>3}  {:<24}  {:<34}  {}", r.n, format!("{{{}}}", roots.join(", ")), shown, solutions.join("; "))?;
        if r.is_identically_zero {
            let kind = if solutions.iter().any(|s| s == "constant") { "constant".to_string() } else { solutions.join("; ") };
            writeln!(log, "     polynomial solution: {kind}")?;
        }
        if !irrational.is_empty() {
            writeln!(log, "     factor without rational roots: {irrational}")?;
        }
    }
    w.flush()?;
    Ok(Outcome::Success)
}

fn render_solution(y: &Poly<Rational>) -> String {
    if y.is_constant() {
        "constant".into()
    } else {
        y.render(&["x"])
    }
}

fn print_beta_report(report: &BetaReport, log: Out, decimals: usize) -> io::Result<()> {
    writeln!(log, "β tuning (root followed across depths):")?;
    for (i, row) in report.rows.iter().enumerate() {
        let trail: Vec<String> = row
            .trace
            .iter()
            .map(|t| match &t.energy {
                Some(e) => format!("n={}: {}", t.n, e.to_fixed(decimals)),
                None => format!("n={}: -", t.n),
            })
            .collect();
        let settled = row.settled_at.map_or("diverged".to_string(), |n| format!("settled at n={n}"));
        let mark = if report.best == Some(i) { " <- chosen" } else { "" };
        writeln!(log, "  β = {:<6} {settled}{mark}", row.beta.to_string())?;
        writeln!(log, "      {}", trail.join(", "))?;
    }
    if report.all_diverged() {
        writeln!(log, "  no candidate settled: all diverged")?;
    }
    Ok(())
}

/// Eigenvalues at depth `n_max`, after optional `β` tuning. `None` means tuning found nothing.
fn solve_eigen(cfg: &ProblemConfig, log: Out) -> Result<Option<(SpectralProblem, Vec<EigenResult>)>, CliError> {
    let tol = to_f64(&cfg.tolerance);
    let decimals = cfg.energy_decimals();
    let ode = match &cfg.source {
        Source::Potential { potential, gauge: Gauge::Tune(candidates) } => {
            let template = spectral(cfg, gauge_transform(potential, &Poly::zero()));
            let report = beta_tune(potential, &template, candidates, &cfg.probes(), cfg.level, tol)?;
            print_beta_report(&report, log, decimals)?;
            match report.best_beta() {
                Some(beta) => gauge_transform(potential, &quadratic_gauge(beta)),
                None => return Ok(None),
            }
        }
        _ => lambda_problem(cfg)?,
    };
    let problem = spectral(cfg, ode);
    let results = eigenvalues(&problem, cfg.n_max, tol)?;
    Ok(Some((problem, results)))
}

fn print_eigen_table(results: &[EigenResult], log: Out, decimals: usize) -> io::Result<()> {
    writeln!(log, "{:>4}  {:<w$}  {:>4}  {:<11}  {:<10}  changes over depths", "#", "E", "n", "|δ_n|", "status", w = decimals + 4)?;
    for (i, r) in results.iter().enumerate() {
        let changes: Vec<String> = r.changes().iter().map(|c| format!("{c:.1e}")).collect();
        let pole = if r.pole_warning { "  (p_{n-1}(x0) = 0)" } else { "" };
        writeln!(
            log,
            "{:>4}  {:<w$}  {:>4}  {:<11}  {:<10}  {}{pole}",
            i,
            r.energy.to_fixed(decimals),
            r.n_used,
            r.residual.to_scientific(3),
            r.status.to_string(),
            changes.join(", "),
            w = decimals + 4
        )?;
    }
    Ok(())
}

pub fn eigen(cfg: &ProblemConfig, trace: Option<&Path>, out: Out, log: Out) -> Result<Outcome, CliError> {
    let decimals = cfg.energy_decimals();
    let Some((problem, results)) = solve_eigen(cfg, log)? else {
        return Ok(Outcome::NoConverged);
    };
    print_eigen_table(&results, log, decimals)?;
    let converged: Vec<&EigenResult> = results.iter().filter(|r| r.status == EigenStatus::Converged).collect();
    if converged.is_empty() {
        writeln!(log, "no bracket in [{}, {}] converged at n = {}: all diverged", problem.window.0, problem.window.1, cfg.n_max)?;
        return Ok(Outcome::NoConverged);
    }
    let mut w = csv_writer(out);
    w.write_record(["level", "energy", "n_used", "residual", "status"])?;
    for (level, r) in converged.iter().enumerate() {
        w.write_record([level.to_string(), r.energy.to_fixed(decimals), r.n_used.to_string(), r.residual.to_scientific(6), r.status.to_string()])?;
    }
    w.flush()?;
    if let Some(path) = trace {
        write_trace(cfg, &problem, converged.len(), path, decimals)?;
    }
    Ok(Outcome::Success)
}

fn write_trace(cfg: &ProblemConfig, problem: &SpectralProblem, levels: usize, path: &Path, decimals: usize) -> Result<(), CliError> {
    let tol = to_f64(&cfg.tolerance);
    let depths = cfg.probes();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["level", "n", "energy", "abs_delta"])?;
    for level in 0..levels {
        for t in track_root(problem, level, &depths, tol)? {
            w.write_record([
                level.to_string(),
                t.n.to_string(),
                t.energy.as_ref().map(|e| e.to_fixed(decimals)).unwrap_or_default(),
                t.residual.as_ref().map(|r| r.to_scientific(6)).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn verify(cfg: &ProblemConfig, out: Out, log: Out) -> Result<Outcome, CliError> {
    let Source::Potential { potential, .. } = &cfg.source else {
        return Err(CliError::Config("verify needs a `potential`".into()));
    };
    let oracle_potential = cfg.oracle_potential.as_ref().unwrap_or(potential);
    let decimals = cfg.energy_decimals();
    let Some((_, results)) = solve_eigen(cfg, log)? else {
        return Ok(Outcome::NoConverged);
    };
    print_eigen_table(&results, log, decimals)?;
    let converged: Vec<&EigenResult> = results.iter().filter(|r| r.status == EigenStatus::Converged).collect();
    if converged.is_empty() {
        writeln!(log, "no converged eigenvalue to verify")?;
        return Ok(Outcome::NoConverged);
    }
    let numerov_cfg = NumerovConfig {
        domain: (to_f64(&cfg.numerov_domain.0), to_f64(&cfg.numerov_domain.1)),
        mesh: cfg.numerov_mesh,
        ..Default::default()
    };
    let reference = numerov_levels(oracle_potential, converged.len() + 1, &numerov_cfg)?;
    let limit = to_f64(&cfg.verify_tolerance);
    let mut w = csv_writer(out);
    w.write_record(["level", "aim_energy", "numerov_energy", "abs_diff", "pass"])?;
    writeln!(log, "{:>5}  {:<w$}  {:<w$}  {:<9}  pass", "level", "AIM", "Numerov", "|diff|", w = decimals + 4)?;
    let mut all_pass = true;
    for r in &converged {
        let e = r.energy.to_f64();
        let nearest = reference
            .iter()
            .min_by(|a, b| (a.energy - e).abs().total_cmp(&(b.energy - e).abs()))
            .expect("at least one reference level");
        let diff = (nearest.energy - e).abs();
        let pass = diff <= limit;
        all_pass &= pass;
        w.write_record([
            nearest.level.to_string(),
            r.energy.to_fixed(decimals),
            format!("{:.*}", decimals.min(15), nearest.energy),
            format!("{diff:.3e}"),
            pass.to_string(),
        ])?;
        writeln!(
            log,
            "{:>5}  {:<w$}  {:<w$}  {:<9.2e}  {}",
            nearest.level,
            r.energy.to_fixed(decimals),
            format!("{:.*}", decimals.min(15), nearest.energy),
            diff,
            if pass { "yes" } else { "NO" },
            w = decimals + 4
        )?;
    }
    w.flush()?;
    Ok(if all_pass { Outcome::Success } else { Outcome::Mismatch })
}

pub fn riccati(cfg: &ProblemConfig, out: Out, log: Out) -> Result<Outcome, CliError> {
    let lambda = cfg.lambda.clone().unwrap_or_else(Rational::zero);
    let exact = bind(&lambda_problem(cfg)?, &lambda);
    let prec = cfg.precision_bits;
    let x0 = BigFloat::from_rational(&cfg.x0, prec);
    let order = cfg.n_max + 2;
    let jet = |p: &Poly<Rational>| Jet::from_poly(&Poly::from_rational_poly(p, prec), &x0, order);
    let problem = OdeProblem { p: jet(&exact.p), q: jet(&exact.q) };
    let start = match cfg.initial {
        Initial::Gauged => gauged_initial(cfg.variant, &problem)?,
        other => ABState::start(cfg.variant, other, &problem)?,
    };
    if cfg.variant == Variant::V2 && cfg.initial != Initial::Gauged {
        writeln!(log, "warning: v2 from `{}` initial conditions tends to the larger-modulus Riccati solution, not the AIM ratio", cfg.initial)?;
    }
    let seq = run_ab(start, &problem, cfg.n_max)?;
    let mut w = csv_writer(out);
    w.write_record(["n", "ratio", "delta", "pole"])?;
    writeln!(log, "{:>4}  {:<24}  δ_n", "n", "A_n/B_n")?;
    for n in cfg.n_min..=cfg.n_max {
        let (ratio, pole) = match seq.ratio_at(n, &x0) {
            Ok(r) => (r.to_scientific(17), false),
            Err(Error::PoleAtExpansionPoint { .. }) => (String::new(), true),
            Err(e) => return Err(e.into()),
        };
        let delta = seq.delta(n).value()?.to_scientific(6);
        w.write_record([n.to_string(), ratio.clone(), delta.clone(), pole.to_string()])?;
        writeln!(log, "{:>4}  {:<24}  {}", n, if pole { "pole" } else { &ratio }, delta)?;
    }
    w.flush()?;
    Ok(Outcome::Success)
}

fn pair_text(z: &Pair<BigFloat>) -> String {
    if z.im.is_zero() {
        z.re.to_scientific(12)
    } else {
        format!("{}{:+}i", z.re.to_scientific(12), z.im.to_f64())
    }
}

pub fn shift_demo(cfg: &ProblemConfig, out: Out, log: Out) -> Result<Outcome, CliError> {
    let Source::Raw { p, q, .. } = &cfg.source else {
        return Err(CliError::Config("shift-demo needs constant `p` and `q`".into()));
    };
    let before = OdeProblem { p: p.clone(), q: q.clone() };
    let after = exp_linear_shift(&before, &cfg.shift);
    let tol = to_f64(&cfg.tolerance);
    let prec = cfg.precision_bits;
    let mut w = csv_writer(out);
    w.write_record(["stage", "p", "q", "rho1", "rho2", "c1", "c2", "equal_modulus", "rate", "alpha", "last_change", "status"])?;
    writeln!(log, "substitution y = v·exp(-{} x)", cfg.shift)?;
    for (stage, prob) in [("original", &before), ("shifted", &after)] {
        let (pc, qc) = (prob.p.coeff(0), prob.q.coeff(0));
        let closed = ClosedFormConstants::new(BigFloat::from_rational(&pc, prec), BigFloat::from_rational(&qc, prec))?;
        // |ρ1/ρ2|: how fast the ratio settles
        let rate = (closed.rho1.norm_sqr().to_f64() / closed.rho2.norm_sqr().to_f64()).sqrt();
        let seq = run_full(prob, cfg.n_max)?;
        let report = diagnose_convergence(&seq, &cfg.x0, 4, tol)?;
        let status = match report.status {
            ConvergenceStatus::Converged => "converged".to_string(),
            ConvergenceStatus::Terminated => "terminated".to_string(),
            ConvergenceStatus::NonConvergent { poles } => format!("non-convergent ({poles} poles)"),
        };
        let alpha = report.alpha.as_ref().map(|a| BigFloat::from_rational(a, prec).to_scientific(12)).unwrap_or_default();
        let change = report.last_change.map(|c| format!("{c:.3e}")).unwrap_or_default();
        w.write_record([
            stage.to_string(),
            pc.to_string(),
            qc.to_string(),
            pair_text(&closed.rho1),
            pair_text(&closed.rho2),
            pair_text(&closed.c1),
            pair_text(&closed.c2),
            closed.equal_modulus.to_string(),
            format!("{rate:.6}"),
            alpha.clone(),
            change,
            status.clone(),
        ])?;
        writeln!(log, "{stage:>9}: p = {pc}, q = {qc}")?;
        writeln!(log, "           ρ1 = {}, ρ2 = {}", pair_text(&closed.rho1), pair_text(&closed.rho2))?;
        writeln!(log, "           C1 = {}, C2 = {}", pair_text(&closed.c1), pair_text(&closed.c2))?;
        writeln!(log, "           |ρ1/ρ2| = {rate:.6}")?;
        writeln!(log, "           q_n/p_n at n = {}: {} ({status})", cfg.n_max, if alpha.is_empty() { "-" } else { &alpha })?;
    }
    w.flush()?;
    Ok(Outcome::Success)
}
