use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aim_cli::config::parse_rational;
use aim_cli::{dispatch, exit_code, CliError, Mode, Outcome, ProblemConfig};
use aim_core::riccati::Variant;
use clap::{Args, Parser, Subcommand};

/// Asymptotic iteration for y'' = p y' + q y and Schrödinger spectra.
#[derive(Parser)]
#[command(name = "aim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact termination table: λ roots of δ_n and polynomial solutions.
    Terminate(Common),
    /// Eigenvalues from the roots of δ_n(x0, E).
    Eigen(Common),
    /// A_n/B_n from one of the iterative Riccati recurrences.
    Riccati(Common),
    /// Compare eigenvalues with an independent Numerov solver.
    Verify(Common),
    /// Closed-form constants and convergence before and after y = v·exp(-βx).
    ShiftDemo(Common),
}

#[derive(Args)]
struct Common {
    /// Problem file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Big-real precision in bits.
    #[arg(long)]
    precision: Option<u32>,
    /// Deepest iteration.
    #[arg(long)]
    nmax: Option<usize>,
    /// Expansion point, exact (e.g. 1/2 or 0.25).
    #[arg(long)]
    x0: Option<String>,
    /// Per-depth trace CSV (eigen only).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Riccati recurrence variant.
    #[arg(long)]
    variant: Option<Variant>,
}

fn load(mode: Mode, args: &Common) -> Result<ProblemConfig, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ProblemConfig::parse(&text)?;
    cfg.mode = mode;
    if let Some(p) = args.precision {
        cfg.precision_bits = p;
    }
    if let Some(n) = args.nmax {
        cfg.n_max = n;
    }
    if let Some(x0) = &args.x0 {
        cfg.x0 = parse_rational(x0)?;
    }
    if let Some(v) = args.variant {
        cfg.variant = v;
    }
    if args.trace.is_some() && mode != Mode::Eigen {
        return Err(CliError::Config("--trace applies to eigen only".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(mode: Mode, args: &Common) -> Result<Outcome, CliError> {
    let cfg = load(mode, args)?;
    let stderr = io::stderr();
    let mut log = stderr.lock();
    let outcome = match &cfg.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            let r = dispatch(&cfg, args.trace.as_deref(), &mut file, &mut log);
            file.flush()?;
            r
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            dispatch(&cfg, args.trace.as_deref(), &mut out, &mut log)
        }
    };
    outcome
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Terminate(a) => (Mode::Terminate, a),
        Command::Eigen(a) => (Mode::Eigen, a),
        Command::Riccati(a) => (Mode::Riccati, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::ShiftDemo(a) => (Mode::ShiftDemo, a),
    };
    let result = run(mode, args);
    if let Err(e) = &result {
        eprintln!("aim: {e}");
    }
    ExitCode::from(exit_code(&result) as u8)
}
