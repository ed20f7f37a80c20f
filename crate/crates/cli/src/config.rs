//! Flat `key = value` problem files.
//!
//! ```text
//! # quartic oscillator, β tuned
//! mode = eigen
//! potential = 0, 0, 0, 0, 1
//! beta_candidates = 1, 2, 3
//! window = 0, 5
//! scan_step = 1/10
//! n_max = 100
//! ```
//!
//! Polynomials are listed from the constant term up. Every number is read
//! exactly: integers, `a/b`, or decimals with an optional exponent
//! (`1.5e-3`). [`ProblemConfig::to_text`] writes every key in a fixed order
//! with canonical rationals, so parsing it back is lossless.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use aim_core::algebra::{Poly, Rational};
use aim_core::riccati::{Initial, Variant};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Terminate,
    Eigen,
    Riccati,
    Verify,
    ShiftDemo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Terminate => "terminate",
            Mode::Eigen => "eigen",
            Mode::Riccati => "riccati",
            Mode::Verify => "verify",
            Mode::ShiftDemo => "shift-demo",
        }
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "terminate" => Mode::Terminate,
            "eigen" => Mode::Eigen,
            "riccati" => Mode::Riccati,
            "verify" => Mode::Verify,
            "shift-demo" => Mode::ShiftDemo,
            other => return err(format!("unknown mode `{other}`")),
        })
    }
}

/// How `ψ = e^s y` is gauged for a potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    /// Explicit `s(x)`.
    Exponent(Poly<Rational>),
    /// `s = -βx²/2`.
    Beta(Rational),
    /// `s = -βx²/2` with `β` picked by tuning.
    Tune(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// `-ψ'' + Vψ = Eψ`.
    Potential { potential: Poly<Rational>, gauge: Gauge },
    /// `y'' = p y' + (q + λ q_lambda) y`.
    Raw { p: Poly<Rational>, q: Poly<Rational>, q_lambda: Poly<Rational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub mode: Mode,
    pub source: Source,
    pub x0: Rational,
    pub n_min: usize,
    pub n_max: usize,
    pub precision_bits: u32,
    pub window: (Rational, Rational),
    pub scan_step: Rational,
    pub tolerance: Rational,
    pub depth_stride: usize,
    /// Depths probed while tuning `β` or tracing; empty means every 10th up to `n_max`.
    pub probe_depths: Vec<usize>,
    /// Which root (0 = lowest) tuning follows.
    pub level: usize,
    pub variant: Variant,
    pub initial: Initial,
    /// Value bound to `λ` in riccati mode.
    pub lambda: Option<Rational>,
    /// Shift parameter in shift-demo mode.
    pub shift: Rational,
    pub numerov_domain: (Rational, Rational),
    pub numerov_mesh: usize,
    /// Potential handed to the Numerov oracle in verify mode; defaults to `potential`.
    pub oracle_potential: Option<Poly<Rational>>,
    pub verify_tolerance: Rational,
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "mode",
    "potential",
    "gauge",
    "beta",
    "beta_candidates",
    "p",
    "q",
    "q_lambda",
    "x0",
    "n_min",
    "n_max",
    "precision_bits",
    "window",
    "scan_step",
    "tolerance",
    "depth_stride",
    "probe_depths",
    "level",
    "variant",
    "initial",
    "lambda",
    "shift",
    "numerov_domain",
    "numerov_mesh",
    "oracle_potential",
    "verify_tolerance",
    "output",
];

/// Parses `-12`, `3/4`, `0.125`, `-1.5e-3` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ConfigError> {
    let s = text.trim();
    let bad = || ConfigError(format!("`{text}` is not an exact number"));
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = exponent - frac.len() as i32;
    let mut numer = format!("{sign}{int}{frac}");
    let mut denom = String::from("1");
    if scale >= 0 {
        numer.extend(std::iter::repeat_n('0', scale as usize));
    } else {
        denom.extend(std::iter::repeat_n('0', (-scale) as usize));
    }
    Rational::from_str(&format!("{numer}/{denom}")).map_err(|_| bad())
}

fn parse_list(text: &str) -> Result<Vec<Rational>, ConfigError> {
    text.split(',').map(parse_rational).collect()
}

fn parse_poly(text: &str) -> Result<Poly<Rational>, ConfigError> {
    Ok(Poly::new(parse_list(text)?))
}

fn parse_pair(key: &str, text: &str) -> Result<(Rational, Rational), ConfigError> {
    match parse_list(text)?.as_slice() {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => err(format!("`{key}` needs exactly two numbers")),
    }
}

fn parse_usize(key: &str, text: &str) -> Result<usize, ConfigError> {
    text.trim().parse().map_err(|_| ConfigError(format!("`{key}` needs a non-negative integer, got `{text}`")))
}

fn write_list(values: &[Rational]) -> String {
    if values.is_empty() {
        return "0".into();
    }
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn write_poly(p: &Poly<Rational>) -> String {
    write_list(p.coeffs())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(&str, &str)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return err(format!("line {}: unknown key `{key}`", lineno + 1));
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return err(format!("line {}: duplicate key `{key}`", lineno + 1));
            }
            entries.push((key, value));
        }
        let get = |k: &str| entries.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);

        let mode: Mode = get("mode").ok_or_else(|| ConfigError("missing `mode`".into()))?.parse()?;

        let raw_given = ["p", "q", "q_lambda"].iter().any(|k| get(k).is_some());
        let source = match (get("potential"), raw_given) {
            (Some(_), true) => return err("give either `potential` or `p`/`q`, not both"),
            (None, false) => return err("missing `potential` (or `p` and `q`)"),
            (Some(v), false) => {
                let gauges = [get("gauge"), get("beta"), get("beta_candidates")];
                let gauge = match gauges {
                    [Some(s), None, None] => Gauge::Exponent(parse_poly(s)?),
                    [None, Some(b), None] => Gauge::Beta(parse_rational(b)?),
                    [None, None, Some(c)] => {
                        let list = parse_list(c)?;
                        if list.iter().any(|b| !b.is_positive()) {
                            return err("`beta_candidates` must be positive");
                        }
                        Gauge::Tune(list)
                    }
                    [None, None, None] => Gauge::Exponent(Poly::zero()),
                    _ => return err("give at most one of `gauge`, `beta`, `beta_candidates`"),
                };
                Source::Potential { potential: parse_poly(v)?, gauge }
            }
            (None, true) => {
                if ["gauge", "beta", "beta_candidates"].iter().any(|k| get(k).is_some()) {
                    return err("gauge keys apply only to `potential` problems");
                }
                let p = parse_poly(get("p").ok_or_else(|| ConfigError("missing `p`".into()))?)?;
                let q = parse_poly(get("q").ok_or_else(|| ConfigError("missing `q`".into()))?)?;
                let q_lambda = get("q_lambda").map(parse_poly).transpose()?.unwrap_or_else(Poly::zero);
                Source::Raw { p, q, q_lambda }
            }
        };

        let rational = |k: &str, default: Rational| -> Result<Rational, ConfigError> {
            get(k).map(parse_rational).transpose().map(|v| v.unwrap_or(default))
        };
        let count = |k: &str, default: usize| -> Result<usize, ConfigError> {
            get(k).map(|v| parse_usize(k, v)).transpose().map(|v| v.unwrap_or(default))
        };

        let cfg = ProblemConfig {
            mode,
            source,
            x0: rational("x0", Rational::zero())?,
            n_min: count("n_min", 1)?,
            n_max: count("n_max", 30)?,
            precision_bits: count("precision_bits", 256)?
                .try_into()
                .map_err(|_| ConfigError("`precision_bits` is too large".into()))?,
            window: get("window").map(|v| parse_pair("window", v)).transpose()?.unwrap_or((Rational::zero(), Rational::from_integer(10.into()))),
            scan_step: rational("scan_step", Rational::new(1.into(), 2.into()))?,
            tolerance: rational("tolerance", parse_rational("1e-10")?)?,
            depth_stride: count("depth_stride", 2)?,
            probe_depths: match get("probe_depths") {
                Some(v) if v.trim() != "auto" => v.split(',').map(|d| parse_usize("probe_depths", d)).collect::<Result<_, _>>()?,
                _ => Vec::new(),
            },
            level: count("level", 0)?,
            variant: get("variant").unwrap_or("v1").parse().map_err(|e: aim_core::error::Error| ConfigError(e.to_string()))?,
            initial: get("initial").unwrap_or("aim").parse().map_err(|e: aim_core::error::Error| ConfigError(e.to_string()))?,
            lambda: get("lambda").map(parse_rational).transpose()?,
            shift: rational("shift", Rational::one())?,
            numerov_domain: get("numerov_domain")
                .map(|v| parse_pair("numerov_domain", v))
                .transpose()?
                .unwrap_or((Rational::from_integer((-8).into()), Rational::from_integer(8.into()))),
            numerov_mesh: count("numerov_mesh", 4000)?,
            oracle_potential: get("oracle_potential").map(parse_poly).transpose()?,
            verify_tolerance: rational("verify_tolerance", parse_rational("1e-6")?)?,
            output: get("output").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_max == 0 || self.n_min == 0 || self.n_min > self.n_max {
            return err(format!("need 1 <= n_min <= n_max, got n_min = {}, n_max = {}", self.n_min, self.n_max));
        }
        if self.precision_bits < 32 {
            return err("`precision_bits` must be at least 32");
        }
        if self.window.1 <= self.window.0 {
            return err("`window` must be increasing");
        }
        if !self.scan_step.is_positive() || !self.tolerance.is_positive() || !self.verify_tolerance.is_positive() {
            return err("`scan_step`, `tolerance` and `verify_tolerance` must be positive");
        }
        if self.depth_stride == 0 {
            return err("`depth_stride` must be positive");
        }
        if self.numerov_mesh < 100 || self.numerov_domain.1 <= self.numerov_domain.0 {
            return err("Numerov needs `numerov_mesh` >= 100 and an increasing `numerov_domain`");
        }
        if self.probe_depths.iter().any(|&d| d == 0 || d > self.n_max) || self.probe_depths.windows(2).any(|w| w[0] >= w[1]) {
            return err("`probe_depths` must increase within 1..=n_max");
        }
        let is_raw = matches!(self.source, Source::Raw { .. });
        match self.mode {
            Mode::Verify if is_raw => return err("verify needs a `potential` for the Numerov oracle"),
            Mode::ShiftDemo => {
                let Source::Raw { p, q, q_lambda } = &self.source else {
                    return err("shift-demo needs constant `p` and `q`");
                };
                if !p.is_constant() || !q.is_constant() || !q_lambda.is_zero() {
                    return err("shift-demo needs constant `p` and `q` without `q_lambda`");
                }
            }
            Mode::Riccati if self.lambda.is_none() && self.has_lambda() => {
                return err("riccati mode needs `lambda` to bind the spectral parameter");
            }
            _ => {}
        }
        if self.initial == Initial::Custom {
            return err("`initial` must be aim, ones or gauged");
        }
        if self.oracle_potential.is_some() && self.mode != Mode::Verify {
            return err("`oracle_potential` is only used by verify");
        }
        Ok(())
    }

    fn has_lambda(&self) -> bool {
        match &self.source {
            Source::Potential { .. } => true,
            Source::Raw { q_lambda, .. } => !q_lambda.is_zero(),
        }
    }

    /// Canonical text: every key, fixed order, rationals in lowest terms.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("mode = {}", self.mode.as_str())];
        match &self.source {
            Source::Potential { potential, gauge } => {
                lines.push(format!("potential = {}", write_poly(potential)));
                lines.push(match gauge {
                    Gauge::Exponent(s) => format!("gauge = {}", write_poly(s)),
                    Gauge::Beta(b) => format!("beta = {b}"),
                    Gauge::Tune(list) => format!("beta_candidates = {}", write_list(list)),
                });
            }
            Source::Raw { p, q, q_lambda } => {
                lines.push(format!("p = {}", write_poly(p)));
                lines.push(format!("q = {}", write_poly(q)));
                lines.push(format!("q_lambda = {}", write_poly(q_lambda)));
            }
        }
        lines.push(format!("x0 = {}", self.x0));
        lines.push(format!("n_min = {}", self.n_min));
        lines.push(format!("n_max = {}", self.n_max));
        lines.push(format!("precision_bits = {}", self.precision_bits));
        lines.push(format!("window = {}, {}", self.window.0, self.window.1));
        lines.push(format!("scan_step = {}", self.scan_step));
        lines.push(format!("tolerance = {}", self.tolerance));
        lines.push(format!("depth_stride = {}", self.depth_stride));
        if self.probe_depths.is_empty() {
            lines.push("probe_depths = auto".into());
        } else {
            let d: Vec<String> = self.probe_depths.iter().map(|d| d.to_string()).collect();
            lines.push(format!("probe_depths = {}", d.join(", ")));
        }
        lines.push(format!("level = {}", self.level));
        lines.push(format!("variant = {}", self.variant));
        lines.push(format!("initial = {}", self.initial));
        if let Some(l) = &self.lambda {
            lines.push(format!("lambda = {l}"));
        }
        lines.push(format!("shift = {}", self.shift));
        lines.push(format!("numerov_domain = {}, {}", self.numerov_domain.0, self.numerov_domain.1));
        lines.push(format!("numerov_mesh = {}", self.numerov_mesh));
        if let Some(v) = &self.oracle_potential {
            lines.push(format!("oracle_potential = {}", write_poly(v)));
        }
        lines.push(format!("verify_tolerance = {}", self.verify_tolerance));
        if let Some(o) = &self.output {
            lines.push(format!("output = {}", o.display()));
        }
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }

    /// Depths used for tuning and traces.
    pub fn probes(&self) -> Vec<usize> {
        if !self.probe_depths.is_empty() {
            return self.probe_depths.clone();
        }
        let step = 10usize.max(self.depth_stride);
        let mut d: Vec<usize> = (1..).map(|k| k * step).take_while(|&d| d < self.n_max).collect();
        d.push(self.n_max);
        d
    }

    /// Digits after the point for energies: enough for the tolerance plus two guard digits.
    pub fn energy_decimals(&self) -> usize {
        let tol = to_f64(&self.tolerance);
        (-tol.log10()).ceil().max(0.0) as usize + 2
    }
}
