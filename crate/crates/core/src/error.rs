use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A jet ran out of trustworthy Taylor coefficients.
    #[error("jet exhausted{}: no trustworthy coefficients left to differentiate", depth_suffix(.depth))]
    JetExhausted { depth: Option<usize> },

    #[error("jets expanded about different centers")]
    CenterMismatch,

    #[error("operands use incompatible configurations: {0}")]
    Configuration(String),

    #[error("value not representable in exact mode: {0}")]
    NotRepresentable(String),

    #[error("division by zero")]
    DivisionByZero,

    /// q_n/p_n requested where p_n vanishes at the expansion point.
    #[error("p_{n} vanishes at the expansion point; choose a shifted x0")]
    PoleAtExpansionPoint { n: usize },

    /// The Riccati ratio is singular at a grid node (zero of a polynomial solution).
    #[error("alpha has a pole at grid node {index} (x = {x})")]
    PoleOnGrid { index: usize, x: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("characteristic roots coincide (rho1 = rho2); the closed form is unsupported")]
    DegenerateRoots,

    #[error("invalid energy window: {0}")]
    InvalidWindow(String),

    /// The sign of delta_n can no longer be trusted at the working precision.
    #[error("sign change lost during refinement near E = {energy}; increase precision_bits (currently {precision_bits})")]
    SignChangeLost { energy: f64, precision_bits: u32 },

    #[error("no sign change in bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeCountMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),
}

fn depth_suffix(depth: &Option<usize>) -> String {
    match depth {
        Some(d) => format!(" at iteration depth {d}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
