pub mod commands;
pub mod config;

pub use commands::{dispatch, exit_code, CliError, Outcome};
pub use config::{ConfigError, Gauge, Mode, ProblemConfig, Source};
