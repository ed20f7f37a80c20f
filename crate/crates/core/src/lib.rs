pub mod aim;
pub mod algebra;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod riccati;
pub mod spectra;
