//! Independent ground truth: closed forms for constant coefficients, the
//! Hermite table, and a double-precision Numerov eigensolver.

mod closed_form;
mod hermite;
mod numerov;

pub use closed_form::{constant_coeff_closed_form, ClosedFormConstants, Pair};
pub use hermite::{hermite_defect, hermite_table};
pub use numerov::{numerov_eigen, numerov_level, numerov_levels, NumerovConfig, NumerovResult};
