//! Instrumented simulator and library for the pointer-matrix Boolean
//! function: exact query accounting, a one-sided-error sublinear search
//! algorithm, a zero-error composition, adversarial instance generators,
//! and the statistical machinery to check the claimed scaling empirically.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod baseline;
pub mod certificate;
pub mod codec;
pub mod columns;
pub mod error;
pub mod instances;
pub mod matrix;
pub mod one_sided;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod zero_error;

pub use certificate::{verify_certificate, BrokenReason, Certificate};
pub use error::Error;
pub use matrix::{Cell, CellRef, Chain, Matrix};
pub use oracle::{OracleMode, QueryOracle, QueryStats};
pub use report::RunReport;
