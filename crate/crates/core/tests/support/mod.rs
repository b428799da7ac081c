//! Independent recomputations shared by the integration tests.
//!
//! Everything here is written from the model equations directly, without
//! calling into the crate's econ functions.

#![allow(dead_code)]

pub mod episodes;
pub mod oracle;

/// `|a - b| <= tol * max(|b|, 1)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Relative error with an absolute floor of one.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
