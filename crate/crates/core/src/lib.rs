//! Variable-exponent Lebesgue spaces on `(0, ∞)` with the measure `dt/t`:
//! exponents, log grids, Luxemburg norms, power-weighted Hardy operators
//! and an experiment harness for their norm equivalences.

pub mod cli;
pub mod error;
pub mod exponent;
pub mod grid;
pub mod hardy;
pub mod lab;
pub mod lebesgue;

mod descriptor;

pub use error::{Error, Result};
