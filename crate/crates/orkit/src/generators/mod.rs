//! Benchmark model families, parameterized by size and seed.
//!
//! All generators are pure functions of their configuration: repeated runs
//! produce identical models, and identical bytes once written. The only
//! random ingredient, the customer locations of the p-median family, is drawn
//! from a seeded ChaCha8 stream (`rand_chacha::ChaCha8Rng`), a named and
//! versioned generator that also supports stream splitting.

mod linear;
mod nonlinear;

pub use linear::{cont5_2, pmedian, Cont52Config, PMedianConfig};
pub use nonlinear::{clnlbeam, cont5_1, ClnlbeamConfig, Cont51Config};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
