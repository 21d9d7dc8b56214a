//! Analytics for two-narrative comment logs: who polarizes, how fast, and
//! how alike the platforms behave.
//!
//! The crate is organised as a pipeline over immutable datasets:
//!
//! * [`ingest`] parses and indexes comment-event logs,
//! * [`polarization`] scores users and tests the population for bimodality,
//! * [`tailstats`] fits power-law tails and compares exponents by MCMC,
//! * [`association`] builds rank-correlation matrices and runs Mantel tests,
//! * [`predictor`] classifies users from early commenting behaviour,
//! * [`synth`] generates seeded datasets with known ground truth.
//!
//! Every randomised routine takes an explicit seed and derives named
//! substreams from it, so identical inputs always produce identical output.

pub mod association;
mod error;
pub mod ingest;
pub mod polarization;
pub mod predictor;
pub mod seed;
pub mod synth;
pub mod tailstats;

pub use error::{Error, Result};
