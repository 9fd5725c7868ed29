//! Experiment runner for `optimist-core`.
//!
//! Reads flat `key = value` experiment files, plays seeded games on a worker
//! pool, evaluates every applicable regret bound and writes per-round CSV
//! tables, a JSON summary and SVG plots.

pub mod config;
pub mod error;
pub mod logio;
pub mod monotone_cmd;
pub mod report;
pub mod run;

pub use error::{HarnessError, Result};
