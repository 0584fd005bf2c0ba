//! Benchmark harness and file formats on top of `graphopt-core`.
//!
//! [`bench::run_matrix`] runs a (problem x solver x seed) matrix in a worker
//! pool, [`report::emit_report`] writes `results.csv`, `summary.md`,
//! `summary.csv`, `degeneracy.md` and one `spec.json` per instance.

pub mod bench;
pub mod config;
pub mod error;
pub mod report;
pub mod specjson;

pub use bench::{run_matrix, BenchReport};
pub use config::BenchConfig;
pub use error::Error;
