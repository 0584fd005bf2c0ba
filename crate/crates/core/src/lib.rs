//! Graph-grounded optimization core.
//!
//! Problems are grounded in a [`graph::PropertyGraph`]: decision variables,
//! constraints and objective coefficients come out of queries written in the
//! small language in [`query`]. [`problem`] turns those queries into fitness
//! functions, [`solver`] runs the Rao-family portfolio over them, [`oracle`]
//! provides exact references, [`suite`] generates the seven benchmark
//! problems and [`stats`] compares solvers.
//!
//! The crate is `no_std` (it needs `alloc`). IO, timing and the CLI live in
//! the `graphopt` crate.

#![cfg_attr(not(test), no_std)]
// `!(a <= b)` is used on purpose so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod graph;
pub mod oracle;
pub mod problem;
pub mod query;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod suite;
