//! Exact reference solvers for the benchmark problems: exhaustive subset
//! search, min-cost transportation and merit-order dispatch.

mod dispatch;
mod selection;
mod transport;

pub use dispatch::{
    merit_order_dispatch, DispatchError, DispatchInstance, DispatchSolution, Generator,
};
pub use selection::{
    binomial, brute_force_selection, SelectionError, SelectionOptimum, MAX_SUBSETS,
};
pub use transport::{
    solve_transportation, TransportError, TransportSolution, TransportationInstance,
};
