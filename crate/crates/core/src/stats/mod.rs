//! Paired Wilcoxon signed-rank tests, Holm adjustment and the per-problem
//! solver summary.

mod summary;
mod wilcoxon;

pub use summary::{
    build_summary, CellStats, Comparison, ProblemSummary, RunRecord, Summary, ALPHA,
};
pub use wilcoxon::{
    holm, wilcoxon_signed_rank, wilcoxon_with, Method, StatsError, TestResult, EXACT_LIMIT,
};
