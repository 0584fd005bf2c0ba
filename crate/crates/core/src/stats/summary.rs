use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{holm, wilcoxon_signed_rank, StatsError, TestResult};

/// Significance level for dominance flags.
pub const ALPHA: f64 = 0.05;

/// One finished (or failed) benchmark cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub solver: String,
    pub seed: u64,
    /// `None` for a failed cell.
    pub fitness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub solver: String,
    /// Successful seeds.
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1).
    pub std: f64,
    pub best: f64,
    pub worst: f64,
    /// Fewer than two seeds; excluded from tests.
    pub insufficient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub other: String,
    pub pairs: usize,
    pub test: Result<TestResult, StatsError>,
    pub p_holm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSummary {
    pub problem: String,
    pub cells: Vec<CellStats>,
    /// Lowest mean among sufficient cells.
    pub winner: Option<String>,
    /// Winner against every other sufficient solver, Holm-adjusted together.
    pub comparisons: Vec<Comparison>,
    /// Every comparison is valid with adjusted p below [`ALPHA`].
    pub dominant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub problems: Vec<ProblemSummary>,
}

/// Problems and solvers keep their first-appearance order.
pub fn build_summary(records: &[RunRecord]) -> Summary {
    let mut problems: Vec<&str> = Vec::new();
    for r in records {
        if !problems.contains(&r.problem.as_str()) {
            problems.push(&r.problem);
        }
    }
    let problems = problems
        .into_iter()
        .map(|p| summarize_problem(p, records.iter().filter(|r| r.problem == p)))
        .collect();
    Summary { problems }
}

fn summarize_problem<'a>(
    problem: &str,
    records: impl Iterator<Item = &'a RunRecord>,
) -> ProblemSummary {
    let mut solvers: Vec<&str> = Vec::new();
    let mut by_solver: BTreeMap<&str, BTreeMap<u64, f64>> = BTreeMap::new();
    for r in records {
        if !solvers.contains(&r.solver.as_str()) {
            solvers.push(&r.solver);
        }
        let entry = by_solver.entry(&r.solver).or_default();
        if let Some(f) = r.fitness.filter(|f| f.is_finite()) {
            entry.insert(r.seed, f);
        }
    }

    let cells: Vec<CellStats> = solvers
        .iter()
        .map(|s| cell_stats(s, by_solver[s].values().copied().collect()))
        .collect();

    let mut winner: Option<&CellStats> = None;
    for c in cells.iter().filter(|c| !c.insufficient) {
        if winner.is_none_or(|w| c.mean < w.mean) {
            winner = Some(c);
        }
    }
    let Some(winner) = winner.map(|w| w.solver.clone()) else {
        return ProblemSummary {
            problem: problem.into(),
            cells,
            winner: None,
            comparisons: Vec::new(),
            dominant: false,
        };
    };

    let win_runs = &by_solver[winner.as_str()];
    let mut comparisons: Vec<Comparison> = cells
        .iter()
        .filter(|c| !c.insufficient && c.solver != winner)
        .map(|c| {
            let other = &by_solver[c.solver.as_str()];
            let diffs: Vec<f64> = win_runs
                .iter()
                .filter_map(|(seed, a)| other.get(seed).map(|b| a - b))
                .collect();
            let test = if diffs.is_empty() {
                Err(StatsError::DegenerateSample)
            } else {
                wilcoxon_signed_rank(&diffs)
            };
            Comparison {
                other: c.solver.clone(),
                pairs: diffs.len(),
                test,
                p_holm: None,
            }
        })
        .collect();

    let raw: Vec<f64> = comparisons
        .iter()
        .filter_map(|c| c.test.as_ref().ok().map(|t| t.p_value))
        .collect();
    let mut adjusted = holm(&raw).into_iter();
    for c in &mut comparisons {
        if c.test.is_ok() {
            c.p_holm = adjusted.next();
        }
    }
    let dominant = !comparisons.is_empty()
        && comparisons
            .iter()
            .all(|c| c.p_holm.is_some_and(|p| p < ALPHA));

    ProblemSummary {
        problem: problem.into(),
        cells,
        winner: Some(winner),
        comparisons,
        dominant,
    }
}

fn cell_stats(solver: &str, values: Vec<f64>) -> CellStats {
    let n = values.len();
    if n == 0 {
        return CellStats {
            solver: solver.into(),
            n,
            mean: f64::NAN,
            std: f64::NAN,
            best: f64::NAN,
            worst: f64::NAN,
            insufficient: true,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64)
    } else {
        0.0
    };
    CellStats {
        solver: solver.into(),
        n,
        mean,
        std,
        best: values.iter().copied().fold(f64::INFINITY, f64::min),
        worst: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        insufficient: n < 2,
    }
}
