//! Matrix runner. Cells are independent: each owns a fresh binding and its
//! memo table, and results are collected in cell order, so a report does
//! not depend on the number of worker threads.

use std::time::Instant;

use graphopt_core::problem::Objective;
use graphopt_core::rng::Stream;
use graphopt_core::solver::{run, SolverConfig, Variant};
use graphopt_core::stats::{build_summary, RunRecord, Summary};
use graphopt_core::suite::{
    detect_degenerate_terms, generate_with, inject_disruption, strip_regions, DegeneracyReport,
    DisruptionSpec, Instance, OracleOutcome, ProblemId,
};
use rayon::prelude::*;

use crate::{BenchConfig, Error};

/// `count` solver seeds drawn from the master seed. Every variant uses the
/// same list, which pairs runs by seed for the signed-rank tests.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut s = Stream::new(master, 0);
    (0..count).map(|_| s.next_u64()).collect()
}

pub fn build_instances(config: &BenchConfig) -> Result<Vec<Instance>, Error> {
    let seed = config.generation_seed();
    config
        .problems
        .iter()
        .map(|&id| {
            let mut inst = generate_with(id, config.scale, seed, &config.coefficients)?;
            if config.strip_regions && matches!(id, ProblemId::P2 | ProblemId::P4) {
                inst = strip_regions(&inst)?;
            }
            match DisruptionSpec::default_for(id, seed).filter(|_| config.disrupt) {
                Some(d) => Ok(inject_disruption(&inst, d)?),
                None => Ok(inst),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRun {
    pub fitness: f64,
    pub evaluations: u64,
    pub memo_hits: u64,
    pub wall_ms: Option<f64>,
    /// Sum of violation degrees at the best point.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub problem: ProblemId,
    pub variant: Variant,
    pub seed: u64,
    pub outcome: Result<CellRun, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceReport {
    pub oracle: Result<OracleOutcome, String>,
    pub degeneracy: Option<Result<DegeneracyReport, String>>,
}

/// Best metaheuristic result for one problem against its exact reference.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub problem: ProblemId,
    pub best_solver: Option<Variant>,
    pub best_fitness: Option<f64>,
    pub oracle: Result<OracleOutcome, String>,
    pub ratio: Option<f64>,
    pub annotation: String,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub seeds: Vec<u64>,
    pub instances: Vec<Instance>,
    pub instance_reports: Vec<InstanceReport>,
    /// Problem-major, then variant, then seed.
    pub cells: Vec<CellResult>,
    pub summary: Summary,
    pub gaps: Vec<GapRow>,
}

impl BenchReport {
    pub fn records(&self) -> Vec<RunRecord> {
        records_of(&self.cells)
    }
}

fn records_of(cells: &[CellResult]) -> Vec<RunRecord> {
    cells
        .iter()
        .map(|c| RunRecord {
            problem: c.problem.code().into(),
            solver: c.variant.label().into(),
            seed: c.seed,
            fitness: c.outcome.as_ref().ok().map(|r| r.fitness),
        })
        .collect()
}

/// Ratio of best metaheuristic to oracle objective, oriented so that 1.0 is
/// a hit and larger is worse on either sign. `None` when the two values
/// straddle zero.
pub fn gap_ratio(best: f64, optimum: f64) -> Option<f64> {
    if best == optimum {
        Some(1.0)
    } else if optimum > 0.0 && best > 0.0 {
        Some(best / optimum)
    } else if optimum < 0.0 && best < 0.0 {
        Some(optimum / best)
    } else {
        None
    }
}

/// Constraint note for a gap row.
pub fn annotation(problem: ProblemId, ratio: Option<f64>) -> String {
    if !problem.has_soft_constraints() {
        return "hard constraints on both sides".into();
    }
    let mut s =
        String::from("soft: metaheuristic uses penalty terms, oracle enforces constraints exactly");
    if problem == ProblemId::P5 {
        s.push_str("; oracle relaxes ramp limits");
    }
    if ratio.is_some_and(|r| r < 1.0) {
        s.push_str(
            "; * below the oracle because soft penalties allow small constraint relaxation, \
             the oracle is the answer to deploy",
        );
    }
    s
}

pub fn run_cell(
    instance: &Instance,
    variant: Variant,
    seed: u64,
    config: &BenchConfig,
) -> CellResult {
    let solver = SolverConfig::new(variant, config.population, config.iterations, seed);
    let mut objective = instance.objective();
    let start = Instant::now();
    let outcome = run(&mut objective, &solver)
        .map(|r| CellRun {
            fitness: r.best.total,
            evaluations: r.evaluations,
            memo_hits: objective.memo_hits(),
            wall_ms: config.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
            violation: r.best.violation_terms.iter().map(|v| v.degree).sum(),
        })
        .map_err(|e| e.to_string());
    CellResult {
        problem: instance.id,
        variant,
        seed,
        outcome,
    }
}

pub fn run_matrix(config: &BenchConfig) -> Result<BenchReport, Error> {
    config.validate()?;
    let instances = build_instances(config)?;
    let seeds = derive_seeds(config.master_seed, config.seeds);
    let mut plan = Vec::with_capacity(config.cell_count());
    for p in 0..instances.len() {
        for &v in &config.variants {
            for &s in &seeds {
                plan.push((p, v, s));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()?;
    let (cells, instance_reports) = pool.install(|| {
        let cells: Vec<CellResult> = plan
            .par_iter()
            .map(|&(p, v, s)| run_cell(&instances[p], v, s, config))
            .collect();
        let reports: Vec<InstanceReport> = instances
            .par_iter()
            .map(|inst| InstanceReport {
                oracle: inst.solve_oracle().map_err(|e| e.to_string()),
                degeneracy: (config.degeneracy_samples > 0).then(|| {
                    detect_degenerate_terms(
                        &mut inst.objective(),
                        config.degeneracy_samples,
                        config.master_seed,
                    )
                    .map_err(|e| e.to_string())
                }),
            })
            .collect();
        (cells, reports)
    });

    let gaps = instances
        .iter()
        .zip(&instance_reports)
        .map(|(inst, rep)| gap_row(inst.id, &cells, &rep.oracle))
        .collect();
    let summary = build_summary(&records_of(&cells));
    Ok(BenchReport {
        config: config.clone(),
        seeds,
        instances,
        instance_reports,
        cells,
        summary,
        gaps,
    })
}

fn gap_row(
    problem: ProblemId,
    cells: &[CellResult],
    oracle: &Result<OracleOutcome, String>,
) -> GapRow {
    let mut best: Option<(Variant, f64)> = None;
    for c in cells.iter().filter(|c| c.problem == problem) {
        if let Ok(r) = &c.outcome {
            if best.is_none_or(|(_, f)| r.fitness < f) {
                best = Some((c.variant, r.fitness));
            }
        }
    }
    let optimum = oracle.as_ref().ok().and_then(OracleOutcome::value);
    let ratio = best.zip(optimum).and_then(|((_, b), o)| gap_ratio(b, o));
    GapRow {
        problem,
        best_solver: best.map(|b| b.0),
        best_fitness: best.map(|b| b.1),
        oracle: oracle.clone(),
        ratio,
        annotation: annotation(problem, ratio),
    }
}
