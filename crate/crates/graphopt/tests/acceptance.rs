//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when a criterion outside `KNOWN_RED` fails.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use graphopt::specjson::{render_spec, spec_to_json};
use graphopt::{run_matrix, BenchConfig, BenchReport};
use graphopt_core::graph::{NodeId, PropertyGraph};
use graphopt_core::oracle::{solve_transportation, TransportationInstance};
use graphopt_core::problem::{DecisionSpace, EvalError, Fitness, Objective};
use graphopt_core::props;
use graphopt_core::rng::Stream;
use graphopt_core::solver::{propose, run, Guides, Population, SolverConfig, Variant};
use graphopt_core::stats::{holm, wilcoxon_signed_rank};
use graphopt_core::suite::{generate, regional_pattern_a, OracleOutcome, ProblemId, Scale};

// Criterion 1
const HIT_REPETITIONS: u64 = 20;
const HIT_SEEDS: usize = 3;
const HIT_POPULATION: usize = 30;
const HIT_ITERATIONS: usize = 300;
const HIT_RATE: f64 = 0.95;
const HIT_TOLERANCE: f64 = 0.0;
const HIT_BUDGET: Duration = Duration::from_secs(60);
// Criterion 2
const GAP_LOW: f64 = 1.0;
const GAP_HIGH: f64 = 3.0;
const GAP_BUDGET: Duration = Duration::from_secs(120);
// Criterion 3
const BENCH_BUDGET: Duration = Duration::from_secs(600);
const BENCH_CELLS: usize = 5 * 7 * 30;
// Criterion 4
const AB_VECTORS: usize = 1000;
const AB_TOLERANCE: f64 = 1e-9;
// Criterion 6
const INVARIANT_DRAWS: usize = 100;
const INVARIANT_POPULATION: usize = 10;
const INVARIANT_ITERATIONS: usize = 25;
// Criterion 7
const DATA_MAX: i64 = 5;
const MAX_ROWS: usize = 4;
const MAX_COLS: usize = 3;
/// Shapes with at most this many data values are swept completely.
const SWEEP_VALUES: usize = 8;
const SAMPLED_PER_SHAPE: usize = 3000;
const COST_TOLERANCE: f64 = 1e-9;
const ROAD_GRAPHS: usize = 100;
const ROAD_NODES: usize = 200;
const PATH_TOLERANCE: f64 = 1e-9;

/// Criteria expected to fail. Their FAIL line is reported but does not fail
/// the run.
const KNOWN_RED: &[u32] = &[];

type Criterion = (u32, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "oracle hits on P2/P4", oracle_hits),
        (2, "gap to the exact reference", gaps),
        (3, "default bench and statistics", default_bench),
        (4, "pattern A/B equivalence", pattern_equivalence),
        (5, "degeneracy detection", degeneracy),
        (6, "solver invariants", solver_invariants),
        (7, "exact oracle correctness", exact_oracles),
        (8, "spec.json contract", spec_contract),
    ];
    let mut unexpected = 0;
    for (n, name, check) in criteria {
        let started = Instant::now();
        let v = check();
        let secs = started.elapsed().as_secs_f64();
        let status = if v.pass { "PASS" } else { "FAIL" };
        let note = match (v.pass, KNOWN_RED.contains(&n)) {
            (false, true) => " (known red)",
            (false, false) => {
                unexpected += 1;
                ""
            }
            _ => "",
        };
        println!(
            "criterion {n} {status}{note}: {name} [{secs:.1}s] {}",
            v.detail
        );
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn bench(problems: &[ProblemId], seeds: usize, master: u64) -> BenchReport {
    let config = BenchConfig {
        problems: problems.to_vec(),
        seeds,
        master_seed: master,
        population: HIT_POPULATION,
        iterations: HIT_ITERATIONS,
        degeneracy_samples: 0,
        timing: false,
        ..BenchConfig::default()
    };
    run_matrix(&config).expect("bench run")
}

fn oracle_hits() -> Verdict {
    let started = Instant::now();
    let problems = [ProblemId::P2, ProblemId::P4];
    let mut hits = [0u64; 2];
    for master in 0..HIT_REPETITIONS {
        let report = bench(&problems, HIT_SEEDS, master);
        for (slot, gap) in report.gaps.iter().enumerate() {
            let opt = gap.oracle.as_ref().ok().and_then(OracleOutcome::value);
            if let (Some(best), Some(opt)) = (gap.best_fitness, opt) {
                if (best - opt).abs() <= HIT_TOLERANCE {
                    hits[slot] += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let need = (HIT_RATE * HIT_REPETITIONS as f64).ceil() as u64;
    let pass = hits.iter().all(|&h| h >= need) && elapsed < HIT_BUDGET;
    verdict(
        pass,
        format!(
            "P2 {}/{n}, P4 {}/{n} (need {need}/{n}), {:.1}s of {}s",
            hits[0],
            hits[1],
            elapsed.as_secs_f64(),
            HIT_BUDGET.as_secs(),
            n = HIT_REPETITIONS
        ),
    )
}

fn gaps() -> Verdict {
    let started = Instant::now();
    let report = bench(&[ProblemId::P3, ProblemId::P7], HIT_SEEDS, 0);
    let elapsed = started.elapsed();
    let p3 = &report.gaps[0];
    let p7 = &report.gaps[1];
    let p3_ok = p3.ratio.is_some_and(|r| (GAP_LOW..=GAP_HIGH).contains(&r))
        && p3.annotation.contains("soft")
        && p3
            .annotation
            .contains("oracle enforces constraints exactly");
    let p7_below = p7.ratio.is_some_and(|r| r < 1.0);
    let p7_ok = p7.ratio.is_some()
        && p7.annotation.contains("soft")
        && (!p7_below || p7.annotation.contains("the oracle is the answer to deploy"));
    let pass = p3_ok && p7_ok && elapsed < GAP_BUDGET;
    let md = graphopt::report::summary_md(&report);
    let annotated = md.contains(&p3.annotation) && md.contains(&p7.annotation);
    verdict(
        pass && annotated,
        format!(
            "P3 {:.4}x, P7 {:.4}x, annotations in summary.md: {annotated}",
            p3.ratio.unwrap_or(f64::NAN),
            p7.ratio.unwrap_or(f64::NAN)
        ),
    )
}

fn default_bench() -> Verdict {
    let pins = [
        wilcoxon_signed_rank(&[1.0, 2.0, 3.0]).map(|t| t.p_value) == Ok(0.25),
        wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0]).map(|t| t.p_value) == Ok(0.0625),
        holm(&[0.01, 0.04, 0.03]) == [0.03, 0.06, 0.06],
    ];
    let config = BenchConfig {
        timing: false,
        ..BenchConfig::default()
    };
    let started = Instant::now();
    let report = run_matrix(&config).expect("default bench");
    let elapsed = started.elapsed();
    let failed = report.cells.iter().filter(|c| c.outcome.is_err()).count();
    let flagged = report.summary.problems.len() == 7
        && report.summary.problems.iter().all(|p| {
            p.winner.is_some()
                && p.comparisons.len() == 4
                && p.comparisons
                    .iter()
                    .all(|c| c.p_holm.is_some() || c.test.is_err())
        });
    let dominant = report
        .summary
        .problems
        .iter()
        .filter(|p| p.dominant)
        .count();
    let pass = pins.iter().all(|&b| b)
        && report.cells.len() == BENCH_CELLS
        && failed == 0
        && flagged
        && elapsed < BENCH_BUDGET;
    verdict(
        pass,
        format!(
            "{} cells in {:.1}s, {failed} failed, {dominant}/7 problems with a dominant solver, \
             hand examples {pins:?}",
            report.cells.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn pattern_equivalence() -> Verdict {
    let inst = generate(ProblemId::P2, Scale::Small, 0).expect("P2");
    let mut b = inst.objective();
    let mut a = regional_pattern_a(&inst).expect("pattern A");
    let space = inst.space().clone();
    let mut rng = Stream::new(4, 0);
    let xs: Vec<Vec<f64>> = (0..AB_VECTORS)
        .map(|_| {
            space
                .lower()
                .iter()
                .zip(space.upper())
                .map(|(&l, &u)| rng.range(l, u))
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for x in &xs {
        let fa = a.evaluate(x).expect("A").total;
        let fb = b.evaluate(x).expect("B").total;
        worst = worst.max((fa - fb).abs());
    }
    let executions = a.query_executions();
    for x in &xs {
        a.evaluate(x).expect("A again");
    }
    let extra = a.query_executions() - executions;
    verdict(
        worst <= AB_TOLERANCE && extra == 0,
        format!(
            "{AB_VECTORS} vectors, max |A - B| = {worst:e}, {extra} query executions on re-evaluation"
        ),
    )
}

fn degeneracy() -> Verdict {
    let inspect = |strip: bool| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_graphopt"));
        cmd.args(["inspect-degeneracy", "--problem", "P4"]);
        if strip {
            cmd.arg("--strip-regions");
        }
        let out = cmd.output().expect("run graphopt");
        let text = String::from_utf8_lossy(&out.stdout).into_owned();
        let flagged = text
            .lines()
            .any(|l| l.starts_with("| region_diversity |") && l.contains("DEGENERATE"));
        (out.status.success(), flagged)
    };
    let (ok_stripped, stripped) = inspect(true);
    let (ok_healthy, healthy) = inspect(false);
    verdict(
        ok_stripped && ok_healthy && stripped && !healthy,
        format!("stripped flagged: {stripped}, healthy flagged: {healthy}"),
    )
}

/// Counts evaluations outside the box.
struct Checked<O> {
    inner: O,
    outside: usize,
}

impl<O: Objective> Objective for Checked<O> {
    fn space(&self) -> &DecisionSpace {
        self.inner.space()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        if !self.inner.space().contains(x) {
            self.outside += 1;
        }
        self.inner.evaluate(x)
    }

    fn memo_hits(&self) -> u64 {
        self.inner.memo_hits()
    }
}

fn solver_invariants() -> Verdict {
    let mut rng = Stream::new(6, 0);
    let (mut runs, mut outside, mut rising, mut drift, mut moved) = (0, 0, 0, 0, 0);
    for variant in Variant::ALL {
        for _ in 0..INVARIANT_DRAWS {
            let id = ProblemId::ALL[rng.below(ProblemId::ALL.len())];
            let inst = generate(id, Scale::Small, rng.next_u64() % 10_000).expect("instance");
            let config = SolverConfig::new(
                variant,
                INVARIANT_POPULATION,
                INVARIANT_ITERATIONS,
                rng.next_u64(),
            );
            let mut obj = Checked {
                inner: inst.objective(),
                outside: 0,
            };
            let first = run(&mut obj, &config).expect("run");
            let second = run(&mut inst.objective(), &config).expect("rerun");
            runs += 1;
            outside += obj.outside;
            rising += first.curve.windows(2).filter(|w| w[1] > w[0]).count();
            if first != second || first.best_x.to_bits_vec() != second.best_x.to_bits_vec() {
                drift += 1;
            }
            moved += rao1_moves(inst.objective(), &mut rng);
        }
    }
    verdict(
        outside + rising + drift + moved == 0,
        format!(
            "{runs} runs: {outside} out-of-box points, {rising} rising curve steps, \
             {drift} non-identical reruns, {moved} Rao1 moves off a converged population"
        ),
    )
}

trait ToBits {
    fn to_bits_vec(&self) -> Vec<u64>;
}

impl ToBits for Vec<f64> {
    fn to_bits_vec(&self) -> Vec<u64> {
        self.iter().map(|v| v.to_bits()).collect()
    }
}

/// Proposals from a population of identical members must return the member.
fn rao1_moves<O: Objective>(mut obj: O, rng: &mut Stream) -> usize {
    let space = obj.space().clone();
    let x: Vec<f64> = space
        .lower()
        .iter()
        .zip(space.upper())
        .map(|(&l, &u)| rng.range(l, u))
        .collect();
    let f = obj.evaluate(&x).expect("evaluate");
    let pop = Population::new(vec![(x.clone(), f); INVARIANT_POPULATION]);
    let guides = Guides {
        best: pop.best(),
        worst: pop.worst(),
    };
    let mut out = vec![0.0; x.len()];
    (0..pop.len())
        .filter(|&i| {
            propose(Variant::Rao1, &pop, i, &guides, &space, rng, &mut out);
            out.to_bits_vec() != x.to_bits_vec()
        })
        .count()
}

/// Minimum cost over integer flows that ship every supply, or `None` when
/// capacities fall short.
fn enumerate_transport(cost: &[Vec<i64>], supply: &[i64], capacity: &[i64]) -> Option<i64> {
    fn row(
        cost: &[Vec<i64>],
        supply: &[i64],
        left: &mut [i64],
        i: usize,
        spent: i64,
        best: &mut Option<i64>,
    ) {
        if i == supply.len() {
            *best = Some(best.map_or(spent, |b| b.min(spent)));
            return;
        }
        split(cost, supply, left, i, 0, supply[i], spent, best);
    }
    #[allow(clippy::too_many_arguments)]
    fn split(
        cost: &[Vec<i64>],
        supply: &[i64],
        left: &mut [i64],
        i: usize,
        j: usize,
        rest: i64,
        spent: i64,
        best: &mut Option<i64>,
    ) {
        if j == left.len() {
            if rest == 0 {
                row(cost, supply, left, i + 1, spent, best);
            }
            return;
        }
        for q in 0..=rest.min(left[j]) {
            left[j] -= q;
            split(
                cost,
                supply,
                left,
                i,
                j + 1,
                rest - q,
                spent + q * cost[i][j],
                best,
            );
            left[j] += q;
        }
    }
    let mut best = None;
    row(cost, supply, &mut capacity.to_vec(), 0, 0, &mut best);
    best
}

/// Compares the flow solver with enumeration on one instance laid out as
/// costs (row-major), then supplies, then capacities.
fn transport_agrees(rows: usize, cols: usize, data: &[i64]) -> bool {
    let cost: Vec<Vec<i64>> = data[..rows * cols]
        .chunks(cols)
        .map(<[i64]>::to_vec)
        .collect();
    let supply = &data[rows * cols..rows * cols + rows];
    let capacity = &data[rows * cols + rows..];
    let expected = enumerate_transport(&cost, supply, capacity);
    let as_f = |v: &[i64]| v.iter().map(|&q| q as f64).collect::<Vec<f64>>();
    let got = TransportationInstance::new(
        cost.iter().map(|r| as_f(r)).collect(),
        as_f(supply),
        as_f(capacity),
    )
    .ok()
    .map(|inst| solve_transportation(&inst).expect("solvable").cost);
    match (expected, got) {
        (None, None) => true,
        (Some(e), Some(g)) => (e as f64 - g).abs() <= COST_TOLERANCE,
        _ => false,
    }
}

fn bellman_ford(n: usize, edges: &[(usize, usize, f64)], src: usize) -> Vec<Option<f64>> {
    let mut dist = vec![None; n];
    dist[src] = Some(0.0);
    for _ in 0..n {
        let mut changed = false;
        for &(a, b, w) in edges {
            if let Some(da) = dist[a] {
                let c: f64 = da + w;
                if dist[b].is_none_or(|db| c < db) {
                    dist[b] = Some(c);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn exact_oracles() -> Verdict {
    let mut swept = 0u64;
    let mut sampled = 0u64;
    let mut wrong = 0u64;
    let mut swept_shapes = String::new();
    let mut rng = Stream::new(7, 0);
    for rows in 1..=MAX_ROWS {
        for cols in 1..=MAX_COLS {
            let len = rows * cols + rows + cols;
            let mut data = vec![0i64; len];
            if len <= SWEEP_VALUES {
                let _ = write!(swept_shapes, " {rows}x{cols}");
                loop {
                    swept += 1;
                    wrong += u64::from(!transport_agrees(rows, cols, &data));
                    let Some(pos) = data.iter().position(|&d| d < DATA_MAX) else {
                        break;
                    };
                    data[..pos].iter_mut().for_each(|d| *d = 0);
                    data[pos] += 1;
                }
            } else {
                for _ in 0..SAMPLED_PER_SHAPE {
                    for d in &mut data {
                        *d = rng.below(DATA_MAX as usize + 1) as i64;
                    }
                    sampled += 1;
                    wrong += u64::from(!transport_agrees(rows, cols, &data));
                }
            }
        }
    }

    let mut path_wrong = 0;
    for _ in 0..ROAD_GRAPHS {
        let n = 1 + rng.below(ROAD_NODES);
        let edges: Vec<(usize, usize, f64)> = (0..rng.below(4 * n + 1))
            .map(|_| (rng.below(n), rng.below(n), rng.range(0.0, 50.0)))
            .collect();
        let mut g = PropertyGraph::new();
        for i in 0..n {
            g.add_node(["Junction"], props! {"id" => i as i64})
                .expect("node");
        }
        for &(a, b, w) in &edges {
            g.add_edge(NodeId(a), "ROAD", NodeId(b), props! {"w" => w})
                .expect("edge");
        }
        g.freeze();
        let src = rng.below(n);
        let d = g.dijkstra(NodeId(src), "w", "ROAD").expect("dijkstra");
        let bf = bellman_ford(n, &edges, src);
        let same = d.iter().zip(&bf).all(|(x, y)| match (x, y) {
            (None, None) => true,
            (Some(x), Some(y)) => (x - y).abs() <= PATH_TOLERANCE * x.abs().max(1.0),
            _ => false,
        });
        path_wrong += usize::from(!same);
    }
    verdict(
        wrong == 0 && path_wrong == 0,
        format!(
            "transport: {swept} swept ({}) + {sampled} sampled from larger shapes up to \
             {MAX_ROWS}x{MAX_COLS}, {wrong} discrepancies; paths: {ROAD_GRAPHS} graphs, \
             {path_wrong} discrepancies",
            swept_shapes.trim()
        ),
    )
}

fn spec_contract() -> Verdict {
    let attested: [(ProblemId, &[&str]); 5] = [
        (ProblemId::P1, &["candidates", "targets"]),
        (ProblemId::P2, &["facilities", "countries", "trial_counts"]),
        (ProblemId::P3, &["distance_km"]),
        (ProblemId::P4, &["names", "regions"]),
        (
            ProblemId::P7,
            &["n_centroids", "n_exits", "pop", "capacity", "travel_time"],
        ),
    ];
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut bad = Vec::new();
    for (id, keys) in attested {
        let inst = generate(id, Scale::Small, 7).expect("instance");
        let path = dir.join(format!("{}.spec.json", inst.slug()));
        let golden = fs::read_to_string(&path).unwrap_or_default();
        let json = spec_to_json(&inst.spec);
        let object = json.as_object().expect("object");
        if render_spec(&inst.spec) != golden || !keys.iter().all(|k| object.contains_key(*k)) {
            bad.push(id.code());
        }
    }
    verdict(
        bad.is_empty(),
        format!("5 golden files, mismatches: {bad:?}"),
    )
}
