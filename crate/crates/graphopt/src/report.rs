//! Report files. Everything except the `wall_ms` column is a pure function
//! of the configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use graphopt_core::stats::{Method, RunRecord, Summary};
use graphopt_core::suite::{DegeneracyReport, OracleOutcome, TermKind};
use serde::{Deserialize, Serialize};

use crate::bench::{BenchReport, GapRow};
use crate::specjson::write_spec;
use crate::Error;

/// One `results.csv` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub solver: String,
    pub seed: u64,
    pub fitness: Option<f64>,
    pub evals: Option<u64>,
    pub memo_hits: Option<u64>,
    pub wall_ms: Option<f64>,
    /// Empty unless the cell failed.
    pub error: String,
}

impl ResultRow {
    pub fn record(&self) -> RunRecord {
        RunRecord {
            problem: self.problem.clone(),
            solver: self.solver.clone(),
            seed: self.seed,
            fitness: self.fitness,
        }
    }
}

pub fn result_rows(report: &BenchReport) -> Vec<ResultRow> {
    report
        .cells
        .iter()
        .map(|c| {
            let ok = c.outcome.as_ref().ok();
            ResultRow {
                problem: c.problem.code().into(),
                solver: c.variant.label().into(),
                seed: c.seed,
                fitness: ok.map(|r| r.fitness),
                evals: ok.map(|r| r.evaluations),
                memo_hits: ok.map(|r| r.memo_hits),
                wall_ms: ok
                    .and_then(|r| r.wall_ms)
                    .map(|ms| (ms * 1e3).round() / 1e3),
                error: c.outcome.as_ref().err().cloned().unwrap_or_default(),
            }
        })
        .collect()
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV writes cannot fail");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, Error> {
    let csv_err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize()
        .collect::<Result<Vec<ResultRow>, _>>()
        .map_err(csv_err)
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "n/a".into()
    }
}

fn fmt_p(p: f64) -> String {
    if p >= 1e-3 {
        format!("{p:.4}")
    } else {
        format!("{p:.2e}")
    }
}

fn oracle_text(o: &Result<OracleOutcome, String>) -> String {
    match o {
        Ok(OracleOutcome::Optimum { method, value }) => format!("{} ({method})", fmt_num(*value)),
        Ok(OracleOutcome::Unavailable(why)) => why.clone(),
        Err(e) => format!("oracle failed: {e}"),
    }
}

/// Mean-fitness matrix and Holm-corrected comparisons of each winner.
pub fn summary_tables(summary: &Summary, out: &mut String) {
    let mut solvers: Vec<&str> = Vec::new();
    for p in &summary.problems {
        for c in &p.cells {
            if !solvers.contains(&c.solver.as_str()) {
                solvers.push(&c.solver);
            }
        }
    }
    out.push_str("## Mean fitness per solver\n\n| problem |");
    for s in &solvers {
        let _ = write!(out, " {s} |");
    }
    out.push_str(" winner | winner vs all sig.? |\n|---|");
    out.push_str(&"---|".repeat(solvers.len() + 2));
    out.push('\n');
    for p in &summary.problems {
        let _ = write!(out, "| {} |", p.problem);
        for s in &solvers {
            match p.cells.iter().find(|c| c.solver == *s) {
                Some(c) if c.insufficient => out.push_str(" insufficient |"),
                Some(c) => {
                    let _ = write!(out, " {} ± {} |", fmt_num(c.mean), fmt_num(c.std));
                }
                None => out.push_str(" |"),
            }
        }
        let winner = p.winner.as_deref().unwrap_or("none");
        let dominant = if p.dominant { "yes" } else { "no" };
        let _ = writeln!(out, " {winner} | {dominant} |");
    }

    out.push_str("\n## Holm-corrected Wilcoxon signed-rank tests\n\n");
    out.push_str("| problem | winner | vs | pairs | W | p | method | p (Holm) |\n|---|---|---|---|---|---|---|---|\n");
    for p in &summary.problems {
        let winner = p.winner.as_deref().unwrap_or("none");
        for c in &p.comparisons {
            let _ = write!(
                out,
                "| {} | {winner} | {} | {} |",
                p.problem, c.other, c.pairs
            );
            match &c.test {
                Ok(t) => {
                    let method = match t.method {
                        Method::Exact => "exact",
                        Method::NormalApproximation => "normal",
                    };
                    let _ = write!(out, " {} | {} | {method} |", t.statistic, fmt_p(t.p_value));
                }
                Err(e) => {
                    let _ = write!(out, " - | - | {e} |");
                }
            }
            match c.p_holm {
                Some(h) => {
                    let _ = writeln!(out, " {} |", fmt_p(h));
                }
                None => out.push_str(" - |\n"),
            }
        }
    }
}

pub fn summary_md(report: &BenchReport) -> String {
    let c = &report.config;
    let mut out = String::from("# Benchmark summary\n\n");
    let _ = writeln!(
        out,
        "graphopt {}, master seed {}, instance seed {}, scale {}, {} seeds, population {}, iterations {}{}\n",
        env!("CARGO_PKG_VERSION"),
        c.master_seed,
        c.generation_seed(),
        c.scale,
        c.seeds,
        c.population,
        c.iterations,
        if c.disrupt { ", disrupted" } else { "" },
    );
    out.push_str("## Winners and oracle gaps\n\n");
    out.push_str("| problem | best run | best fitness | oracle | gap | constraints |\n|---|---|---|---|---|---|\n");
    for g in &report.gaps {
        let _ = writeln!(out, "{}", gap_line(g));
    }
    out.push('\n');
    summary_tables(&report.summary, &mut out);
    out
}

fn gap_line(g: &GapRow) -> String {
    let solver = g.best_solver.map_or("none", |v| v.label());
    let best = g.best_fitness.map_or("n/a".into(), fmt_num);
    let gap = match (g.ratio, &g.oracle) {
        (Some(r), _) => {
            let star = if r < 1.0 { "*" } else { "" };
            format!("{r:.4}x{star}")
        }
        (None, Ok(OracleOutcome::Unavailable(_))) => "n/a".into(),
        (None, _) => "undefined".into(),
    };
    format!(
        "| {} | {solver} | {best} | {} | {gap} | {} |",
        g.problem,
        oracle_text(&g.oracle),
        g.annotation
    )
}

pub fn summary_csv(summary: &Summary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "problem", "solver", "n", "mean", "std", "best", "worst", "winner", "p_holm", "dominant",
    ])
    .expect("in-memory CSV");
    for p in &summary.problems {
        for c in &p.cells {
            let is_winner = p.winner.as_deref() == Some(c.solver.as_str());
            let p_holm = p
                .comparisons
                .iter()
                .find(|x| x.other == c.solver)
                .and_then(|x| x.p_holm)
                .map(|v| v.to_string())
                .unwrap_or_default();
            let num = |v: f64| {
                if c.n == 0 {
                    String::new()
                } else {
                    v.to_string()
                }
            };
            w.write_record([
                p.problem.clone(),
                c.solver.clone(),
                c.n.to_string(),
                num(c.mean),
                if c.insufficient {
                    String::new()
                } else {
                    c.std.to_string()
                },
                num(c.best),
                num(c.worst),
                is_winner.to_string(),
                p_holm,
                (is_winner && p.dominant).to_string(),
            ])
            .expect("in-memory CSV");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

pub fn degeneracy_section(title: &str, report: &DegeneracyReport, out: &mut String) {
    let _ = writeln!(
        out,
        "## {title}\n\n{} samples, {} missing property values at binding time\n",
        report.samples, report.missing_property_count
    );
    out.push_str("| term | kind | min | max | variance | flag |\n|---|---|---|---|---|---|\n");
    for r in &report.rows {
        let kind = match r.kind {
            TermKind::Objective => "objective",
            TermKind::Violation => "violation",
        };
        let flag = if r.constant {
            "DEGENERATE (zero variance)"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "| {} | {kind} | {} | {} | {} | {flag} |",
            r.name,
            fmt_num(r.min),
            fmt_num(r.max),
            fmt_num(r.variance)
        );
    }
    out.push('\n');
}

pub fn degeneracy_md(report: &BenchReport) -> String {
    let mut out = String::from("# Degeneracy check\n\n");
    let mut any = false;
    for (inst, rep) in report.instances.iter().zip(&report.instance_reports) {
        match &rep.degeneracy {
            Some(Ok(d)) => {
                any = true;
                degeneracy_section(&inst.slug(), d, &mut out);
            }
            Some(Err(e)) => {
                any = true;
                let _ = writeln!(out, "## {}\n\ncheck failed: {e}\n", inst.slug());
            }
            None => {}
        }
    }
    if !any {
        out.push_str("skipped\n");
    }
    out
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emitted {
    pub results: PathBuf,
    pub summary_md: PathBuf,
    pub summary_csv: PathBuf,
    pub degeneracy: PathBuf,
    pub specs: Vec<PathBuf>,
}

pub fn emit_report(report: &BenchReport, dir: &Path) -> Result<Emitted, Error> {
    let spec_dir = dir.join("specs");
    fs::create_dir_all(&spec_dir).map_err(Error::io(&spec_dir))?;
    let write = |name: &str, body: String| -> Result<PathBuf, Error> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(Error::io(&path))?;
        Ok(path)
    };
    let mut specs = Vec::new();
    for inst in &report.instances {
        let path = spec_dir.join(format!("{}.spec.json", inst.slug()));
        write_spec(&path, &inst.spec)?;
        specs.push(path);
    }
    Ok(Emitted {
        results: write("results.csv", results_csv(&result_rows(report)))?,
        summary_md: write("summary.md", summary_md(report))?,
        summary_csv: write("summary.csv", summary_csv(&report.summary))?,
        degeneracy: write("degeneracy.md", degeneracy_md(report))?,
        specs,
    })
}
