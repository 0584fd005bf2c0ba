use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphopt::bench::gap_ratio;
use graphopt::config::{parse_problems, parse_variants};
use graphopt::report::{
    self, degeneracy_section, emit_report, read_results, summary_csv, summary_tables,
};
use graphopt::specjson::render_spec;
use graphopt::{run_matrix, BenchConfig, Error};
use graphopt_core::solver::{run, SolverConfig, Variant};
use graphopt_core::stats::build_summary;
use graphopt_core::suite::{
    detect_degenerate_terms, generate, inject_disruption, strip_regions, DisruptionSpec, Instance,
    ProblemId, Scale,
};

#[derive(Parser)]
#[command(
    name = "graphopt",
    version,
    about = "Graph-grounded optimization benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and print its spec.json.
    Generate {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one solver on one instance.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "BMWR")]
        solver: Variant,
        /// Solver seed.
        #[arg(long, default_value_t = 0)]
        run_seed: u64,
        #[arg(long, default_value_t = 30)]
        pop: usize,
        #[arg(long, default_value_t = 300)]
        iters: usize,
    },
    /// Run a problems x solvers x seeds matrix and write the reports.
    Bench(BenchArgs),
    /// Rebuild the statistics tables from a results.csv.
    Stats {
        results: PathBuf,
        /// Also write summary.md and summary.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report objective and violation terms that never change.
    InspectDegeneracy {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Remove the region property first (P2, P4).
        #[arg(long)]
        strip_regions: bool,
        #[arg(long, default_value_t = 0)]
        sample_seed: u64,
        /// Write the Markdown report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, short)]
    problem: ProblemId,
    #[arg(long, default_value = "small")]
    scale: Scale,
    /// Instance generation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply the default disruption (P3, P7).
    #[arg(long)]
    disrupt: bool,
}

impl InstanceArgs {
    fn build(&self) -> Result<Instance, Error> {
        let inst = generate(self.problem, self.scale, self.seed)?;
        if !self.disrupt {
            return Ok(inst);
        }
        let spec = DisruptionSpec::default_for(self.problem, self.seed)
            .ok_or_else(|| Error::Config(format!("{} has no disruption mode", self.problem)))?;
        Ok(inject_disruption(&inst, spec)?)
    }
}

#[derive(Args)]
struct BenchArgs {
    /// JSON configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Comma-separated problem ids.
    #[arg(long, value_delimiter = ',')]
    problems: Option<Vec<String>>,
    /// Comma-separated solver names.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
    #[arg(long)]
    scale: Option<Scale>,
    #[arg(long)]
    seeds: Option<usize>,
    /// Three seeds per cell unless --seeds is given.
    #[arg(long)]
    pilot: bool,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    instance_seed: Option<u64>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    disrupt: bool,
    /// Remove the region property from P2 and P4 instances.
    #[arg(long)]
    strip_regions: bool,
    #[arg(long)]
    degeneracy_samples: Option<usize>,
    /// Leave wall_ms empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

impl BenchArgs {
    fn config(&self) -> Result<BenchConfig, Error> {
        let mut c = match &self.config {
            Some(p) => BenchConfig::from_file(p)?,
            None if self.pilot => BenchConfig::pilot(),
            None => BenchConfig::default(),
        };
        if self.pilot && self.seeds.is_none() {
            c.seeds = 3;
        }
        if let Some(p) = &self.problems {
            c.problems = parse_problems(p)?;
        }
        if let Some(v) = &self.solvers {
            c.variants = parse_variants(v)?;
        }
        c.scale = self.scale.unwrap_or(c.scale);
        c.seeds = self.seeds.unwrap_or(c.seeds);
        c.master_seed = self.master_seed.unwrap_or(c.master_seed);
        if self.instance_seed.is_some() {
            c.instance_seed = self.instance_seed;
        }
        c.population = self.pop.unwrap_or(c.population);
        c.iterations = self.iters.unwrap_or(c.iterations);
        c.threads = self.threads.unwrap_or(c.threads);
        c.disrupt |= self.disrupt;
        c.strip_regions |= self.strip_regions;
        c.degeneracy_samples = self.degeneracy_samples.unwrap_or(c.degeneracy_samples);
        if self.no_timing {
            c.timing = false;
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_or_print(out: Option<&PathBuf>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, body).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate { instance, out } => {
            let inst = instance.build()?;
            write_or_print(out.as_ref(), &render_spec(&inst.spec))
        }
        Command::Solve {
            instance,
            solver,
            run_seed,
            pop,
            iters,
        } => {
            let inst = instance.build()?;
            let r = run(
                &mut inst.objective(),
                &SolverConfig::new(solver, pop, iters, run_seed),
            )?;
            println!(
                "{} {} with {} (seed {run_seed})",
                inst.slug(),
                inst.id.title(),
                solver.label()
            );
            println!("fitness      {}", r.best.total);
            for t in &r.best.objective_terms {
                println!("  {:<20} {} x {}", t.name, t.raw, t.scale);
            }
            for v in &r.best.violation_terms {
                println!("  {:<20} degree {} weight {}", v.name, v.degree, v.weight);
            }
            println!("evaluations  {}", r.evaluations);
            println!("memo hits    {}", r.memo_hits);
            match inst.solve_oracle()? {
                graphopt_core::suite::OracleOutcome::Optimum { method, value } => {
                    let gap = gap_ratio(r.best.total, value)
                        .map_or("undefined".into(), |g| format!("{g:.4}x"));
                    println!("oracle       {value} ({method}), gap {gap}");
                }
                graphopt_core::suite::OracleOutcome::Unavailable(why) => {
                    println!("oracle       {why}")
                }
            }
            Ok(())
        }
        Command::Bench(args) => {
            let config = args.config()?;
            eprintln!(
                "running {} cells ({} problems x {} solvers x {} seeds)",
                config.cell_count(),
                config.problems.len(),
                config.variants.len(),
                config.seeds
            );
            let report = run_matrix(&config)?;
            let failed = report.cells.iter().filter(|c| c.outcome.is_err()).count();
            let emitted = emit_report(&report, &args.out)?;
            print!("{}", report::summary_md(&report));
            eprintln!(
                "wrote {} ({failed} failed cells)",
                emitted.results.display()
            );
            Ok(())
        }
        Command::Stats { results, out } => {
            let rows = read_results(&results)?;
            let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
            let summary = build_summary(&records);
            let mut md = String::from("# Statistics\n\n");
            summary_tables(&summary, &mut md);
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                write_or_print(Some(&dir.join("summary.md")), &md)?;
                write_or_print(Some(&dir.join("summary.csv")), &summary_csv(&summary))?;
            }
            print!("{md}");
            Ok(())
        }
        Command::InspectDegeneracy {
            instance,
            samples,
            strip_regions: strip,
            sample_seed,
            out,
        } => {
            let mut inst = instance.build()?;
            if strip {
                inst = strip_regions(&inst)?;
            }
            let report = detect_degenerate_terms(&mut inst.objective(), samples, sample_seed)?;
            let mut md = String::from("# Degeneracy check\n\n");
            let title = if strip {
                format!("{} (regions stripped)", inst.slug())
            } else {
                inst.slug()
            };
            degeneracy_section(&title, &report, &mut md);
            write_or_print(out.as_ref(), &md)?;
            for r in report.degenerate() {
                eprintln!("degenerate term: {}", r.name);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
