//! Benchmark matrix configuration and its JSON file form.

use std::fs;
use std::path::Path;

use graphopt_core::solver::Variant;
use graphopt_core::suite::{Coefficients, EmissionMode, ProblemId, Scale};
use serde::Deserialize;

use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub problems: Vec<ProblemId>,
    pub scale: Scale,
    /// Instance generation seed; defaults to the master seed.
    pub instance_seed: Option<u64>,
    /// Apply the default disruption to P3 and P7.
    pub disrupt: bool,
    /// Remove the region property from P2 and P4 before binding.
    pub strip_regions: bool,
    pub variants: Vec<Variant>,
    pub population: usize,
    pub iterations: usize,
    /// Solver seeds per (problem, variant) cell.
    pub seeds: usize,
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub coefficients: Coefficients,
    /// Random vectors per degeneracy check; 0 skips the check.
    pub degeneracy_samples: usize,
    /// Record wall time per cell.
    pub timing: bool,
}

impl Default for BenchConfig {
    /// The full matrix: 5 variants x 7 problems x 30 seeds, small scale.
    fn default() -> Self {
        Self {
            problems: ProblemId::ALL.to_vec(),
            scale: Scale::Small,
            instance_seed: None,
            disrupt: false,
            strip_regions: false,
            variants: Variant::PORTFOLIO.to_vec(),
            population: 30,
            iterations: 300,
            seeds: 30,
            master_seed: 0,
            threads: 0,
            coefficients: Coefficients::default(),
            degeneracy_samples: 200,
            timing: true,
        }
    }
}

impl BenchConfig {
    /// Three seeds per cell.
    pub fn pilot() -> Self {
        Self {
            seeds: 3,
            ..Self::default()
        }
    }

    pub fn generation_seed(&self) -> u64 {
        self.instance_seed.unwrap_or(self.master_seed)
    }

    pub fn cell_count(&self) -> usize {
        self.problems.len() * self.variants.len() * self.seeds
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.problems.is_empty() {
            return bad("no problems selected");
        }
        if self.variants.is_empty() {
            return bad("no solvers selected");
        }
        if self.seeds == 0 {
            return bad("seed count must be positive");
        }
        if self.degeneracy_samples == 1 {
            return bad("degeneracy check needs at least 2 samples");
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(Error::io(path))?;
        let file: ConfigFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })?;
        file.apply(Self::default())
    }
}

/// Every field is optional and falls back to [`BenchConfig::default`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problems: Option<Vec<String>>,
    pub scale: Option<String>,
    pub instance_seed: Option<u64>,
    pub disrupt: Option<bool>,
    pub strip_regions: Option<bool>,
    pub solvers: Option<Vec<String>>,
    pub population: Option<usize>,
    pub iterations: Option<usize>,
    pub seeds: Option<usize>,
    pub master_seed: Option<u64>,
    pub threads: Option<usize>,
    pub degeneracy_samples: Option<usize>,
    pub timing: Option<bool>,
    pub coefficients: Option<CoefficientsFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsFile {
    pub p1_lambda: Option<f64>,
    pub diversity_beta: Option<f64>,
    pub p4_threshold: Option<f64>,
    pub p5_emission_weight: Option<f64>,
    /// `linear` or `quadratic`.
    pub p5_mode: Option<String>,
    pub p6_lambda: Option<f64>,
    pub penalty_factor: Option<f64>,
}

pub fn parse_problems<S: AsRef<str>>(names: &[S]) -> Result<Vec<ProblemId>, Error> {
    names
        .iter()
        .map(|n| {
            n.as_ref()
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("{e}")))
        })
        .collect()
}

pub fn parse_variants<S: AsRef<str>>(names: &[S]) -> Result<Vec<Variant>, Error> {
    names
        .iter()
        .map(|n| {
            n.as_ref()
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("{e}")))
        })
        .collect()
}

pub fn parse_mode(name: &str) -> Result<EmissionMode, Error> {
    match name.to_ascii_lowercase().as_str() {
        "linear" => Ok(EmissionMode::Linear),
        "quadratic" => Ok(EmissionMode::Quadratic),
        _ => Err(Error::Config(format!("unknown emission mode `{name}`"))),
    }
}

impl ConfigFile {
    pub fn apply(self, mut c: BenchConfig) -> Result<BenchConfig, Error> {
        if let Some(p) = self.problems {
            c.problems = parse_problems(&p)?;
        }
        if let Some(s) = self.scale {
            c.scale = s.parse()?;
        }
        if self.instance_seed.is_some() {
            c.instance_seed = self.instance_seed;
        }
        if let Some(v) = self.solvers {
            c.variants = parse_variants(&v)?;
        }
        c.disrupt = self.disrupt.unwrap_or(c.disrupt);
        c.strip_regions = self.strip_regions.unwrap_or(c.strip_regions);
        c.population = self.population.unwrap_or(c.population);
        c.iterations = self.iterations.unwrap_or(c.iterations);
        c.seeds = self.seeds.unwrap_or(c.seeds);
        c.master_seed = self.master_seed.unwrap_or(c.master_seed);
        c.threads = self.threads.unwrap_or(c.threads);
        c.degeneracy_samples = self.degeneracy_samples.unwrap_or(c.degeneracy_samples);
        c.timing = self.timing.unwrap_or(c.timing);
        if let Some(k) = self.coefficients {
            let co = &mut c.coefficients;
            co.p1_lambda = k.p1_lambda.unwrap_or(co.p1_lambda);
            co.diversity_beta = k.diversity_beta.unwrap_or(co.diversity_beta);
            co.p4_threshold = k.p4_threshold.unwrap_or(co.p4_threshold);
            co.p5_emission_weight = k.p5_emission_weight.unwrap_or(co.p5_emission_weight);
            if let Some(m) = k.p5_mode {
                co.p5_mode = parse_mode(&m)?;
            }
            co.p6_lambda = k.p6_lambda.unwrap_or(co.p6_lambda);
            co.penalty_factor = k.penalty_factor.unwrap_or(co.penalty_factor);
        }
        c.validate()?;
        Ok(c)
    }
}
