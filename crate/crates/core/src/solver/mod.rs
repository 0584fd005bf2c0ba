//! Rao-family population solvers.
//!
//! All variants share one loop: each member in turn proposes a candidate,
//! the candidate is clipped into the box and evaluated, and it replaces the
//! member only on strict improvement. Best, worst and the column mean are
//! updated right after every replacement, so later members in the same
//! iteration see the change.
//!
//! Member `i` draws from stream `i` and the run-level draws (QO jumps) come
//! from stream `u64::MAX`, see [`crate::rng::Stream`]. Within a member the
//! draw order is fixed: branch uniform, `T`, random member, then the
//! per-dimension uniforms.

mod population;
mod variant;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

pub use population::Population;
pub use variant::{adapt_subpopulations, jaya, propose, rao1, Guides};

use crate::problem::{DecisionSpace, EvalError, Fitness, Objective};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Jaya,
    Rao1,
    Bmr,
    Bwr,
    Bmwr,
    SampJaya,
    EhrJaya,
    QoRao,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Jaya,
        Variant::Rao1,
        Variant::Bmr,
        Variant::Bwr,
        Variant::Bmwr,
        Variant::SampJaya,
        Variant::EhrJaya,
        Variant::QoRao,
    ];

    /// The five-solver benchmark portfolio.
    pub const PORTFOLIO: [Variant; 5] = [
        Variant::Bmwr,
        Variant::Jaya,
        Variant::SampJaya,
        Variant::EhrJaya,
        Variant::Rao1,
    ];

    /// Output label. The asterisk marks our own adaptive rules.
    pub fn label(self) -> &'static str {
        match self {
            Variant::Jaya => "Jaya",
            Variant::Rao1 => "Rao1",
            Variant::Bmr => "BMR",
            Variant::Bwr => "BWR",
            Variant::Bmwr => "BMWR",
            Variant::SampJaya => "SAMP*-Jaya",
            Variant::EhrJaya => "EHR*-Jaya",
            Variant::QoRao => "QO-Rao",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown solver variant `{0}`")]
pub struct UnknownVariant(pub String);

impl FromStr for Variant {
    type Err = UnknownVariant;

    /// Case-insensitive; `-`, `_`, `*` and spaces are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | '*' | ' '))
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let v = match norm.as_str() {
            "jaya" => Variant::Jaya,
            "rao1" => Variant::Rao1,
            "bmr" => Variant::Bmr,
            "bwr" => Variant::Bwr,
            "bmwr" => Variant::Bmwr,
            "sampjaya" | "samp" => Variant::SampJaya,
            "ehrjaya" | "ehr" => Variant::EhrJaya,
            "qorao" | "qo" => Variant::QoRao,
            _ => return Err(UnknownVariant(s.into())),
        };
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Upper bound on SAMP subpopulations.
    pub samp_max_groups: usize,
    /// EHR elite and bottom set fraction.
    pub ehr_elite_fraction: f64,
    /// QO per-iteration jump probability.
    pub qo_jump_rate: f64,
}

impl SolverConfig {
    pub fn new(variant: Variant, population: usize, iterations: usize, seed: u64) -> Self {
        Self {
            variant,
            population,
            iterations,
            seed,
            samp_max_groups: 4,
            ehr_elite_fraction: 0.2,
            qo_jump_rate: 0.3,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population < 4 {
            return Err(ConfigError::Population(self.population));
        }
        if self.iterations == 0 {
            return Err(ConfigError::Iterations);
        }
        if self.samp_max_groups == 0 {
            return Err(ConfigError::Groups);
        }
        if !(self.ehr_elite_fraction > 0.0 && self.ehr_elite_fraction <= 1.0) {
            return Err(ConfigError::EliteFraction(self.ehr_elite_fraction));
        }
        if !(0.0..=1.0).contains(&self.qo_jump_rate) {
            return Err(ConfigError::JumpRate(self.qo_jump_rate));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("population must be at least 4, got {0}")]
    Population(usize),
    #[error("iterations must be at least 1")]
    Iterations,
    #[error("SAMP needs at least one subpopulation")]
    Groups,
    #[error("elite fraction must lie in (0, 1], got {0}")]
    EliteFraction(f64),
    #[error("jump rate must lie in [0, 1], got {0}")]
    JumpRate(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("evaluation failed at iteration {iteration}, member {member}: {source}")]
    Evaluation {
        iteration: usize,
        member: usize,
        source: EvalError,
    },
    #[error("fitness at iteration {iteration}, member {member} is not finite")]
    NonFinite { iteration: usize, member: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub variant: Variant,
    pub seed: u64,
    pub best_x: Vec<f64>,
    pub best: Fitness,
    /// Best total after each iteration.
    pub curve: Vec<f64>,
    pub evaluations: u64,
    pub memo_hits: u64,
    pub qo_jumps: u64,
    /// Filled in by callers that measure time.
    pub wall_ms: Option<f64>,
}

/// Runs one seeded optimization to completion.
pub fn run<O: Objective + ?Sized>(
    objective: &mut O,
    config: &SolverConfig,
) -> Result<RunResult, SolverError> {
    config.validate()?;
    let space = objective.space().clone();
    let mut streams: Vec<Stream> = (0..config.population as u64)
        .map(|i| Stream::new(config.seed, i))
        .collect();
    let mut control = Stream::new(config.seed, u64::MAX);
    let mut evaluations = 0u64;

    let mut eval = |obj: &mut O, x: &[f64], iteration: usize, member: usize| {
        evaluations += 1;
        let f = obj.evaluate(x).map_err(|source| SolverError::Evaluation {
            iteration,
            member,
            source,
        })?;
        if !f.total.is_finite() {
            return Err(SolverError::NonFinite { iteration, member });
        }
        Ok(f)
    };

    let mut members = Vec::with_capacity(config.population);
    for (i, stream) in streams.iter_mut().enumerate() {
        let x: Vec<f64> = space
            .lower()
            .iter()
            .zip(space.upper())
            .map(|(&l, &u)| stream.range(l, u))
            .collect();
        let f = eval(objective, &x, 0, i)?;
        members.push((x, f));
    }
    let mut pop = Population::new(members);

    let mut groups = 2usize.min(group_cap(config));
    let mut curve = Vec::with_capacity(config.iterations);
    let mut qo_jumps = 0u64;
    let dim = space.dim();
    let mut candidate = alloc::vec![0.0; dim];

    for iteration in 1..=config.iterations {
        pop.resync_mean();
        let best_before = pop.best_total();
        let plan = IterationPlan::build(config, &pop, groups);

        for i in 0..config.population {
            let guides = plan.guides(config.variant, &pop, i, &mut streams[i]);
            propose(
                config.variant,
                &pop,
                i,
                &guides,
                &space,
                &mut streams[i],
                &mut candidate,
            );
            space.clamp(&mut candidate);
            let f = eval(objective, &candidate, iteration, i)?;
            if greedy_accept(pop.fitness(i).total, f.total) {
                pop.replace(i, &candidate, f);
            }
        }

        if config.variant == Variant::SampJaya {
            let improved = pop.best_total() < best_before;
            groups = adapt_subpopulations(groups, group_cap(config), improved);
        }

        if config.variant == Variant::QoRao && control.uniform() < config.qo_jump_rate {
            qo_jumps += 1;
            let mut opposites = Vec::with_capacity(config.population);
            for i in 0..config.population {
                let q = quasi_opposite(pop.x(i), &space, &mut control);
                let f = eval(objective, &q, iteration, i)?;
                opposites.push((q, f));
            }
            pop.merge_elitist(opposites);
        }

        curve.push(pop.best_total());
    }

    let best_i = pop.best();
    Ok(RunResult {
        variant: config.variant,
        seed: config.seed,
        best_x: pop.x(best_i).to_vec(),
        best: pop.fitness(best_i).clone(),
        curve,
        evaluations,
        memo_hits: objective.memo_hits(),
        qo_jumps,
        wall_ms: None,
    })
}

/// Keep the candidate only on strict improvement.
pub fn greedy_accept(old_total: f64, new_total: f64) -> bool {
    new_total < old_total
}

fn group_cap(config: &SolverConfig) -> usize {
    config.samp_max_groups.min(config.population / 2).max(1)
}

/// Uniform between the box center and the reflection of `x` through it.
pub fn quasi_opposite(x: &[f64], space: &DecisionSpace, rng: &mut Stream) -> Vec<f64> {
    x.iter()
        .zip(space.lower().iter().zip(space.upper()))
        .map(|(&v, (&l, &u))| {
            let c = 0.5 * (l + u);
            let o = l + u - v;
            let q = c + (o - c) * rng.uniform();
            q.clamp(l, u)
        })
        .collect()
}

/// Per-iteration structure for the adaptive variants.
struct IterationPlan {
    /// SAMP: member index -> group id, and group member lists.
    group_of: Vec<usize>,
    groups: Vec<Vec<usize>>,
    /// EHR: elite and bottom members by rank.
    elite: Vec<usize>,
    bottom: Vec<usize>,
}

impl IterationPlan {
    fn build(config: &SolverConfig, pop: &Population, groups: usize) -> Self {
        let mut plan = IterationPlan {
            group_of: Vec::new(),
            groups: Vec::new(),
            elite: Vec::new(),
            bottom: Vec::new(),
        };
        match config.variant {
            Variant::SampJaya => {
                let ranked = pop.ranked();
                plan.group_of = alloc::vec![0; pop.len()];
                plan.groups = alloc::vec![Vec::new(); groups];
                for (rank, &i) in ranked.iter().enumerate() {
                    plan.group_of[i] = rank % groups;
                    plan.groups[rank % groups].push(i);
                }
            }
            Variant::EhrJaya => {
                let ranked = pop.ranked();
                let m = libm::ceil(config.ehr_elite_fraction * pop.len() as f64) as usize;
                let m = m.clamp(1, pop.len());
                plan.elite = ranked[..m].to_vec();
                plan.bottom = ranked[pop.len() - m..].to_vec();
            }
            _ => {}
        }
        plan
    }

    fn guides(&self, variant: Variant, pop: &Population, i: usize, rng: &mut Stream) -> Guides {
        match variant {
            Variant::SampJaya => {
                let group = &self.groups[self.group_of[i]];
                let (best, worst) = pop.extremes_of(group);
                Guides { best, worst }
            }
            Variant::EhrJaya => Guides {
                best: self.elite[rng.below(self.elite.len())],
                worst: self.bottom[rng.below(self.bottom.len())],
            },
            _ => Guides {
                best: pop.best(),
                worst: pop.worst(),
            },
        }
    }
}

#[cfg(test)]
mod tests;
