//! Seeded desk-scale instances of the seven benchmark problems.
//!
//! | id | problem | binding |
//! |----|---------|---------|
//! | P1 | drug portfolio: gene coverage minus side effects | per-evaluation queries |
//! | P2 | trial sites: throughput plus region diversity | materialized arrays |
//! | P3 | supply rerouting over a road network | materialized arrays |
//! | P4 | physician deficit below 23 per 10k plus diversity | materialized arrays |
//! | P5 | 4-generator, 24-hour economic dispatch | materialized arrays |
//! | P6 | antibiotic subclasses: pathogen coverage minus resistance burden | materialized arrays |
//! | P7 | evacuation routing in person-hours | materialized arrays |
//!
//! Every generator first builds a property graph from the seed and then
//! binds the problem by querying that graph, so the arrays a solver sees
//! are exactly what the startup queries return.

mod degeneracy;
mod disruption;
mod models;
mod problems;
mod roads;
mod spec;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

pub use degeneracy::{
    detect_degenerate_terms, DegeneracyError, DegeneracyReport, TermKind, TermReport,
};
pub use disruption::{inject_disruption, DisruptionMode, DisruptionSpec};
pub use models::{Coverage, Dispatch, EmissionMode, FlowAssignment, Model, RegionalSelection};
pub use problems::{regional_pattern_a, strip_regions};
pub use spec::{SpecSnapshot, SpecValue};

use crate::graph::{GraphError, PropertyGraph};
use crate::oracle::{
    brute_force_selection, merit_order_dispatch, solve_transportation, DispatchError,
    DispatchInstance, SelectionError, TransportError, TransportationInstance,
};
use crate::problem::{
    DecisionSpace, EvalError, Fitness, MaterializationError, Objective, PatternABinding,
    PatternBBinding, SpaceError,
};
use crate::query::{ParseError, SubstitutionError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProblemId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
}

impl ProblemId {
    pub const ALL: [ProblemId; 7] = [
        ProblemId::P1,
        ProblemId::P2,
        ProblemId::P3,
        ProblemId::P4,
        ProblemId::P5,
        ProblemId::P6,
        ProblemId::P7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        ["P1", "P2", "P3", "P4", "P5", "P6", "P7"][self.index()]
    }

    pub fn title(self) -> &'static str {
        match self {
            ProblemId::P1 => "drug portfolio coverage",
            ProblemId::P2 => "clinical trial site selection",
            ProblemId::P3 => "supply chain rerouting",
            ProblemId::P4 => "physician deficit targeting",
            ProblemId::P5 => "economic dispatch",
            ProblemId::P6 => "antibiotic subclass coverage",
            ProblemId::P7 => "evacuation routing",
        }
    }

    /// Problems whose bindings use soft penalties for constraints the
    /// oracle enforces exactly.
    pub fn has_soft_constraints(self) -> bool {
        matches!(self, ProblemId::P3 | ProblemId::P5 | ProblemId::P7)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ProblemId {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| SuiteError::UnknownProblem(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scale {
    Small,
    Medium,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Small => "small",
            Scale::Medium => "medium",
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scale {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(Scale::Small),
            "medium" => Ok(Scale::Medium),
            _ => Err(SuiteError::UnknownScale(s.into())),
        }
    }
}

/// Coefficients that the problem descriptions leave open.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    /// P1 side-effect weight.
    pub p1_lambda: f64,
    /// P2 and P4 diversity bonus per distinct region.
    pub diversity_beta: f64,
    /// P4 physicians per 10,000.
    pub p4_threshold: f64,
    /// P5 emission weight.
    pub p5_emission_weight: f64,
    pub p5_mode: EmissionMode,
    /// P6 burden weight.
    pub p6_lambda: f64,
    /// Penalty weight multiplier applied to the mean unit cost.
    pub penalty_factor: f64,
}

impl Default for Coefficients {
    fn default() -> Self {
        Self {
            p1_lambda: 0.5,
            diversity_beta: 10.0,
            p4_threshold: 23.0,
            p5_emission_weight: 20.0,
            p5_mode: EmissionMode::Linear,
            p6_lambda: 0.1,
            penalty_factor: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("unknown problem `{0}` (expected P1..P7)")]
    UnknownProblem(String),
    #[error("unknown scale `{0}` (expected small or medium)")]
    UnknownScale(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    Materialization(#[from] MaterializationError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error("{0}")]
    Grounding(String),
    #[error("{operation} does not apply to {problem}")]
    WrongProblem {
        operation: &'static str,
        problem: ProblemId,
    },
    #[error("invalid disruption: {0}")]
    InvalidDisruption(String),
}

/// A problem bound to its graph, either way.
#[derive(Debug, Clone)]
pub enum Binding {
    PatternA(PatternABinding),
    PatternB(PatternBBinding<Model>),
}

impl Binding {
    pub fn pattern_name(&self) -> &'static str {
        match self {
            Binding::PatternA(_) => "A",
            Binding::PatternB(_) => "B",
        }
    }

    /// An independent copy with an empty memo and zeroed counters.
    pub fn fresh(&self) -> Self {
        match self {
            Binding::PatternA(b) => Binding::PatternA(b.fresh()),
            Binding::PatternB(b) => Binding::PatternB(b.clone()),
        }
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            Binding::PatternA(_) => None,
            Binding::PatternB(b) => Some(b.model()),
        }
    }
}

impl Objective for Binding {
    fn space(&self) -> &DecisionSpace {
        match self {
            Binding::PatternA(b) => b.space(),
            Binding::PatternB(b) => b.space(),
        }
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        match self {
            Binding::PatternA(b) => b.evaluate(x),
            Binding::PatternB(b) => b.evaluate(x),
        }
    }

    fn memo_hits(&self) -> u64 {
        match self {
            Binding::PatternA(b) => b.memo_hits(),
            Binding::PatternB(b) => b.memo_hits(),
        }
    }

    fn missing_property_count(&self) -> usize {
        match self {
            Binding::PatternA(b) => b.missing_property_count(),
            Binding::PatternB(b) => b.missing_property_count(),
        }
    }
}

/// Which exact reference applies to an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleKind {
    /// Exhaustive enumeration over the binding.
    Selection,
    Transportation(TransportationInstance),
    /// Ramp-relaxed merit order on the linear objective.
    MeritOrder {
        instance: DispatchInstance,
        emission_weight: f64,
    },
    Unavailable(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimum { method: &'static str, value: f64 },
    Unavailable(String),
}

impl OracleOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            OracleOutcome::Optimum { value, .. } => Some(*value),
            OracleOutcome::Unavailable(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: ProblemId,
    pub scale: Scale,
    pub seed: u64,
    pub coefficients: Coefficients,
    pub graph: Arc<PropertyGraph>,
    pub binding: Binding,
    pub spec: SpecSnapshot,
    pub oracle: OracleKind,
    pub disruption: Option<DisruptionSpec>,
}

impl Instance {
    pub fn space(&self) -> &DecisionSpace {
        self.binding.space()
    }

    /// A binding owned by one solver run.
    pub fn objective(&self) -> Binding {
        self.binding.fresh()
    }

    /// File-name friendly identifier, e.g. `p3-small-s7`.
    pub fn slug(&self) -> String {
        let mut s = format!(
            "{}-{}-s{}",
            self.id.code().to_ascii_lowercase(),
            self.scale,
            self.seed
        );
        if self.disruption.is_some() {
            s.push_str("-disrupted");
        }
        s
    }

    pub fn solve_oracle(&self) -> Result<OracleOutcome, SuiteError> {
        match &self.oracle {
            OracleKind::Selection => match brute_force_selection(&mut self.objective()) {
                Ok(opt) => Ok(OracleOutcome::Optimum {
                    method: "exhaustive enumeration",
                    value: opt.fitness.total,
                }),
                Err(SelectionError::OracleTooLarge { combinations }) => {
                    Ok(OracleOutcome::Unavailable(format!(
                        "no oracle ({combinations} subsets exceed the enumeration limit)"
                    )))
                }
                Err(e) => Err(e.into()),
            },
            OracleKind::Transportation(t) => Ok(OracleOutcome::Optimum {
                method: "min-cost flow",
                value: solve_transportation(t)?.cost,
            }),
            OracleKind::MeritOrder {
                instance,
                emission_weight,
            } => Ok(OracleOutcome::Optimum {
                method: "merit order (ramps relaxed)",
                value: merit_order_dispatch(instance, *emission_weight)?.cost,
            }),
            OracleKind::Unavailable(why) => Ok(OracleOutcome::Unavailable((*why).into())),
        }
    }
}

pub fn generate(id: ProblemId, scale: Scale, seed: u64) -> Result<Instance, SuiteError> {
    generate_with(id, scale, seed, &Coefficients::default())
}

pub fn generate_with(
    id: ProblemId,
    scale: Scale,
    seed: u64,
    coefficients: &Coefficients,
) -> Result<Instance, SuiteError> {
    problems::generate(id, scale, seed, coefficients)
}
