use alloc::format;
use alloc::vec::Vec;

use super::models::Model;
use super::problems::flow_oracle;
use super::spec::{matrix, SpecValue};
use super::{Binding, Instance, ProblemId, SuiteError};
use crate::problem::{Objective, PatternBBinding};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisruptionMode {
    /// Halve the capacity of the chosen ports.
    CapacityHalving,
    /// Multiply the travel time of the chosen centroid-exit routes.
    TimeInflation { factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisruptionSpec {
    pub mode: DisruptionMode,
    /// Share of ports or routes affected, rounded up.
    pub fraction: f64,
    pub seed: u64,
}

impl DisruptionSpec {
    /// Half of the P3 ports lose half their capacity.
    pub fn ports(seed: u64) -> Self {
        Self {
            mode: DisruptionMode::CapacityHalving,
            fraction: 0.5,
            seed,
        }
    }

    /// A third of the P7 routes take twice as long.
    pub fn routes(seed: u64) -> Self {
        Self {
            mode: DisruptionMode::TimeInflation { factor: 2.0 },
            fraction: 1.0 / 3.0,
            seed,
        }
    }

    pub fn default_for(id: ProblemId, seed: u64) -> Option<Self> {
        match id {
            ProblemId::P3 => Some(Self::ports(seed)),
            ProblemId::P7 => Some(Self::routes(seed)),
            _ => None,
        }
    }
}

/// Applies a disruption to the instance arrays and rebinds the model and
/// oracle. The graph itself is left as generated.
pub fn inject_disruption(
    instance: &Instance,
    spec: DisruptionSpec,
) -> Result<Instance, SuiteError> {
    let expected = match spec.mode {
        DisruptionMode::CapacityHalving => ProblemId::P3,
        DisruptionMode::TimeInflation { .. } => ProblemId::P7,
    };
    if instance.id != expected {
        return Err(SuiteError::WrongProblem {
            operation: match spec.mode {
                DisruptionMode::CapacityHalving => "capacity halving",
                DisruptionMode::TimeInflation { .. } => "travel time inflation",
            },
            problem: instance.id,
        });
    }
    if !(0.0..=1.0).contains(&spec.fraction) {
        return Err(SuiteError::InvalidDisruption(format!(
            "fraction {} is outside [0, 1]",
            spec.fraction
        )));
    }
    if let DisruptionMode::TimeInflation { factor } = spec.mode {
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(SuiteError::InvalidDisruption(format!(
                "inflation factor {factor} must exceed 1"
            )));
        }
    }
    let (Binding::PatternB(binding), Some(Model::Flow(flow))) =
        (&instance.binding, instance.binding.model())
    else {
        return Err(SuiteError::Grounding(format!(
            "{} is not bound as a flow model",
            instance.id
        )));
    };
    if spec.fraction == 0.0 {
        return Ok(instance.clone());
    }

    let mut flow = flow.clone();
    let targets = match spec.mode {
        DisruptionMode::CapacityHalving => flow.cols,
        DisruptionMode::TimeInflation { .. } => flow.unit_cost.len(),
    };
    let count = (libm::ceil(spec.fraction * targets as f64 - 1e-9) as usize).min(targets);
    let mut picked = Stream::new(spec.seed, 0).sample_without_replacement(targets, count);
    picked.sort_unstable();

    let mut out = instance.clone();
    match spec.mode {
        DisruptionMode::CapacityHalving => {
            for &j in &picked {
                flow.capacity[j] *= 0.5;
            }
            out.spec.set("capacities", flow.capacity.as_slice());
        }
        DisruptionMode::TimeInflation { factor } => {
            for &e in &picked {
                flow.unit_cost[e] *= factor;
            }
            out.spec.set("travel_time", matrix(&flow.cost_matrix()));
        }
    }
    let (mode, factor) = match spec.mode {
        DisruptionMode::CapacityHalving => ("capacity_halving", 0.5),
        DisruptionMode::TimeInflation { factor } => ("time_inflation", factor),
    };
    out.spec.set(
        "disruption",
        SpecValue::Map(Vec::from([
            ("mode".into(), SpecValue::from(mode)),
            ("factor".into(), SpecValue::from(factor)),
            ("fraction".into(), SpecValue::from(spec.fraction)),
            ("seed".into(), SpecValue::Int(spec.seed as i64)),
            ("affected".into(), SpecValue::from(picked.as_slice())),
        ])),
    );
    out.oracle = flow_oracle(&flow)?;
    out.binding = Binding::PatternB(PatternBBinding::new(
        alloc::sync::Arc::new(Model::Flow(flow)),
        binding.space().clone(),
        binding.startup_queries().to_vec(),
        binding.missing_property_count(),
    ));
    out.disruption = Some(spec);
    Ok(out)
}
