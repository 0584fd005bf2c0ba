use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    /// Cost per MWh.
    pub cost_rate: f64,
    /// Emission per MWh.
    pub emission_rate: f64,
    pub min_out: f64,
    pub max_out: f64,
    /// Largest change in output between consecutive hours.
    pub ramp: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispatchError {
    #[error("generator {0} has min output above max output")]
    InvalidGenerator(usize),
    #[error("hour {0} has negative or non-finite demand")]
    InvalidDemand(usize),
    #[error("hour {hour}: demand {demand} lies outside the output range [{min}, {max}]")]
    InfeasibleDispatch {
        hour: usize,
        demand: f64,
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchInstance {
    generators: Vec<Generator>,
    demand: Vec<f64>,
}

impl DispatchInstance {
    pub fn new(generators: Vec<Generator>, demand: Vec<f64>) -> Result<Self, DispatchError> {
        for (g, gen) in generators.iter().enumerate() {
            if !(gen.min_out <= gen.max_out) || gen.min_out < 0.0 {
                return Err(DispatchError::InvalidGenerator(g));
            }
        }
        for (h, &d) in demand.iter().enumerate() {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(DispatchError::InvalidDemand(h));
            }
        }
        Ok(Self { generators, demand })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn hours(&self) -> usize {
        self.demand.len()
    }

    /// `cost_rate + emission_weight * emission_rate` per generator.
    pub fn effective_rates(&self, emission_weight: f64) -> Vec<f64> {
        self.generators
            .iter()
            .map(|g| g.cost_rate + emission_weight * g.emission_rate)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    /// `schedule[g][h]`.
    pub schedule: Vec<Vec<f64>>,
    pub cost: f64,
}

/// Hour by hour: every generator at its minimum, the rest of the demand
/// filled in ascending effective rate. Ramp limits are ignored, so for the
/// linear objective this is the exact optimum of the ramp-relaxed problem.
pub fn merit_order_dispatch(
    inst: &DispatchInstance,
    emission_weight: f64,
) -> Result<DispatchSolution, DispatchError> {
    let rates = inst.effective_rates(emission_weight);
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| rates[a].total_cmp(&rates[b]).then(a.cmp(&b)));
    let gens = &inst.generators;
    let min: f64 = gens.iter().map(|g| g.min_out).sum();
    let max: f64 = gens.iter().map(|g| g.max_out).sum();
    let mut schedule = vec![vec![0.0; inst.hours()]; gens.len()];
    let mut cost = 0.0;
    for (h, &demand) in inst.demand.iter().enumerate() {
        if demand < min || demand > max {
            return Err(DispatchError::InfeasibleDispatch {
                hour: h,
                demand,
                min,
                max,
            });
        }
        let mut rest = demand - min;
        for (g, gen) in gens.iter().enumerate() {
            schedule[g][h] = gen.min_out;
        }
        for &g in &order {
            let add = rest.min(gens[g].max_out - gens[g].min_out);
            schedule[g][h] += add;
            rest -= add;
            if rest <= 0.0 {
                break;
            }
        }
        for (g, rate) in rates.iter().enumerate() {
            cost += rate * schedule[g][h];
        }
    }
    Ok(DispatchSolution { schedule, cost })
}
