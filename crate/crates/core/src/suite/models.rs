use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::oracle::DispatchInstance;
use crate::problem::{decode_selection, Fitness, NativeModel, ObjectiveTerm, ViolationTerm};

/// Assigns bucket ids to region labels. Every missing label shares one
/// bucket.
pub(crate) fn region_buckets(regions: &[Option<String>]) -> Vec<usize> {
    let mut seen: Vec<Option<&str>> = Vec::new();
    regions
        .iter()
        .map(|r| {
            let key = r.as_deref();
            match seen.iter().position(|s| *s == key) {
                Some(i) => i,
                None => {
                    seen.push(key);
                    seen.len() - 1
                }
            }
        })
        .collect()
}

fn distinct(buckets: &[usize], picked: &[usize]) -> usize {
    let mut b: Vec<usize> = picked.iter().map(|&i| buckets[i]).collect();
    b.sort_unstable();
    b.dedup();
    b.len()
}

/// Pick `k` candidates maximizing a per-candidate value plus a bonus per
/// distinct region (P2 sites, P4 countries).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionalSelection {
    pub value_term: &'static str,
    pub values: Vec<f64>,
    pub buckets: Vec<usize>,
    pub beta: f64,
}

impl NativeModel for RegionalSelection {
    fn evaluate(&self, x: &[f64]) -> Fitness {
        let picked = decode_selection(x, self.values.len());
        let mut total = 0.0;
        for &i in &picked {
            total += self.values[i];
        }
        Fitness::new(
            vec![
                ObjectiveTerm::new(self.value_term, total, -1.0),
                ObjectiveTerm::new(
                    "region_diversity",
                    distinct(&self.buckets, &picked) as f64,
                    -self.beta,
                ),
            ],
            Vec::new(),
        )
    }
}

/// Fractional assignment of row demands to capacitated columns (P3, P7).
/// `x[r * cols + c]` is the share of row `r` sent to column `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment {
    pub cost_term: &'static str,
    pub rows: usize,
    pub cols: usize,
    /// Per-unit cost, `rows x cols` row-major.
    pub unit_cost: Vec<f64>,
    pub demand: Vec<f64>,
    pub capacity: Vec<f64>,
    pub balance_weight: f64,
    pub capacity_weight: f64,
}

impl FlowAssignment {
    pub fn cost_matrix(&self) -> Vec<Vec<f64>> {
        self.unit_cost
            .chunks(self.cols)
            .map(<[f64]>::to_vec)
            .collect()
    }
}

impl NativeModel for FlowAssignment {
    fn evaluate(&self, x: &[f64]) -> Fitness {
        let mut cost = 0.0;
        let mut balance = 0.0;
        let mut load = vec![0.0; self.cols];
        for r in 0..self.rows {
            let mut share = 0.0;
            for c in 0..self.cols {
                let f = x[r * self.cols + c];
                let flow = self.demand[r] * f;
                cost += flow * self.unit_cost[r * self.cols + c];
                load[c] += flow;
                share += f;
            }
            balance += self.demand[r] * (share - 1.0).abs();
        }
        let mut over = 0.0;
        for (l, cap) in load.iter().zip(&self.capacity) {
            over += (l - cap).max(0.0);
        }
        Fitness::new(
            vec![ObjectiveTerm::new(self.cost_term, cost, 1.0)],
            vec![
                ViolationTerm::new("balance", balance, self.balance_weight),
                ViolationTerm::new("capacity", over, self.capacity_weight),
            ],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmissionMode {
    /// `sum_g e_g * x_gh`; comparable with the merit-order oracle.
    Linear,
    /// `sum_g e_g * x_gh^2 / max_g`.
    Quadratic,
}

impl EmissionMode {
    pub fn name(self) -> &'static str {
        match self {
            EmissionMode::Linear => "linear",
            EmissionMode::Quadratic => "quadratic",
        }
    }
}

/// Generator schedule, `x[g * hours + h]` (P5).
#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch {
    pub instance: DispatchInstance,
    pub emission_weight: f64,
    pub mode: EmissionMode,
    pub balance_weight: f64,
    pub ramp_weight: f64,
}

impl NativeModel for Dispatch {
    fn evaluate(&self, x: &[f64]) -> Fitness {
        let gens = self.instance.generators();
        let hours = self.instance.hours();
        let mut cost = 0.0;
        let mut emission = 0.0;
        let mut ramp = 0.0;
        for (g, gen) in gens.iter().enumerate() {
            let row = &x[g * hours..(g + 1) * hours];
            for (h, &out) in row.iter().enumerate() {
                cost += gen.cost_rate * out;
                emission += match self.mode {
                    EmissionMode::Linear => gen.emission_rate * out,
                    EmissionMode::Quadratic => gen.emission_rate * out * out / gen.max_out,
                };
                if h > 0 {
                    ramp += ((out - row[h - 1]).abs() - gen.ramp).max(0.0);
                }
            }
        }
        let mut balance = 0.0;
        for (h, &d) in self.instance.demand().iter().enumerate() {
            let supplied: f64 = (0..gens.len()).map(|g| x[g * hours + h]).sum();
            balance += (supplied - d).abs();
        }
        Fitness::new(
            vec![
                ObjectiveTerm::new("generation_cost", cost, 1.0),
                ObjectiveTerm::new("emission", emission, self.emission_weight),
            ],
            vec![
                ViolationTerm::new("balance", balance, self.balance_weight),
                ViolationTerm::new("ramp", ramp, self.ramp_weight),
            ],
        )
    }
}

/// Pick `k` antibiotic subclasses; each pathogen is covered by the best
/// selected efficacy, minus a burden penalty (P6).
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    /// `efficacy[s][p] = 1 / (1 + resistance_count[s][p])`.
    pub efficacy: Vec<Vec<f64>>,
    pub burden: Vec<f64>,
    pub lambda: f64,
}

impl NativeModel for Coverage {
    fn evaluate(&self, x: &[f64]) -> Fitness {
        let picked = decode_selection(x, self.efficacy.len());
        let pathogens = self.efficacy[0].len();
        let mut coverage = 0.0;
        for p in 0..pathogens {
            let mut best: f64 = 0.0;
            for &s in &picked {
                best = best.max(self.efficacy[s][p]);
            }
            coverage += best;
        }
        let mut burden = 0.0;
        for &s in &picked {
            burden += self.burden[s];
        }
        Fitness::new(
            vec![
                ObjectiveTerm::new("pathogen_coverage", coverage, -1.0),
                ObjectiveTerm::new("resistance_burden", burden, self.lambda),
            ],
            Vec::new(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Regional(RegionalSelection),
    Flow(FlowAssignment),
    Dispatch(Dispatch),
    Coverage(Coverage),
}

impl NativeModel for Model {
    fn evaluate(&self, x: &[f64]) -> Fitness {
        match self {
            Model::Regional(m) => m.evaluate(x),
            Model::Flow(m) => m.evaluate(x),
            Model::Dispatch(m) => m.evaluate(x),
            Model::Coverage(m) => m.evaluate(x),
        }
    }
}
