use alloc::borrow::Cow;
use alloc::vec::Vec;

use thiserror::Error;

use crate::problem::{EvalError, Objective};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Objective,
    Violation,
}

/// Spread of one fitness term over the sampled vectors. Objective terms
/// report their raw value, violation terms their degree.
#[derive(Debug, Clone, PartialEq)]
pub struct TermReport {
    pub name: Cow<'static, str>,
    pub kind: TermKind,
    pub min: f64,
    pub max: f64,
    pub variance: f64,
    /// Identical value in every sample.
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub samples: usize,
    pub missing_property_count: usize,
    pub rows: Vec<TermReport>,
}

impl DegeneracyReport {
    pub fn degenerate(&self) -> impl Iterator<Item = &TermReport> {
        self.rows.iter().filter(|r| r.constant)
    }

    pub fn is_flagged(&self, name: &str) -> bool {
        self.rows.iter().any(|r| r.constant && r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegeneracyError {
    #[error("degeneracy check needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {sample} failed to evaluate")]
    Evaluation {
        sample: usize,
        #[source]
        source: EvalError,
    },
    #[error("sample {sample} changed the term layout")]
    InconsistentTerms { sample: usize },
}

/// Evaluates `samples` uniform random vectors and flags every term whose
/// value never changes. A constant term contributes nothing to the search,
/// which usually means the data it reads is missing.
pub fn detect_degenerate_terms<O: Objective + ?Sized>(
    objective: &mut O,
    samples: usize,
    seed: u64,
) -> Result<DegeneracyReport, DegeneracyError> {
    if samples < 2 {
        return Err(DegeneracyError::TooFewSamples(samples));
    }
    let mut rng = Stream::new(seed, 0);
    let space = objective.space().clone();
    let mut x = alloc::vec![0.0; space.dim()];
    let mut names: Vec<(Cow<'static, str>, TermKind)> = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    for sample in 0..samples {
        for (d, xd) in x.iter_mut().enumerate() {
            *xd = rng.range(space.lower()[d], space.upper()[d]);
        }
        let f = objective
            .evaluate(&x)
            .map_err(|source| DegeneracyError::Evaluation { sample, source })?;
        let row: Vec<(Cow<'static, str>, TermKind, f64)> = f
            .objective_terms
            .iter()
            .map(|t| (t.name.clone(), TermKind::Objective, t.raw))
            .chain(
                f.violation_terms
                    .iter()
                    .map(|t| (t.name.clone(), TermKind::Violation, t.degree)),
            )
            .collect();
        if sample == 0 {
            names = row.iter().map(|(n, k, _)| (n.clone(), *k)).collect();
            values = alloc::vec![Vec::with_capacity(samples); names.len()];
        } else if row.len() != names.len() || row.iter().zip(&names).any(|(r, n)| r.0 != n.0) {
            return Err(DegeneracyError::InconsistentTerms { sample });
        }
        for (col, (_, _, v)) in values.iter_mut().zip(row) {
            col.push(v);
        }
    }
    let rows = names
        .into_iter()
        .zip(values)
        .map(|((name, kind), v)| {
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let variance =
                v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len() - 1) as f64;
            TermReport {
                name,
                kind,
                min,
                max,
                variance,
                constant: min == max,
            }
        })
        .collect();
    Ok(DegeneracyReport {
        samples,
        missing_property_count: objective.missing_property_count(),
        rows,
    })
}
