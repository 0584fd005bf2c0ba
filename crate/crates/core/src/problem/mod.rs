//! Decision spaces, decomposed fitness and the two ways of binding a problem
//! to a graph.
//!
//! A [`PatternABinding`] substitutes the decoded decision into query
//! templates and runs them on every (unmemoized) evaluation. A
//! [`PatternBBinding`] pulls per-candidate arrays once through startup
//! queries and then evaluates a native model over those arrays.

mod fitness;
mod memo;
mod pattern_a;
mod pattern_b;
mod space;

use alloc::string::String;

use thiserror::Error;

pub use fitness::{Fitness, ObjectiveTerm, ViolationTerm};
pub use memo::{fnv1a_i64, memo_key, Quantizer};
pub use pattern_a::{PatternABinding, TemplateRole, TemplateTerm};
pub use pattern_b::{
    materialize, MaterializationError, Materialized, NativeModel, PatternBBinding,
};
pub use space::{decode_selection, DecisionSpace, SpaceError, SpaceKind};

use crate::query::{ExecutionError, SubstitutionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("decision vector has {got} coordinates, space has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {index} = {value} lies outside the decision space")]
    OutOfBounds { index: usize, value: f64 },
    #[error("template `{template}`: {source}")]
    Substitution {
        template: String,
        source: SubstitutionError,
    },
    #[error("template `{template}`: {source}")]
    Execution {
        template: String,
        source: ExecutionError,
    },
    #[error("template `{template}` returned {found} instead of a single number")]
    NonNumericResult { template: String, found: String },
}

/// Anything a solver can minimize.
pub trait Objective {
    fn space(&self) -> &DecisionSpace;

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError>;

    /// Evaluations answered from a memo table.
    fn memo_hits(&self) -> u64 {
        0
    }

    /// Properties that were absent when the binding read the graph.
    fn missing_property_count(&self) -> usize {
        0
    }
}

impl<T: Objective + ?Sized> Objective for &mut T {
    fn space(&self) -> &DecisionSpace {
        (**self).space()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        (**self).evaluate(x)
    }

    fn memo_hits(&self) -> u64 {
        (**self).memo_hits()
    }

    fn missing_property_count(&self) -> usize {
        (**self).missing_property_count()
    }
}

pub(crate) fn check_bounds(space: &DecisionSpace, x: &[f64]) -> Result<(), EvalError> {
    if x.len() != space.dim() {
        return Err(EvalError::Dimension {
            expected: space.dim(),
            got: x.len(),
        });
    }
    for (index, (&v, (&l, &u))) in x
        .iter()
        .zip(space.lower().iter().zip(space.upper()))
        .enumerate()
    {
        if !(v >= l && v <= u) {
            return Err(EvalError::OutOfBounds { index, value: v });
        }
    }
    Ok(())
}

/// Wraps a closure returning a scalar as a single-term objective.
pub struct FnObjective<F> {
    space: DecisionSpace,
    f: F,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(space: DecisionSpace, f: F) -> Self {
        Self { space, f }
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn space(&self) -> &DecisionSpace {
        &self.space
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        check_bounds(&self.space, x)?;
        let v = (self.f)(x);
        Ok(Fitness::new(
            alloc::vec![ObjectiveTerm::new("value", v, 1.0)],
            alloc::vec::Vec::new(),
        ))
    }
}
