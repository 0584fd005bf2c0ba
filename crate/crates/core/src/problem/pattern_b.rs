use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use super::{check_bounds, DecisionSpace, EvalError, Fitness, Objective};
use crate::graph::{PropertyGraph, PropertyValue};
use crate::query::{execute, ExecutionError, Query};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterializationError {
    #[error("startup query `{query}`: {source}")]
    Execution {
        query: String,
        source: ExecutionError,
    },
    #[error("startup query `{query}` returned {got} rows, expected {expected}")]
    LengthMismatch {
        query: String,
        expected: usize,
        got: usize,
    },
    #[error("column `{0}` is produced by more than one startup query")]
    DuplicateColumn(String),
    #[error("no materialized column named `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}` row {row} holds {found}, expected a number")]
    NotNumeric {
        column: String,
        row: usize,
        found: String,
    },
}

/// Columns pulled by one group of startup queries, all of one length.
#[derive(Debug, Clone, PartialEq)]
pub struct Materialized {
    len: usize,
    columns: BTreeMap<String, Vec<PropertyValue>>,
    null_counts: BTreeMap<String, usize>,
    missing_property_count: usize,
    queries: Vec<String>,
}

impl Materialized {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, name: &str) -> Result<&[PropertyValue], MaterializationError> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| MaterializationError::UnknownColumn(name.to_string()))
    }

    /// Numeric column; nulls are rejected.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>, MaterializationError> {
        self.column(name)?
            .iter()
            .enumerate()
            .map(|(row, v)| {
                v.as_f64().ok_or_else(|| MaterializationError::NotNumeric {
                    column: name.to_string(),
                    row,
                    found: v.to_string(),
                })
            })
            .collect()
    }

    /// Text column with nulls kept as `None`. Non-text values are rendered.
    pub fn texts(&self, name: &str) -> Result<Vec<Option<String>>, MaterializationError> {
        Ok(self
            .column(name)?
            .iter()
            .map(|v| match v {
                PropertyValue::Null => None,
                PropertyValue::Text(s) => Some(s.clone()),
                other => Some(other.to_string()),
            })
            .collect())
    }

    pub fn null_count(&self, name: &str) -> usize {
        self.null_counts.get(name).copied().unwrap_or(0)
    }

    pub fn missing_property_count(&self) -> usize {
        self.missing_property_count
    }

    /// Bound query texts, in execution order.
    pub fn queries(&self) -> &[String] {
        &self.queries
    }
}

/// Runs each query once and aligns every returned column by row index.
pub fn materialize(
    graph: &PropertyGraph,
    queries: &[Query],
) -> Result<Materialized, MaterializationError> {
    let mut out = Materialized {
        len: 0,
        columns: BTreeMap::new(),
        null_counts: BTreeMap::new(),
        missing_property_count: 0,
        queries: Vec::new(),
    };
    for (qi, query) in queries.iter().enumerate() {
        let text = query.to_string();
        let table = execute(graph, query).map_err(|source| MaterializationError::Execution {
            query: text.clone(),
            source,
        })?;
        if qi == 0 {
            out.len = table.rows.len();
        } else if table.rows.len() != out.len {
            return Err(MaterializationError::LengthMismatch {
                query: text,
                expected: out.len,
                got: table.rows.len(),
            });
        }
        out.missing_property_count += table.missing_property_count;
        for (ci, name) in table.columns.iter().enumerate() {
            if out.columns.contains_key(name) {
                return Err(MaterializationError::DuplicateColumn(name.clone()));
            }
            let values: Vec<PropertyValue> = table.rows.iter().map(|r| r[ci].clone()).collect();
            let nulls = values.iter().filter(|v| v.is_null()).count();
            out.null_counts.insert(name.clone(), nulls);
            out.columns.insert(name.clone(), values);
        }
        out.queries.push(text);
    }
    Ok(out)
}

/// Evaluation over pre-materialized arrays. Must not touch a graph.
pub trait NativeModel {
    fn evaluate(&self, x: &[f64]) -> Fitness;
}

/// A native model plus the record of how its arrays were obtained.
#[derive(Debug)]
pub struct PatternBBinding<M> {
    model: Arc<M>,
    space: DecisionSpace,
    startup_queries: Vec<String>,
    missing_properties: usize,
}

impl<M> Clone for PatternBBinding<M> {
    fn clone(&self) -> Self {
        Self {
            model: Arc::clone(&self.model),
            space: self.space.clone(),
            startup_queries: self.startup_queries.clone(),
            missing_properties: self.missing_properties,
        }
    }
}

impl<M: NativeModel> PatternBBinding<M> {
    pub fn new(
        model: Arc<M>,
        space: DecisionSpace,
        startup_queries: Vec<String>,
        missing_properties: usize,
    ) -> Self {
        Self {
            model,
            space,
            startup_queries,
            missing_properties,
        }
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn startup_queries(&self) -> &[String] {
        &self.startup_queries
    }
}

impl<M: NativeModel> Objective for PatternBBinding<M> {
    fn space(&self) -> &DecisionSpace {
        &self.space
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        check_bounds(&self.space, x)?;
        Ok(self.model.evaluate(x))
    }

    fn missing_property_count(&self) -> usize {
        self.missing_properties
    }
}
