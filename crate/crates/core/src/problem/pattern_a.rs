use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{
    check_bounds, decode_selection, DecisionSpace, EvalError, Fitness, Objective, ObjectiveTerm,
    Quantizer, SpaceKind, ViolationTerm,
};
use crate::graph::{PropertyGraph, PropertyValue};
use crate::query::{execute, QueryTemplate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemplateRole {
    /// Contributes `scale * value`.
    Objective { scale: f64 },
    /// Contributes `weight * max(0, value)`.
    Constraint { weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateTerm {
    pub name: Cow<'static, str>,
    pub template: QueryTemplate,
    pub role: TemplateRole,
}

impl TemplateTerm {
    pub fn objective(
        name: impl Into<Cow<'static, str>>,
        template: QueryTemplate,
        scale: f64,
    ) -> Self {
        Self {
            name: name.into(),
            template,
            role: TemplateRole::Objective { scale },
        }
    }

    pub fn constraint(
        name: impl Into<Cow<'static, str>>,
        template: QueryTemplate,
        weight: f64,
    ) -> Self {
        Self {
            name: name.into(),
            template,
            role: TemplateRole::Constraint { weight },
        }
    }
}

/// Runs every template against the graph once per distinct (quantized)
/// decision vector.
///
/// For selection spaces the decoded candidates are bound as a list to
/// `list_param`. Scalar placeholders are bound from `scalars`.
#[derive(Debug, Clone)]
pub struct PatternABinding {
    graph: Arc<PropertyGraph>,
    space: DecisionSpace,
    terms: Vec<TemplateTerm>,
    candidates: Vec<PropertyValue>,
    list_param: String,
    scalars: BTreeMap<String, PropertyValue>,
    quantizer: Quantizer,
    memo: Option<BTreeMap<u64, Fitness>>,
    query_executions: u64,
    memo_hits: u64,
    missing_properties: usize,
}

impl PatternABinding {
    /// `candidates[i]` is the value bound for decoded index `i`.
    pub fn new(
        graph: Arc<PropertyGraph>,
        space: DecisionSpace,
        terms: Vec<TemplateTerm>,
        candidates: Vec<PropertyValue>,
        list_param: impl Into<String>,
    ) -> Self {
        let quantizer = Quantizer::for_space(&space);
        Self {
            graph,
            space,
            terms,
            candidates,
            list_param: list_param.into(),
            scalars: BTreeMap::new(),
            quantizer,
            memo: Some(BTreeMap::new()),
            query_executions: 0,
            memo_hits: 0,
            missing_properties: 0,
        }
    }

    pub fn with_scalar(mut self, name: impl Into<String>, value: PropertyValue) -> Self {
        self.scalars.insert(name.into(), value);
        self
    }

    /// Turning memoization off also drops the current table.
    pub fn set_memoization(&mut self, enabled: bool) {
        self.memo = enabled.then(BTreeMap::new);
    }

    pub fn with_quantizer(mut self, quantizer: Quantizer) -> Self {
        self.quantizer = quantizer;
        self
    }

    pub fn graph(&self) -> &Arc<PropertyGraph> {
        &self.graph
    }

    pub fn terms(&self) -> &[TemplateTerm] {
        &self.terms
    }

    pub fn candidates(&self) -> &[PropertyValue] {
        &self.candidates
    }

    /// Individual query runs so far (one per template per memo miss).
    pub fn query_executions(&self) -> u64 {
        self.query_executions
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, |m| m.len())
    }

    /// Same templates and data with an empty memo and zeroed counters.
    pub fn fresh(&self) -> Self {
        let mut b = self.clone();
        b.memo = self.memo.as_ref().map(|_| BTreeMap::new());
        b.query_executions = 0;
        b.memo_hits = 0;
        b.missing_properties = 0;
        b
    }

    fn compute(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        let mut lists = BTreeMap::new();
        if let SpaceKind::Selection { n, .. } = self.space.kind() {
            let picked = decode_selection(x, n.min(self.candidates.len()));
            lists.insert(
                self.list_param.clone(),
                picked.iter().map(|&i| self.candidates[i].clone()).collect(),
            );
        }
        let mut objective_terms = Vec::new();
        let mut violation_terms = Vec::new();
        for term in &self.terms {
            let query = term
                .template
                .substitute(&self.scalars, &lists)
                .map_err(|source| EvalError::Substitution {
                    template: term.name.to_string(),
                    source,
                })?;
            let table = execute(&self.graph, &query).map_err(|source| EvalError::Execution {
                template: term.name.to_string(),
                source,
            })?;
            self.query_executions += 1;
            self.missing_properties += table.missing_property_count;
            let value = match table.scalar().and_then(PropertyValue::as_f64) {
                Some(v) => v,
                None => {
                    let found = match table.scalar() {
                        Some(v) => v.to_string(),
                        None => alloc::format!("{} rows", table.rows.len()),
                    };
                    return Err(EvalError::NonNumericResult {
                        template: term.name.to_string(),
                        found,
                    });
                }
            };
            match term.role {
                TemplateRole::Objective { scale } => {
                    objective_terms.push(ObjectiveTerm::new(term.name.clone(), value, scale))
                }
                TemplateRole::Constraint { weight } => {
                    violation_terms.push(ViolationTerm::new(term.name.clone(), value, weight))
                }
            }
        }
        Ok(Fitness::new(objective_terms, violation_terms))
    }
}

impl Objective for PatternABinding {
    fn space(&self) -> &DecisionSpace {
        &self.space
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Fitness, EvalError> {
        check_bounds(&self.space, x)?;
        let key = self.quantizer.key(x);
        if let Some(hit) = self.memo.as_ref().and_then(|m| m.get(&key)) {
            self.memo_hits += 1;
            return Ok(hit.clone());
        }
        let fitness = self.compute(x)?;
        if let Some(memo) = &mut self.memo {
            memo.insert(key, fitness.clone());
        }
        Ok(fitness)
    }

    fn memo_hits(&self) -> u64 {
        self.memo_hits
    }

    fn missing_property_count(&self) -> usize {
        self.missing_properties
    }
}
