//! Parser and evaluator for a small Cypher-inspired query language.
//!
//! ```text
//! MATCH (a:Label)[-[r:TYPE]->(b:Label)] [WHERE <expr>] RETURN <items>
//! ```
//!
//! Templates carry `$name` placeholders and are parsed once. Substitution
//! replaces placeholders in the AST with literals; a placeholder on the right
//! of `IN` takes a whole list, which is how a selection vector becomes
//! `d.id IN [3, 17, 42]`. See `QUERYLANG.md` for the grammar.

mod ast;
mod exec;
mod lexer;
mod parser;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

pub use ast::*;
pub use exec::{execute, ExecutionError, ResultTable};

use crate::graph::PropertyValue;

/// Longest list literal accepted in an `IN` clause.
pub const MAX_LIST_LEN: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubstitutionError {
    #[error("placeholder `${0}` is not bound")]
    Unbound(String),
    #[error("placeholder `${0}` is bound as both scalar and list")]
    BoundTwice(String),
    #[error("placeholder `${0}` expects a scalar but was given a list")]
    ListForScalar(String),
    #[error("placeholder `${0}` sits in an IN clause and needs a list")]
    ScalarForList(String),
    #[error("list bound to `${0}` has more than 100000 elements")]
    ListTooLong(String),
    #[error("list bound to `${name}` contains an invalid element ({value})")]
    InvalidListElement { name: String, value: String },
}

/// How a placeholder is used in the template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSlot {
    Scalar,
    /// Only ever appears as the right-hand side of `IN`.
    List,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryTemplate {
    source: String,
    placeholders: BTreeMap<String, ParamSlot>,
    ast: QueryAst,
}

impl QueryTemplate {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        if text.trim().is_empty() {
            return Err(ParseError::new(0, "empty query"));
        }
        let mut ast = parser::parse(text)?;
        let mut placeholders = BTreeMap::new();
        for e in ast.exprs_mut() {
            collect_params(e, false, &mut placeholders);
        }
        Ok(Self {
            source: text.to_string(),
            placeholders,
            ast,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &QueryAst {
        &self.ast
    }

    /// Placeholder names (without the `$`) and their slot kinds.
    pub fn placeholders(&self) -> &BTreeMap<String, ParamSlot> {
        &self.placeholders
    }

    /// Binds every placeholder. Map keys may be written with or without the
    /// leading `$`.
    pub fn substitute(
        &self,
        scalars: &BTreeMap<String, PropertyValue>,
        list_subs: &BTreeMap<String, Vec<PropertyValue>>,
    ) -> Result<Query, SubstitutionError> {
        let mut ast = self.ast.clone();
        let mut err = None;
        for e in ast.exprs_mut() {
            if err.is_none() {
                if let Err(e) = bind_params(e, false, scalars, list_subs) {
                    err = Some(e);
                }
            }
        }
        match err {
            Some(e) => Err(e),
            None => Ok(Query { ast }),
        }
    }

    /// Shorthand for templates without placeholders.
    pub fn bind_none(&self) -> Result<Query, SubstitutionError> {
        self.substitute(&BTreeMap::new(), &BTreeMap::new())
    }
}

impl fmt::Display for QueryTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// A fully bound query. Display renders the substituted query text.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    ast: QueryAst,
}

impl Query {
    pub fn ast(&self) -> &QueryAst {
        &self.ast
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

fn collect_params(e: &Expr, list_pos: bool, out: &mut BTreeMap<String, ParamSlot>) {
    match e {
        Expr::Param(p) => {
            let slot = if list_pos {
                ParamSlot::List
            } else {
                ParamSlot::Scalar
            };
            out.entry(p.clone())
                .and_modify(|s| {
                    if slot == ParamSlot::Scalar {
                        *s = ParamSlot::Scalar;
                    }
                })
                .or_insert(slot);
        }
        Expr::Binary(BinaryOp::In, l, r) => {
            collect_params(l, false, out);
            collect_params(r, true, out);
        }
        Expr::Binary(_, l, r) => {
            collect_params(l, false, out);
            collect_params(r, false, out);
        }
        Expr::Unary(_, inner) => collect_params(inner, false, out),
        Expr::List(items) => items.iter().for_each(|i| collect_params(i, false, out)),
        Expr::Literal(_) | Expr::Var(_) | Expr::Property { .. } => {}
    }
}

fn lookup<'m, V>(map: &'m BTreeMap<String, V>, name: &str) -> Option<&'m V> {
    map.get(name).or_else(|| {
        let mut dollar = String::with_capacity(name.len() + 1);
        dollar.push('$');
        dollar.push_str(name);
        map.get(&dollar)
    })
}

fn bind_params(
    e: &mut Expr,
    list_pos: bool,
    scalars: &BTreeMap<String, PropertyValue>,
    list_subs: &BTreeMap<String, Vec<PropertyValue>>,
) -> Result<(), SubstitutionError> {
    match e {
        Expr::Param(p) => {
            let name = p.clone();
            let scalar = lookup(scalars, &name);
            let list = lookup(list_subs, &name);
            let value = match (scalar, list) {
                (Some(_), Some(_)) => return Err(SubstitutionError::BoundTwice(name)),
                (None, None) => return Err(SubstitutionError::Unbound(name)),
                (Some(v), None) => {
                    match (v, list_pos) {
                        (PropertyValue::List(items), true) => check_list(&name, items)?,
                        (PropertyValue::List(_), false) => {
                            return Err(SubstitutionError::ListForScalar(name))
                        }
                        (_, true) => return Err(SubstitutionError::ScalarForList(name)),
                        (_, false) => {}
                    }
                    v.clone()
                }
                (None, Some(items)) => {
                    if !list_pos {
                        return Err(SubstitutionError::ListForScalar(name));
                    }
                    check_list(&name, items)?;
                    PropertyValue::List(items.clone())
                }
            };
            *e = Expr::Literal(value);
            Ok(())
        }
        Expr::Binary(op, l, r) => {
            let in_rhs = *op == BinaryOp::In;
            bind_params(l, false, scalars, list_subs)?;
            bind_params(r, in_rhs, scalars, list_subs)
        }
        Expr::Unary(_, inner) => bind_params(inner, false, scalars, list_subs),
        Expr::List(items) => items
            .iter_mut()
            .try_for_each(|i| bind_params(i, false, scalars, list_subs)),
        Expr::Literal(_) | Expr::Var(_) | Expr::Property { .. } => Ok(()),
    }
}

fn check_list(name: &str, items: &[PropertyValue]) -> Result<(), SubstitutionError> {
    if items.len() > MAX_LIST_LEN {
        return Err(SubstitutionError::ListTooLong(name.to_string()));
    }
    for v in items {
        let bad = match v {
            PropertyValue::Null | PropertyValue::List(_) => true,
            PropertyValue::Float(x) => !x.is_finite(),
            _ => false,
        };
        if bad {
            return Err(SubstitutionError::InvalidListElement {
                name: name.to_string(),
                value: v.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
