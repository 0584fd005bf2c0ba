use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use super::ast::*;
use super::Query;
use crate::graph::{Edge, Node, PropertyGraph, PropertyValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecutionError {
    #[error("queries run only against frozen graphs")]
    GraphNotFrozen,
    #[error("type mismatch: {left} {op} {right}")]
    TypeMismatch {
        op: &'static str,
        left: &'static str,
        right: &'static str,
    },
    #[error("{0} expects {1}")]
    InvalidOperand(&'static str, &'static str),
    #[error("integer overflow")]
    Overflow,
    #[error("arithmetic produced a non-finite value")]
    NonFinite,
    #[error("unbound parameter `${0}`")]
    UnboundParameter(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Query output. Rows follow ascending matched-node order; grouped rows
/// follow the first appearance of each group.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<PropertyValue>>,
    /// References to absent properties seen while filtering, grouping,
    /// projecting or aggregating.
    pub missing_property_count: usize,
}

impl ResultTable {
    /// The single value of a one-row, one-column result.
    pub fn scalar(&self) -> Option<&PropertyValue> {
        match (self.rows.as_slice(), self.columns.len()) {
            ([row], 1) => row.first(),
            _ => None,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&PropertyValue>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

#[derive(Clone, Copy)]
enum Element<'g> {
    Node(&'g Node),
    Edge(&'g Edge),
}

struct Env<'q, 'g> {
    slots: [(&'q str, Option<Element<'g>>); 3],
}

impl<'q, 'g> Env<'q, 'g> {
    fn get(&self, var: &str) -> Option<Element<'g>> {
        self.slots
            .iter()
            .find(|(name, el)| el.is_some() && *name == var)
            .and_then(|(_, el)| *el)
    }
}

enum Fail {
    Missing,
    Error(ExecutionError),
}

impl From<ExecutionError> for Fail {
    fn from(e: ExecutionError) -> Self {
        Fail::Error(e)
    }
}

/// Runs a bound query. Execution never mutates the graph.
pub fn execute(graph: &PropertyGraph, query: &Query) -> Result<ResultTable, ExecutionError> {
    if !graph.is_frozen() {
        return Err(ExecutionError::GraphNotFrozen);
    }
    let ast = query.ast();
    let mut missing = 0usize;
    let mut matched: Vec<Env<'_, '_>> = Vec::new();
    for env in match_pattern(graph, &ast.pattern) {
        let keep = match &ast.filter {
            None => true,
            Some(filter) => match eval(filter, &env) {
                Ok(PropertyValue::Bool(b)) => b,
                Ok(_) => return Err(ExecutionError::InvalidOperand("WHERE", "a boolean")),
                Err(Fail::Missing) => {
                    missing += 1;
                    false
                }
                Err(Fail::Error(e)) => return Err(e),
            },
        };
        if keep {
            matched.push(env);
        }
    }

    let columns = ast.items.iter().map(ReturnItem::column_name).collect();
    let rows = if ast.items.iter().any(|i| i.projection.is_aggregate()) {
        aggregate_rows(&ast.items, &matched, &mut missing)?
    } else {
        let mut rows = Vec::with_capacity(matched.len());
        for env in &matched {
            let mut row = Vec::with_capacity(ast.items.len());
            for item in &ast.items {
                let Projection::Expr(e) = &item.projection else {
                    unreachable!()
                };
                row.push(project(e, env, &mut missing)?);
            }
            rows.push(row);
        }
        rows
    };
    Ok(ResultTable {
        columns,
        rows,
        missing_property_count: missing,
    })
}

fn match_pattern<'q, 'g>(graph: &'g PropertyGraph, pattern: &'q Pattern) -> Vec<Env<'q, 'g>> {
    let starts: Vec<&'g Node> = match &pattern.start.label {
        Some(label) => graph
            .nodes_by_label(label)
            .iter()
            .filter_map(|id| graph.node(*id))
            .collect(),
        None => graph.nodes().iter().collect(),
    };
    let mut out = Vec::new();
    for a in starts {
        match &pattern.hop {
            None => out.push(Env {
                slots: [
                    (pattern.start.var.as_str(), Some(Element::Node(a))),
                    ("", None),
                    ("", None),
                ],
            }),
            Some((rel, end)) => {
                for eid in graph.outgoing(a.id) {
                    let edge = graph
                        .edge(*eid)
                        .expect("adjacency references existing edges");
                    if rel.rel_type.as_deref().is_some_and(|t| t != edge.edge_type) {
                        continue;
                    }
                    let b = graph
                        .node(edge.dst)
                        .expect("edges reference existing nodes");
                    if end.label.as_deref().is_some_and(|l| !b.has_label(l)) {
                        continue;
                    }
                    out.push(Env {
                        slots: [
                            (pattern.start.var.as_str(), Some(Element::Node(a))),
                            (
                                rel.var.as_deref().unwrap_or(""),
                                rel.var.as_ref().map(|_| Element::Edge(edge)),
                            ),
                            (end.var.as_str(), Some(Element::Node(b))),
                        ],
                    });
                }
            }
        }
    }
    out
}

fn project(
    e: &Expr,
    env: &Env<'_, '_>,
    missing: &mut usize,
) -> Result<PropertyValue, ExecutionError> {
    match eval(e, env) {
        Ok(v) => Ok(v),
        Err(Fail::Missing) => {
            *missing += 1;
            Ok(PropertyValue::Null)
        }
        Err(Fail::Error(e)) => Err(e),
    }
}

fn lookup_property(el: Element<'_>, name: &str) -> Option<PropertyValue> {
    let (props, id) = match el {
        Element::Node(n) => (&n.properties, n.id.0),
        Element::Edge(e) => (&e.properties, e.id.0),
    };
    match props.get(name) {
        Some(v) => Some(v.clone()),
        // `x.id` falls back to the dense element id
        None if name == "id" => Some(PropertyValue::Int(id as i64)),
        None => None,
    }
}

fn eval(e: &Expr, env: &Env<'_, '_>) -> Result<PropertyValue, Fail> {
    match e {
        Expr::Literal(v) => Ok(v.clone()),
        Expr::Param(p) => Err(ExecutionError::UnboundParameter(p.clone()).into()),
        Expr::Var(v) => match env.get(v) {
            Some(Element::Node(n)) => Ok(PropertyValue::Int(n.id.0 as i64)),
            Some(Element::Edge(ed)) => Ok(PropertyValue::Int(ed.id.0 as i64)),
            None => Err(ExecutionError::UnknownVariable(v.clone()).into()),
        },
        Expr::Property { var, name } => {
            let el = env
                .get(var)
                .ok_or_else(|| ExecutionError::UnknownVariable(var.clone()))?;
            lookup_property(el, name).ok_or(Fail::Missing)
        }
        Expr::List(items) => {
            let mut vals = Vec::with_capacity(items.len());
            for i in items {
                vals.push(eval(i, env)?);
            }
            Ok(PropertyValue::List(vals))
        }
        Expr::Unary(UnaryOp::Not, inner) => match eval(inner, env)? {
            PropertyValue::Bool(b) => Ok(PropertyValue::Bool(!b)),
            _ => Err(ExecutionError::InvalidOperand("NOT", "a boolean").into()),
        },
        Expr::Unary(UnaryOp::Neg, inner) => match eval(inner, env)? {
            PropertyValue::Int(i) => Ok(PropertyValue::Int(
                i.checked_neg().ok_or(ExecutionError::Overflow)?,
            )),
            PropertyValue::Float(x) => Ok(PropertyValue::Float(-x)),
            _ => Err(ExecutionError::InvalidOperand("unary -", "a number").into()),
        },
        Expr::Binary(op, l, r) => match op {
            BinaryOp::And | BinaryOp::Or => {
                let lv = as_bool(op.symbol(), eval(l, env)?)?;
                if (*op == BinaryOp::And && !lv) || (*op == BinaryOp::Or && lv) {
                    return Ok(PropertyValue::Bool(lv));
                }
                Ok(PropertyValue::Bool(as_bool(op.symbol(), eval(r, env)?)?))
            }
            BinaryOp::In => {
                let needle = eval(l, env)?;
                let PropertyValue::List(items) = eval(r, env)? else {
                    return Err(ExecutionError::InvalidOperand("IN", "a list").into());
                };
                for item in &items {
                    if values_equal(&needle, item)? {
                        return Ok(PropertyValue::Bool(true));
                    }
                }
                Ok(PropertyValue::Bool(false))
            }
            BinaryOp::Eq | BinaryOp::Neq => {
                let eq = values_equal(&eval(l, env)?, &eval(r, env)?)?;
                Ok(PropertyValue::Bool(eq == (*op == BinaryOp::Eq)))
            }
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                let (lv, rv) = (eval(l, env)?, eval(r, env)?);
                let ord = compare_ordered(op.symbol(), &lv, &rv)?;
                let res = match op {
                    BinaryOp::Lt => ord == Ordering::Less,
                    BinaryOp::Le => ord != Ordering::Greater,
                    BinaryOp::Gt => ord == Ordering::Greater,
                    _ => ord != Ordering::Less,
                };
                Ok(PropertyValue::Bool(res))
            }
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
                Ok(arithmetic(*op, eval(l, env)?, eval(r, env)?)?)
            }
        },
    }
}

fn as_bool(op: &'static str, v: PropertyValue) -> Result<bool, ExecutionError> {
    match v {
        PropertyValue::Bool(b) => Ok(b),
        _ => Err(ExecutionError::InvalidOperand(op, "booleans")),
    }
}

fn mismatch(op: &'static str, l: &PropertyValue, r: &PropertyValue) -> ExecutionError {
    ExecutionError::TypeMismatch {
        op,
        left: l.type_name(),
        right: r.type_name(),
    }
}

fn values_equal(l: &PropertyValue, r: &PropertyValue) -> Result<bool, ExecutionError> {
    use PropertyValue::*;
    match (l, r) {
        (Int(a), Int(b)) => Ok(a == b),
        (Int(_) | Float(_), Int(_) | Float(_)) => Ok(l.as_f64() == r.as_f64()),
        (Text(a), Text(b)) => Ok(a == b),
        (Bool(a), Bool(b)) => Ok(a == b),
        _ => Err(mismatch("=", l, r)),
    }
}

fn compare_ordered(
    op: &'static str,
    l: &PropertyValue,
    r: &PropertyValue,
) -> Result<Ordering, ExecutionError> {
    use PropertyValue::*;
    match (l, r) {
        (Int(a), Int(b)) => Ok(a.cmp(b)),
        (Int(_) | Float(_), Int(_) | Float(_)) => {
            let (a, b) = (l.as_f64().unwrap(), r.as_f64().unwrap());
            a.partial_cmp(&b).ok_or(ExecutionError::NonFinite)
        }
        (Text(a), Text(b)) => Ok(a.cmp(b)),
        _ => Err(mismatch(op, l, r)),
    }
}

fn arithmetic(
    op: BinaryOp,
    l: PropertyValue,
    r: PropertyValue,
) -> Result<PropertyValue, ExecutionError> {
    use PropertyValue::*;
    if let (Int(a), Int(b)) = (&l, &r) {
        if op != BinaryOp::Div {
            let v = match op {
                BinaryOp::Add => a.checked_add(*b),
                BinaryOp::Sub => a.checked_sub(*b),
                _ => a.checked_mul(*b),
            };
            return v.map(Int).ok_or(ExecutionError::Overflow);
        }
    }
    let (Some(a), Some(b)) = (l.as_f64(), r.as_f64()) else {
        return Err(mismatch(op.symbol(), &l, &r));
    };
    let v = match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        _ => a / b,
    };
    if v.is_finite() {
        Ok(Float(v))
    } else {
        Err(ExecutionError::NonFinite)
    }
}

/// Typed canonical key used for DISTINCT and grouping.
fn value_key(v: &PropertyValue) -> String {
    format!("{}:{}", v.type_name(), v)
}

enum Acc {
    CountStar(i64),
    Count(i64),
    Sum {
        int: i64,
        float: f64,
        is_float: bool,
    },
    Extreme {
        best: Option<PropertyValue>,
        want: Ordering,
    },
    Avg {
        sum: f64,
        n: u64,
    },
    Collect(Vec<PropertyValue>),
}

struct AggState {
    acc: Acc,
    seen: Option<BTreeSet<String>>,
}

impl AggState {
    fn new(func: AggregateFn, distinct: bool, star: bool) -> Self {
        let acc = match func {
            AggregateFn::Count if star => Acc::CountStar(0),
            AggregateFn::Count => Acc::Count(0),
            AggregateFn::Sum => Acc::Sum {
                int: 0,
                float: 0.0,
                is_float: false,
            },
            AggregateFn::Min => Acc::Extreme {
                best: None,
                want: Ordering::Less,
            },
            AggregateFn::Max => Acc::Extreme {
                best: None,
                want: Ordering::Greater,
            },
            AggregateFn::Avg => Acc::Avg { sum: 0.0, n: 0 },
            AggregateFn::Collect => Acc::Collect(Vec::new()),
        };
        Self {
            acc,
            seen: distinct.then(BTreeSet::new),
        }
    }

    fn push(&mut self, v: PropertyValue) -> Result<(), ExecutionError> {
        if let Some(seen) = &mut self.seen {
            if !seen.insert(value_key(&v)) {
                return Ok(());
            }
        }
        match &mut self.acc {
            Acc::CountStar(n) | Acc::Count(n) => *n += 1,
            Acc::Sum {
                int,
                float,
                is_float,
            } => match v {
                PropertyValue::Int(i) if !*is_float => {
                    *int = int.checked_add(i).ok_or(ExecutionError::Overflow)?
                }
                PropertyValue::Int(_) | PropertyValue::Float(_) => {
                    if !*is_float {
                        *is_float = true;
                        *float = *int as f64;
                    }
                    *float += v.as_f64().unwrap();
                }
                _ => return Err(ExecutionError::InvalidOperand("sum", "numbers")),
            },
            Acc::Extreme { best, want } => {
                let replace = match best {
                    None => true,
                    Some(cur) => compare_ordered("min/max", &v, cur)? == *want,
                };
                if replace {
                    *best = Some(v);
                }
            }
            Acc::Avg { sum, n } => {
                *sum += v
                    .as_f64()
                    .ok_or(ExecutionError::InvalidOperand("avg", "numbers"))?;
                *n += 1;
            }
            Acc::Collect(items) => items.push(v),
        }
        Ok(())
    }

    fn finish(self) -> PropertyValue {
        match self.acc {
            Acc::CountStar(n) | Acc::Count(n) => PropertyValue::Int(n),
            Acc::Sum {
                int,
                float,
                is_float,
            } => {
                if is_float {
                    PropertyValue::Float(float)
                } else {
                    PropertyValue::Int(int)
                }
            }
            Acc::Extreme { best, .. } => best.unwrap_or(PropertyValue::Null),
            Acc::Avg { sum, n } => {
                if n == 0 {
                    PropertyValue::Null
                } else {
                    PropertyValue::Float(sum / n as f64)
                }
            }
            Acc::Collect(items) => PropertyValue::List(items),
        }
    }
}

struct Group {
    keys: Vec<PropertyValue>,
    states: Vec<AggState>,
}

fn aggregate_rows(
    items: &[ReturnItem],
    matched: &[Env<'_, '_>],
    missing: &mut usize,
) -> Result<Vec<Vec<PropertyValue>>, ExecutionError> {
    let fresh_states = || -> Vec<AggState> {
        items
            .iter()
            .filter_map(|i| match &i.projection {
                Projection::Aggregate {
                    func,
                    distinct,
                    arg,
                } => Some(AggState::new(*func, *distinct, arg.is_none())),
                Projection::Expr(_) => None,
            })
            .collect()
    };
    let grouped = items.iter().any(|i| !i.projection.is_aggregate());
    let mut groups: Vec<Group> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    if !grouped {
        groups.push(Group {
            keys: Vec::new(),
            states: fresh_states(),
        });
    }

    for env in matched {
        let gi = if grouped {
            let mut keys = Vec::new();
            for item in items {
                if let Projection::Expr(e) = &item.projection {
                    keys.push(project(e, env, missing)?);
                }
            }
            let key: String = keys
                .iter()
                .map(value_key)
                .collect::<Vec<_>>()
                .join("\u{1f}");
            match index.get(&key) {
                Some(&gi) => gi,
                None => {
                    groups.push(Group {
                        keys,
                        states: fresh_states(),
                    });
                    index.insert(key, groups.len() - 1);
                    groups.len() - 1
                }
            }
        } else {
            0
        };
        let group = &mut groups[gi];
        let mut si = 0;
        for item in items {
            let Projection::Aggregate { arg, .. } = &item.projection else {
                continue;
            };
            let state = &mut group.states[si];
            si += 1;
            match arg {
                None => state.push(PropertyValue::Null)?,
                Some(e) => match eval(e, env) {
                    Ok(v) => state.push(v)?,
                    Err(Fail::Missing) => *missing += 1,
                    Err(Fail::Error(e)) => return Err(e),
                },
            }
        }
    }

    let mut rows = Vec::with_capacity(groups.len());
    for group in groups {
        let mut keys = group.keys.into_iter();
        let mut states = group.states.into_iter();
        let row = items
            .iter()
            .map(|item| {
                if item.projection.is_aggregate() {
                    states.next().unwrap().finish()
                } else {
                    keys.next().unwrap()
                }
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}
