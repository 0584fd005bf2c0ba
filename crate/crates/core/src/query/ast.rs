use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::PropertyValue;

#[derive(Debug, Clone, PartialEq)]
pub struct NodePattern {
    pub var: String,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub var: Option<String>,
    pub rel_type: Option<String>,
}

/// `(a:Label)` optionally followed by one `-[r:TYPE]->(b:Label)` hop.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub start: NodePattern,
    pub hop: Option<(RelPattern, NodePattern)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "OR",
            BinaryOp::And => "AND",
            BinaryOp::Eq => "=",
            BinaryOp::Neq => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::In => "IN",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Neq
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge
            | BinaryOp::In => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(PropertyValue),
    Param(String),
    /// Bare variable; evaluates to the element's dense id.
    Var(String),
    Property {
        var: String,
        name: String,
    },
    List(Vec<Expr>),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateFn {
    Count,
    Sum,
    Min,
    Max,
    Avg,
    Collect,
}

impl AggregateFn {
    pub fn from_name(name: &str) -> Option<Self> {
        let f = match name.to_ascii_lowercase().as_str() {
            "count" => AggregateFn::Count,
            "sum" => AggregateFn::Sum,
            "min" => AggregateFn::Min,
            "max" => AggregateFn::Max,
            "avg" => AggregateFn::Avg,
            "collect" => AggregateFn::Collect,
            _ => return None,
        };
        Some(f)
    }

    pub fn name(self) -> &'static str {
        match self {
            AggregateFn::Count => "count",
            AggregateFn::Sum => "sum",
            AggregateFn::Min => "min",
            AggregateFn::Max => "max",
            AggregateFn::Avg => "avg",
            AggregateFn::Collect => "collect",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    Expr(Expr),
    /// `arg == None` is `count(*)`.
    Aggregate {
        func: AggregateFn,
        distinct: bool,
        arg: Option<Expr>,
    },
}

impl Projection {
    pub fn is_aggregate(&self) -> bool {
        matches!(self, Projection::Aggregate { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub projection: Projection,
    pub alias: Option<String>,
}

impl ReturnItem {
    pub fn column_name(&self) -> String {
        match &self.alias {
            Some(a) => a.clone(),
            None => alloc::format!("{}", self.projection),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    pub pattern: Pattern,
    pub filter: Option<Expr>,
    pub items: Vec<ReturnItem>,
}

impl QueryAst {
    pub(crate) fn exprs_mut(&mut self) -> impl Iterator<Item = &mut Expr> {
        self.filter
            .iter_mut()
            .chain(
                self.items
                    .iter_mut()
                    .filter_map(|item| match &mut item.projection {
                        Projection::Expr(e) => Some(e),
                        Projection::Aggregate { arg, .. } => arg.as_mut(),
                    }),
            )
    }
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "({}:{})", self.var, l),
            None => write!(f, "({})", self.var),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        if let Some((rel, node)) = &self.hop {
            f.write_str("-[")?;
            if let Some(v) = &rel.var {
                f.write_str(v)?;
            }
            if let Some(t) = &rel.rel_type {
                write!(f, ":{t}")?;
            }
            write!(f, "]->{node}")?;
        }
        Ok(())
    }
}

fn fmt_child(
    f: &mut fmt::Formatter<'_>,
    child: &Expr,
    parent_prec: u8,
    right: bool,
) -> fmt::Result {
    let needs = match child {
        Expr::Binary(op, _, _) => {
            let p = op.precedence();
            p < parent_prec || (right && p == parent_prec)
        }
        Expr::Unary(UnaryOp::Not, _) => parent_prec > 3,
        _ => false,
    };
    if needs {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{v}"),
            Expr::Param(p) => write!(f, "${p}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Property { var, name } => write!(f, "{var}.{name}"),
            Expr::List(items) => {
                f.write_str("[")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("]")
            }
            Expr::Unary(UnaryOp::Not, e) => {
                f.write_str("NOT ")?;
                fmt_child(f, e, 3, false)
            }
            Expr::Unary(UnaryOp::Neg, e) => {
                f.write_str("-")?;
                fmt_child(f, e, 7, false)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                fmt_child(f, l, p, false)?;
                write!(f, " {} ", op.symbol())?;
                fmt_child(f, r, p, true)
            }
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Expr(e) => write!(f, "{e}"),
            Projection::Aggregate {
                func,
                distinct,
                arg,
            } => {
                write!(f, "{}(", func.name())?;
                if *distinct {
                    f.write_str("DISTINCT ")?;
                }
                match arg {
                    Some(e) => write!(f, "{e}")?,
                    None => f.write_str("*")?,
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MATCH {}", self.pattern)?;
        if let Some(filter) = &self.filter {
            write!(f, " WHERE {filter}")?;
        }
        f.write_str(" RETURN ")?;
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", item.projection)?;
            if let Some(a) = &item.alias {
                write!(f, " AS {a}")?;
            }
        }
        Ok(())
    }
}
