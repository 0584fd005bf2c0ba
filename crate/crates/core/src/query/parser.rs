use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, MAX_LIST_LEN};
use crate::graph::PropertyValue;

const RESERVED: &[&str] = &[
    "MATCH", "WHERE", "RETURN", "AND", "OR", "NOT", "IN", "DISTINCT", "AS", "TRUE", "FALSE",
];

pub(crate) fn parse(src: &str) -> Result<QueryAst, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: src.len(),
        vars: Vec::new(),
    };
    let ast = p.query()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::new(t.offset, "unexpected trailing input"));
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Some(Tok::Ident(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(ParseError::new(self.offset(), format!("expected `{kw}`")))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek_tok() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(ParseError::new(self.offset(), format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek_tok() {
            Some(Tok::Ident(s)) if !is_reserved(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(ParseError::new(self.offset(), format!("expected {what}"))),
        }
    }

    fn query(&mut self) -> Result<QueryAst, ParseError> {
        self.expect_keyword("MATCH")?;
        let pattern = self.pattern()?;
        self.vars.push(pattern.start.var.clone());
        if let Some((rel, end)) = &pattern.hop {
            self.vars.extend(rel.var.clone());
            self.vars.push(end.var.clone());
        }
        let filter = if self.eat_keyword("WHERE") {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_keyword("RETURN")?;
        let mut items = alloc::vec![self.return_item()?];
        while self.eat(&Tok::Comma) {
            items.push(self.return_item()?);
        }
        Ok(QueryAst {
            pattern,
            filter,
            items,
        })
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let start = self.node_pattern()?;
        let hop = if self.eat(&Tok::Minus) {
            self.expect(&Tok::LBracket, "`[` after `-`")?;
            let var = match self.peek_tok() {
                Some(Tok::Ident(_)) => Some(self.ident("relationship variable")?),
                _ => None,
            };
            let rel_type = if self.eat(&Tok::Colon) {
                Some(self.ident("relationship type")?)
            } else {
                None
            };
            self.expect(&Tok::RBracket, "`]`")?;
            self.expect(&Tok::Minus, "`->`")?;
            self.expect(&Tok::Gt, "`->`")?;
            let end = self.node_pattern()?;
            if end.var == start.var
                || var.as_deref() == Some(start.var.as_str())
                || var.as_deref() == Some(end.var.as_str())
            {
                return Err(ParseError::new(
                    self.offset(),
                    "pattern variables must be distinct",
                ));
            }
            Some((RelPattern { var, rel_type }, end))
        } else {
            None
        };
        Ok(Pattern { start, hop })
    }

    fn node_pattern(&mut self) -> Result<NodePattern, ParseError> {
        self.expect(&Tok::LParen, "`(` opening a node pattern")?;
        let var = self.ident("node variable")?;
        let label = if self.eat(&Tok::Colon) {
            Some(self.ident("node label")?)
        } else {
            None
        };
        self.expect(&Tok::RParen, "`)` closing the node pattern")?;
        Ok(NodePattern { var, label })
    }

    fn return_item(&mut self) -> Result<ReturnItem, ParseError> {
        let projection = if let (Some(Tok::Ident(name)), Some(Tok::LParen)) = (
            self.peek_tok().cloned(),
            self.tokens.get(self.pos + 1).map(|t| t.tok.clone()),
        ) {
            let at = self.offset();
            let func = AggregateFn::from_name(&name)
                .ok_or_else(|| ParseError::new(at, format!("unknown aggregate `{name}`")))?;
            self.pos += 2;
            let distinct = self.eat_keyword("DISTINCT");
            let arg = if self.eat(&Tok::Star) {
                if func != AggregateFn::Count || distinct {
                    return Err(ParseError::new(at, "`*` is only valid in count(*)"));
                }
                None
            } else {
                Some(self.expr()?)
            };
            self.expect(&Tok::RParen, "`)` closing the aggregate")?;
            Projection::Aggregate {
                func,
                distinct,
                arg,
            }
        } else {
            Projection::Expr(self.expr()?)
        };
        let alias = if self.eat_keyword("AS") {
            Some(self.ident("alias")?)
        } else {
            None
        };
        Ok(ReturnItem { projection, alias })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.eat_keyword("OR") {
            let rhs = self.and_expr()?;
            lhs = Expr::Binary(BinaryOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.not_expr()?;
        while self.eat_keyword("AND") {
            let rhs = self.not_expr()?;
            lhs = Expr::Binary(BinaryOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, ParseError> {
        if self.eat_keyword("NOT") {
            Ok(Expr::Unary(UnaryOp::Not, Box::new(self.not_expr()?)))
        } else {
            self.comparison()
        }
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.additive()?;
        let op = match self.peek_tok() {
            Some(Tok::Eq) => BinaryOp::Eq,
            Some(Tok::Neq) => BinaryOp::Neq,
            Some(Tok::Lt) => BinaryOp::Lt,
            Some(Tok::Le) => BinaryOp::Le,
            Some(Tok::Gt) => BinaryOp::Gt,
            Some(Tok::Ge) => BinaryOp::Ge,
            Some(Tok::Ident(s)) if s.eq_ignore_ascii_case("IN") => BinaryOp::In,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.additive()?;
        if op == BinaryOp::In && !matches!(rhs, Expr::List(_) | Expr::Param(_)) {
            return Err(ParseError::new(
                self.offset(),
                "IN expects a list literal or a parameter",
            ));
        }
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek_tok() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.multiplicative()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_tok() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Literal(PropertyValue::Int(i)) => Expr::Literal(PropertyValue::Int(-i)),
                Expr::Literal(PropertyValue::Float(x)) => Expr::Literal(PropertyValue::Float(-x)),
                other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let Some(token) = self.bump() else {
            return Err(ParseError::new(at, "expected an expression"));
        };
        match token.tok {
            Tok::Int(i) => Ok(Expr::Literal(PropertyValue::Int(i))),
            Tok::Float(x) => Ok(Expr::Literal(PropertyValue::Float(x))),
            Tok::Str(s) => Ok(Expr::Literal(PropertyValue::Text(s))),
            Tok::Param(p) => Ok(Expr::Param(p)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBracket => {
                let mut items = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if items.len() > MAX_LIST_LEN {
                            return Err(ParseError::new(
                                at,
                                "list literal exceeds 100000 elements",
                            ));
                        }
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(&Tok::Comma, "`,` or `]` in list literal")?;
                    }
                }
                Ok(Expr::List(items))
            }
            Tok::Ident(name) => {
                if name.eq_ignore_ascii_case("true") {
                    return Ok(Expr::Literal(PropertyValue::Bool(true)));
                }
                if name.eq_ignore_ascii_case("false") {
                    return Ok(Expr::Literal(PropertyValue::Bool(false)));
                }
                if is_reserved(&name) {
                    return Err(ParseError::new(at, format!("unexpected keyword `{name}`")));
                }
                if self.peek_tok() == Some(&Tok::LParen) {
                    return Err(ParseError::new(
                        at,
                        if AggregateFn::from_name(&name).is_some() {
                            format!("aggregate `{name}` is only allowed as a RETURN item")
                        } else {
                            format!("unknown aggregate `{name}`")
                        },
                    ));
                }
                if !self.vars.contains(&name) {
                    return Err(ParseError::new(at, format!("unknown variable `{name}`")));
                }
                if self.eat(&Tok::Dot) {
                    let prop = match self.bump() {
                        Some(Token {
                            tok: Tok::Ident(p), ..
                        }) => p,
                        _ => return Err(ParseError::new(self.offset(), "expected property name")),
                    };
                    Ok(Expr::Property {
                        var: name,
                        name: prop,
                    })
                } else {
                    Ok(Expr::Var(name))
                }
            }
            _ => Err(ParseError::new(token.offset, "expected an expression")),
        }
    }
}

fn is_reserved(s: &str) -> bool {
    RESERVED.iter().any(|k| k.eq_ignore_ascii_case(s))
}
