//! A small arithmetic language over the Cartesian coordinates `x1 .. xn`.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | base ("^" integer)?
//! base   := number | var | "(" expr ")" | func "(" expr ")"
//! var    := "x" integer            (1-based)
//! func   := "abs" | "exp" | "max0"
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::BaryPolynomial;
use crate::simplex::Simplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Abs,
    Exp,
    Max0,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// A parsed expression; serializes as `{"source": "..."}`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "ExpressionDoc", into = "ExpressionDoc")]
pub struct Expression {
    source: String,
    root: Node,
    vars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionDoc {
    pub source: String,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let mut parser = Parser { src: source.as_bytes(), pos: 0 };
        let root = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        let vars = root.max_var();
        Ok(Self { source: source.to_owned(), root, vars })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Highest variable index referenced (1-based), or 0 for constants.
    pub fn variable_count(&self) -> usize {
        self.vars
    }

    /// Evaluates at a Cartesian point.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() < self.vars {
            return Err(Error::DimensionMismatch { expected: self.vars, found: x.len() });
        }
        let value = self.root.eval(x);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::ExpressionEval(format!("`{}` evaluated to {value}", self.source)))
        }
    }

    /// Rewrites the expression as a barycentric polynomial on `simplex`, when
    /// it only uses `+ - *`, division by constants and nonnegative powers.
    pub fn to_polynomial(&self, simplex: &Simplex) -> Option<BaryPolynomial> {
        if self.vars > simplex.dim() {
            return None;
        }
        self.root.to_polynomial(simplex)
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Expression").field(&self.source).finish()
    }
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl TryFrom<ExpressionDoc> for Expression {
    type Error = Error;
    fn try_from(doc: ExpressionDoc) -> Result<Self> {
        Self::parse(&doc.source)
    }
}

impl From<Expression> for ExpressionDoc {
    fn from(e: Expression) -> Self {
        ExpressionDoc { source: e.source }
    }
}

impl Node {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(i) => x[*i],
            Node::Neg(a) => -a.eval(x),
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Node::Pow(a, k) => a.eval(x).powi(*k),
            Node::Call(func, a) => {
                let v = a.eval(x);
                match func {
                    Func::Abs => v.abs(),
                    Func::Exp => v.exp(),
                    Func::Max0 => v.max(0.0),
                }
            }
        }
    }

    fn max_var(&self) -> usize {
        match self {
            Node::Num(_) => 0,
            Node::Var(i) => i + 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.max_var(),
            Node::Bin(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            Node::Num(v) => Some(*v),
            Node::Var(_) => None,
            Node::Neg(a) => a.constant_value().map(|v| -v),
            Node::Bin(..) | Node::Pow(..) | Node::Call(..) => {
                if self.max_var() == 0 {
                    Some(self.eval(&[]))
                } else {
                    None
                }
            }
        }
    }

    fn to_polynomial(&self, s: &Simplex) -> Option<BaryPolynomial> {
        let arity = s.dim() + 1;
        if let Some(c) = self.constant_value() {
            return c.is_finite().then(|| BaryPolynomial::constant(arity, c));
        }
        Some(match self {
            Node::Num(_) => unreachable!("constants handled above"),
            Node::Var(i) => {
                let coeffs: Vec<f64> = s.vertices().iter().map(|v| v[*i]).collect();
                BaryPolynomial::linear(&coeffs)
            }
            Node::Neg(a) => -&a.to_polynomial(s)?,
            Node::Bin(BinOp::Add, a, b) => &a.to_polynomial(s)? + &b.to_polynomial(s)?,
            Node::Bin(BinOp::Sub, a, b) => &a.to_polynomial(s)? - &b.to_polynomial(s)?,
            Node::Bin(BinOp::Mul, a, b) => &a.to_polynomial(s)? * &b.to_polynomial(s)?,
            Node::Bin(BinOp::Div, a, b) => {
                let d = b.constant_value()?;
                if d == 0.0 {
                    return None;
                }
                a.to_polynomial(s)?.scale(1.0 / d)
            }
            Node::Pow(a, k) if *k >= 0 => a.to_polynomial(s)?.pow(*k as u32),
            Node::Pow(..) | Node::Call(..) => return None,
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::ExpressionParse { position: self.pos, message: message.to_owned() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let negative = self.eat(b'-');
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected an integer exponent"));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: i32 = digits.parse().map_err(|_| self.error("exponent out of range"))?;
            return Ok(Node::Pow(Box::new(base), if negative { -k } else { k }));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map(Node::Num).map_err(|_| Error::ExpressionParse {
            position: start,
            message: format!("invalid number `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let func = match word {
            "abs" => Some(Func::Abs),
            "exp" => Some(Func::Exp),
            "max0" => Some(Func::Max0),
            _ => None,
        };
        if let Some(func) = func {
            if !self.eat(b'(') {
                return Err(self.error("expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(Node::Call(func, Box::new(arg)));
        }
        match word.strip_prefix('x').map(str::parse::<usize>) {
            Some(Ok(i)) if i >= 1 => Ok(Node::Var(i - 1)),
            _ => Err(Error::ExpressionParse { position: start, message: format!("unknown identifier `{word}`") }),
        }
    }
}
