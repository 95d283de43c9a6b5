//! A small arithmetic expression language for coefficient functions of one
//! variable `x`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := factor { ("*" | "/") factor }
//! factor  := "-" factor | power
//! power   := atom [ "^" factor ]                ; right-associative
//! atom    := number | "x" | "pi"
//!          | func1 "(" expr ")"
//!          | func2 "(" expr "," expr ")"
//!          | "(" expr ")"
//! func1   := "sin" | "cos" | "exp" | "sqrt" | "abs"
//! func2   := "min" | "max"
//! number  := digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` parses as `-(x^2)`.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func1 {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func2 {
    Min,
    Max,
}

/// Parsed expression tree. The only free variable is `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Number(f64),
    Var,
    Pi,
    Neg(Box<ExprAst>),
    Binary {
        op: BinOp,
        lhs: Box<ExprAst>,
        rhs: Box<ExprAst>,
    },
    Call1 {
        func: Func1,
        arg: Box<ExprAst>,
    },
    Call2 {
        func: Func2,
        a: Box<ExprAst>,
        b: Box<ExprAst>,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expected {expected}, found {found} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("square root of a negative value at x = {x}")]
    SqrtOfNegative { x: f64 },
    #[error("negative base with non-integer exponent at x = {x}")]
    FractionalPowerOfNegative { x: f64 },
    #[error("non-finite intermediate value at x = {x}")]
    NonFinite { x: f64 },
}

impl ExprAst {
    /// Evaluates the expression at `x` over the reals.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            ExprAst::Number(v) => *v,
            ExprAst::Var => x,
            ExprAst::Pi => core::f64::consts::PI,
            ExprAst::Neg(inner) => -inner.eval(x)?,
            ExprAst::Binary { op, lhs, rhs } => {
                let a = lhs.eval(x)?;
                let b = rhs.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero { x });
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b != math::floor(b) {
                            return Err(EvalError::FractionalPowerOfNegative { x });
                        }
                        math::pow(a, b)
                    }
                }
            }
            ExprAst::Call1 { func, arg } => {
                let a = arg.eval(x)?;
                match func {
                    Func1::Sin => math::sin(a),
                    Func1::Cos => math::cos(a),
                    Func1::Exp => math::exp(a),
                    Func1::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::SqrtOfNegative { x });
                        }
                        math::sqrt(a)
                    }
                    Func1::Abs => math::abs(a),
                }
            }
            ExprAst::Call2 { func, a, b } => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                match func {
                    Func2::Min => a.min(b),
                    Func2::Max => a.max(b),
                }
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite { x });
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Binary { op: BinOp::Add | BinOp::Sub, .. } => 1,
            ExprAst::Binary { op: BinOp::Mul | BinOp::Div, .. } => 2,
            ExprAst::Neg(_) => 3,
            ExprAst::Binary { op: BinOp::Pow, .. } => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut core::fmt::Formatter<'_>, min_prec: u8) -> core::fmt::Result {
        let me = self.precedence();
        if me < min_prec {
            write!(f, "(")?;
        }
        match self {
            ExprAst::Number(v) => write!(f, "{v}")?,
            ExprAst::Var => write!(f, "x")?,
            ExprAst::Pi => write!(f, "pi")?,
            ExprAst::Neg(inner) => {
                write!(f, "-")?;
                inner.fmt_prec(f, me)?;
            }
            ExprAst::Binary { op, lhs, rhs } => {
                let symbol = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                // +, -, *, / associate left; ^ associates right
                let (lp, rp) = if *op == BinOp::Pow { (me + 1, me) } else { (me, me + 1) };
                lhs.fmt_prec(f, lp)?;
                write!(f, "{symbol}")?;
                rhs.fmt_prec(f, rp)?;
            }
            ExprAst::Call1 { func, arg } => {
                let name = match func {
                    Func1::Sin => "sin",
                    Func1::Cos => "cos",
                    Func1::Exp => "exp",
                    Func1::Sqrt => "sqrt",
                    Func1::Abs => "abs",
                };
                write!(f, "{name}(")?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            ExprAst::Call2 { func, a, b } => {
                let name = match func {
                    Func2::Min => "min",
                    Func2::Max => "max",
                };
                write!(f, "{name}(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if me < min_prec {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl core::fmt::Display for ExprAst {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Parses `source` into an expression tree.
pub fn parse(source: &str) -> Result<ExprAst, ParseError> {
    let mut parser = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    let ast = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("end of input"));
    }
    Ok(ast)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn describe_here(&self) -> String {
        match self.src.get(self.pos) {
            None => "end of input".to_owned(),
            Some(_) => {
                let rest = &self.src[self.pos..];
                let len = rest.len().min(8);
                // keep the snippet on a UTF-8 boundary
                let mut end = len;
                while end > 0 && core::str::from_utf8(&rest[..end]).is_err() {
                    end -= 1;
                }
                format!("`{}`", core::str::from_utf8(&rest[..end]).unwrap_or(""))
            }
        }
    }

    fn error(&mut self, expected: &str) -> ParseError {
        self.skip_ws();
        ParseError {
            offset: self.pos,
            expected: expected.to_owned(),
            found: self.describe_here(),
        }
    }

    fn consume(&mut self, byte: u8, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ExprAst::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = ExprAst::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(ExprAst::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(ExprAst::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.consume(b')', "`)`")?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.error("a number, `x`, `pi`, a function call, or `(`")),
        }
    }

    fn number(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            if !self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                return Err(self.error("a digit after the decimal point"));
            }
            while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `2e` followed by something else: the `e` starts an identifier
                self.pos = mark;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(ExprAst::Number(v)),
            _ => Err(ParseError {
                offset: start,
                expected: "a finite number literal".to_owned(),
                found: format!("`{text}`"),
            }),
        }
    }

    fn identifier(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        match name {
            "x" => Ok(ExprAst::Var),
            "pi" => Ok(ExprAst::Pi),
            "sin" | "cos" | "exp" | "sqrt" | "abs" => {
                let func = match name {
                    "sin" => Func1::Sin,
                    "cos" => Func1::Cos,
                    "exp" => Func1::Exp,
                    "sqrt" => Func1::Sqrt,
                    _ => Func1::Abs,
                };
                self.consume(b'(', "`(`")?;
                let arg = self.expr()?;
                if self.peek() == Some(b',') {
                    return Err(self.error(&format!("`)` ({name} takes one argument)")));
                }
                self.consume(b')', "`)`")?;
                Ok(ExprAst::Call1 {
                    func,
                    arg: Box::new(arg),
                })
            }
            "min" | "max" => {
                let func = if name == "min" { Func2::Min } else { Func2::Max };
                self.consume(b'(', "`(`")?;
                let a = self.expr()?;
                self.consume(b',', &format!("`,` ({name} takes two arguments)"))?;
                let b = self.expr()?;
                self.consume(b')', "`)`")?;
                Ok(ExprAst::Call2 {
                    func,
                    a: Box::new(a),
                    b: Box::new(b),
                })
            }
            _ => Err(ParseError {
                offset: start,
                expected: "`x`, `pi`, or a function name".to_owned(),
                found: format!("`{name}`"),
            }),
        }
    }
}
