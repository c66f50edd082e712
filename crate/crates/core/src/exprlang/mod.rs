//! A small exact-arithmetic language for coefficient functions of one integer
//! variable `n`.
//!
//! Grammar (EBNF), lowest precedence first:
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = primary { "^" exponent } ;
//! exponent = integer | "(" exponent ")" ;
//! primary  = number | "n" | "(" expr ")" ;
//! number   = digit { digit } [ "." digit { digit } ] ;
//! ```
//!
//! `+ - * /` associate to the left, and so does a chain of `^`
//! (`n^2^3` is `(n^2)^3`). Exponents must be non-negative integer literals.
//! Decimal literals such as `0.25` are read as exact rationals. Whitespace is
//! ignored between tokens.
//!
//! Evaluation is exact over [`Rational`](crate::Rational); the only runtime
//! error is a division by zero.

mod parser;

use alloc::boxed::Box;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

pub use parser::{ParseError, ParseErrorKind};

/// Abstract syntax tree of a coefficient expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Non-negative literal (integer or terminating decimal).
    Num(Rational),
    /// The variable `n`.
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Runtime failure while evaluating an [`Expr`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at n = {n}")]
    DivisionByZero { n: i64 },
}

impl Expr {
    /// The constant expression `value`. Negative values become `Neg(Num(..))`.
    pub fn constant(value: Rational) -> Self {
        if value.is_negative() {
            Expr::Neg(Box::new(Expr::Num(-value)))
        } else {
            Expr::Num(value)
        }
    }

    pub fn one() -> Self {
        Expr::Num(Rational::one())
    }

    /// True if the expression does not mention `n`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Pow(e, _) => e.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn eval(&self, n: i64) -> Result<Rational, EvalError> {
        Ok(match self {
            Expr::Num(v) => v.clone(),
            Expr::Var => Rational::from_integer(BigInt::from(n)),
            Expr::Neg(e) => -e.eval(n)?,
            Expr::Add(a, b) => a.eval(n)? + b.eval(n)?,
            Expr::Sub(a, b) => a.eval(n)? - b.eval(n)?,
            Expr::Mul(a, b) => a.eval(n)? * b.eval(n)?,
            Expr::Div(a, b) => {
                let den = b.eval(n)?;
                if den.is_zero() {
                    return Err(EvalError::DivisionByZero { n });
                }
                a.eval(n)? / den
            }
            Expr::Pow(base, exp) => num_traits::pow(base.eval(n)?, *exp as usize),
        })
    }

    // Binding strength used by the printer; mirrors the parser's levels.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var => 5,
        }
    }
}

/// Parses `text` per the grammar in the module docs.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    parser::Parser::new(text).parse()
}

/// Evaluates `e` exactly at the integer `n`.
pub fn evaluate(e: &Expr, n: i64) -> Result<Rational, EvalError> {
    e.eval(n)
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, v: &Rational) -> fmt::Result {
    if v.is_integer() {
        return write!(f, "{}", v.numer());
    }
    // Terminating decimals print as decimals so they re-parse as one literal.
    let mut den = v.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        // Only reachable for hand-built trees; parsed literals always terminate.
        return write!(f, "({}/{})", v.numer(), v.denom());
    }
    let digits = twos.max(fives);
    let scaled = v * Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let mut s = alloc::format!("{:0>width$}", scaled.to_integer(), width = digits + 1);
    s.insert(s.len() - digits, '.');
    f.write_str(&s)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Expr::Num(v) => write_literal(f, v),
            Expr::Var => f.write_str("n"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, e.precedence() < prec)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                write_operand(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                // Left associativity: an equal-precedence right operand needs parentheses.
                write_operand(f, b, b.precedence() <= prec)
            }
            Expr::Pow(base, exp) => {
                write_operand(f, base, base.precedence() < prec)?;
                write!(f, "^{exp}")
            }
        }
    }
}
