use alloc::boxed::Box;
use alloc::string::String;

use num_bigint::BigInt;
use num_traits::pow;

use super::Expr;
use crate::Rational;

/// What went wrong, without the position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected {
        expected: &'static str,
        found: String,
    },
    #[error("unknown identifier `{0}` (only `n` is allowed)")]
    UnknownIdentifier(String),
    #[error("negative exponent")]
    NegativeExponent,
    #[error("exponent must be a non-negative integer literal")]
    NonLiteralExponent,
    #[error("exponent too large")]
    ExponentTooLarge,
    #[error("malformed number")]
    MalformedNumber,
}

/// Syntax error together with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Rational, bool),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        use alloc::string::ToString;
        match self {
            Token::Number(v, _) => alloc::format!("number {v}"),
            Token::Var => "`n`".to_string(),
            Token::Plus => "`+`".to_string(),
            Token::Minus => "`-`".to_string(),
            Token::Star => "`*`".to_string(),
            Token::Slash => "`/`".to_string(),
            Token::Caret => "`^`".to_string(),
            Token::LParen => "`(`".to_string(),
            Token::RParen => "`)`".to_string(),
            Token::End => "end of input".to_string(),
        }
    }
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    current: Token,
    current_at: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            current: Token::End,
            current_at: 0,
        }
    }

    pub(crate) fn parse(mut self) -> Result<Expr, ParseError> {
        if self.src.trim().is_empty() {
            return Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::Empty,
            });
        }
        self.advance()?;
        let e = self.expr()?;
        if self.current != Token::End {
            return Err(self.unexpected("an operator or end of input"));
        }
        Ok(e)
    }

    fn error(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.error(
            self.current_at,
            ParseErrorKind::Unexpected {
                expected,
                found: self.current.describe(),
            },
        )
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.current_at = self.pos;
        let Some(c) = self.src[self.pos..].chars().next() else {
            self.current = Token::End;
            return Ok(());
        };
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            self.current = tok;
            return Ok(());
        }
        if c.is_ascii_digit() || c == '.' {
            self.current = self.number()?;
            return Ok(());
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while let Some(ch) = self.src[self.pos..].chars().next() {
                if ch.is_alphanumeric() || ch == '_' {
                    self.pos += ch.len_utf8();
                } else {
                    break;
                }
            }
            let ident = &self.src[start..self.pos];
            if ident == "n" {
                self.current = Token::Var;
                return Ok(());
            }
            return Err(self.error(start, ParseErrorKind::UnknownIdentifier(ident.into())));
        }
        Err(self.error(self.pos, ParseErrorKind::UnexpectedChar(c)))
    }

    fn number(&mut self) -> Result<Token, ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut int_digits = 0usize;
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
            int_digits += 1;
        }
        let mut frac_digits = 0usize;
        let mut has_point = false;
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            has_point = true;
            self.pos += 1;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
                frac_digits += 1;
            }
        }
        if int_digits == 0 || (has_point && frac_digits == 0) {
            return Err(self.error(start, ParseErrorKind::MalformedNumber));
        }
        let digits: String = self.src[start..self.pos]
            .chars()
            .filter(|c| *c != '.')
            .collect();
        let mantissa: BigInt = digits
            .parse()
            .map_err(|_| self.error(start, ParseErrorKind::MalformedNumber))?;
        let value = Rational::new(mantissa, pow(BigInt::from(10), frac_digits));
        Ok(Token::Number(value, !has_point))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let make: fn(Box<Expr>, Box<Expr>) -> Expr = match self.current {
                Token::Plus => Expr::Add,
                Token::Minus => Expr::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = make(Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let make: fn(Box<Expr>, Box<Expr>) -> Expr = match self.current {
                Token::Star => Expr::Mul,
                Token::Slash => Expr::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = make(Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.current == Token::Minus {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.current == Token::Caret {
            self.advance()?;
            let exp = self.exponent()?;
            base = Expr::Pow(Box::new(base), exp);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let at = self.current_at;
        match self.current.clone() {
            Token::Number(v, true) => {
                self.advance()?;
                u32::try_from(v.to_integer())
                    .map_err(|_| self.error(at, ParseErrorKind::ExponentTooLarge))
            }
            Token::Number(_, false) => Err(self.error(at, ParseErrorKind::NonLiteralExponent)),
            Token::Minus => Err(self.error(at, ParseErrorKind::NegativeExponent)),
            Token::LParen => {
                self.advance()?;
                let exp = self.exponent()?;
                if self.current != Token::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.advance()?;
                Ok(exp)
            }
            Token::End => Err(self.unexpected("an exponent")),
            _ => Err(self.error(at, ParseErrorKind::NonLiteralExponent)),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.current.clone() {
            Token::Number(v, _) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Token::Var => {
                self.advance()?;
                Ok(Expr::Var)
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.current != Token::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.advance()?;
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, `n`, or `(`")),
        }
    }
}
