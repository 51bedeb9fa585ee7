//! The 1-morphism expression language:
//! `Id(i)`, `P(s,t)`, postfix `<n>` for shifts, `*` for horizontal
//! composition (binds tighter) and `+` for direct sums. Any other identifier
//! names a 1-morphism defined in the input file.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bicat::{hcompose, Bicategory, BicatError, OneMorphism};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// 1-based object
    Id(usize),
    /// 1-based global idempotents, target first
    P(usize, usize),
    Name(String),
    Shift(Box<Expr>, i64),
    Compose(Box<Expr>, Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at column {}: {message}", .pos + 1)]
pub struct ParseError {
    /// byte offset into the input
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown 1-morphism name `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Bicat(#[from] BicatError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Lt,
    Gt,
    Plus,
    Star,
    Minus,
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Int(n)) => format!("`{n}`"),
        Some(t) => {
            let c = match t {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::Comma => ",",
                Tok::Lt => "<",
                Tok::Gt => ">",
                Tok::Plus => "+",
                Tok::Star => "*",
                _ => "-",
            };
            format!("`{c}`")
        }
    }
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, i)),
            b')' => out.push((Tok::RParen, i)),
            b',' => out.push((Tok::Comma, i)),
            b'<' => out.push((Tok::Lt, i)),
            b'>' => out.push((Tok::Gt, i)),
            b'+' => out.push((Tok::Plus, i)),
            b'*' => out.push((Tok::Star, i)),
            b'-' => out.push((Tok::Minus, i)),
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let n = s[start..i]
                    .parse()
                    .map_err(|_| ParseError { pos: start, message: "integer out of range".into() })?;
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(s[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = s[i..].chars().next().unwrap();
                return Err(ParseError { pos: i, message: format!("unexpected character `{ch}`") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError { pos: self.offset(), message: format!("expected {expected}, found {}", describe(self.peek())) })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(what)
        }
    }

    fn int(&mut self, signed: bool) -> Result<i64, ParseError> {
        let neg = signed && self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        match self.peek() {
            Some(&Tok::Int(n)) => {
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => self.err("an integer"),
        }
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        let at = self.offset();
        let n = self.int(false)?;
        if n == 0 {
            return Err(ParseError { pos: at, message: "indices start at 1".into() });
        }
        Ok(n as usize)
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.product()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            e = Expr::Sum(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.shifted()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            e = Expr::Compose(Box::new(e), Box::new(self.shifted()?));
        }
        Ok(e)
    }

    fn shifted(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Tok::Lt) {
            self.pos += 1;
            let n = self.int(true)?;
            self.expect(Tok::Gt, "`>`")?;
            e = Expr::Shift(Box::new(e), n);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let call = self.peek() == Some(&Tok::LParen);
                match (name.as_str(), call) {
                    ("Id", true) => {
                        self.pos += 1;
                        let i = self.index()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Id(i))
                    }
                    ("P", true) => {
                        self.pos += 1;
                        let s = self.index()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let t = self.index()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::P(s, t))
                    }
                    _ => Ok(Expr::Name(name)),
                }
            }
            _ => self.err("`Id(i)`, `P(s,t)`, a name or `(`"),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("`+`, `*`, `<` or end of input");
    }
    Ok(e)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Sum(..) => 0,
        Expr::Compose(..) => 1,
        _ => 2,
    }
}

struct Wrapped<'a>(&'a Expr, u8);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Id(i) => write!(f, "Id({i})"),
            Expr::P(s, t) => write!(f, "P({s},{t})"),
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Shift(e, n) => write!(f, "{}<{n}>", Wrapped(e, 2)),
            // both operators associate to the left
            Expr::Compose(a, b) => write!(f, "{}*{}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Sum(a, b) => write!(f, "{} + {}", Wrapped(a, 0), Wrapped(b, 1)),
        }
    }
}

/// Evaluates an expression to a 1-morphism; `names` holds the file's
/// named (possibly twisted) 1-morphisms.
pub fn eval_expr(bc: &Bicategory, e: &Expr, names: &BTreeMap<String, OneMorphism>) -> Result<OneMorphism, EvalError> {
    Ok(match e {
        Expr::Id(i) => OneMorphism::identity(bc, i - 1)?,
        Expr::P(s, t) => OneMorphism::proj(bc, *s, *t)?,
        Expr::Name(n) => names.get(n).cloned().ok_or_else(|| EvalError::UnknownName(n.clone()))?,
        Expr::Shift(a, n) => eval_expr(bc, a, names)?.shift(*n),
        Expr::Compose(a, b) => hcompose(bc, &eval_expr(bc, a, names)?, &eval_expr(bc, b, names)?)?,
        Expr::Sum(a, b) => eval_expr(bc, a, names)?.direct_sum(bc, &eval_expr(bc, b, names)?)?,
    })
}
