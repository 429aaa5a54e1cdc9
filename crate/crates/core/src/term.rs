//! The term language over `{0, 1, ~, &, |, S, x1, x2, ...}` and its
//! parser. Binary operators always sit inside parentheses, so there is no
//! precedence to resolve; `S(...)` and `(...)` both accept a bare binary
//! expression.

use crate::io::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    /// 1-based variable index: `x1`, `x2`, ...
    Var(usize),
    Not(Box<Term>),
    S(Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn s(t: Term) -> Term {
        Term::S(Box::new(t))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    /// Node count of the AST.
    pub fn comp(&self) -> usize {
        match self {
            Term::Zero | Term::One | Term::Var(_) => 1,
            Term::Not(t) | Term::S(t) => 1 + t.comp(),
            Term::Meet(a, b) | Term::Join(a, b) => 1 + a.comp() + b.comp(),
        }
    }

    /// Largest variable index occurring, 0 if none.
    pub fn max_var(&self) -> usize {
        match self {
            Term::Zero | Term::One => 0,
            Term::Var(i) => *i,
            Term::Not(t) | Term::S(t) => t.max_var(),
            Term::Meet(a, b) | Term::Join(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn contains_s(&self) -> bool {
        match self {
            Term::Zero | Term::One | Term::Var(_) => false,
            Term::S(_) => true,
            Term::Not(t) => t.contains_s(),
            Term::Meet(a, b) | Term::Join(a, b) => a.contains_s() || b.contains_s(),
        }
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(i) => write!(f, "x{i}"),
            Term::Not(t) => write!(f, "~{t}"),
            Term::S(t) => write!(f, "S({t})"),
            Term::Meet(a, b) => write!(f, "({a} & {b})"),
            Term::Join(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// Two terms asserted equal under every valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn max_var(&self) -> usize {
        self.lhs.max_var().max(self.rhs.max_var())
    }

    pub fn contains_s(&self) -> bool {
        self.lhs.contains_s() || self.rhs.contains_s()
    }
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: 1,
            column: self.pos + 1,
            message: message.into(),
        }
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

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            Some(got) => Err(self.error(format!(
                "expected '{}', found '{}'",
                c as char, got as char
            ))),
            None => Err(self.error(format!("expected '{}', found end of input", c as char))),
        }
    }

    /// `expr := term (('&' | '|') term)?`
    fn expr(&mut self) -> Result<Term, ParseError> {
        let lhs = self.term()?;
        match self.peek() {
            Some(b'&') => {
                self.pos += 1;
                Ok(Term::meet(lhs, self.term()?))
            }
            Some(b'|') => {
                self.pos += 1;
                Ok(Term::join(lhs, self.term()?))
            }
            _ => Ok(lhs),
        }
    }

    /// `term := '0' | '1' | var | '~' term | 'S(' expr ')' | '(' expr ')'`
    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Term::One)
            }
            Some(b'~') => {
                self.pos += 1;
                Ok(Term::not(self.term()?))
            }
            Some(b'S') => {
                self.pos += 1;
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(Term::s(inner))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_digit())
                {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.error("variable needs digits, like x1"));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i: usize = digits
                    .parse()
                    .map_err(|_| self.error("variable index out of range"))?;
                if i == 0 {
                    return Err(self.error("variable indices start at 1"));
                }
                Ok(Term::Var(i))
            }
            Some(c) => Err(self.error(format!("unknown symbol '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let t = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input after term"));
    }
    Ok(t)
}

/// Parses `lhs = rhs`.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let parts: Vec<&str> = text.split('=').collect();
    if parts.len() != 2 {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "equation needs exactly one '='".into(),
        });
    }
    Ok(Equation::new(parse_term(parts[0])?, parse_term(parts[1])?))
}
