//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' exp)?
//! exp    := ['-'] INT | '(' ['-'] INT ')'
//! atom   := INT | 'q' | '$' NAME | NAME ['(' arg ')'] | 'subst' '(' expr ',' INT ')'
//!         | 'JP' '(' items ';' [items ';'] 'q' ['^' INT] ')' | '(' expr ')'
//! arg    := ['-'] 'q' ['^' INT] | 'subst' '(' 'q' ',' INT ')'
//! items  := [item (',' item)*]        item := ['-'] 'q' ['^' INT]
//! ```

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::{Arg, Expr, Func, JpItem};
use crate::qproducts::Sign;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { expected: &'static str, found: String },
    UnknownName(String),
    IntegerOverflow,
    /// `q^0` inside a product or a zero substitution power.
    ZeroPower,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnknownName(n) => write!(f, "unknown name {n:?}"),
            ParseErrorKind::IntegerOverflow => f.write_str("integer literal too large"),
            ParseErrorKind::ZeroPower => f.write_str("power must be positive here"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Ref(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Ref(s) => write!(f, "${s}"),
            Tok::Sym(c) => write!(f, "{c:?}"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse::<u64>()
                .map_err(|_| ParseError { offset: start, kind: ParseErrorKind::IntegerOverflow })?;
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let tok = if c == '$' {
                if i == start + 1 {
                    return Err(ParseError { offset: start, kind: ParseErrorKind::UnexpectedChar('$') });
                }
                Tok::Ref(src[start + 1..i].to_owned())
            } else {
                Tok::Ident(src[start..i].to_owned())
            };
            out.push((start, tok));
        } else if "+-*/^(),;".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar(ch) });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let found = alloc::format!("{}", self.peek());
        ParseError { offset: self.offset(), kind: ParseErrorKind::UnexpectedToken { expected, found } }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, what: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expect_q(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "q" => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error("'q'")),
        }
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("an integer")),
        }
    }

    fn positive(&mut self) -> Result<u64, ParseError> {
        let at = self.offset();
        let n = self.uint()?;
        if n == 0 {
            return Err(ParseError { offset: at, kind: ParseErrorKind::ZeroPower });
        }
        Ok(n)
    }

    fn int(&mut self, negative: bool) -> Result<i64, ParseError> {
        let at = self.offset();
        let n = self.uint()?;
        let n = i64::try_from(n)
            .map_err(|_| ParseError { offset: at, kind: ParseErrorKind::IntegerOverflow })?;
        Ok(if negative { -n } else { n })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = if self.eat('(') {
            let neg = self.eat('-');
            let k = self.int(neg)?;
            self.expect(')', "')'")?;
            k
        } else {
            let neg = self.eat('-');
            self.int(neg)?
        };
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => i64::try_from(n)
                .map(Expr::Int)
                .map_err(|_| ParseError { offset: at, kind: ParseErrorKind::IntegerOverflow }),
            Tok::Ref(name) => Ok(Expr::Ref(name)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')', "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "q" => Ok(Expr::Q),
                "subst" => {
                    self.expect('(', "'('")?;
                    let e = self.expr()?;
                    self.expect(',', "','")?;
                    let m = self.positive()?;
                    self.expect(')', "')'")?;
                    Ok(Expr::Subst(Box::new(e), m))
                }
                "JP" => self.jp(),
                other => {
                    let func = Func::from_name(other).ok_or(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownName(name.clone()),
                    })?;
                    if !self.eat('(') {
                        return Ok(Expr::call(func));
                    }
                    let arg = self.arg()?;
                    self.expect(')', "')'")?;
                    Ok(Expr::Call(func, arg))
                }
            },
            other => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnexpectedToken {
                    expected: "an expression",
                    found: alloc::format!("{other}"),
                },
            }),
        }
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        if let Tok::Ident(s) = self.peek() {
            if s == "subst" {
                self.bump();
                self.expect('(', "'('")?;
                self.expect_q()?;
                self.expect(',', "','")?;
                let power = self.positive()?;
                self.expect(')', "')'")?;
                return Ok(Arg { negate: false, power });
            }
        }
        let (negate, power) = self.signed_q_power()?;
        Ok(Arg { negate, power })
    }

    fn signed_q_power(&mut self) -> Result<(bool, u64), ParseError> {
        let negate = self.eat('-');
        self.expect_q()?;
        let power = if self.eat('^') { self.positive()? } else { 1 };
        Ok((negate, power))
    }

    fn jp(&mut self) -> Result<Expr, ParseError> {
        self.expect('(', "'('")?;
        let mut groups: Vec<Vec<JpItem>> = Vec::new();
        let mut group_start = self.offset();
        let mut current: Vec<JpItem> = Vec::new();
        let base_at;
        loop {
            if matches!(self.peek(), Tok::Sym(';') | Tok::Sym(')')) && current.is_empty() {
                // empty list
            } else {
                let (negate, offset) = self.signed_q_power()?;
                current.push(JpItem { sign: if negate { Sign::Minus } else { Sign::Plus }, offset });
                if self.eat(',') {
                    continue;
                }
            }
            if self.eat(';') {
                groups.push(core::mem::take(&mut current));
                group_start = self.offset();
                continue;
            }
            base_at = group_start;
            self.expect(')', "')' or ';'")?;
            break;
        }
        let base = match current.as_slice() {
            [JpItem { sign: Sign::Plus, offset }] => *offset,
            _ => {
                return Err(ParseError {
                    offset: base_at,
                    kind: ParseErrorKind::UnexpectedToken {
                        expected: "a single base q^M as the last group",
                        found: String::from("a list"),
                    },
                })
            }
        };
        let (numerator, denominator) = match groups.len() {
            1 => (groups.pop().unwrap(), Vec::new()),
            2 => {
                let den = groups.pop().unwrap();
                (groups.pop().unwrap(), den)
            }
            _ => {
                return Err(ParseError {
                    offset: base_at,
                    kind: ParseErrorKind::UnexpectedToken {
                        expected: "JP(num; q^M) or JP(num; den; q^M)",
                        found: alloc::format!("{} groups", groups.len() + 1),
                    },
                })
            }
        };
        Ok(Expr::Jp { numerator, denominator, modulus: base })
    }
}

/// Parses one expression; trailing input is an error.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}
