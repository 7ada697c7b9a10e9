//! Lexer and recursive-descent parser for the expression grammar shared by
//! scalar input and spec files:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' integer)?
//! atom   := rational | ident | ident '(' ident-list ')'
//!         | 'D(' expr ',' ident ')' | '(' expr ')' | '-' factor
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    FatArrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Syntax error with a 1-based position and the set of tokens that would
/// have been accepted.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let push = |out: &mut Vec<Token>, tok: Tok| out.push(Token { tok, line: start.0, col: start.1 });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let s = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[s..i].iter().collect();
                col += i - s;
                push(&mut out, Tok::Ident(word));
                continue;
            }
            c if c.is_ascii_digit() => {
                let s = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let word: String = chars[s..i].iter().collect();
                col += i - s;
                push(&mut out, Tok::Number(word));
                continue;
            }
            _ => {}
        }
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            ':' => (Tok::Colon, 1),
            '=' if chars.get(i + 1) == Some(&'>') => (Tok::FatArrow, 2),
            '=' => (Tok::Eq, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '^' => (Tok::Caret, 1),
            other => {
                return Err(SyntaxError {
                    line,
                    col,
                    expected: vec!["a token".into()],
                    found: format!("character `{other}`"),
                })
            }
        };
        push(&mut out, tok);
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Cursor over a token vector with error helpers.
pub struct TokenStream {
    tokens: Vec<Token>,
    pos: usize,
}

impl TokenStream {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenStream { tokens, pos: 0 }
    }

    pub fn from_str(src: &str) -> Result<Self, SyntaxError> {
        Ok(TokenStream::new(tokenize(src)?))
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    pub fn at_ident(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = self.peek();
        SyntaxError {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        if self.at(&tok) {
            Ok(self.next())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, usize, usize), SyntaxError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let t = self.next();
                Ok((s, t.line, t.col))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    pub fn expect_keyword(&mut self, word: &str) -> Result<Token, SyntaxError> {
        if self.at_ident(word) {
            Ok(self.next())
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    /// Signed integer literal.
    pub fn expect_integer(&mut self) -> Result<i64, SyntaxError> {
        let neg = self.eat(&Tok::Minus);
        match &self.peek().tok {
            Tok::Number(s) if !s.contains('.') => {
                let v: i64 = s.parse().map_err(|_| self.error(&["integer"]))?;
                self.next();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    /// Signed integer or `p/q` literal, used for weights.
    pub fn expect_signed_rational(&mut self) -> Result<Rational, SyntaxError> {
        let neg = self.eat(&Tok::Minus);
        let n = match &self.peek().tok {
            Tok::Number(s) => parse_decimal(s).ok_or_else(|| self.error(&["number"]))?,
            _ => return Err(self.error(&["number"])),
        };
        self.next();
        let mut v = n;
        if self.eat(&Tok::Slash) {
            let d = match &self.peek().tok {
                Tok::Number(s) => parse_decimal(s).ok_or_else(|| self.error(&["number"]))?,
                _ => return Err(self.error(&["number"])),
            };
            if d.is_zero() {
                return Err(self.error(&["nonzero denominator"]));
            }
            self.next();
            v /= d;
        }
        Ok(if neg { -v } else { v })
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    match s.split_once('.') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((int, frac)) => {
            let digits: BigInt = format!("{int}{frac}").parse().ok()?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            Some(Rational::new(digits, scale))
        }
    }
}

/// Unnormalized expression tree as written by the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawExpr {
    Num(Rational),
    Sym(String),
    Call(String, Vec<String>),
    Deriv(Box<RawExpr>, String),
    Neg(Box<RawExpr>),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, i64),
}

impl RawExpr {
    pub fn parse(src: &str) -> Result<RawExpr, SyntaxError> {
        let mut ts = TokenStream::from_str(src)?;
        let e = parse_expr(&mut ts)?;
        if !ts.at(&Tok::Eof) {
            return Err(ts.error(&["operator", "end of input"]));
        }
        Ok(e)
    }

    pub fn int(i: i64) -> RawExpr {
        RawExpr::Num(Rational::from_integer(BigInt::from(i)))
    }

    fn precedence(&self) -> u8 {
        match self {
            RawExpr::Add(..) | RawExpr::Sub(..) => 1,
            RawExpr::Mul(..) | RawExpr::Div(..) => 2,
            RawExpr::Pow(..) => 3,
            RawExpr::Neg(_) => 4,
            _ => 5,
        }
    }
}

pub fn parse_expr(ts: &mut TokenStream) -> Result<RawExpr, SyntaxError> {
    let mut lhs = parse_term(ts)?;
    loop {
        if ts.eat(&Tok::Plus) {
            lhs = RawExpr::Add(Box::new(lhs), Box::new(parse_term(ts)?));
        } else if ts.eat(&Tok::Minus) {
            lhs = RawExpr::Sub(Box::new(lhs), Box::new(parse_term(ts)?));
        } else {
            return Ok(lhs);
        }
    }
}

pub fn parse_term(ts: &mut TokenStream) -> Result<RawExpr, SyntaxError> {
    let mut lhs = parse_factor(ts)?;
    loop {
        if ts.eat(&Tok::Star) {
            lhs = RawExpr::Mul(Box::new(lhs), Box::new(parse_factor(ts)?));
        } else if ts.eat(&Tok::Slash) {
            lhs = RawExpr::Div(Box::new(lhs), Box::new(parse_factor(ts)?));
        } else {
            return Ok(lhs);
        }
    }
}

pub fn parse_factor(ts: &mut TokenStream) -> Result<RawExpr, SyntaxError> {
    let base = parse_atom(ts)?;
    if ts.eat(&Tok::Caret) {
        let n = if ts.eat(&Tok::LParen) {
            let n = ts.expect_integer()?;
            ts.expect(Tok::RParen)?;
            n
        } else {
            ts.expect_integer()?
        };
        return Ok(RawExpr::Pow(Box::new(base), n));
    }
    Ok(base)
}

fn parse_atom(ts: &mut TokenStream) -> Result<RawExpr, SyntaxError> {
    let t = ts.peek().clone();
    match t.tok {
        Tok::Number(s) => {
            ts.next();
            Ok(RawExpr::Num(parse_decimal(&s).ok_or_else(|| SyntaxError {
                line: t.line,
                col: t.col,
                expected: vec!["number".into()],
                found: s.clone(),
            })?))
        }
        Tok::Minus => {
            ts.next();
            Ok(RawExpr::Neg(Box::new(parse_factor(ts)?)))
        }
        Tok::LParen => {
            ts.next();
            let e = parse_expr(ts)?;
            ts.expect(Tok::RParen)?;
            Ok(e)
        }
        Tok::Ident(name) => {
            let line = ts.next().line;
            // A call's `(` sits on the identifier's line, so spec entries
            // separated only by newlines stay apart.
            let call = ts.at(&Tok::LParen) && ts.peek().line == line;
            if name == "D" && call {
                ts.next();
                let e = parse_expr(ts)?;
                ts.expect(Tok::Comma)?;
                let (c, _, _) = ts.expect_ident()?;
                ts.expect(Tok::RParen)?;
                return Ok(RawExpr::Deriv(Box::new(e), c));
            }
            if call {
                ts.next();
                let mut args = Vec::new();
                if !ts.at(&Tok::RParen) {
                    args.push(ts.expect_ident()?.0);
                    while ts.eat(&Tok::Comma) {
                        args.push(ts.expect_ident()?.0);
                    }
                }
                ts.expect(Tok::RParen)?;
                return Ok(RawExpr::Call(name, args));
            }
            Ok(RawExpr::Sym(name))
        }
        _ => Err(ts.error(&["number", "identifier", "`(`", "`-`"])),
    }
}

fn format_decimal(q: &Rational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    // Every literal the parser produces is a terminating decimal.
    let mut den = q.denom().clone();
    let mut digits = 0usize;
    let ten = BigInt::from(10);
    while !(&den).is_one() && digits < 64 {
        if (&den % 2u32).is_zero() || (&den % 5u32).is_zero() {
            digits += 1;
            den = q.denom().clone();
            let scaled = q * Rational::from_integer(num_traits::pow(ten.clone(), digits));
            if scaled.is_integer() {
                let n = scaled.to_integer();
                let neg = n.is_negative();
                let s = n.abs().to_string();
                let s = format!("{:0>width$}", s, width = digits + 1);
                let (int, frac) = s.split_at(s.len() - digits);
                return format!("{}{}.{}", if neg { "-" } else { "" }, int, frac);
            }
        } else {
            break;
        }
    }
    format!("({}/{})", q.numer(), q.denom())
}

impl fmt::Display for RawExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &RawExpr, min: u8| -> String {
            if e.precedence() < min {
                format!("({e})")
            } else {
                e.to_string()
            }
        };
        match self {
            RawExpr::Num(q) => write!(f, "{}", format_decimal(q)),
            RawExpr::Sym(s) => write!(f, "{s}"),
            RawExpr::Call(n, args) => write!(f, "{n}({})", args.join(", ")),
            RawExpr::Deriv(e, c) => write!(f, "D({e}, {c})"),
            RawExpr::Neg(e) => write!(f, "-{}", wrap(e, 3)),
            RawExpr::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            RawExpr::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            RawExpr::Mul(a, b) => write!(f, "{}*{}", wrap(a, 2), wrap(b, 3)),
            RawExpr::Div(a, b) => write!(f, "{}/{}", wrap(a, 2), wrap(b, 3)),
            RawExpr::Pow(a, n) => {
                let base = wrap(a, 5);
                if *n < 0 {
                    write!(f, "{base}^({n})")
                } else {
                    write!(f, "{base}^{n}")
                }
            }
        }
    }
}
