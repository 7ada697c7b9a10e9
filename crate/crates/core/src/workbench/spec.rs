//! Spec files: a line-oriented declaration language with `#` comments.
//!
//! ```text
//! spec    := 'MANIFOLD' name decl*
//! decl    := 'EVEN' id+ | 'ODD' id+ | 'FUNC' id '(' id-list ')' ['NONVANISHING']
//!          | 'METRIC' '{' ('(' id ',' id ')' '=' expr [';'])* '}'
//!          | 'VF' id '=' vfexpr
//!          | 'STRUCTURE' '{' ('Q' | 'P') '=' (vfexpr | id) ';' ... '}'
//!          | 'CONNECTION' '{' ('Gamma' '(' id ';' id ',' id ')' '=' expr [';'])* '}'
//!          | 'CONTRACTION' '{' ('weights' | 'generators') ':' (id '=>' weight [','])* ';' ... '}'
//! vfexpr  := '0' | ['-'] vfterm (('+' | '-') vfterm)*
//! vfterm  := [factor (('*' | '/') factor)* '*'] 'd(' id ')'
//! weight  := 's' ['^' integer] | 'c' ['^' rational]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::connections::AffineConnection;
use crate::contraction::s_power_from_c;
use crate::grassmann::{eval_raw, Chart, GrassmannError, SuperFunction};
use crate::metric::SuperMetric;
use crate::scalar::syntax::{parse_expr, parse_factor, SyntaxError, Tok, TokenStream};
use crate::scalar::{FunctionSymbol, Parity, Rational, RawExpr, ScalarError};
use crate::superdomain::{SuperdomainError, Tensor12, VectorField};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { name: String, line: usize, col: usize },
    #[error("{line}:{col}: parity violation: {message}")]
    ParityViolation { message: String, line: usize, col: usize },
    #[error("{line}:{col}: symmetry conflict: {message}")]
    SymmetryConflict { message: String, line: usize, col: usize },
    #[error("{line}:{col}: {message}")]
    Invalid { message: String, line: usize, col: usize },
}

/// Source position, ignored by equality so that printed and reparsed specs
/// compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: String,
    pub args: Vec<String>,
    pub nonvanishing: bool,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricEntry {
    pub row: String,
    pub col: String,
    pub value: RawExpr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VfTerm {
    pub negative: bool,
    pub coefficient: Option<RawExpr>,
    pub coordinate: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VfExpr {
    pub terms: Vec<VfTerm>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VfRef {
    Named(String, Pos),
    Inline(VfExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureDecl {
    pub q: VfRef,
    pub p: VfRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaEntry {
    pub component: String,
    pub b: String,
    pub a: String,
    pub value: RawExpr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    S(i64),
    C(Rational),
}

impl Weight {
    pub fn s_units(&self) -> Result<i32, String> {
        match self {
            Weight::S(k) => i32::try_from(*k).map_err(|_| format!("weight s^{k} out of range")),
            Weight::C(q) => s_power_from_c(q).map_err(|e| e.to_string()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::S(k) => write!(f, "s^{k}"),
            Weight::C(q) if q.is_integer() => write!(f, "c^{q}"),
            Weight::C(q) => write!(f, "c^({q})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContractionDecl {
    pub weights: Vec<(String, Weight, Pos)>,
    pub generators: Vec<(String, Weight, Pos)>,
}

/// A parsed spec file, kept close to the source text.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ManifoldSpec {
    pub name: String,
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub functions: Vec<FuncDecl>,
    pub metric: Option<Vec<MetricEntry>>,
    pub fields: Vec<(String, VfExpr)>,
    pub structure: Option<StructureDecl>,
    pub connection: Option<Vec<GammaEntry>>,
    pub contraction: Option<ContractionDecl>,
}

/// Weights in powers of `s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContractionWeights {
    pub coordinates: BTreeMap<String, i32>,
    pub generators: BTreeMap<String, i32>,
}

/// The evaluated objects a spec describes.
#[derive(Clone, Debug)]
pub struct Model {
    pub chart: Arc<Chart>,
    pub metric: Option<SuperMetric>,
    pub fields: Vec<(String, VectorField)>,
    /// `(Q, P)`, explicit or the Shander defaults.
    pub structure: Option<(VectorField, VectorField)>,
    pub connection: Option<AffineConnection>,
    pub contraction: Option<ContractionWeights>,
}

impl Model {
    pub fn field(&self, name: &str) -> Option<&VectorField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

pub fn parse_spec(text: &str) -> Result<ManifoldSpec, SpecError> {
    let mut ts = TokenStream::from_str(text)?;
    let spec = Parser { ts: &mut ts }.spec()?;
    spec.model()?;
    Ok(spec)
}

/// A standalone `CONNECTION { ... }` block evaluated on `chart`.
pub fn parse_connection_block(text: &str, chart: &Arc<Chart>) -> Result<AffineConnection, SpecError> {
    let mut ts = TokenStream::from_str(text)?;
    let mut p = Parser { ts: &mut ts };
    p.ts.expect_keyword("CONNECTION")?;
    let entries = p.connection()?;
    if !p.ts.at(&Tok::Eof) {
        return Err(p.ts.error(&["end of input"]).into());
    }
    build_connection(chart, &entries)
}

struct Parser<'a> {
    ts: &'a mut TokenStream,
}

const KEYWORDS: [&str; 8] = ["EVEN", "ODD", "FUNC", "METRIC", "VF", "STRUCTURE", "CONNECTION", "CONTRACTION"];

impl Parser<'_> {
    fn pos(&self) -> Pos {
        let t = self.ts.peek();
        Pos { line: t.line, col: t.col }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        Ok(self.ts.expect_ident()?.0)
    }

    fn spec(&mut self) -> Result<ManifoldSpec, SpecError> {
        self.ts.expect_keyword("MANIFOLD")?;
        let mut spec = ManifoldSpec { name: self.ident()?, ..Default::default() };
        loop {
            let pos = self.pos();
            let dup = |what: &str| SpecError::Invalid { message: format!("duplicate {what} block"), line: pos.line, col: pos.col };
            match &self.ts.peek().tok {
                Tok::Eof => return Ok(spec),
                Tok::Ident(w) => match w.as_str() {
                    "EVEN" | "ODD" => {
                        let odd = w == "ODD";
                        self.ts.next();
                        let target = if odd { &mut spec.odd } else { &mut spec.even };
                        target.push(self.ident()?);
                        while matches!(&self.ts.peek().tok, Tok::Ident(w) if !is_keyword(w)) {
                            target.push(self.ident()?);
                        }
                    }
                    "FUNC" => {
                        self.ts.next();
                        let pos = self.pos();
                        let name = self.ident()?;
                        self.ts.expect(Tok::LParen)?;
                        let mut args = vec![self.ident()?];
                        while self.ts.eat(&Tok::Comma) {
                            args.push(self.ident()?);
                        }
                        self.ts.expect(Tok::RParen)?;
                        let nonvanishing = self.ts.at_ident("NONVANISHING");
                        if nonvanishing {
                            self.ts.next();
                        }
                        spec.functions.push(FuncDecl { name, args, nonvanishing, pos });
                    }
                    "METRIC" => {
                        self.ts.next();
                        if spec.metric.is_some() {
                            return Err(dup("METRIC"));
                        }
                        spec.metric = Some(self.metric()?);
                    }
                    "VF" => {
                        self.ts.next();
                        let name = self.ident()?;
                        self.ts.expect(Tok::Eq)?;
                        let v = self.vfexpr()?;
                        spec.fields.push((name, v));
                    }
                    "STRUCTURE" => {
                        self.ts.next();
                        if spec.structure.is_some() {
                            return Err(dup("STRUCTURE"));
                        }
                        spec.structure = Some(self.structure()?);
                    }
                    "CONNECTION" => {
                        self.ts.next();
                        if spec.connection.is_some() {
                            return Err(dup("CONNECTION"));
                        }
                        spec.connection = Some(self.connection()?);
                    }
                    "CONTRACTION" => {
                        self.ts.next();
                        if spec.contraction.is_some() {
                            return Err(dup("CONTRACTION"));
                        }
                        spec.contraction = Some(self.contraction()?);
                    }
                    _ => return Err(self.expected_decl().into()),
                },
                _ => return Err(self.expected_decl().into()),
            }
        }
    }

    fn expected_decl(&self) -> SyntaxError {
        self.ts.error(&["`EVEN`", "`ODD`", "`FUNC`", "`METRIC`", "`VF`", "`STRUCTURE`", "`CONNECTION`", "`CONTRACTION`", "end of input"])
    }

    fn metric(&mut self) -> Result<Vec<MetricEntry>, SyntaxError> {
        self.ts.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while !self.ts.eat(&Tok::RBrace) {
            if !self.ts.at(&Tok::LParen) {
                return Err(self.ts.error(&["`(`", "`}`"]));
            }
            let pos = self.pos();
            self.ts.next();
            let row = self.ident()?;
            self.ts.expect(Tok::Comma)?;
            let col = self.ident()?;
            self.ts.expect(Tok::RParen)?;
            self.ts.expect(Tok::Eq)?;
            let value = parse_expr(self.ts)?;
            self.ts.eat(&Tok::Semi);
            out.push(MetricEntry { row, col, value, pos });
        }
        Ok(out)
    }

    fn at_basis(&self) -> bool {
        self.ts.at_ident("d") && *self.ts.peek_at(1) == Tok::LParen
    }

    fn basis(&mut self) -> Result<String, SyntaxError> {
        self.ts.expect_keyword("d")?;
        self.ts.expect(Tok::LParen)?;
        let c = self.ident()?;
        self.ts.expect(Tok::RParen)?;
        Ok(c)
    }

    fn vfterm(&mut self, negative: bool) -> Result<VfTerm, SyntaxError> {
        if self.at_basis() {
            return Ok(VfTerm { negative, coefficient: None, coordinate: self.basis()? });
        }
        let mut coef = parse_factor(self.ts)?;
        loop {
            if self.ts.eat(&Tok::Star) {
                if self.at_basis() {
                    return Ok(VfTerm { negative, coefficient: Some(coef), coordinate: self.basis()? });
                }
                coef = RawExpr::Mul(Box::new(coef), Box::new(parse_factor(self.ts)?));
            } else if self.ts.eat(&Tok::Slash) {
                coef = RawExpr::Div(Box::new(coef), Box::new(parse_factor(self.ts)?));
            } else {
                return Err(self.ts.error(&["`*`", "`/`"]));
            }
        }
    }

    fn vfexpr(&mut self) -> Result<VfExpr, SyntaxError> {
        let pos = self.pos();
        if matches!(&self.ts.peek().tok, Tok::Number(n) if n == "0") && !matches!(self.ts.peek_at(1), Tok::Star | Tok::Slash) {
            self.ts.next();
            return Ok(VfExpr { terms: Vec::new(), pos });
        }
        let mut terms = vec![{
            let neg = self.ts.eat(&Tok::Minus);
            self.vfterm(neg)?
        }];
        loop {
            if self.ts.eat(&Tok::Plus) {
                terms.push(self.vfterm(false)?);
            } else if self.ts.eat(&Tok::Minus) {
                terms.push(self.vfterm(true)?);
            } else {
                return Ok(VfExpr { terms, pos });
            }
        }
    }

    fn vfref(&mut self) -> Result<VfRef, SyntaxError> {
        if let Tok::Ident(w) = &self.ts.peek().tok {
            if matches!(self.ts.peek_at(1), Tok::Semi | Tok::RBrace) {
                let (w, pos) = (w.clone(), self.pos());
                self.ts.next();
                return Ok(VfRef::Named(w, pos));
            }
        }
        Ok(VfRef::Inline(self.vfexpr()?))
    }

    fn structure(&mut self) -> Result<StructureDecl, SyntaxError> {
        self.ts.expect(Tok::LBrace)?;
        let (mut q, mut p) = (None, None);
        while !self.ts.eat(&Tok::RBrace) {
            let slot = if self.ts.at_ident("Q") && q.is_none() {
                &mut q
            } else if self.ts.at_ident("P") && p.is_none() {
                &mut p
            } else {
                let mut expected = Vec::new();
                if q.is_none() {
                    expected.push("`Q`");
                }
                if p.is_none() {
                    expected.push("`P`");
                }
                expected.push("`}`");
                return Err(self.ts.error(&expected));
            };
            self.ts.next();
            self.ts.expect(Tok::Eq)?;
            *slot = Some(self.vfref()?);
            self.ts.eat(&Tok::Semi);
        }
        match (q, p) {
            (Some(q), Some(p)) => Ok(StructureDecl { q, p }),
            (None, _) => Err(self.ts.error(&["`Q`"])),
            (_, None) => Err(self.ts.error(&["`P`"])),
        }
    }

    fn connection(&mut self) -> Result<Vec<GammaEntry>, SyntaxError> {
        self.ts.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while !self.ts.eat(&Tok::RBrace) {
            let pos = self.pos();
            if !self.ts.at_ident("Gamma") {
                return Err(self.ts.error(&["`Gamma`", "`}`"]));
            }
            self.ts.next();
            self.ts.expect(Tok::LParen)?;
            let component = self.ident()?;
            self.ts.expect(Tok::Semi)?;
            let b = self.ident()?;
            self.ts.expect(Tok::Comma)?;
            let a = self.ident()?;
            self.ts.expect(Tok::RParen)?;
            self.ts.expect(Tok::Eq)?;
            let value = parse_expr(self.ts)?;
            self.ts.eat(&Tok::Semi);
            out.push(GammaEntry { component, b, a, value, pos });
        }
        Ok(out)
    }

    fn weight(&mut self) -> Result<Weight, SyntaxError> {
        let c = if self.ts.at_ident("s") {
            false
        } else if self.ts.at_ident("c") {
            true
        } else {
            return Err(self.ts.error(&["`s`", "`c`"]));
        };
        self.ts.next();
        if !self.ts.eat(&Tok::Caret) {
            return Ok(if c { Weight::C(Rational::from_integer(1.into())) } else { Weight::S(1) });
        }
        let paren = self.ts.eat(&Tok::LParen);
        let w = if c { Weight::C(self.ts.expect_signed_rational()?) } else { Weight::S(self.ts.expect_integer()?) };
        if paren {
            self.ts.expect(Tok::RParen)?;
        }
        Ok(w)
    }

    fn contraction(&mut self) -> Result<ContractionDecl, SyntaxError> {
        self.ts.expect(Tok::LBrace)?;
        let mut out = ContractionDecl::default();
        while !self.ts.eat(&Tok::RBrace) {
            let target = if self.ts.at_ident("weights") {
                &mut out.weights
            } else if self.ts.at_ident("generators") {
                &mut out.generators
            } else {
                return Err(self.ts.error(&["`weights`", "`generators`", "`}`"]));
            };
            self.ts.next();
            self.ts.expect(Tok::Colon)?;
            while !self.ts.eat(&Tok::Semi) {
                if self.ts.at(&Tok::RBrace) {
                    break;
                }
                let pos = Pos { line: self.ts.peek().line, col: self.ts.peek().col };
                let name = self.ts.expect_ident().map_err(|_| self.ts.error(&["identifier", "`;`"]))?.0;
                self.ts.expect(Tok::FatArrow)?;
                target.push((name, self.weight()?, pos));
                self.ts.eat(&Tok::Comma);
            }
        }
        Ok(out)
    }
}

fn is_keyword(w: &str) -> bool {
    KEYWORDS.contains(&w)
}

fn unknown(name: &str, pos: Pos) -> SpecError {
    SpecError::UnknownIdentifier { name: name.into(), line: pos.line, col: pos.col }
}

fn invalid(message: impl Into<String>, pos: Pos) -> SpecError {
    SpecError::Invalid { message: message.into(), line: pos.line, col: pos.col }
}

fn eval(raw: &RawExpr, chart: &Arc<Chart>, pos: Pos) -> Result<SuperFunction, SpecError> {
    eval_raw(raw, chart).map_err(|e| match e {
        GrassmannError::Scalar(ScalarError::UnknownSymbol(s)) | GrassmannError::UnknownCoordinate(s) => unknown(&s, pos),
        other => invalid(other.to_string(), pos),
    })
}

fn index(chart: &Chart, name: &str, pos: Pos) -> Result<usize, SpecError> {
    chart.index_of(name).ok_or_else(|| unknown(name, pos))
}

fn build_vf(chart: &Arc<Chart>, v: &VfExpr) -> Result<VectorField, SpecError> {
    let mut comps = vec![SuperFunction::zero(chart); chart.dim()];
    for t in &v.terms {
        let i = index(chart, &t.coordinate, v.pos)?;
        let mut c = match &t.coefficient {
            Some(e) => eval(e, chart, v.pos)?,
            None => SuperFunction::one(chart),
        };
        if t.negative {
            c = c.neg_ref();
        }
        comps[i] = &comps[i] + &c;
    }
    let x = VectorField::new(chart, comps).map_err(|e| invalid(e.to_string(), v.pos))?;
    if x.parity().is_none() {
        return Err(SpecError::ParityViolation { message: format!("`{x}` mixes even and odd parts"), line: v.pos.line, col: v.pos.col });
    }
    Ok(x)
}

fn build_connection(chart: &Arc<Chart>, entries: &[GammaEntry]) -> Result<AffineConnection, SpecError> {
    let mut gamma = Tensor12::zero(chart);
    let mut seen = BTreeSet::new();
    for e in entries {
        let (c, b, a) = (index(chart, &e.component, e.pos)?, index(chart, &e.b, e.pos)?, index(chart, &e.a, e.pos)?);
        if !seen.insert((c, b, a)) {
            return Err(invalid(format!("duplicate symbol Gamma({}; {}, {})", e.component, e.b, e.a), e.pos));
        }
        let v = eval(&e.value, chart, e.pos)?;
        let p = chart.parity(a) + chart.parity(b) + chart.parity(c);
        if !v.has_parity(p) {
            return Err(SpecError::ParityViolation {
                message: format!("Gamma({}; {}, {}) = {v} must be {}", e.component, e.b, e.a, parity_word(p)),
                line: e.pos.line,
                col: e.pos.col,
            });
        }
        gamma.set_symbol(c, b, a, v);
    }
    AffineConnection::new(gamma).map_err(|e| invalid(e.to_string(), entries.first().map(|e| e.pos).unwrap_or_default()))
}

fn parity_word(p: Parity) -> &'static str {
    if p.is_odd() {
        "odd"
    } else {
        "even"
    }
}

impl ManifoldSpec {
    pub fn chart(&self) -> Result<Arc<Chart>, SpecError> {
        let functions = self
            .functions
            .iter()
            .map(|f| {
                for a in &f.args {
                    if !self.even.contains(a) {
                        return Err(if self.odd.contains(a) {
                            SpecError::ParityViolation { message: format!("function `{}` depends on odd `{a}`", f.name), line: f.pos.line, col: f.pos.col }
                        } else {
                            unknown(a, f.pos)
                        });
                    }
                }
                let args: Vec<&str> = f.args.iter().map(String::as_str).collect();
                Ok(FunctionSymbol::new(&f.name, &args, f.nonvanishing))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let even: Vec<&str> = self.even.iter().map(String::as_str).collect();
        let odd: Vec<&str> = self.odd.iter().map(String::as_str).collect();
        Chart::new(&even, &odd, functions).map_err(|e| invalid(e.to_string(), Pos { line: 1, col: 1 }))
    }

    /// Resolves names and evaluates every block.
    pub fn model(&self) -> Result<Model, SpecError> {
        let chart = self.chart()?;
        let metric = self.metric.as_ref().map(|entries| self.build_metric(&chart, entries)).transpose()?;
        let mut fields: Vec<(String, VectorField)> = Vec::new();
        for (name, v) in &self.fields {
            if fields.iter().any(|(n, _)| n == name) || chart.index_of(name).is_some() {
                return Err(invalid(format!("name `{name}` is already in use"), v.pos));
            }
            fields.push((name.clone(), build_vf(&chart, v)?));
        }
        let resolve = |r: &VfRef| -> Result<VectorField, SpecError> {
            match r {
                VfRef::Named(n, pos) => fields.iter().find(|(m, _)| m == n).map(|(_, v)| v.clone()).ok_or_else(|| unknown(n, *pos)),
                VfRef::Inline(v) => build_vf(&chart, v),
            }
        };
        let structure = match &self.structure {
            Some(s) => Some((resolve(&s.q)?, resolve(&s.p)?)),
            None => default_structure(&chart),
        };
        let connection = self.connection.as_ref().map(|e| build_connection(&chart, e)).transpose()?;
        let contraction = match &self.contraction {
            None => None,
            Some(c) => {
                let mut w = ContractionWeights::default();
                for (name, weight, pos) in &c.weights {
                    index(&chart, name, *pos)?;
                    w.coordinates.insert(name.clone(), weight.s_units().map_err(|m| invalid(m, *pos))?);
                }
                for (name, weight, pos) in &c.generators {
                    if !fields.iter().any(|(n, _)| n == name) {
                        return Err(unknown(name, *pos));
                    }
                    w.generators.insert(name.clone(), weight.s_units().map_err(|m| invalid(m, *pos))?);
                }
                Some(w)
            }
        };
        Ok(Model { chart, metric, fields, structure, connection, contraction })
    }

    fn build_metric(&self, chart: &Arc<Chart>, entries: &[MetricEntry]) -> Result<SuperMetric, SpecError> {
        let mut given: BTreeMap<(usize, usize), (SuperFunction, Pos)> = BTreeMap::new();
        for e in entries {
            let (i, j) = (index(chart, &e.row, e.pos)?, index(chart, &e.col, e.pos)?);
            let v = eval(&e.value, chart, e.pos)?;
            let p = chart.parity(i) + chart.parity(j);
            if !v.has_parity(p) {
                return Err(SpecError::ParityViolation {
                    message: format!("g({}, {}) = {v} must be {}", e.row, e.col, parity_word(p)),
                    line: e.pos.line,
                    col: e.pos.col,
                });
            }
            let conflict = |message: String| SpecError::SymmetryConflict { message, line: e.pos.line, col: e.pos.col };
            if given.contains_key(&(i, j)) {
                return Err(conflict(format!("duplicate entry ({}, {})", e.row, e.col)));
            }
            if let Some((w, _)) = given.get(&(j, i)) {
                let mirror = if Parity::koszul(chart.parity(i), chart.parity(j)) { v.neg_ref() } else { v.clone() };
                if *w != mirror {
                    return Err(conflict(format!("({}, {}) = {v} disagrees with ({}, {}) = {w} under graded symmetry", e.row, e.col, e.col, e.row)));
                }
            }
            given.insert((i, j), (v, e.pos));
        }
        let named: Vec<(&str, &str, SuperFunction)> =
            given.iter().map(|((i, j), (v, _))| (&*chart.coord(*i).name, &*chart.coord(*j).name, v.clone())).collect();
        SuperMetric::from_entries(chart, &named).map_err(|e| {
            let pos = entries.first().map(|e| e.pos).unwrap_or_default();
            match e {
                crate::metric::MetricError::Superdomain(SuperdomainError::SymmetryViolation(m)) => {
                    SpecError::SymmetryConflict { message: m, line: pos.line, col: pos.col }
                }
                other => invalid(other.to_string(), pos),
            }
        })
    }
}

/// `Q = ∂_τ + τ∂_t`, `P = ∂_t` with `t` the last even and `τ` the only odd
/// coordinate.
fn default_structure(chart: &Arc<Chart>) -> Option<(VectorField, VectorField)> {
    if chart.n_odd() != 1 {
        return None;
    }
    let (t, tau) = (chart.n_even() - 1, chart.n_even());
    let mut q = VectorField::basis(chart, tau);
    q.set_component(t, SuperFunction::coordinate_at(chart, tau));
    Some((q, VectorField::basis(chart, t)))
}

fn coefficient_text(e: &RawExpr) -> String {
    match e {
        RawExpr::Add(..) | RawExpr::Sub(..) | RawExpr::Neg(_) => format!("({e})"),
        // a leading sign would be read back as the term's own sign
        _ if e.to_string().starts_with('-') => format!("({e})"),
        _ => e.to_string(),
    }
}

impl fmt::Display for VfExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            match (k, t.negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if let Some(c) = &t.coefficient {
                write!(f, "{}*", coefficient_text(c))?;
            }
            write!(f, "d({})", t.coordinate)?;
        }
        Ok(())
    }
}

impl fmt::Display for VfRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VfRef::Named(n, _) => f.write_str(n),
            VfRef::Inline(v) => write!(f, "{v}"),
        }
    }
}

fn weight_list(items: &[(String, Weight, Pos)]) -> String {
    items.iter().map(|(n, w, _)| format!("{n} => {w}")).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MANIFOLD {}", self.name)?;
        writeln!(f, "EVEN {}", self.even.join(" "))?;
        if !self.odd.is_empty() {
            writeln!(f, "ODD {}", self.odd.join(" "))?;
        }
        for d in &self.functions {
            write!(f, "FUNC {}({})", d.name, d.args.join(", "))?;
            if d.nonvanishing {
                f.write_str(" NONVANISHING")?;
            }
            writeln!(f)?;
        }
        if let Some(m) = &self.metric {
            writeln!(f, "METRIC {{")?;
            for e in m {
                writeln!(f, "  ({}, {}) = {};", e.row, e.col, e.value)?;
            }
            writeln!(f, "}}")?;
        }
        for (name, v) in &self.fields {
            writeln!(f, "VF {name} = {v}")?;
        }
        if let Some(s) = &self.structure {
            writeln!(f, "STRUCTURE {{\n  Q = {};\n  P = {};\n}}", s.q, s.p)?;
        }
        if let Some(c) = &self.connection {
            writeln!(f, "CONNECTION {{")?;
            for e in c {
                writeln!(f, "  Gamma({}; {}, {}) = {};", e.component, e.b, e.a, e.value)?;
            }
            writeln!(f, "}}")?;
        }
        if let Some(c) = &self.contraction {
            writeln!(f, "CONTRACTION {{")?;
            if !c.weights.is_empty() {
                writeln!(f, "  weights: {};", weight_list(&c.weights))?;
            }
            if !c.generators.is_empty() {
                writeln!(f, "  generators: {};", weight_list(&c.generators))?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

/// A connection printed as a `CONNECTION` block, nonzero symbols only.
pub fn connection_block(conn: &AffineConnection) -> String {
    let c = conn.chart();
    let n = c.dim();
    let mut s = String::from("CONNECTION {\n");
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                let v = conn.christoffel().symbol(k, b, a);
                if !v.is_zero() {
                    s.push_str(&format!("  Gamma({}; {}, {}) = {v};\n", c.coord(k).name, c.coord(b).name, c.coord(a).name));
                }
            }
        }
    }
    s.push('}');
    s
}
