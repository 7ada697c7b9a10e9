use std::fmt;
use std::sync::Arc;

use crate::grassmann::{same_chart, Chart, SuperFunction};
use crate::scalar::Parity;

use super::{SuperdomainError, VectorField};

/// One-form with `ω(∂_a) = ω_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    chart: Arc<Chart>,
    comps: Vec<SuperFunction>,
}

impl OneForm {
    pub fn new(chart: &Arc<Chart>, comps: Vec<SuperFunction>) -> Result<Self, SuperdomainError> {
        if comps.len() != chart.dim() {
            return Err(SuperdomainError::ComponentCount { expected: chart.dim(), found: comps.len() });
        }
        Ok(OneForm { chart: chart.clone(), comps })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        OneForm { chart: chart.clone(), comps: vec![SuperFunction::zero(chart); chart.dim()] }
    }

    /// `dx^i`: parity of the coordinate, `dx^i(∂_i) = 1`.
    pub fn coordinate(chart: &Arc<Chart>, i: usize) -> Self {
        let mut w = OneForm::zero(chart);
        w.comps[i] = SuperFunction::one(chart);
        w
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn component(&self, i: usize) -> &SuperFunction {
        &self.comps[i]
    }

    pub fn parity(&self) -> Option<Parity> {
        VectorField::new(&self.chart, self.comps.clone()).ok()?.parity()
    }

    fn split(&self) -> (OneForm, OneForm) {
        let v = VectorField::new(&self.chart, self.comps.clone()).expect("same shape");
        let (e, o) = v.split();
        (
            OneForm { chart: self.chart.clone(), comps: e.components().to_vec() },
            OneForm { chart: self.chart.clone(), comps: o.components().to_vec() },
        )
    }

    /// `ω(Y) = Σ (-1)^{|ω||Y^a|} Y^a ω_a`.
    pub fn pair(&self, y: &VectorField) -> Result<SuperFunction, SuperdomainError> {
        if !same_chart(&self.chart, y.chart()) {
            return Err(SuperdomainError::ChartMismatch);
        }
        let (we, wo) = self.split();
        let mut out = SuperFunction::zero(&self.chart);
        for (w, p) in [(we, Parity::Even), (wo, Parity::Odd)] {
            for (a, ya) in y.components().iter().enumerate() {
                if w.comps[a].is_zero() || ya.is_zero() {
                    continue;
                }
                out = &out + &(&ya.koszul_twist(p) * &w.comps[a]);
            }
        }
        Ok(out)
    }
}

/// Even rank-two covariant tensor with `entries[a][b] = T(∂_a, ∂_b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor2 {
    chart: Arc<Chart>,
    entries: Vec<Vec<SuperFunction>>,
}

impl Tensor2 {
    pub fn new(chart: &Arc<Chart>, entries: Vec<Vec<SuperFunction>>) -> Result<Self, SuperdomainError> {
        let n = chart.dim();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(SuperdomainError::ComponentCount { expected: n * n, found: entries.iter().map(Vec::len).sum() });
        }
        if entries.iter().flatten().any(|e| !same_chart(e.chart(), chart)) {
            return Err(SuperdomainError::ChartMismatch);
        }
        Ok(Tensor2 { chart: chart.clone(), entries })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        Tensor2 { chart: chart.clone(), entries: vec![vec![SuperFunction::zero(chart); n]; n] }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn entry(&self, a: usize, b: usize) -> &SuperFunction {
        &self.entries[a][b]
    }

    pub fn entries(&self) -> &[Vec<SuperFunction>] {
        &self.entries
    }

    pub fn set(&mut self, a: usize, b: usize, v: SuperFunction) {
        self.entries[a][b] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(SuperFunction::is_zero)
    }

    pub fn map_entries(&self, f: impl Fn(&SuperFunction) -> SuperFunction) -> Tensor2 {
        Tensor2 {
            chart: self.chart.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    /// `T(X,Y) = Σ (-1)^{ã|Y^b|} X^a Y^b T_ab` (even tensor).
    pub fn evaluate(&self, x: &VectorField, y: &VectorField) -> Result<SuperFunction, SuperdomainError> {
        if !same_chart(&self.chart, x.chart()) || !same_chart(&self.chart, y.chart()) {
            return Err(SuperdomainError::ChartMismatch);
        }
        let mut out = SuperFunction::zero(&self.chart);
        for (a, xa) in x.components().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let pa = self.chart.parity(a);
            for (b, yb) in y.components().iter().enumerate() {
                if yb.is_zero() || self.entries[a][b].is_zero() {
                    continue;
                }
                out = &out + &(&(xa * &yb.koszul_twist(pa)) * &self.entries[a][b]);
            }
        }
        Ok(out)
    }

    /// Checks `|T_ab| = ã + b̃` and `T_ab = (-1)^{ãb̃} T_ba`.
    pub fn validate_even_symmetric(&self) -> Result<(), SuperdomainError> {
        let n = self.chart.dim();
        for a in 0..n {
            for b in 0..n {
                let e = &self.entries[a][b];
                let p = self.chart.parity(a) + self.chart.parity(b);
                if !e.has_parity(p) {
                    return Err(SuperdomainError::ParityViolation(format!(
                        "entry ({}, {}) = {e} should be {p}",
                        self.chart.coord(a).name,
                        self.chart.coord(b).name
                    )));
                }
                let mirror = &self.entries[b][a];
                let expected =
                    if Parity::koszul(self.chart.parity(a), self.chart.parity(b)) { mirror.neg_ref() } else { mirror.clone() };
                if *e != expected {
                    return Err(SuperdomainError::SymmetryViolation(format!(
                        "entry ({a_}, {b_}) = {e} but ({b_}, {a_}) = {mirror}",
                        a_ = self.chart.coord(a).name,
                        b_ = self.chart.coord(b).name
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Tensor2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.chart.dim();
        let mut first = true;
        for a in 0..n {
            for b in 0..n {
                if self.entries[a][b].is_zero() {
                    continue;
                }
                if !first {
                    writeln!(f)?;
                }
                first = false;
                write!(f, "({}, {}) = {}", self.chart.coord(a).name, self.chart.coord(b).name, self.entries[a][b])?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Even vector-valued bilinear form with `fields[a][b] = Γ(∂_a, ∂_b)`,
/// so the symbol `Γ^c_{ba}` is component `c` of `fields[a][b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor12 {
    chart: Arc<Chart>,
    fields: Vec<Vec<VectorField>>,
}

impl Tensor12 {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        Tensor12 { chart: chart.clone(), fields: vec![vec![VectorField::zero(chart); n]; n] }
    }

    pub fn from_fields(chart: &Arc<Chart>, fields: Vec<Vec<VectorField>>) -> Result<Self, SuperdomainError> {
        let n = chart.dim();
        if fields.len() != n || fields.iter().any(|r| r.len() != n) {
            return Err(SuperdomainError::ComponentCount { expected: n * n, found: fields.iter().map(Vec::len).sum() });
        }
        Ok(Tensor12 { chart: chart.clone(), fields })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn field(&self, a: usize, b: usize) -> &VectorField {
        &self.fields[a][b]
    }

    pub fn set_field(&mut self, a: usize, b: usize, v: VectorField) {
        self.fields[a][b] = v;
    }

    /// `Γ^c_{ba}`.
    pub fn symbol(&self, c: usize, b: usize, a: usize) -> &SuperFunction {
        self.fields[a][b].component(c)
    }

    pub fn set_symbol(&mut self, c: usize, b: usize, a: usize, v: SuperFunction) {
        self.fields[a][b].set_component(c, v);
    }

    pub fn is_zero(&self) -> bool {
        self.fields.iter().flatten().all(VectorField::is_zero)
    }

    pub fn map_fields(&self, f: impl Fn(&VectorField) -> VectorField) -> Tensor12 {
        Tensor12 {
            chart: self.chart.clone(),
            fields: self.fields.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    pub fn add(&self, other: &Tensor12) -> Tensor12 {
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
            .collect();
        Tensor12 { chart: self.chart.clone(), fields }
    }

    /// `Γ(X,Y) = Σ (-1)^{ã|Y^b|} X^a Y^b Γ(∂_a,∂_b)`.
    pub fn evaluate(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let mut out = VectorField::zero(&self.chart);
        for (a, xa) in x.components().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let pa = self.chart.parity(a);
            for (b, yb) in y.components().iter().enumerate() {
                if yb.is_zero() || self.fields[a][b].is_zero() {
                    continue;
                }
                let coeff = xa * &yb.koszul_twist(pa);
                out = &out + &self.fields[a][b].mul_left(&coeff);
            }
        }
        out
    }

    /// Checks `|Γ^c_{ba}| = ã + b̃ + c̃`.
    pub fn validate_even(&self) -> Result<(), SuperdomainError> {
        let n = self.chart.dim();
        for a in 0..n {
            for b in 0..n {
                let v = &self.fields[a][b];
                let p = self.chart.parity(a) + self.chart.parity(b);
                if !v.has_parity(p) {
                    return Err(SuperdomainError::ParityViolation(format!(
                        "Γ(∂_{}, ∂_{}) = {v} should be {p}",
                        self.chart.coord(a).name,
                        self.chart.coord(b).name
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Tensor12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.chart.dim();
        let mut first = true;
        for a in 0..n {
            for b in 0..n {
                if self.fields[a][b].is_zero() {
                    continue;
                }
                if !first {
                    writeln!(f)?;
                }
                first = false;
                write!(f, "(d({}), d({})) -> {}", self.chart.coord(a).name, self.chart.coord(b).name, self.fields[a][b])?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
