use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::grassmann::{same_chart, Chart, SuperFunction};
use crate::scalar::{Parity, ScalarExpr};

use super::SuperdomainError;

/// `X = X^a ∂_a` with components written to the left of the basis
/// derivations, one component per chart coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<SuperFunction>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, comps: Vec<SuperFunction>) -> Result<Self, SuperdomainError> {
        if comps.len() != chart.dim() {
            return Err(SuperdomainError::ComponentCount { expected: chart.dim(), found: comps.len() });
        }
        if comps.iter().any(|c| !same_chart(c.chart(), chart)) {
            return Err(SuperdomainError::ChartMismatch);
        }
        Ok(VectorField { chart: chart.clone(), comps })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        VectorField { chart: chart.clone(), comps: vec![SuperFunction::zero(chart); chart.dim()] }
    }

    /// The coordinate derivation `∂_i`.
    pub fn basis(chart: &Arc<Chart>, i: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.comps[i] = SuperFunction::one(chart);
        v
    }

    pub fn basis_named(chart: &Arc<Chart>, name: &str) -> Result<Self, SuperdomainError> {
        Ok(VectorField::basis(chart, chart.require(name)?))
    }

    /// Builds a field from `(coordinate, component)` pairs; repeated
    /// coordinates add up.
    pub fn from_pairs(chart: &Arc<Chart>, pairs: &[(&str, SuperFunction)]) -> Result<Self, SuperdomainError> {
        let mut v = VectorField::zero(chart);
        for (name, f) in pairs {
            let i = chart.require(name)?;
            v.comps[i] = v.comps[i].try_add(f)?;
        }
        Ok(v)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn component(&self, i: usize) -> &SuperFunction {
        &self.comps[i]
    }

    pub fn components(&self) -> &[SuperFunction] {
        &self.comps
    }

    pub fn set_component(&mut self, i: usize, f: SuperFunction) {
        self.comps[i] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(SuperFunction::is_zero)
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut found: Option<Parity> = None;
        for (i, c) in self.comps.iter().enumerate() {
            let (e, o) = c.split();
            for (part, p) in [(e, Parity::Even), (o, Parity::Odd)] {
                if part.is_zero() {
                    continue;
                }
                let q = p + self.chart.parity(i);
                match found {
                    None => found = Some(q),
                    Some(prev) if prev != q => return None,
                    _ => {}
                }
            }
        }
        Some(found.unwrap_or(Parity::Even))
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        self.is_zero() || self.parity() == Some(p)
    }

    /// Even and odd parts.
    pub fn split(&self) -> (VectorField, VectorField) {
        let mut even = VectorField::zero(&self.chart);
        let mut odd = VectorField::zero(&self.chart);
        for (i, c) in self.comps.iter().enumerate() {
            let (ce, co) = c.split();
            if self.chart.parity(i).is_odd() {
                even.comps[i] = co;
                odd.comps[i] = ce;
            } else {
                even.comps[i] = ce;
                odd.comps[i] = co;
            }
        }
        (even, odd)
    }

    fn check(&self, chart: &Arc<Chart>) -> Result<(), SuperdomainError> {
        if same_chart(&self.chart, chart) {
            Ok(())
        } else {
            Err(SuperdomainError::ChartMismatch)
        }
    }

    /// `X(f) = Σ X^a ∂_a f`.
    pub fn try_apply(&self, f: &SuperFunction) -> Result<SuperFunction, SuperdomainError> {
        self.check(f.chart())?;
        let mut out = SuperFunction::zero(&self.chart);
        for (a, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = &out + &(c * &f.partial(a));
        }
        Ok(out)
    }

    /// # Panics
    /// If `f` lives on another chart.
    pub fn apply(&self, f: &SuperFunction) -> SuperFunction {
        self.try_apply(f).expect("vector field and function on different charts")
    }

    /// Componentwise action `X(Y) = X(Y^c) ∂_c`.
    pub fn apply_to_field(&self, y: &VectorField) -> VectorField {
        y.map_components(|c| self.apply(c))
    }

    /// Graded commutator `[X,Y]^c = X(Y^c) - (-1)^{|X||Y|} Y(X^c)`,
    /// extended bilinearly to inhomogeneous fields.
    pub fn try_bracket(&self, y: &VectorField) -> Result<VectorField, SuperdomainError> {
        self.check(&y.chart)?;
        let (xe, xo) = self.split();
        let (ye, yo) = y.split();
        let mut out = VectorField::zero(&self.chart);
        for (xp, px) in [(&xe, Parity::Even), (&xo, Parity::Odd)] {
            for (yp, py) in [(&ye, Parity::Even), (&yo, Parity::Odd)] {
                if xp.is_zero() || yp.is_zero() {
                    continue;
                }
                let xy = xp.apply_to_field(yp);
                let yx = yp.apply_to_field(xp);
                let term = if Parity::koszul(px, py) { &xy + &yx } else { &xy - &yx };
                out = &out + &term;
            }
        }
        Ok(out)
    }

    /// # Panics
    /// If the fields live on different charts.
    pub fn bracket(&self, y: &VectorField) -> VectorField {
        self.try_bracket(y).expect("vector fields on different charts")
    }

    /// `f X`.
    pub fn mul_left(&self, f: &SuperFunction) -> VectorField {
        self.map_components(|c| f * c)
    }

    /// `X h = Σ (-1)^{ã|h|} X^a h ∂_a`.
    pub fn mul_right(&self, h: &SuperFunction) -> VectorField {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(a, c)| c * &h.koszul_twist(self.chart.parity(a)))
            .collect();
        VectorField { chart: self.chart.clone(), comps }
    }

    pub fn scale(&self, k: &ScalarExpr) -> VectorField {
        self.map_components(|c| c.scale(k))
    }

    pub fn map_components(&self, f: impl Fn(&SuperFunction) -> SuperFunction) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(f).collect() }
    }

    pub fn contains_unknowns(&self) -> bool {
        self.comps.iter().any(SuperFunction::contains_unknowns)
    }
}

impl fmt::Display for VectorField {
    /// Spec-file syntax: `coef*d(x) + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.chart.coord(i).name;
            let s = c.to_string();
            let compound = |b: &str| b.contains(" + ") || b.contains(" - ");
            let (neg, body) = if s.starts_with('-') && !compound(&s[1..]) {
                (true, s[1..].to_string())
            } else {
                (false, s)
            };
            let body = if body == "1" {
                format!("d({name})")
            } else if compound(&body) {
                format!("({body})*d({name})")
            } else {
                format!("{body}*d({name})")
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        assert!(same_chart(&self.chart, &rhs.chart), "vector fields on different charts");
        let comps = self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect();
        VectorField { chart: self.chart.clone(), comps }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        self + &(-rhs)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        self.map_components(SuperFunction::neg_ref)
    }
}

impl Add for VectorField {
    type Output = VectorField;
    fn add(self, rhs: VectorField) -> VectorField {
        &self + &rhs
    }
}

impl Sub for VectorField {
    type Output = VectorField;
    fn sub(self, rhs: VectorField) -> VectorField {
        &self - &rhs
    }
}

impl Neg for VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        -&self
    }
}
