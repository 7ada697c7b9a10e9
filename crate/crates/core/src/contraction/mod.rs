//! Inönü–Wigner contractions of families of vector fields.
//!
//! A formal even parameter `s` with `c = s²` carries the rescalings. A
//! coordinate weight `w` substitutes `x ↦ s^w x` everywhere, so `∂_x`
//! picks up `s^{-w}`; a generator weight multiplies the whole field.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::carrollian::{CarrollError, LieSuperAlgebraPresentation};
use crate::grassmann::{Chart, OddMonomial, SuperFunction};
use crate::scalar::{Atom, Parity, Poly, Rational, ScalarExpr};
use crate::superdomain::VectorField;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ContractionError {
    #[error("weight {0} is not an integer power of s = √c")]
    NonIntegerWeight(String),
    #[error("`{0}` is not a Laurent polynomial in s after rescaling")]
    NotLaurent(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("{name} diverges: lowest power s^{power}")]
    Diverges { name: String, power: i32 },
    #[error("cannot project onto the target chart: {0}")]
    Projection(String),
    #[error("invalid gamma data: {0}")]
    InvalidGamma(String),
    #[error(transparent)]
    Algebra(#[from] CarrollError),
}

/// A power of `c` converted to a power of `s`.
pub fn s_power_from_c(c_power: &Rational) -> Result<i32, ContractionError> {
    let doubled = c_power * Rational::from_integer(2.into());
    if !doubled.is_integer() {
        return Err(ContractionError::NonIntegerWeight(format!("c^({c_power})")));
    }
    doubled.to_integer().to_i32().ok_or_else(|| ContractionError::NonIntegerWeight(format!("c^({c_power})")))
}

/// `Σ_k s^k X_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentFamily {
    pub name: String,
    pub parity: Parity,
    chart: Arc<Chart>,
    terms: BTreeMap<i32, VectorField>,
}

impl LaurentFamily {
    pub fn constant(name: &str, x: &VectorField) -> Self {
        let mut f = LaurentFamily { name: name.into(), parity: x.parity().unwrap_or_default(), chart: x.chart().clone(), terms: BTreeMap::new() };
        f.add(0, x);
        f
    }

    pub fn terms(&self) -> &BTreeMap<i32, VectorField> {
        &self.terms
    }

    pub fn coefficient(&self, k: i32) -> VectorField {
        self.terms.get(&k).cloned().unwrap_or_else(|| VectorField::zero(&self.chart))
    }

    fn add(&mut self, k: i32, x: &VectorField) {
        let v = &self.coefficient(k) + x;
        if v.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, v);
        }
    }

    pub fn lowest_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn scale(&self, alpha: &ScalarExpr) -> LaurentFamily {
        let mut out = LaurentFamily { terms: BTreeMap::new(), ..self.clone() };
        for (k, v) in &self.terms {
            out.add(*k, &v.scale(alpha));
        }
        out
    }

    pub fn sum(&self, other: &LaurentFamily) -> LaurentFamily {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add(*k, v);
        }
        out
    }

    /// Bracket expanded term by term in `s`.
    pub fn bracket(&self, other: &LaurentFamily) -> LaurentFamily {
        let mut out = LaurentFamily {
            name: format!("[{}, {}]", self.name, other.name),
            parity: self.parity + other.parity,
            chart: self.chart.clone(),
            terms: BTreeMap::new(),
        };
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                out.add(p + q, &x.bracket(y));
            }
        }
        out
    }
}

impl fmt::Display for LaurentFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, v)| format!("s^{k} ({v})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(VectorField),
    Diverges(i32),
}

/// The `s⁰` coefficient, or the most negative power present.
pub fn limit_c_to_zero(f: &LaurentFamily) -> Limit {
    match f.lowest_power() {
        Some(k) if k < 0 => Limit::Diverges(k),
        _ => Limit::Finite(f.coefficient(0)),
    }
}

fn weight_vector(chart: &Chart, weights: &BTreeMap<String, i32>) -> Result<Vec<i32>, ContractionError> {
    let mut w = vec![0; chart.dim()];
    for (name, k) in weights {
        let i = chart.index_of(name).ok_or_else(|| ContractionError::UnknownName(name.clone()))?;
        w[i] = *k;
    }
    Ok(w)
}

/// Splits a coefficient into pieces homogeneous in `s`.
fn split_by_weight(
    c: &ScalarExpr,
    chart: &Chart,
    w: &[i32],
) -> Result<BTreeMap<i32, ScalarExpr>, ContractionError> {
    let rescaled = |name: &str| chart.index_of(name).is_some_and(|i| w[i] != 0);
    let bad = |a: &Atom| match a {
        Atom::Coord(n) => rescaled(n),
        Atom::Func(f, _) => f.depends_on.iter().any(|d| rescaled(d)),
        Atom::Unknown(_) => false,
    };
    if c.denominator().atoms().iter().any(bad) {
        return Err(ContractionError::NotLaurent(c.to_string()));
    }
    let mut groups: BTreeMap<i32, Poly> = BTreeMap::new();
    for (m, k) in c.numerator().terms() {
        let mut weight = 0i32;
        for (a, e) in m.factors() {
            match a {
                Atom::Coord(n) => weight += w[chart.index_of(n).expect("coefficient atoms are chart coordinates")] * *e as i32,
                other if bad(other) => return Err(ContractionError::NotLaurent(c.to_string())),
                _ => {}
            }
        }
        groups.entry(weight).or_default().add_term(m.clone(), k.clone());
    }
    Ok(groups.into_iter().map(|(k, p)| (k, ScalarExpr::fraction(p, c.denominator().clone()))).collect())
}

/// Rescales named fields by coordinate and generator weights (in powers of `s`).
pub fn rescale(
    fields: &[(String, VectorField)],
    coordinate_weights: &BTreeMap<String, i32>,
    generator_weights: &BTreeMap<String, i32>,
) -> Result<Vec<LaurentFamily>, ContractionError> {
    for name in generator_weights.keys() {
        if !fields.iter().any(|(n, _)| n == name) {
            return Err(ContractionError::UnknownName(name.clone()));
        }
    }
    let mut out = Vec::with_capacity(fields.len());
    for (name, x) in fields {
        let chart = x.chart();
        let w = weight_vector(chart, coordinate_weights)?;
        let gw = generator_weights.get(name).copied().unwrap_or(0);
        let n = chart.n_even();
        let mut fam = LaurentFamily { name: name.clone(), parity: x.parity().unwrap_or_default(), chart: chart.clone(), terms: BTreeMap::new() };
        for (a, comp) in x.components().iter().enumerate() {
            for (m, coeff) in comp.terms() {
                let odd_w: i32 = m.indices().iter().map(|j| w[n + j]).sum();
                for (k, piece) in split_by_weight(coeff, chart, &w)? {
                    let mut v = VectorField::zero(chart);
                    v.set_component(a, SuperFunction::monomial(chart, *m, piece));
                    fam.add(gw + odd_w + k - w[a], &v);
                }
            }
        }
        out.push(fam);
    }
    Ok(out)
}

/// Restricts a field to a chart whose coordinates are a subset of the
/// source chart, with the missing odd coordinates set to zero.
pub fn project(x: &VectorField, target: &Arc<Chart>) -> Result<VectorField, ContractionError> {
    let src = x.chart();
    let mut images = Vec::with_capacity(src.dim());
    for i in 0..src.dim() {
        let coord = src.coord(i);
        match target.index_of(&coord.name) {
            Some(j) if target.parity(j) == coord.parity => images.push(SuperFunction::coordinate_at(target, j)),
            Some(_) => return Err(ContractionError::Projection(format!("parity of `{}` differs", coord.name))),
            None if coord.parity.is_odd() => images.push(SuperFunction::zero(target)),
            None => return Err(ContractionError::Projection(format!("even coordinate `{}` is missing", coord.name))),
        }
    }
    let mut comps = vec![SuperFunction::zero(target); target.dim()];
    for (j, comp) in comps.iter_mut().enumerate() {
        let i = src.index_of(&target.coord(j).name).ok_or_else(|| ContractionError::Projection(target.coord(j).name.to_string()))?;
        *comp = x.component(i).compose(target, &images).map_err(|e| ContractionError::Projection(e.to_string()))?;
    }
    VectorField::new(target, comps).map_err(|e| ContractionError::Projection(e.to_string()))
}

/// What happened to one generator in the limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fate {
    Survives(VectorField),
    Vanishes,
    /// Nonzero on the full chart, zero after projection.
    Decoupled(VectorField),
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub fates: Vec<(String, Fate)>,
    /// `(X, Y, checked, holds)`: `lim [X(s), Y(s)] = [lim X, lim Y]` where
    /// the left side has no negative powers.
    pub consistency: Vec<(String, String, bool, bool)>,
    pub algebra: LieSuperAlgebraPresentation,
}

impl ContractionReport {
    pub fn survivors(&self) -> Vec<&str> {
        self.fates.iter().filter(|(_, f)| matches!(f, Fate::Survives(_))).map(|(n, _)| n.as_str()).collect()
    }

    pub fn consistent(&self) -> bool {
        self.consistency.iter().all(|(_, _, checked, holds)| !checked || *holds)
    }
}

/// Limits, optional projection, and the bracket table of the survivors.
pub fn contracted_bracket_table(
    families: &[LaurentFamily],
    projection: Option<&Arc<Chart>>,
) -> Result<ContractionReport, ContractionError> {
    let mut limits = Vec::with_capacity(families.len());
    for f in families {
        match limit_c_to_zero(f) {
            Limit::Finite(v) => limits.push(v),
            Limit::Diverges(power) => return Err(ContractionError::Diverges { name: f.name.clone(), power }),
        }
    }
    let mut consistency = Vec::new();
    for (i, x) in families.iter().enumerate() {
        for (j, y) in families.iter().enumerate().skip(i) {
            let br = x.bracket(y);
            match limit_c_to_zero(&br) {
                Limit::Finite(v) => consistency.push((x.name.clone(), y.name.clone(), true, v == limits[i].bracket(&limits[j]))),
                Limit::Diverges(_) => consistency.push((x.name.clone(), y.name.clone(), false, false)),
            }
        }
    }
    let mut fates = Vec::new();
    let mut survivors = Vec::new();
    for (f, v) in families.iter().zip(&limits) {
        let fate = if v.is_zero() {
            Fate::Vanishes
        } else if let Some(t) = projection {
            let p = project(v, t)?;
            if p.is_zero() {
                Fate::Decoupled(v.clone())
            } else {
                survivors.push((f.name.clone(), p.clone()));
                Fate::Survives(p)
            }
        } else {
            survivors.push((f.name.clone(), v.clone()));
            Fate::Survives(v.clone())
        };
        fates.push((f.name.clone(), fate));
    }
    let algebra = LieSuperAlgebraPresentation::from_fields(survivors)?;
    Ok(ContractionReport { fates, consistency, algebra })
}

/// `Q^α = ∂_{θ_α} + θ_β M_μ[β][α] ∂_μ` and `P_μ = ∂_μ` on a chart with
/// even coordinates `x^μ` and odd coordinates `θ_α`, where `M_μ` stands
/// for `(Cγ^μ)^{βα}`.
pub fn superspace_generators(
    chart: &Arc<Chart>,
    gamma: &[Vec<Vec<Rational>>],
    q_names: &[&str],
    p_names: &[&str],
) -> Result<Vec<(String, VectorField)>, ContractionError> {
    let (n, m) = (chart.n_even(), chart.n_odd());
    validate_gamma(gamma, n, m)?;
    if q_names.len() != m || p_names.len() != n {
        return Err(ContractionError::InvalidGamma("one name per coordinate expected".into()));
    }
    let mut out = Vec::new();
    for (alpha, name) in q_names.iter().enumerate() {
        let mut q = VectorField::basis(chart, n + alpha);
        for (mu, g) in gamma.iter().enumerate() {
            let mut comp = SuperFunction::zero(chart);
            for (beta, row) in g.iter().enumerate() {
                if !row[alpha].is_zero() {
                    comp = &comp + &SuperFunction::monomial(chart, OddMonomial::single(beta), ScalarExpr::from_rational(row[alpha].clone()));
                }
            }
            q.set_component(mu, comp);
        }
        out.push((name.to_string(), q));
    }
    for (mu, name) in p_names.iter().enumerate() {
        out.push((name.to_string(), VectorField::basis(chart, mu)));
    }
    Ok(out)
}

/// One symmetric `m × m` matrix per even coordinate.
pub fn validate_gamma(gamma: &[Vec<Vec<Rational>>], n: usize, m: usize) -> Result<(), ContractionError> {
    if gamma.len() != n {
        return Err(ContractionError::InvalidGamma(format!("expected {n} matrices, found {}", gamma.len())));
    }
    for (mu, g) in gamma.iter().enumerate() {
        if g.len() != m || g.iter().any(|r| r.len() != m) {
            return Err(ContractionError::InvalidGamma(format!("matrix {mu} is not {m}x{m}")));
        }
        for a in 0..m {
            for b in 0..a {
                if g[a][b] != g[b][a] {
                    return Err(ContractionError::InvalidGamma(format!("matrix {mu} is not symmetric at ({a}, {b})")));
                }
            }
        }
    }
    Ok(())
}

/// Sample data on `(x1, x2, x3, t; θ1, θ2, θ3, τ)`: `M_t = 1`,
/// `M_1 = σ1⊗1`, `M_2 = σ3⊗σ1`, `M_3 = σ3⊗σ3`, ordered `(x1, x2, x3, t)`.
pub fn sample_gamma() -> Vec<Vec<Vec<Rational>>> {
    let r = |v: i64| Rational::from_integer(v.into());
    let id = [[1, 0], [0, 1]];
    let s1 = [[0, 1], [1, 0]];
    let s3 = [[1, 0], [0, -1]];
    let kron = |a: [[i64; 2]; 2], b: [[i64; 2]; 2]| -> Vec<Vec<Rational>> {
        (0..4).map(|i| (0..4).map(|j| r(a[i / 2][j / 2] * b[i % 2][j % 2])).collect()).collect()
    };
    vec![kron(s1, id), kron(s3, s1), kron(s3, s3), kron(id, id)]
}

#[cfg(test)]
mod tests;
