//! Affine connections `∇_X Y = X(Y) + Γ(X,Y)` on a chart, their torsion,
//! curvature and non-metricity, and the constructions that make a seed
//! connection supersymmetry and/or metric compatible.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grassmann::{Chart, OddMonomial, SuperFunction};
use crate::metric::{MetricError, SuperMetric};
use crate::scalar::{particular_solution, Atom, Parity, ScalarError, ScalarExpr};
use crate::superdomain::{OneForm, SuperdomainError, Tensor12, VectorField};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConnectionError {
    #[error("dual one-form is invalid: {0}")]
    DualFormInvalid(String),
    #[error("∇Q is not proportional to Q: {0}")]
    EigenExtractionFailure(String),
    #[error(transparent)]
    Superdomain(#[from] SuperdomainError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Calls `f` on every pair of nonzero homogeneous parts.
fn for_parts(
    x: &VectorField,
    y: &VectorField,
    mut f: impl FnMut(&VectorField, Parity, &VectorField, Parity),
) {
    let (xe, xo) = x.split();
    let (ye, yo) = y.split();
    for (xp, px) in [(&xe, Parity::Even), (&xo, Parity::Odd)] {
        for (yp, py) in [(&ye, Parity::Even), (&yo, Parity::Odd)] {
            if !xp.is_zero() && !yp.is_zero() {
                f(xp, px, yp, py);
            }
        }
    }
}

fn sign_vf(neg: bool, v: VectorField) -> VectorField {
    if neg {
        -v
    } else {
        v
    }
}

fn sign_sf(neg: bool, v: SuperFunction) -> SuperFunction {
    if neg {
        v.neg_ref()
    } else {
        v
    }
}

/// Odd monomials of a given parity on a chart.
pub(crate) fn monomials_of_parity(chart: &Chart, p: Parity) -> Vec<OddMonomial> {
    (0u32..1 << chart.n_odd()).map(|m| OddMonomial(m as u16)).filter(|m| m.parity() == p).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineConnection {
    gamma: Tensor12,
}

impl AffineConnection {
    /// `∇_X Y = X(Y)`.
    pub fn trivial(chart: &Arc<Chart>) -> Self {
        AffineConnection { gamma: Tensor12::zero(chart) }
    }

    pub fn new(gamma: Tensor12) -> Result<Self, ConnectionError> {
        gamma.validate_even()?;
        Ok(AffineConnection { gamma })
    }

    /// From `(c, b, a, Γ^c_{ba})` entries; unspecified symbols are zero.
    pub fn from_symbols(chart: &Arc<Chart>, symbols: &[(&str, &str, &str, SuperFunction)]) -> Result<Self, ConnectionError> {
        let mut g = Tensor12::zero(chart);
        for (c, b, a, v) in symbols {
            let idx = |s: &str| chart.require(s).map_err(SuperdomainError::from);
            g.set_symbol(idx(c)?, idx(b)?, idx(a)?, v.clone());
        }
        AffineConnection::new(g)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.gamma.chart()
    }

    /// `Γ(∂_a, ∂_b) = ∇_{∂_a} ∂_b`.
    pub fn christoffel(&self) -> &Tensor12 {
        &self.gamma
    }

    pub fn plus(&self, extra: &Tensor12) -> AffineConnection {
        AffineConnection { gamma: self.gamma.add(extra) }
    }

    pub fn covariant_derivative(&self, x: &VectorField, y: &VectorField) -> VectorField {
        &x.apply_to_field(y) + &self.gamma.evaluate(x, y)
    }

    /// `T(X,Y) = ∇_X Y - (-1)^{|X||Y|} ∇_Y X - [X,Y]`.
    pub fn torsion(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let mut out = VectorField::zero(self.chart());
        for_parts(x, y, |xp, px, yp, py| {
            let yx = sign_vf(Parity::koszul(px, py), self.covariant_derivative(yp, xp));
            out = &out + &(&(&self.covariant_derivative(xp, yp) - &yx) - &xp.bracket(yp));
        });
        out
    }

    /// `R(X,Y)Z = ∇_X ∇_Y Z - (-1)^{|X||Y|} ∇_Y ∇_X Z - ∇_{[X,Y]} Z`.
    pub fn curvature(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> VectorField {
        let mut out = VectorField::zero(self.chart());
        for_parts(x, y, |xp, px, yp, py| {
            let xy = self.covariant_derivative(xp, &self.covariant_derivative(yp, z));
            let yx = sign_vf(Parity::koszul(px, py), self.covariant_derivative(yp, &self.covariant_derivative(xp, z)));
            out = &out + &(&(&xy - &yx) - &self.covariant_derivative(&xp.bracket(yp), z));
        });
        out
    }

    /// `(∇_X g)(Y,Z) = X⟨Y|Z⟩ - ⟨∇_X Y|Z⟩ - (-1)^{|X||Y|} ⟨Y|∇_X Z⟩`.
    pub fn non_metricity(&self, g: &SuperMetric, x: &VectorField, y: &VectorField, z: &VectorField) -> SuperFunction {
        let mut out = SuperFunction::zero(self.chart());
        for_parts(x, y, |xp, px, yp, py| {
            let third = sign_sf(Parity::koszul(px, py), g.ip(yp, &self.covariant_derivative(xp, z)));
            out = &(&(&out + &xp.apply(&g.ip(yp, z))) - &g.ip(&self.covariant_derivative(xp, yp), z)) - &third;
        });
        out
    }

    /// Basis triples `(a, b, c)` where `(∇_{∂_a} g)(∂_b, ∂_c) ≠ 0`.
    pub fn metricity_failures(&self, g: &SuperMetric) -> Vec<(usize, usize, usize, SuperFunction)> {
        let c = self.chart();
        let e = |i| VectorField::basis(c, i);
        let n = c.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let v = self.non_metricity(g, &e(a), &e(b), &e(k));
                    if !v.is_zero() {
                        out.push((a, b, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn is_metric_compatible(&self, g: &SuperMetric) -> bool {
        self.metricity_failures(g).is_empty()
    }

    /// Basis directions `a` with `∇_{∂_a} Q ≠ 0`.
    pub fn susy_failures(&self, q: &VectorField) -> Vec<(usize, VectorField)> {
        let c = self.chart();
        (0..c.dim())
            .map(|a| (a, self.covariant_derivative(&VectorField::basis(c, a), q)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn is_susy_compatible(&self, q: &VectorField) -> bool {
        self.susy_failures(q).is_empty()
    }

    /// `f_a` with `∇_{∂_a} Q = f_a Q`, read off a component of `Q` with an
    /// invertible coefficient and then checked on every component.
    pub fn eigenfunctions(&self, q: &VectorField) -> Result<Vec<SuperFunction>, ConnectionError> {
        let c = self.chart();
        let (k, inv) = (0..c.dim())
            .find_map(|k| q.component(k).inverse().map(|inv| (k, inv)))
            .ok_or_else(|| ConnectionError::EigenExtractionFailure(format!("no component of {q} is invertible")))?;
        let mut out = Vec::with_capacity(c.dim());
        for a in 0..c.dim() {
            let dq = self.covariant_derivative(&VectorField::basis(c, a), q);
            let f = dq.component(k) * &inv;
            if q.mul_left(&f) != dq {
                return Err(ConnectionError::EigenExtractionFailure(format!(
                    "∇_{{∂_{}}} Q = {dq}",
                    c.coord(a).name
                )));
            }
            out.push(f);
        }
        Ok(out)
    }

    /// `K(∂_a, ∂_b) = k_ab Q`; such a term never changes `⟨∇_X Y|Z⟩`.
    pub fn modified_along(&self, q: &VectorField, k: &[Vec<SuperFunction>]) -> Result<AffineConnection, ConnectionError> {
        let c = self.chart();
        let n = c.dim();
        let mut t = Tensor12::zero(c);
        for a in 0..n {
            for b in 0..n {
                t.set_field(a, b, q.mul_left(&k[a][b]));
            }
        }
        t.validate_even()?;
        Ok(self.plus(&t))
    }
}

impl fmt::Display for AffineConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gamma)
    }
}

/// Outcome of checking both compatibility conditions.
#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    pub susy_compatible: bool,
    pub metric_compatible: bool,
    /// `∇_{∂_a} Q` for the failing directions.
    pub susy_failures: Vec<(String, VectorField)>,
    /// `(a, b, c, (∇_{∂_a} g)(∂_b, ∂_c))` for the failing triples.
    pub metric_failures: Vec<(String, String, String, SuperFunction)>,
    /// `f_a` per basis direction, present when metric compatible.
    pub eigenfunctions: Option<Vec<(String, SuperFunction)>>,
}

impl CompatibilityReport {
    pub fn compatible(&self) -> bool {
        self.susy_compatible && self.metric_compatible
    }
}

pub fn check_compatibility(
    conn: &AffineConnection,
    g: &SuperMetric,
    q: &VectorField,
) -> Result<CompatibilityReport, ConnectionError> {
    let c = conn.chart();
    let name = |i: usize| c.coord(i).name.to_string();
    let susy_failures: Vec<_> = conn.susy_failures(q).into_iter().map(|(a, v)| (name(a), v)).collect();
    let metric_failures: Vec<_> =
        conn.metricity_failures(g).into_iter().map(|(a, b, k, v)| (name(a), name(b), name(k), v)).collect();
    let eigenfunctions = if metric_failures.is_empty() {
        Some(conn.eigenfunctions(q)?.into_iter().enumerate().map(|(a, f)| (name(a), f)).collect())
    } else {
        None
    };
    Ok(CompatibilityReport {
        susy_compatible: susy_failures.is_empty(),
        metric_compatible: metric_failures.is_empty(),
        susy_failures,
        metric_failures,
        eigenfunctions,
    })
}

/// `∇_X Y = ∇⁰_X Y - (∇⁰_X Q) ω(Y)`, requiring `ω(Q) = 1`.
pub fn make_susy_compatible(
    seed: &AffineConnection,
    q: &VectorField,
    omega: &OneForm,
) -> Result<AffineConnection, ConnectionError> {
    let pairing = omega.pair(q)?;
    if !pairing.is_one() {
        return Err(ConnectionError::DualFormInvalid(format!("ω(Q) = {pairing}, expected 1")));
    }
    let c = seed.chart();
    let n = c.dim();
    let mut t = Tensor12::zero(c);
    for a in 0..n {
        let dq = seed.covariant_derivative(&VectorField::basis(c, a), q);
        for b in 0..n {
            t.set_field(a, b, -dq.mul_right(omega.component(b)));
        }
    }
    AffineConnection::new(seed.christoffel().add(&t))
}

/// Result of the linear solve for a metric compatible correction.
#[derive(Clone, Debug)]
pub enum MetricSolve {
    Solved {
        connection: AffineConnection,
        /// The correction `Γ` added to the seed.
        correction: Tensor12,
        unknowns: usize,
        equations: usize,
        /// Dimension of the solution space; free parameters were set to zero.
        free_parameters: usize,
    },
    NoSolution {
        equations: usize,
    },
}

impl MetricSolve {
    pub fn connection(&self) -> Option<&AffineConnection> {
        match self {
            MetricSolve::Solved { connection, .. } => Some(connection),
            MetricSolve::NoSolution { .. } => None,
        }
    }
}

/// Solves `(∇⁰_X g)(Y,Z) = ⟨Γ(X,Y)|Z⟩ + (-1)^{|X||Y|} ⟨Y|Γ(X,Z)⟩` on basis
/// fields for an even `Γ`, optionally with `Γ(∂_a, Q) = 0`.
pub fn make_metric_compatible(
    seed: &AffineConnection,
    g: &SuperMetric,
    preserve: Option<&VectorField>,
) -> Result<MetricSolve, ConnectionError> {
    let c = seed.chart();
    let n = c.dim();
    // Unknown Γ with one scalar per (a, b, component, monomial of the right parity).
    let mut unknown = Tensor12::zero(c);
    let mut nvars = 0u32;
    for a in 0..n {
        for b in 0..n {
            let mut comps = Vec::with_capacity(n);
            for k in 0..n {
                let p = c.parity(a) + c.parity(b) + c.parity(k);
                let terms: Vec<_> = monomials_of_parity(c, p)
                    .into_iter()
                    .map(|m| {
                        nvars += 1;
                        (m, ScalarExpr::unknown(nvars - 1))
                    })
                    .collect();
                comps.push(SuperFunction::from_terms(c, terms));
            }
            unknown.set_field(a, b, VectorField::new(c, comps)?);
        }
    }
    let e = |i| VectorField::basis(c, i);
    let all_monomials: Vec<OddMonomial> = (0u32..1 << c.n_odd()).map(|m| OddMonomial(m as u16)).collect();
    let mut equations = Vec::new();
    let mut push = |f: &SuperFunction| {
        for m in &all_monomials {
            let v = f.coefficient(*m);
            if !v.is_zero() {
                equations.push(v);
            }
        }
    };
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                let nm = seed.non_metricity(g, &e(a), &e(b), &e(k));
                let first = g.ip(unknown.field(a, b), &e(k));
                let second = sign_sf(Parity::koszul(c.parity(a), c.parity(b)), g.ip(&e(b), unknown.field(a, k)));
                push(&(&(&first + &second) - &nm));
            }
        }
    }
    if let Some(q) = preserve {
        for a in 0..n {
            for comp in unknown.evaluate(&e(a), q).components() {
                push(comp);
            }
        }
    }
    let neq = equations.len();
    match particular_solution(&equations, nvars as usize)? {
        None => Ok(MetricSolve::NoSolution { equations: neq }),
        Some((particular, free)) => {
            let image = |atom: &Atom| match atom {
                Atom::Unknown(i) => Some(particular[*i as usize].clone()),
                _ => None,
            };
            let correction = unknown.map_fields(|v| v.map_components(|f| f.substitute_scalars(&image)));
            Ok(MetricSolve::Solved {
                connection: seed.plus(&correction),
                correction,
                unknowns: nvars as usize,
                equations: neq,
                free_parameters: free.len(),
            })
        }
    }
}

/// Supersymmetry compatible construction followed by a metric compatible
/// correction that keeps `Q` parallel.
pub fn make_compatible(
    seed: &AffineConnection,
    g: &SuperMetric,
    q: &VectorField,
    omega: &OneForm,
) -> Result<MetricSolve, ConnectionError> {
    let susy = make_susy_compatible(seed, q, omega)?;
    make_metric_compatible(&susy, g, Some(q))
}

/// Right-hand side of the Koszul formula with torsion, `[X,Y]_T = [X,Y] + T(X,Y)`:
///
/// `X⟨Y|Z⟩ + ⟨[X,Y]_T|Z⟩`
/// `+ (-1)^{x(y+z)} (Y⟨Z|X⟩ - ⟨[Y,Z]_T|X⟩)`
/// `- (-1)^{z(x+y)} (Z⟨X|Y⟩ - ⟨[Z,X]_T|Y⟩)`.
///
/// Equals `2⟨∇_X Y|Z⟩` for metric compatible `∇` and homogeneous arguments.
pub fn koszul_rhs(
    conn: &AffineConnection,
    g: &SuperMetric,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<SuperFunction, ConnectionError> {
    let parity = |v: &VectorField| {
        v.parity().ok_or_else(|| ConnectionError::Superdomain(SuperdomainError::ParityViolation(format!("{v} is inhomogeneous"))))
    };
    let (px, py, pz) = (parity(x)?, parity(y)?, parity(z)?);
    let bt = |u: &VectorField, v: &VectorField| &u.bracket(v) + &conn.torsion(u, v);
    let g1 = &x.apply(&g.ip(y, z)) + &g.ip(&bt(x, y), z);
    let g2 = &y.apply(&g.ip(z, x)) - &g.ip(&bt(y, z), x);
    let g3 = &z.apply(&g.ip(x, y)) - &g.ip(&bt(z, x), y);
    let g2 = sign_sf(Parity::koszul(px, py + pz), g2);
    let g3 = sign_sf(Parity::koszul(pz, px + py), g3);
    Ok(&(&g1 + &g2) - &g3)
}
