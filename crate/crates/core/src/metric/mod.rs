//! Even graded-symmetric metrics, possibly degenerate.
//!
//! `⟨X|Y⟩ = Σ (-1)^{ã|Y^b|} X^a Y^b g_ab` with `g_ab = ⟨∂_a|∂_b⟩`. A
//! displayed term `2 dx^a⊗dx^b h` (a ≠ b) contributes `g_ab = g_ba = h` up to
//! the graded-symmetry sign.

mod reduced;

use std::sync::Arc;

use thiserror::Error;

use crate::grassmann::{Chart, OddMonomial, SuperFunction};
use crate::scalar::{solve_linear_system, LinearSolution, Parity, ScalarError, ScalarExpr};
use crate::superdomain::{SuperdomainError, Tensor2, VectorField};

pub use reduced::{determinant, schur_analysis, ReducedMetric, SchurReport};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("kernel computation supports at most one odd coordinate, chart has {0}")]
    UnsupportedOddDimension(usize),
    #[error("chart is not in Shander form: {0}")]
    NotShanderForm(String),
    #[error(transparent)]
    Superdomain(#[from] SuperdomainError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An even, graded-symmetric rank-two tensor used as a metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperMetric {
    tensor: Tensor2,
}

impl SuperMetric {
    pub fn new(tensor: Tensor2) -> Result<Self, MetricError> {
        tensor.validate_even_symmetric()?;
        Ok(SuperMetric { tensor })
    }

    /// Builds a metric from `(a, b, g_ab)` entries, filling mirrors by
    /// graded symmetry. A mirror that disagrees with an explicit entry is an
    /// error.
    pub fn from_entries(chart: &Arc<Chart>, entries: &[(&str, &str, SuperFunction)]) -> Result<Self, MetricError> {
        let mut t = Tensor2::zero(chart);
        let mut set = vec![vec![false; chart.dim()]; chart.dim()];
        for (a, b, v) in entries {
            let (i, j) = (chart.require(a).map_err(SuperdomainError::from)?, chart.require(b).map_err(SuperdomainError::from)?);
            let mirror = if Parity::koszul(chart.parity(i), chart.parity(j)) { v.neg_ref() } else { v.clone() };
            for (r, c, val) in [(i, j, v.clone()), (j, i, mirror)] {
                if set[r][c] && *t.entry(r, c) != val {
                    return Err(SuperdomainError::SymmetryViolation(format!(
                        "conflicting values for ({}, {})",
                        chart.coord(r).name,
                        chart.coord(c).name
                    ))
                    .into());
                }
                set[r][c] = true;
                t.set(r, c, val);
            }
        }
        SuperMetric::new(t)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.tensor.chart()
    }

    pub fn tensor(&self) -> &Tensor2 {
        &self.tensor
    }

    pub fn entry(&self, a: usize, b: usize) -> &SuperFunction {
        self.tensor.entry(a, b)
    }

    pub fn inner_product(&self, x: &VectorField, y: &VectorField) -> Result<SuperFunction, MetricError> {
        Ok(self.tensor.evaluate(x, y)?)
    }

    /// `⟨X|Y⟩`.
    ///
    /// # Panics
    /// If the fields live on another chart.
    pub fn ip(&self, x: &VectorField, y: &VectorField) -> SuperFunction {
        self.inner_product(x, y).expect("fields on the metric's chart")
    }

    /// `(𝓛_X g)(Y,Z) = X⟨Y|Z⟩ - ⟨[X,Y]|Z⟩ - (-1)^{|X||Y|} ⟨Y|[X,Z]⟩`,
    /// extended linearly over the homogeneous parts of `X` and `Y`.
    pub fn lie_derivative_eval(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> SuperFunction {
        let (xe, xo) = x.split();
        let (ye, yo) = y.split();
        let mut out = SuperFunction::zero(self.chart());
        for (xp, px) in [(&xe, Parity::Even), (&xo, Parity::Odd)] {
            if xp.is_zero() {
                continue;
            }
            for (yp, py) in [(&ye, Parity::Even), (&yo, Parity::Odd)] {
                if yp.is_zero() {
                    continue;
                }
                let first = xp.apply(&self.ip(yp, z));
                let second = self.ip(&xp.bracket(yp), z);
                let third = self.ip(yp, &xp.bracket(z));
                let third = if Parity::koszul(px, py) { third.neg_ref() } else { third };
                out = &(&(&out + &first) - &second) - &third;
            }
        }
        out
    }

    /// Components `(𝓛_X g)(∂_a, ∂_b)`.
    pub fn lie_derivative(&self, x: &VectorField) -> Tensor2 {
        let c = self.chart();
        let n = c.dim();
        let mut t = Tensor2::zero(c);
        for a in 0..n {
            for b in 0..n {
                t.set(a, b, self.lie_derivative_eval(x, &VectorField::basis(c, a), &VectorField::basis(c, b)));
            }
        }
        t
    }

    pub fn is_killing(&self, x: &VectorField) -> bool {
        self.lie_derivative(x).is_zero()
    }

    /// Kernel over the fraction field. Each component is written
    /// `X^c = u_c + τ v_c` (just `u_c` without odd coordinates) and
    /// `⟨X|∂_b⟩ = 0` is split by powers of `τ`.
    pub fn kernel_basis(&self) -> Result<KernelAnalysis, MetricError> {
        let c = self.chart();
        let m = c.n_odd();
        if m > 1 {
            return Err(MetricError::UnsupportedOddDimension(m));
        }
        let n = c.dim();
        let nvars = n * (m + 1);
        let tau = OddMonomial::single(0);
        let unknown_field = {
            let comps = (0..n)
                .map(|k| {
                    let mut f = SuperFunction::scalar(c, ScalarExpr::unknown(k as u32));
                    if m == 1 {
                        f.add_term(tau, ScalarExpr::unknown((n + k) as u32));
                    }
                    f
                })
                .collect();
            VectorField::new(c, comps)?
        };
        let mut equations = Vec::new();
        for b in 0..n {
            let v = self.ip(&unknown_field, &VectorField::basis(c, b));
            equations.push(v.coefficient(OddMonomial::ONE));
            if m == 1 {
                equations.push(v.coefficient(tau));
            }
        }
        let basis = match solve_linear_system(&equations, nvars)? {
            LinearSolution::Consistent { nullspace, .. } => nullspace,
            LinearSolution::Inconsistent => unreachable!("homogeneous systems are consistent"),
        };
        let generators = basis.iter().map(|v| vector_from_unknowns(c, v)).collect();
        Ok(KernelAnalysis { chart: c.clone(), equations, basis, generators })
    }

    /// Checks the Shander-form local conditions `g_ττ = 0`,
    /// `g_τa = -τ g_ta`, `g_τt = -τ g_tt`, with `t` the last even
    /// coordinate and `τ` the only odd coordinate.
    pub fn validate_local_form(&self) -> Result<LocalFormReport, MetricError> {
        let c = self.chart();
        if c.n_odd() != 1 {
            return Err(MetricError::NotShanderForm(format!("expected one odd coordinate, found {}", c.n_odd())));
        }
        let n = c.n_even();
        let (t, tau) = (n - 1, n);
        let tau_f = SuperFunction::coordinate_at(c, tau);
        let tname = c.coord(t).name.to_string();
        let oname = c.coord(tau).name.to_string();
        let mut violations = Vec::new();
        if !self.entry(tau, tau).is_zero() {
            violations.push(format!("g_{{{oname}{oname}}} = {} ≠ 0", self.entry(tau, tau)));
        }
        for a in 0..n {
            let expected = (&tau_f * self.entry(t, a)).neg_ref();
            if *self.entry(tau, a) != expected {
                let aname = &c.coord(a).name;
                violations.push(if a == t {
                    format!("h_{{{oname}{tname}}} ≠ -g_{{{tname}{tname}}}: g_{{{oname}{tname}}} = {} but -{oname}*g_{{{tname}{tname}}} = {expected}", self.entry(tau, a))
                } else {
                    format!("h_{{{oname}{aname}}} ≠ -g_{{{tname}{aname}}}: g_{{{oname}{aname}}} = {} but -{oname}*g_{{{tname}{aname}}} = {expected}", self.entry(tau, a))
                });
            }
        }
        Ok(LocalFormReport { violations })
    }

    pub fn reduced(&self) -> ReducedMetric {
        ReducedMetric::from_metric(self)
    }
}

fn vector_from_unknowns(c: &Arc<Chart>, v: &[ScalarExpr]) -> VectorField {
    let n = c.dim();
    let comps = (0..n)
        .map(|k| {
            let mut f = SuperFunction::scalar(c, v[k].clone());
            if v.len() > n {
                f.add_term(OddMonomial::single(0), v[n + k].clone());
            }
            f
        })
        .collect();
    VectorField::new(c, comps).expect("component count matches chart")
}

/// Scalar solution space of the kernel equations.
#[derive(Clone, Debug)]
pub struct KernelAnalysis {
    chart: Arc<Chart>,
    equations: Vec<ScalarExpr>,
    /// Basis vectors of `(u_1..u_N, v_1..v_N)`.
    pub basis: Vec<Vec<ScalarExpr>>,
    /// The basis vectors as vector fields.
    pub generators: Vec<VectorField>,
}

impl KernelAnalysis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn coordinates_of(&self, x: &VectorField) -> Vec<ScalarExpr> {
        let n = self.chart.dim();
        let m = self.chart.n_odd();
        let mut v: Vec<ScalarExpr> = (0..n).map(|k| x.component(k).coefficient(OddMonomial::ONE)).collect();
        if m == 1 {
            v.extend((0..n).map(|k| x.component(k).coefficient(OddMonomial::single(0))));
        }
        v
    }

    /// True when the field solves the kernel equations.
    pub fn contains(&self, x: &VectorField) -> bool {
        let v = self.coordinates_of(x);
        self.equations.iter().all(|eq| {
            eq.substitute(&|a| match a {
                crate::scalar::Atom::Unknown(i) => Some(v[*i as usize].clone()),
                _ => None,
            })
            .is_zero()
        })
    }

    /// The verdict `ker(g) = span{Q}`: the solution space has dimension two
    /// and is spanned by `Q` and `τQ`.
    pub fn is_span_of(&self, q: &VectorField) -> bool {
        if self.chart.n_odd() != 1 || self.dimension() != 2 {
            return false;
        }
        let tau = SuperFunction::coordinate_at(&self.chart, self.chart.n_even());
        let tq = q.mul_left(&tau);
        if !self.contains(q) || !self.contains(&tq) {
            return false;
        }
        let (a, b) = (self.coordinates_of(q), self.coordinates_of(&tq));
        independent(&a, &b)
    }
}

fn independent(a: &[ScalarExpr], b: &[ScalarExpr]) -> bool {
    // Some 2x2 minor is nonzero.
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !(&a[i] * &b[j] - &a[j] * &b[i]).is_zero() {
                return true;
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFormReport {
    pub violations: Vec<String>,
}

impl LocalFormReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}
