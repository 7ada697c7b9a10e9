//! Super-Carrollian structures `(g, Q, P)` in Shander form and their Lie
//! superalgebra of infinitesimal automorphisms.

mod algebra;
mod killing;

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::grassmann::SuperFunction;
use crate::metric::{MetricError, SuperMetric};
use crate::scalar::{constant_coefficient_rows, solve_sparse, Parity, Rational, ScalarError, ScalarExpr};
use crate::superdomain::{SuperdomainError, VectorField};

pub use algebra::{format_combination, intersection_dim, rational_nullspace, row_space, LieSuperAlgebraPresentation};
pub use killing::{killing_solver_poly, KillingBasis};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CarrollError {
    #[error("Killing ansatz needs polynomial metric entries: {0}")]
    UnsupportedCoefficients(String),
    #[error("lifted field fails the full check: {0}")]
    LiftVerificationFailure(String),
    #[error("[{left}, {right}] = {residue} is not in the span")]
    ClosureFailure { left: String, right: String, residue: String },
    #[error("basis is linearly dependent: {0}")]
    DependentBasis(String),
    #[error("field is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("structure is not static: {0}")]
    NotStatic(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Superdomain(#[from] SuperdomainError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One axiom and whether it held, with the computation behind the verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// `(𝓛_Q g)(Q, ∂_b) = -2⟨P|∂_b⟩ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QNotKillingWitness {
    pub coordinate: String,
    pub lie_derivative: SuperFunction,
    pub minus_two_p: SuperFunction,
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub checks: Vec<AxiomCheck>,
    pub kernel_dimension: Option<usize>,
    pub witness: Option<QNotKillingWitness>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.axiom, c.detail)?;
        }
        Ok(())
    }
}

/// A verified super-Carrollian structure.
#[derive(Clone, Debug)]
pub struct SuperCarrollStructure {
    g: SuperMetric,
    q: VectorField,
    p: VectorField,
    report: StructureReport,
}

impl SuperCarrollStructure {
    pub fn metric(&self) -> &SuperMetric {
        &self.g
    }

    pub fn q(&self) -> &VectorField {
        &self.q
    }

    pub fn p(&self) -> &VectorField {
        &self.p
    }

    pub fn report(&self) -> &StructureReport {
        &self.report
    }

    pub fn witness(&self) -> &QNotKillingWitness {
        self.report.witness.as_ref().expect("verified structures carry a witness")
    }

    /// `D = ∂_τ - τ∂_t`.
    pub fn d(&self) -> VectorField {
        let c = self.g.chart();
        let (t, tau) = (c.n_even() - 1, c.n_even());
        let mut d = VectorField::basis(c, tau);
        d.set_component(t, SuperFunction::coordinate_at(c, tau).neg_ref());
        d
    }
}

fn has_nonvanishing_component(v: &VectorField) -> bool {
    let ctx = v.chart().scalar_context();
    v.components().iter().any(|c| c.reduce_eps().is_provably_nonvanishing(&|a| ctx.atom_nonvanishing(a)))
}

/// Checks every axiom and collects the results. The structure is returned
/// only when all of them hold.
pub fn verify_structure(g: &SuperMetric, q: &VectorField, p: &VectorField) -> Result<SuperCarrollStructure, StructureReport> {
    let c = g.chart();
    let mut checks = Vec::new();
    let mut check = |axiom: &'static str, passed: bool, detail: String| checks.push(AxiomCheck { axiom, passed, detail });
    let shander_chart = c.n_odd() == 1;
    check("one odd coordinate", shander_chart, format!("chart {}", c.dimension_label()));
    check("Q odd", !q.is_zero() && q.has_parity(Parity::Odd), format!("Q = {q}"));
    check("Q non-singular", has_nonvanishing_component(q), format!("Q = {q}"));
    check("P even", p.has_parity(Parity::Even), format!("P = {p}"));
    check("P nowhere vanishing", has_nonvanishing_component(p), format!("P = {p}"));
    let qq = q.bracket(q);
    let two_p = p.scale(&ScalarExpr::from_int(2));
    check("[Q,Q] = 2P", qq == two_p, format!("[Q,Q] = {qq}, 2P = {two_p}"));
    let pq = p.bracket(q);
    check("[P,Q] = 0", pq.is_zero(), format!("[P,Q] = {pq}"));
    if shander_chart {
        let (t, tau) = (c.n_even() - 1, c.n_even());
        let tau_f = SuperFunction::coordinate_at(c, tau);
        let normal = (0..c.dim()).all(|i| {
            let expected = if i == tau {
                SuperFunction::one(c)
            } else if i == t {
                tau_f.clone()
            } else {
                SuperFunction::zero(c)
            };
            *q.component(i) == expected
        });
        check("Shander normal form of Q", normal, format!("Q = {q}"));
    }
    let mut kernel_dimension = None;
    match g.kernel_basis() {
        Ok(k) => {
            kernel_dimension = Some(k.dimension());
            let gens: Vec<String> = k.generators.iter().map(|v| v.to_string()).collect();
            check("ker(g) = span{Q}", k.is_span_of(q), format!("kernel dimension {} spanned by {{{}}}", k.dimension(), gens.join(", ")));
        }
        Err(e) => check("ker(g) = span{Q}", false, e.to_string()),
    }
    match g.validate_local_form() {
        Ok(r) => check("local form", r.ok(), if r.ok() { "g_ττ = 0, g_τa = -τ g_ta".into() } else { r.violations.join("; ") }),
        Err(e) => check("local form", false, e.to_string()),
    }
    let witness = q_not_killing_witness(g, q, p);
    check(
        "Q not Killing",
        witness.is_some(),
        match &witness {
            Some(w) => format!("(L_Q g)(Q, d_{}) = {} = -2<P|d_{}>", w.coordinate, w.lie_derivative, w.coordinate),
            None => "no coordinate b with (L_Q g)(Q, d_b) = -2<P|d_b> != 0".into(),
        },
    );
    let report = StructureReport { checks, kernel_dimension, witness };
    if report.passed() {
        Ok(SuperCarrollStructure { g: g.clone(), q: q.clone(), p: p.clone(), report })
    } else {
        Err(report)
    }
}

pub fn q_not_killing_witness(g: &SuperMetric, q: &VectorField, p: &VectorField) -> Option<QNotKillingWitness> {
    let c = g.chart();
    (0..c.dim()).find_map(|b| {
        let db = VectorField::basis(c, b);
        let lhs = g.lie_derivative_eval(q, q, &db);
        let rhs = g.ip(p, &db).scale(&ScalarExpr::from_int(-2));
        (!lhs.is_zero() && lhs == rhs).then(|| QNotKillingWitness {
            coordinate: c.coord(b).name.to_string(),
            lie_derivative: lhs,
            minus_two_p: rhs,
        })
    })
}

pub fn is_static(s: &SuperCarrollStructure) -> bool {
    s.g.is_killing(&s.p)
}

/// `(even fields, odd fields)` of the automorphism algebra before
/// structure constants are computed.
fn scarr_fields(s: &SuperCarrollStructure, degree: u32) -> Result<Vec<(String, VectorField)>, CarrollError> {
    let c = s.g.chart();
    let gr = s.g.reduced();
    let p_red: Vec<ScalarExpr> = (0..c.n_even()).map(|i| s.p.component(i).reduce_eps()).collect();
    let killing = killing_solver_poly(&gr, degree, Some(&p_red))?;
    let mut out = Vec::new();
    for (i, x) in killing.lift(c)?.into_iter().enumerate() {
        let name = if x == s.p { "P".to_string() } else { format!("X{}", i + 1) };
        out.push((name, x));
    }
    if is_static(s) {
        out.push(("D".to_string(), s.d()));
    }
    for (name, x) in &out {
        if !s.g.is_killing(x) {
            return Err(CarrollError::LiftVerificationFailure(format!("{name} = {x} is not Killing")));
        }
        let xq = x.bracket(&s.q);
        if !xq.is_zero() {
            return Err(CarrollError::LiftVerificationFailure(format!("[{name}, Q] = {xq}")));
        }
    }
    Ok(out)
}

/// The Lie superalgebra of fields preserving `g` and `Q`, with the even
/// part from a polynomial Killing ansatz of the given degree.
pub fn scarr_algebra(s: &SuperCarrollStructure, degree: u32) -> Result<LieSuperAlgebraPresentation, CarrollError> {
    LieSuperAlgebraPresentation::from_fields(scarr_fields(s, degree)?)
}

/// `[D,D] = -2P`, `[P,D] = 0` and `D` preserves `g` and `Q`.
pub fn supertranslation_check(s: &SuperCarrollStructure) -> Result<bool, CarrollError> {
    if !is_static(s) {
        return Err(CarrollError::NotStatic(format!("L_P g = {}", s.g.lie_derivative(&s.p))));
    }
    let d = s.d();
    Ok(d.bracket(&d) == s.p.scale(&ScalarExpr::from_int(-2))
        && s.p.bracket(&d).is_zero()
        && s.g.is_killing(&d)
        && d.bracket(&s.q).is_zero())
}

/// Invariants of the even part of an automorphism algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenPartAnalysis {
    pub dimension: usize,
    pub center_dimension: usize,
    pub center_is_p: bool,
    pub derived_dimension: usize,
    pub derived_is_perfect: bool,
    pub derived_meets_center: bool,
    /// Fields with constant components.
    pub constant_dimension: usize,
    pub constant_is_abelian_ideal: bool,
    pub constant_in_derived: usize,
}

impl EvenPartAnalysis {
    /// `e(3) ⊕ u(1)`: a 6-dimensional perfect `e(3)` with a 3-dimensional
    /// abelian ideal of translations, plus a central `u(1)` spanned by `P`.
    pub fn is_e3_plus_u1(&self) -> bool {
        self.dimension == 7
            && self.center_dimension == 1
            && self.center_is_p
            && self.derived_dimension == 6
            && self.derived_is_perfect
            && !self.derived_meets_center
            && self.constant_is_abelian_ideal
            && self.constant_in_derived == 3
    }
}

pub fn analyze_even_part(alg: &LieSuperAlgebraPresentation, p: &VectorField) -> Result<EvenPartAnalysis, CarrollError> {
    let even: Vec<(String, VectorField)> =
        alg.names.iter().cloned().zip(alg.even_basis().iter().cloned()).collect();
    let e = LieSuperAlgebraPresentation::from_fields(even)?;
    let n = e.dim();
    let center = e.center();
    let p_coords = e.coordinates_of(p)?;
    let center_is_p = center.len() == 1
        && p_coords.as_ref().is_some_and(|pc| row_space(vec![center[0].clone(), pc.clone()]).len() == 1);
    let derived = e.derived();
    let derived_is_perfect = e.bracket_span(&derived, &derived).len() == derived.len();
    let derived_meets_center = intersection_dim(&derived, &center) > 0;
    // Constant fields: every derivative of every component vanishes.
    let chart = p.chart();
    let mut eqs = Vec::new();
    for comp in 0..chart.dim() {
        for coord in chart.even() {
            let mut sum = ScalarExpr::zero();
            for (k, b) in e.basis.iter().enumerate() {
                sum = sum.add_ref(&b.component(comp).reduce_eps().diff(&coord.name).mul_ref(&ScalarExpr::unknown(k as u32)));
            }
            if !sum.is_zero() {
                eqs.push(sum);
            }
        }
    }
    let constant: Vec<Vec<Rational>> = solve_sparse(constant_coefficient_rows(&eqs, true)?, n)
        .nullspace()
        .iter()
        .map(|v| v.iter().map(|x| x.as_rational().expect("rational rows")).collect())
        .collect();
    let all: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect()).collect();
    let abelian = e.bracket_span(&constant, &constant).is_empty();
    let ideal = {
        let br = e.bracket_span(&all, &constant);
        intersection_dim(&br, &constant) == br.len()
    };
    Ok(EvenPartAnalysis {
        dimension: n,
        center_dimension: center.len(),
        center_is_p,
        derived_dimension: derived.len(),
        derived_is_perfect,
        derived_meets_center,
        constant_dimension: constant.len(),
        constant_is_abelian_ideal: abelian && ideal,
        constant_in_derived: intersection_dim(&constant, &derived),
    })
}

#[cfg(test)]
mod tests;
