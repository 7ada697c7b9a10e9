use std::sync::Arc;

use crate::grassmann::{Chart, SuperFunction};
use crate::metric::ReducedMetric;
use crate::scalar::{constant_coefficient_rows, solve_sparse, ScalarError, ScalarExpr};
use crate::superdomain::VectorField;

use super::CarrollError;

/// Killing fields of a reduced metric found by a polynomial ansatz.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingBasis {
    pub names: Vec<Arc<str>>,
    pub degree: u32,
    /// Components `X^c` per basis field, indexed like `names`.
    pub fields: Vec<Vec<ScalarExpr>>,
}

impl KillingBasis {
    pub fn dimension(&self) -> usize {
        self.fields.len()
    }

    /// The same components on the even coordinates of a super chart,
    /// independent of the odd coordinates.
    pub fn lift(&self, chart: &Arc<Chart>) -> Result<Vec<VectorField>, CarrollError> {
        self.fields
            .iter()
            .map(|f| {
                let mut comps = vec![SuperFunction::zero(chart); chart.dim()];
                for (name, c) in self.names.iter().zip(f) {
                    let i = chart.index_of(name).ok_or_else(|| ScalarError::UnknownSymbol(name.to_string()))?;
                    comps[i] = SuperFunction::scalar(chart, c.clone());
                }
                Ok(VectorField::new(chart, comps)?)
            })
            .collect()
    }
}

/// Exponent vectors of total degree ≤ `degree`, by degree then lexicographically.
fn exponents(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0; nvars];
        fill(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

fn monomial(names: &[Arc<str>], exps: &[u32]) -> ScalarExpr {
    names.iter().zip(exps).fold(ScalarExpr::one(), |acc, (n, &e)| acc.mul_ref(&ScalarExpr::coord(n).pow(e as i32)))
}

/// Solves `X^c ∂_c g_ab + g_cb ∂_a X^c + g_ac ∂_b X^c = 0` with polynomial
/// components of total degree ≤ `degree`, optionally with `[Y, X] = 0`.
pub fn killing_solver_poly(
    gr: &ReducedMetric,
    degree: u32,
    commute_with: Option<&[ScalarExpr]>,
) -> Result<KillingBasis, CarrollError> {
    let names = gr.names.clone();
    let n = names.len();
    let exps = exponents(n, degree);
    let monos: Vec<ScalarExpr> = exps.iter().map(|e| monomial(&names, e)).collect();
    let nm = monos.len();
    let x: Vec<ScalarExpr> = (0..n)
        .map(|c| (0..nm).fold(ScalarExpr::zero(), |acc, m| acc.add_ref(&monos[m].mul_ref(&ScalarExpr::unknown((c * nm + m) as u32)))))
        .collect();
    let d = |e: &ScalarExpr, i: usize| e.diff(&names[i]);
    let mut eqs = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut e = ScalarExpr::zero();
            for c in 0..n {
                e = e.add_ref(&x[c].mul_ref(&d(&gr.entries[a][b], c)));
                e = e.add_ref(&gr.entries[c][b].mul_ref(&d(&x[c], a)));
                e = e.add_ref(&gr.entries[a][c].mul_ref(&d(&x[c], b)));
            }
            eqs.push(e);
        }
    }
    if let Some(y) = commute_with {
        for c in 0..n {
            let mut e = ScalarExpr::zero();
            for k in 0..n {
                e = e.add_ref(&y[k].mul_ref(&d(&x[c], k))).sub_ref(&x[k].mul_ref(&d(&y[c], k)));
            }
            eqs.push(e);
        }
    }
    let rows = constant_coefficient_rows(&eqs, false).map_err(|e| match e {
        ScalarError::FunctionCoefficient(s) => CarrollError::UnsupportedCoefficients(s),
        other => other.into(),
    })?;
    let sol = solve_sparse(rows, n * nm);
    let fields = sol
        .nullspace()
        .iter()
        .map(|v| {
            (0..n)
                .map(|c| (0..nm).fold(ScalarExpr::zero(), |acc, m| acc.add_ref(&monos[m].mul_ref(&v[c * nm + m]))))
                .collect()
        })
        .collect();
    Ok(KillingBasis { names, degree, fields })
}
