use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::scalar::{solve_sparse, LinearSolution, ScalarExpr, SparseRow};

use super::SuperMetric;

/// Body of the even-even block of a metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedMetric {
    pub names: Vec<Arc<str>>,
    pub entries: Vec<Vec<ScalarExpr>>,
}

impl ReducedMetric {
    pub fn from_metric(g: &SuperMetric) -> Self {
        let c = g.chart();
        let n = c.n_even();
        ReducedMetric {
            names: c.even().iter().map(|s| s.name.clone()).collect(),
            entries: (0..n).map(|a| (0..n).map(|b| g.entry(a, b).reduce_eps()).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn determinant(&self) -> ScalarExpr {
        determinant(&self.entries)
    }
}

impl fmt::Display for ReducedMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Determinant over the fraction field by elimination.
pub fn determinant(m: &[Vec<ScalarExpr>]) -> ScalarExpr {
    let n = m.len();
    let mut a: Vec<Vec<ScalarExpr>> = m.to_vec();
    let mut det = ScalarExpr::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return ScalarExpr::zero();
        };
        if p != col {
            a.swap(p, col);
            det = det.neg_ref();
        }
        let pivot = a[col][col].clone();
        det = det.mul_ref(&pivot);
        let inv = pivot.inv();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].mul_ref(&inv);
            for k in col..n {
                let v = a[r][k].sub_ref(&factor.mul_ref(&a[col][k]));
                a[r][k] = v;
            }
        }
    }
    det
}

/// Block factorization `det(g_red) = det(g_ab) · S` with the time
/// coordinate last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurReport {
    pub det_spatial: ScalarExpr,
    /// `S = g_tt - g_ta (g_ab)^{-1} g_bt`, absent when the spatial block is
    /// singular.
    pub schur_scalar: Option<ScalarExpr>,
    pub det_total: ScalarExpr,
    pub degenerate: bool,
    /// `det_spatial · S == det_total` (vacuously true without `S`).
    pub factorization_consistent: bool,
}

pub fn schur_analysis(gr: &ReducedMetric) -> SchurReport {
    let n = gr.dim();
    let t = n - 1;
    let spatial: Vec<Vec<ScalarExpr>> = gr.entries[..t].iter().map(|r| r[..t].to_vec()).collect();
    let det_spatial = determinant(&spatial);
    let det_total = gr.determinant();
    let schur_scalar = if det_spatial.is_zero() {
        None
    } else {
        // y = (g_ab)^{-1} g_bt
        let rows: Vec<SparseRow> = (0..t)
            .map(|a| SparseRow {
                coeffs: (0..t).filter(|&b| !spatial[a][b].is_zero()).map(|b| (b, spatial[a][b].clone())).collect::<BTreeMap<_, _>>(),
                rhs: gr.entries[a][t].clone(),
            })
            .collect();
        match solve_sparse(rows, t) {
            LinearSolution::Consistent { particular, .. } => {
                let mut s = gr.entries[t][t].clone();
                for (a, y) in particular.iter().enumerate() {
                    s = s.sub_ref(&gr.entries[t][a].mul_ref(y));
                }
                Some(s)
            }
            LinearSolution::Inconsistent => None,
        }
    };
    let factorization_consistent = schur_scalar.as_ref().map_or(true, |s| det_spatial.mul_ref(s) == det_total);
    SchurReport { degenerate: det_total.is_zero(), det_spatial, schur_scalar, det_total, factorization_consistent }
}
