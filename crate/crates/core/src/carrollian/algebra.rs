use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::grassmann::OddMonomial;
use crate::scalar::{constant_coefficient_rows, solve_sparse, LinearSolution, Parity, Rational, ScalarExpr, SparseRow};
use crate::superdomain::VectorField;

use super::CarrollError;

/// Finite-dimensional Lie superalgebra of vector fields with rational
/// structure constants. Even basis elements come first.
#[derive(Clone, Debug)]
pub struct LieSuperAlgebraPresentation {
    pub names: Vec<String>,
    pub basis: Vec<VectorField>,
    pub parities: Vec<Parity>,
    /// `[e_i, e_j] = Σ_k constants[i][j][k] e_k`.
    pub constants: Vec<Vec<Vec<Rational>>>,
}

impl LieSuperAlgebraPresentation {
    /// Brackets every pair and solves for rational coordinates in the span.
    pub fn from_fields(named: Vec<(String, VectorField)>) -> Result<Self, CarrollError> {
        let mut named = named;
        named.sort_by_key(|(_, v)| v.parity().unwrap_or(Parity::Even));
        let mut parities = Vec::with_capacity(named.len());
        for (name, v) in &named {
            parities.push(v.parity().ok_or_else(|| CarrollError::Inhomogeneous(format!("{name} = {v}")))?);
        }
        let (names, basis): (Vec<String>, Vec<VectorField>) = named.into_iter().unzip();
        if let Some(dep) = dependency(&basis)? {
            return Err(CarrollError::DependentBasis(dep));
        }
        let n = basis.len();
        let mut constants = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let br = basis[i].bracket(&basis[j]);
                constants[i][j] = coordinates_in(&basis, &br)?.ok_or_else(|| CarrollError::ClosureFailure {
                    left: names[i].clone(),
                    right: names[j].clone(),
                    residue: br.to_string(),
                })?;
            }
        }
        Ok(LieSuperAlgebraPresentation { names, basis, parities, constants })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_even(&self) -> usize {
        self.parities.iter().filter(|p| !p.is_odd()).count()
    }

    pub fn dim_odd(&self) -> usize {
        self.dim() - self.dim_even()
    }

    pub fn even_basis(&self) -> &[VectorField] {
        &self.basis[..self.dim_even()]
    }

    pub fn odd_basis(&self) -> &[VectorField] {
        &self.basis[self.dim_even()..]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Rational coordinates of a field in the basis, if it lies in the span.
    pub fn coordinates_of(&self, v: &VectorField) -> Result<Option<Vec<Rational>>, CarrollError> {
        coordinates_in(&self.basis, v)
    }

    pub fn combination(&self, coeffs: &[Rational]) -> VectorField {
        let mut out = VectorField::zero(self.basis[0].chart());
        for (c, e) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = &out + &e.scale(&ScalarExpr::from_rational(c.clone()));
            }
        }
        out
    }

    /// Re-brackets every pair and compares with the stored constants.
    pub fn verify_closure(&self) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| self.basis[i].bracket(&self.basis[j]) == self.combination(&self.constants[i][j])))
    }

    /// `c_ij^k = -(-1)^{|i||j|} c_ji^k`.
    pub fn graded_antisymmetric(&self) -> bool {
        (0..self.dim()).all(|i| {
            (0..self.dim()).all(|j| {
                let sym = Parity::koszul(self.parities[i], self.parities[j]);
                self.constants[i][j].iter().zip(&self.constants[j][i]).all(|(a, b)| if sym { a == b } else { *a == -b.clone() })
            })
        })
    }

    /// Bracket of two coefficient vectors.
    pub fn bracket_vectors(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in (0..n).filter(|&i| !u[i].is_zero()) {
            for j in (0..n).filter(|&j| !v[j].is_zero()) {
                let w = &u[i] * &v[j];
                for k in 0..n {
                    out[k] += &w * &self.constants[i][j][k];
                }
            }
        }
        out
    }

    /// Basis of `{z : [z, e_j] = 0 for all j}`.
    pub fn center(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let mut rows = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.constants[i][j][k].clone()).collect());
            }
        }
        rational_nullspace(&rows, n)
    }

    /// Echelon basis of `[g, g]`.
    pub fn derived(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        row_space((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.constants[i][j].clone()).collect())
    }

    /// Echelon basis of the span of brackets of elements of `span(sub)`.
    pub fn bracket_span(&self, a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        row_space(a.iter().flat_map(|u| b.iter().map(move |v| self.bracket_vectors(u, v))).collect())
    }
}

impl fmt::Display for LieSuperAlgebraPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let c = &self.constants[i][j];
                if c.iter().all(Zero::is_zero) {
                    continue;
                }
                writeln!(f, "[{}, {}] = {}", self.names[i], self.names[j], format_combination(c, &self.names))?;
            }
        }
        Ok(())
    }
}

pub fn format_combination(c: &[Rational], names: &[String]) -> String {
    let mut s = String::new();
    for (k, v) in c.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
        let neg = v.is_negative();
        let mag = v.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&names[k]);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Scalar equations `Σ_k u_k e_k - w = 0`, one per component and odd monomial.
fn membership_equations(basis: &[VectorField], w: Option<&VectorField>) -> Vec<ScalarExpr> {
    let Some(first) = basis.first() else { return Vec::new() };
    let chart = first.chart();
    let mut eqs = Vec::new();
    for comp in 0..chart.dim() {
        let mut per: BTreeMap<OddMonomial, ScalarExpr> = BTreeMap::new();
        for (k, e) in basis.iter().enumerate() {
            for (m, c) in e.component(comp).terms() {
                let t = per.entry(*m).or_insert_with(ScalarExpr::zero);
                *t = t.add_ref(&c.mul_ref(&ScalarExpr::unknown(k as u32)));
            }
        }
        if let Some(w) = w {
            for (m, c) in w.component(comp).terms() {
                let t = per.entry(*m).or_insert_with(ScalarExpr::zero);
                *t = t.sub_ref(c);
            }
        }
        eqs.extend(per.into_values().filter(|e| !e.is_zero()));
    }
    eqs
}

fn solve_constants(basis: &[VectorField], w: Option<&VectorField>) -> Result<LinearSolution, CarrollError> {
    let rows = constant_coefficient_rows(&membership_equations(basis, w), true)?;
    Ok(solve_sparse(rows, basis.len()))
}

fn to_rational(v: &[ScalarExpr]) -> Vec<Rational> {
    v.iter().map(|e| e.as_rational().expect("rows have rational coefficients")).collect()
}

pub(crate) fn coordinates_in(basis: &[VectorField], w: &VectorField) -> Result<Option<Vec<Rational>>, CarrollError> {
    if w.is_zero() {
        return Ok(Some(vec![Rational::zero(); basis.len()]));
    }
    if basis.is_empty() {
        return Ok(None);
    }
    Ok(solve_constants(basis, Some(w))?.particular().map(to_rational))
}

/// A nontrivial rational relation among the fields, rendered as text.
fn dependency(basis: &[VectorField]) -> Result<Option<String>, CarrollError> {
    if basis.is_empty() {
        return Ok(None);
    }
    let sol = solve_constants(basis, None)?;
    Ok(sol.nullspace().first().map(|v| {
        let names: Vec<String> = (0..basis.len()).map(|i| format!("e{i}")).collect();
        format!("{} = 0", format_combination(&to_rational(v), &names))
    }))
}

/// Nullspace of a rational matrix given by rows.
pub fn rational_nullspace(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let sparse: Vec<SparseRow> = rows
        .iter()
        .map(|r| SparseRow {
            coeffs: r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, ScalarExpr::from_rational(v.clone()))).collect(),
            rhs: ScalarExpr::zero(),
        })
        .collect();
    solve_sparse(sparse, n).nullspace().iter().map(|v| to_rational(v)).collect()
}

/// Reduced row echelon basis of the span of the vectors.
pub fn row_space(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let Some(n) = rows.first().map(Vec::len) else { return rows };
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = Rational::one() / rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for k in 0..n {
                    let d = &f * &rows[rank][k];
                    rows[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// `dim(span(a) ∩ span(b))`.
pub fn intersection_dim(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> usize {
    let sum = row_space(a.iter().chain(b).cloned().collect()).len();
    row_space(a.to_vec()).len() + row_space(b.to_vec()).len() - sum
}
