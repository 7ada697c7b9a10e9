//! Fraction-free Gauss-Jordan elimination over the coefficient ring.
//!
//! Rows are cleared of denominators once and kept primitive after each
//! update. Rows that share no unknowns, even indirectly, are eliminated
//! separately so their pivots never multiply into each other. Pivots are nonzero as rational functions, so results hold for
//! generic values of the coordinates and function symbols. Pivot choice is
//! the leftmost column, then the lowest row, which makes the output
//! deterministic.

use std::collections::BTreeMap;

use super::{Atom, Monomial, Poly, ScalarError, ScalarExpr};

/// `sum coeffs[j] * u_j = rhs`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow {
    pub coeffs: BTreeMap<usize, ScalarExpr>,
    pub rhs: ScalarExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent,
    Consistent {
        /// Free variables set to zero.
        particular: Vec<ScalarExpr>,
        /// One vector per free variable, with that variable set to one.
        nullspace: Vec<Vec<ScalarExpr>>,
        pivots: Vec<usize>,
        free: Vec<usize>,
    },
}

impl LinearSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, LinearSolution::Consistent { .. })
    }

    pub fn particular(&self) -> Option<&[ScalarExpr]> {
        match self {
            LinearSolution::Consistent { particular, .. } => Some(particular),
            LinearSolution::Inconsistent => None,
        }
    }

    pub fn nullspace(&self) -> &[Vec<ScalarExpr>] {
        match self {
            LinearSolution::Consistent { nullspace, .. } => nullspace,
            LinearSolution::Inconsistent => &[],
        }
    }
}

/// Rows for unknowns that are constants: each equation `e = 0` must hold
/// identically, so the numerator of `e` is split by monomials in the
/// remaining atoms. Function atoms are rejected unless `allow_functions`,
/// in which case they are treated as independent indeterminates.
pub fn constant_coefficient_rows(equations: &[ScalarExpr], allow_functions: bool) -> Result<Vec<SparseRow>, ScalarError> {
    let mut rows = Vec::new();
    for eq in equations {
        if eq.denominator().contains_atom(Atom::is_unknown) {
            return Err(ScalarError::Nonlinear);
        }
        let mut grouped: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
        for (m, c) in eq.numerator().terms() {
            let (unk, rest) = m.partition(Atom::is_unknown);
            if !allow_functions && rest.factors().iter().any(|(a, _)| a.is_function()) {
                return Err(ScalarError::FunctionCoefficient(eq.to_string()));
            }
            let row = grouped.entry(rest).or_default();
            let c = ScalarExpr::from_rational(c.clone());
            match unk.factors() {
                [] => row.rhs = row.rhs.sub_ref(&c),
                [(Atom::Unknown(i), 1)] => {
                    let e = row.coeffs.entry(*i as usize).or_insert_with(ScalarExpr::zero);
                    *e = e.add_ref(&c);
                }
                _ => return Err(ScalarError::Nonlinear),
            }
        }
        rows.extend(grouped.into_values());
    }
    Ok(rows)
}

#[derive(Clone)]
struct PolyRow {
    coeffs: BTreeMap<usize, Poly>,
    rhs: Poly,
}

impl PolyRow {
    /// The row times the lcm of its denominators.
    fn cleared(row: SparseRow) -> PolyRow {
        let mut lcm = Poly::one();
        for e in row.coeffs.values().chain([&row.rhs]) {
            let d = e.denominator();
            if !d.is_one() && lcm.exact_div(d).is_none() {
                let g = lcm.gcd(d);
                lcm = lcm.mul(&d.exact_div(&g).expect("gcd divides"));
            }
        }
        let clear = |e: &ScalarExpr| e.numerator().mul(&lcm.exact_div(e.denominator()).expect("lcm"));
        PolyRow {
            coeffs: row.coeffs.iter().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (*c, clear(v))).collect(),
            rhs: clear(&row.rhs),
        }
    }

    /// `p * self - a * pivot`, divided by the gcd of the resulting entries.
    fn eliminate(&mut self, p: &Poly, a: &Poly, pivot: &PolyRow) {
        let zero = Poly::zero();
        let mut cols: Vec<usize> = self.coeffs.keys().chain(pivot.coeffs.keys()).copied().collect();
        cols.sort_unstable();
        cols.dedup();
        let mut out = BTreeMap::new();
        for c in cols {
            let v = self.coeffs.get(&c).unwrap_or(&zero).mul(p).sub(&a.mul(pivot.coeffs.get(&c).unwrap_or(&zero)));
            if !v.is_zero() {
                out.insert(c, v);
            }
        }
        self.rhs = self.rhs.mul(p).sub(&a.mul(&pivot.rhs));
        self.coeffs = out;
        self.make_primitive();
    }

    fn make_primitive(&mut self) {
        let mut entries: Vec<&Poly> = self.coeffs.values().chain([&self.rhs]).filter(|e| !e.is_zero()).collect();
        entries.sort_by_key(|e| e.num_terms());
        let Some(first) = entries.first() else { return };
        let mut g = first.monic();
        for e in &entries[1..] {
            if g.is_one() {
                break;
            }
            g = g.gcd(e);
        }
        if !g.is_constant() {
            for v in self.coeffs.values_mut() {
                *v = v.exact_div(&g).expect("gcd divides");
            }
            self.rhs = self.rhs.exact_div(&g).expect("gcd divides");
        }
    }
}

/// Eliminates in place; returns the pivot column of each row.
fn eliminate(rows: &mut [PolyRow]) -> Vec<Option<usize>> {
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if pivot_of_row[i].is_some() {
                continue;
            }
            if let Some((&c, _)) = r.coeffs.iter().next() {
                if best.map_or(true, |(bc, _)| c < bc) {
                    best = Some((c, i));
                }
            }
        }
        let Some((col, pr)) = best else { break };
        let pivot_row = rows[pr].clone();
        let p = pivot_row.coeffs[&col].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i == pr {
                continue;
            }
            if let Some(a) = r.coeffs.get(&col).cloned() {
                r.eliminate(&p, &a, &pivot_row);
            }
        }
        pivot_of_row[pr] = Some(col);
    }
    pivot_of_row
}

/// Groups rows that share unknowns, directly or through other rows.
fn components(rows: &[PolyRow], nvars: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nvars).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in rows {
        let mut cols = r.coeffs.keys();
        if let Some(&first) = cols.next() {
            for &c in cols {
                let (a, b) = (find(&mut parent, first), find(&mut parent, c));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if let Some(&c) = r.coeffs.keys().next() {
            groups.entry(find(&mut parent, c)).or_default().push(i);
        }
    }
    groups.into_values().collect()
}

pub fn solve_sparse(rows: Vec<SparseRow>, nvars: usize) -> LinearSolution {
    solve_rows(rows, nvars, true)
}

fn solve_rows(rows: Vec<SparseRow>, nvars: usize, with_nullspace: bool) -> LinearSolution {
    let mut rows: Vec<PolyRow> = rows.into_iter().map(PolyRow::cleared).collect();
    if let Some(c) = rows.iter().flat_map(|r| r.coeffs.keys()).find(|c| **c >= nvars) {
        panic!("unknown {c} out of range");
    }
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
    for group in components(&rows, nvars) {
        let mut sub: Vec<PolyRow> = group.iter().map(|&i| std::mem::replace(&mut rows[i], PolyRow { coeffs: BTreeMap::new(), rhs: Poly::zero() })).collect();
        let pivots = eliminate(&mut sub);
        for ((&i, r), p) in group.iter().zip(sub).zip(pivots) {
            rows[i] = r;
            pivot_of_row[i] = p;
        }
    }
    if rows.iter().any(|r| r.coeffs.is_empty() && !r.rhs.is_zero()) {
        return LinearSolution::Inconsistent;
    }
    let mut pivot_rows: Vec<(usize, usize)> =
        pivot_of_row.iter().enumerate().filter_map(|(i, p)| p.map(|c| (c, i))).collect();
    pivot_rows.sort();
    let pivots: Vec<usize> = pivot_rows.iter().map(|(c, _)| *c).collect();
    let free: Vec<usize> = (0..nvars).filter(|v| !pivots.contains(v)).collect();
    let ratio = |n: &Poly, row: &PolyRow, c: usize| ScalarExpr::fraction(n.clone(), row.coeffs[&c].clone());
    let mut particular = vec![ScalarExpr::zero(); nvars];
    for &(c, i) in &pivot_rows {
        particular[c] = ratio(&rows[i].rhs, &rows[i], c);
    }
    let nullspace = free
        .iter()
        .filter(|_| with_nullspace)
        .map(|&f| {
            let mut v = vec![ScalarExpr::zero(); nvars];
            v[f] = ScalarExpr::one();
            for &(c, i) in &pivot_rows {
                if let Some(k) = rows[i].coeffs.get(&f) {
                    v[c] = ratio(&k.neg(), &rows[i], c);
                }
            }
            v
        })
        .collect();
    LinearSolution::Consistent { particular, nullspace, pivots, free }
}

/// Solves `eq = 0` for each equation, where equations are affine in
/// `Unknown(0..nvars)`.
pub fn solve_linear_system(equations: &[ScalarExpr], nvars: usize) -> Result<LinearSolution, ScalarError> {
    Ok(solve_sparse(linear_rows(equations, nvars)?, nvars))
}

/// Like [`solve_linear_system`] but skips the nullspace basis; returns the
/// particular solution and the free variables.
pub fn particular_solution(equations: &[ScalarExpr], nvars: usize) -> Result<Option<(Vec<ScalarExpr>, Vec<usize>)>, ScalarError> {
    Ok(match solve_rows(linear_rows(equations, nvars)?, nvars, false) {
        LinearSolution::Inconsistent => None,
        LinearSolution::Consistent { particular, free, .. } => Some((particular, free)),
    })
}

fn linear_rows(equations: &[ScalarExpr], nvars: usize) -> Result<Vec<SparseRow>, ScalarError> {
    let mut rows = Vec::with_capacity(equations.len());
    for eq in equations {
        if eq.is_zero() {
            continue;
        }
        let (coeffs, constant) = eq.linear_parts()?;
        let mut row = SparseRow { coeffs: BTreeMap::new(), rhs: constant.neg_ref() };
        for (i, c) in coeffs {
            if (i as usize) >= nvars {
                return Err(ScalarError::UnknownSymbol(format!("_u{i}")));
            }
            row.coeffs.insert(i as usize, c);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: u32) -> ScalarExpr {
        ScalarExpr::unknown(i)
    }

    #[test]
    fn unique_solution() {
        // u0 + u1 = 3, u0 - u1 = 1
        let eqs = [&u(0) + &u(1) - ScalarExpr::from_int(3), &u(0) - &u(1) - ScalarExpr::from_int(1)];
        let sol = solve_linear_system(&eqs, 2).unwrap();
        assert_eq!(sol.particular().unwrap(), &[ScalarExpr::from_int(2), ScalarExpr::from_int(1)]);
        assert!(sol.nullspace().is_empty());
    }

    #[test]
    fn symbolic_coefficients_and_nullspace() {
        // x*u0 - u1 = 0 leaves u1 free; nullspace (1/x, 1)
        let x = ScalarExpr::coord("x");
        let eqs = [&x * &u(0) - u(1)];
        let sol = solve_linear_system(&eqs, 2).unwrap();
        let ns = sol.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0][0], x.inv());
        assert_eq!(ns[0][1], ScalarExpr::one());
    }

    #[test]
    fn independent_blocks_keep_the_global_pivot_order() {
        // {x*u0 + u2 = 1, t*u0 - u2 = 0} and {u1 + u3 = x, 2*u1 + 2*u3 = 2*x}
        let (x, t) = (ScalarExpr::coord("x"), ScalarExpr::coord("t"));
        let two = ScalarExpr::from_int(2);
        let eqs = [
            x.mul_ref(&u(0)).add_ref(&u(2)).sub_ref(&ScalarExpr::one()),
            u(1).add_ref(&u(3)).sub_ref(&x),
            t.mul_ref(&u(0)).sub_ref(&u(2)),
            two.mul_ref(&u(1)).add_ref(&two.mul_ref(&u(3))).sub_ref(&two.mul_ref(&x)),
        ];
        let LinearSolution::Consistent { particular, nullspace, pivots, free } = solve_linear_system(&eqs, 4).unwrap() else {
            panic!("inconsistent")
        };
        assert_eq!(pivots, [0, 1, 2]);
        assert_eq!(free, [3]);
        let d = x.add_ref(&t);
        assert_eq!(particular, [d.inv(), x.clone(), t.div_ref(&d), ScalarExpr::zero()]);
        assert_eq!(nullspace, [vec![ScalarExpr::zero(), ScalarExpr::from_int(-1), ScalarExpr::zero(), ScalarExpr::one()]]);
    }

    #[test]
    fn inconsistency_is_a_value() {
        let eqs = [u(0) - ScalarExpr::one(), u(0) - ScalarExpr::from_int(2)];
        assert_eq!(solve_linear_system(&eqs, 1).unwrap(), LinearSolution::Inconsistent);
    }

    #[test]
    fn nonlinear_rejected() {
        let eqs = [&u(0) * &u(1)];
        assert_eq!(solve_linear_system(&eqs, 2), Err(ScalarError::Nonlinear));
    }
}
