use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::scalar::{Atom, Parity, Rational, ScalarExpr};

use super::{Chart, GrassmannError};

/// A Grassmann monomial: bit `i` set means odd coordinate `i` is present,
/// in increasing index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct OddMonomial(pub u16);

impl OddMonomial {
    pub const ONE: OddMonomial = OddMonomial(0);

    pub fn single(i: usize) -> Self {
        OddMonomial(1 << i)
    }

    pub fn from_indices(idx: &[usize]) -> Option<(Self, bool)> {
        let mut m = OddMonomial::ONE;
        let mut neg = false;
        for &i in idx {
            let (p, s) = m.mul(OddMonomial::single(i))?;
            m = p;
            neg ^= s;
        }
        Some((m, neg))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn parity(self) -> Parity {
        Parity::from_bit(self.degree() % 2 == 1)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..16).filter(|&i| self.contains(i)).collect()
    }

    /// Product `self * other`, with `true` meaning the sign is negative.
    /// `None` when a generator repeats.
    pub fn mul(self, other: OddMonomial) -> Option<(OddMonomial, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for j in other.indices() {
            inversions += (self.0 >> (j + 1)).count_ones();
        }
        Some((OddMonomial(self.0 | other.0), inversions % 2 == 1))
    }
}

impl PartialOrd for OddMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OddMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.indices().cmp(&other.indices()))
    }
}

/// Element of the local function algebra: sum of scalar coefficients times
/// Grassmann monomials.
#[derive(Clone, Debug)]
pub struct SuperFunction {
    chart: Arc<Chart>,
    terms: BTreeMap<OddMonomial, ScalarExpr>,
}

impl PartialEq for SuperFunction {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.terms == other.terms
    }
}

impl Eq for SuperFunction {}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SuperFunction {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        SuperFunction { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(chart: &Arc<Chart>, c: ScalarExpr) -> Self {
        let mut f = SuperFunction::zero(chart);
        f.add_term(OddMonomial::ONE, c);
        f
    }

    pub fn constant(chart: &Arc<Chart>, i: i64) -> Self {
        SuperFunction::scalar(chart, ScalarExpr::from_int(i))
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        SuperFunction::constant(chart, 1)
    }

    pub fn monomial(chart: &Arc<Chart>, m: OddMonomial, c: ScalarExpr) -> Self {
        let mut f = SuperFunction::zero(chart);
        f.add_term(m, c);
        f
    }

    /// The coordinate function with the given name.
    pub fn coordinate(chart: &Arc<Chart>, name: &str) -> Result<Self, GrassmannError> {
        let i = chart.require(name)?;
        Ok(SuperFunction::coordinate_at(chart, i))
    }

    pub fn coordinate_at(chart: &Arc<Chart>, i: usize) -> Self {
        if i < chart.n_even() {
            SuperFunction::scalar(chart, ScalarExpr::coord(&chart.coord(i).name))
        } else {
            SuperFunction::monomial(chart, OddMonomial::single(i - chart.n_even()), ScalarExpr::one())
        }
    }

    pub fn from_terms(chart: &Arc<Chart>, terms: impl IntoIterator<Item = (OddMonomial, ScalarExpr)>) -> Self {
        let mut f = SuperFunction::zero(chart);
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn add_term(&mut self, m: OddMonomial, c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add_ref(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OddMonomial, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: OddMonomial) -> ScalarExpr {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&OddMonomial::ONE).is_some_and(ScalarExpr::is_one)
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    /// True when the value is homogeneous of parity `p` (zero is both).
    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.keys().all(|m| m.parity() == p)
    }

    /// Even and odd parts.
    pub fn split(&self) -> (SuperFunction, SuperFunction) {
        let mut even = SuperFunction::zero(&self.chart);
        let mut odd = SuperFunction::zero(&self.chart);
        for (m, c) in &self.terms {
            if m.parity().is_odd() {
                odd.terms.insert(*m, c.clone());
            } else {
                even.terms.insert(*m, c.clone());
            }
        }
        (even, odd)
    }

    /// `f_even - f_odd`.
    pub fn grade_involution(&self) -> SuperFunction {
        SuperFunction::from_terms(
            &self.chart,
            self.terms.iter().map(|(m, c)| (*m, if m.parity().is_odd() { c.neg_ref() } else { c.clone() })),
        )
    }

    /// `(-1)^{p |f|} f`, applied per homogeneous part.
    pub fn koszul_twist(&self, p: Parity) -> SuperFunction {
        if p.is_odd() {
            self.grade_involution()
        } else {
            self.clone()
        }
    }

    /// The body: coefficient of the empty monomial.
    pub fn reduce_eps(&self) -> ScalarExpr {
        self.coefficient(OddMonomial::ONE)
    }

    /// True when only the empty monomial appears.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|m| *m == OddMonomial::ONE)
    }

    pub fn contains_unknowns(&self) -> bool {
        self.terms.values().any(ScalarExpr::contains_unknowns)
    }

    fn check_chart(&self, other: &SuperFunction) -> Result<(), GrassmannError> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(GrassmannError::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &SuperFunction) -> Result<SuperFunction, GrassmannError> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn neg_ref(&self) -> SuperFunction {
        self.map_coefficients(|c| c.neg_ref())
    }

    pub fn scale(&self, k: &ScalarExpr) -> SuperFunction {
        if k.is_zero() {
            return SuperFunction::zero(&self.chart);
        }
        self.map_coefficients(|c| c.mul_ref(k))
    }

    pub fn scale_rational(&self, k: &Rational) -> SuperFunction {
        self.map_coefficients(|c| c.scale(k))
    }

    pub fn map_coefficients(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> SuperFunction {
        SuperFunction::from_terms(&self.chart, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Graded product.
    pub fn super_mul(&self, other: &SuperFunction) -> Result<SuperFunction, GrassmannError> {
        self.check_chart(other)?;
        let mut out = SuperFunction::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(*mb) {
                    let c = ca.mul_ref(cb);
                    out.add_term(m, if neg { c.neg_ref() } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> SuperFunction {
        let mut out = SuperFunction::one(&self.chart);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Partial derivative along chart coordinate `i`; odd derivatives act
    /// from the left.
    pub fn partial(&self, i: usize) -> SuperFunction {
        let n = self.chart.n_even();
        if i < n {
            let name = self.chart.coord(i).name.clone();
            return self.map_coefficients(|c| c.diff(&name));
        }
        let j = i - n;
        let mut out = SuperFunction::zero(&self.chart);
        for (m, c) in &self.terms {
            if m.contains(j) {
                let before = (m.0 & ((1u16 << j) - 1)).count_ones();
                let rest = OddMonomial(m.0 & !(1 << j));
                out.add_term(rest, if before % 2 == 1 { c.neg_ref() } else { c.clone() });
            }
        }
        out
    }

    pub fn odd_partial(&self, name: &str) -> Result<SuperFunction, GrassmannError> {
        let i = self.chart.require(name)?;
        if i < self.chart.n_even() {
            return Err(GrassmannError::EvenCoordinate(name.to_string()));
        }
        Ok(self.partial(i))
    }

    pub fn even_partial(&self, name: &str) -> Result<SuperFunction, GrassmannError> {
        let i = self.chart.require(name)?;
        if i >= self.chart.n_even() {
            return Err(GrassmannError::OddCoordinate(name.to_string()));
        }
        Ok(self.partial(i))
    }

    /// Multiplicative inverse `a^{-1} sum_k (-n/a)^k` for `f = a + n` with
    /// nilpotent `n`; `None` when the body is zero.
    pub fn inverse(&self) -> Option<SuperFunction> {
        let a = self.reduce_eps();
        if a.is_zero() {
            return None;
        }
        let ainv = a.inv();
        let mut nil = self.clone();
        nil.terms.remove(&OddMonomial::ONE);
        let step = nil.scale(&ainv.neg_ref());
        let mut total = SuperFunction::one(&self.chart);
        let mut power = SuperFunction::one(&self.chart);
        loop {
            power = &power * &step;
            if power.is_zero() {
                break;
            }
            total = &total + &power;
        }
        Some(total.scale(&ainv))
    }

    /// Substitutes atoms in every coefficient (even coordinates, function
    /// symbols or unknowns).
    pub fn substitute_scalars(&self, image: &impl Fn(&Atom) -> Option<ScalarExpr>) -> SuperFunction {
        self.map_coefficients(|c| c.substitute(image))
    }

    /// Re-expresses the function on `target`, where `images[i]` is the
    /// image of source coordinate `i`. Even images may carry nilpotent
    /// parts, handled by a finite Taylor expansion.
    pub fn compose(&self, target: &Arc<Chart>, images: &[SuperFunction]) -> Result<SuperFunction, GrassmannError> {
        let src = &self.chart;
        assert_eq!(images.len(), src.dim(), "one image per source coordinate");
        let n = src.n_even();
        let bodies: Vec<ScalarExpr> = images[..n].iter().map(SuperFunction::reduce_eps).collect();
        let nilpotents: Vec<SuperFunction> = images[..n]
            .iter()
            .map(|f| {
                let mut g = f.clone();
                g.terms.remove(&OddMonomial::ONE);
                g
            })
            .collect();
        let image_of = |a: &Atom| -> Option<ScalarExpr> {
            match a {
                Atom::Coord(c) => src.index_of(c).map(|i| bodies[i].clone()),
                _ => None,
            }
        };
        let check_functions = |c: &ScalarExpr| -> Result<(), GrassmannError> {
            for a in c.atoms() {
                if let Atom::Func(f, _) = &a {
                    let kept = f.depends_on.iter().all(|d| {
                        let i = src.index_of(d).expect("function dependency is a chart coordinate");
                        bodies[i] == ScalarExpr::coord(d) && nilpotents[i].is_zero()
                    });
                    if !kept || target.function(&f.name).map(|g| **g != **f).unwrap_or(true) {
                        return Err(GrassmannError::OpaqueSubstitution(f.name.to_string()));
                    }
                }
            }
            Ok(())
        };
        let mut out = SuperFunction::zero(target);
        for (m, c) in &self.terms {
            let mut odd_part = SuperFunction::one(target);
            for j in m.indices() {
                odd_part = odd_part.super_mul(&images[n + j])?;
            }
            let mut pieces = vec![(c.clone(), odd_part)];
            for (j, nil) in nilpotents.iter().enumerate() {
                if nil.is_zero() {
                    continue;
                }
                let name = src.coord(j).name.clone();
                let mut next = Vec::new();
                for (coef, weight) in pieces {
                    let mut d = coef;
                    let mut npow = SuperFunction::one(target);
                    let mut fact = BigInt::from(1);
                    let mut k = 0u32;
                    while !d.is_zero() && !npow.is_zero() {
                        let scaled = d.scale(&Rational::new(1.into(), fact.clone()));
                        next.push((scaled, npow.super_mul(&weight)?));
                        k += 1;
                        fact *= k;
                        d = d.diff(&name);
                        npow = npow.super_mul(nil)?;
                    }
                }
                pieces = next;
            }
            for (coef, weight) in pieces {
                check_functions(&coef)?;
                let moved = coef.substitute(&image_of);
                out = out.try_add(&weight.scale(&moved))?;
            }
        }
        Ok(out)
    }

    pub fn evaluate_body(&self, value: &impl Fn(&Atom) -> Option<Rational>) -> Option<Rational> {
        self.reduce_eps().evaluate(value)
    }
}

fn format_coefficient(c: &ScalarExpr) -> String {
    if c.denominator().is_one() && c.numerator().num_terms() > 1 {
        format!("({c})")
    } else {
        c.to_string()
    }
}

impl fmt::Display for SuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let n = self.chart.n_even();
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let names: Vec<String> = m.indices().iter().map(|&j| self.chart.coord(n + j).name.to_string()).collect();
            let names = names.join("*");
            let s = if names.is_empty() {
                c.to_string()
            } else if c.is_one() {
                names
            } else if c.neg_ref().is_one() {
                format!("-{names}")
            } else {
                format!("{}*{names}", format_coefficient(c))
            };
            parts.push(s);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        f.write_str(&out)
    }
}

impl Add for &SuperFunction {
    type Output = SuperFunction;
    fn add(self, rhs: &SuperFunction) -> SuperFunction {
        self.try_add(rhs).expect("superfunctions on different charts")
    }
}

impl Sub for &SuperFunction {
    type Output = SuperFunction;
    fn sub(self, rhs: &SuperFunction) -> SuperFunction {
        self.try_add(&rhs.neg_ref()).expect("superfunctions on different charts")
    }
}

impl Mul for &SuperFunction {
    type Output = SuperFunction;
    fn mul(self, rhs: &SuperFunction) -> SuperFunction {
        self.super_mul(rhs).expect("superfunctions on different charts")
    }
}

impl Neg for &SuperFunction {
    type Output = SuperFunction;
    fn neg(self) -> SuperFunction {
        self.neg_ref()
    }
}

impl Add for SuperFunction {
    type Output = SuperFunction;
    fn add(self, rhs: SuperFunction) -> SuperFunction {
        &self + &rhs
    }
}

impl Sub for SuperFunction {
    type Output = SuperFunction;
    fn sub(self, rhs: SuperFunction) -> SuperFunction {
        &self - &rhs
    }
}

impl Mul for SuperFunction {
    type Output = SuperFunction;
    fn mul(self, rhs: SuperFunction) -> SuperFunction {
        &self * &rhs
    }
}

impl Neg for SuperFunction {
    type Output = SuperFunction;
    fn neg(self) -> SuperFunction {
        self.neg_ref()
    }
}
