//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are [`Atom`]s: even coordinates, formal derivatives of declared
//! function symbols, and anonymous unknowns used when assembling linear
//! systems. Terms are kept in a `BTreeMap` so iteration order is
//! deterministic; the map order is *not* a monomial order and is only used
//! to pick a canonical leading coefficient.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{FunctionSymbol, Rational};

/// A polynomial variable.
#[derive(Clone, Debug)]
pub enum Atom {
    /// An even coordinate.
    Coord(Arc<str>),
    /// A declared function symbol, differentiated by the listed coordinates
    /// (sorted, with repetition).
    Func(Arc<FunctionSymbol>, Vec<Arc<str>>),
    /// Placeholder unknown used while assembling linear systems.
    Unknown(u32),
}

impl Atom {
    fn rank(&self) -> u8 {
        match self {
            Atom::Coord(_) => 0,
            Atom::Func(..) => 1,
            Atom::Unknown(_) => 2,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Atom::Unknown(_))
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self, Atom::Coord(_))
    }

    pub fn is_function(&self) -> bool {
        matches!(self, Atom::Func(..))
    }

    /// Formal partial derivative with respect to an even coordinate.
    pub(crate) fn derivative(&self, coord: &str) -> AtomDerivative {
        match self {
            Atom::Coord(name) if &**name == coord => AtomDerivative::One,
            Atom::Coord(_) | Atom::Unknown(_) => AtomDerivative::Zero,
            Atom::Func(sym, derivs) => {
                if sym.depends_on.iter().any(|d| &**d == coord) {
                    let mut derivs = derivs.clone();
                    let pos = derivs.partition_point(|d| &**d <= coord);
                    derivs.insert(pos, Arc::from(coord));
                    AtomDerivative::Atom(Atom::Func(sym.clone(), derivs))
                } else {
                    AtomDerivative::Zero
                }
            }
        }
    }
}

pub(crate) enum AtomDerivative {
    Zero,
    One,
    Atom(Atom),
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Atom {}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Atom::Coord(a), Atom::Coord(b)) => a.cmp(b),
            (Atom::Func(fa, da), Atom::Func(fb, db)) => {
                fa.name.cmp(&fb.name).then_with(|| da.cmp(db))
            }
            (Atom::Unknown(a), Atom::Unknown(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl std::hash::Hash for Atom {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Atom::Coord(n) => n.hash(state),
            Atom::Func(f, d) => {
                f.name.hash(state);
                d.hash(state);
            }
            Atom::Unknown(i) => i.hash(state),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Coord(n) => write!(f, "{n}"),
            Atom::Unknown(i) => write!(f, "_u{i}"),
            Atom::Func(sym, derivs) => {
                let mut s = sym.name.to_string();
                if !sym.depends_on.is_empty() {
                    let args: Vec<&str> = sym.depends_on.iter().map(|a| &**a).collect();
                    s = format!("{}({})", s, args.join(", "));
                }
                for d in derivs {
                    s = format!("D({s}, {d})");
                }
                write!(f, "{s}")
            }
        }
    }
}

/// A monomial: sorted atoms with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent(&self, atom: &Atom) -> u32 {
        self.0
            .binary_search_by(|(a, _)| a.cmp(atom))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == *a {
                let oe = other.0[j].1;
                if oe > *e {
                    return None;
                }
                if oe < *e {
                    out.push((a.clone(), e - oe));
                }
                j += 1;
            } else {
                if j < other.0.len() && other.0[j].0 < *a {
                    return None;
                }
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Removes every power of `atom`, returning the remaining monomial and the
    /// removed exponent.
    pub fn split_off(&self, atom: &Atom) -> (Monomial, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(a, exp)| {
                if a == atom {
                    e = *exp;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Monomial(rest), e)
    }

    /// Partitions the factors by a predicate: `(matching, rest)`.
    pub fn partition(&self, pred: impl Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(at, _)| pred(at));
        (Monomial(a), Monomial(b))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(a, e)| if *e == 1 { a.to_string() } else { format!("{a}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(i: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(i)))
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Rational::one(), Monomial::atom(a, 1))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single term of a monomial-shaped polynomial.
    pub fn as_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(mm, c)| (mm.mul(m), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    pub fn contains_atom(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| pred(a)))
    }

    pub fn degree_in(&self, atom: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(atom)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `atom`, indexed by degree.
    pub fn coefficients_in(&self, atom: &Atom) -> Vec<Poly> {
        let deg = self.degree_in(atom) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(atom);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    fn from_coefficients_in(coeffs: &[Poly], atom: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let xm = Monomial::atom(atom.clone(), e as u32);
            for (m, k) in &c.terms {
                out.add_term(m.mul(&xm), k.clone());
            }
        }
        out
    }

    /// Coefficient of the largest monomial in map order; used only as a
    /// canonical normalization handle.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.iter().next_back().map(|(_, c)| c)
    }

    pub fn monic(&self) -> Poly {
        match self.leading_coefficient() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (mm, c) in &self.terms {
            terms.insert(mm.div(m)?, c.clone());
        }
        Some(Poly { terms })
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if let Some((m, c)) = divisor.as_term() {
            return self.div_monomial(m).map(|q| q.scale(&c.recip()));
        }
        let var = divisor.atoms().into_iter().next().expect("non-constant divisor");
        let dcoeffs = divisor.coefficients_in(&var);
        let ddeg = dcoeffs.len() - 1;
        let dlead = &dcoeffs[ddeg];
        let mut rem = self.coefficients_in(&var);
        let mut quot = vec![Poly::zero(); rem.len().saturating_sub(ddeg).max(1)];
        loop {
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.is_empty() {
                return Some(Poly::from_coefficients_in(&quot, &var));
            }
            let rdeg = rem.len() - 1;
            if rdeg < ddeg {
                return None;
            }
            let q = rem[rdeg].exact_div(dlead)?;
            let shift = rdeg - ddeg;
            for (i, dc) in dcoeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[i + shift] = rem[i + shift].sub(&q.mul(dc));
                }
            }
            quot[shift] = quot[shift].add(&q);
        }
    }

    /// Greatest common divisor, normalized by [`Poly::monic`].
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self.num_terms() == 1 || other.num_terms() == 1 {
            let m = self.monomial_content().gcd(&other.monomial_content());
            return Poly::term(Rational::one(), m);
        }
        // Pull out common monomial factors first; cheap and keeps the
        // recursive part small.
        let ma = self.monomial_content();
        let mb = other.monomial_content();
        let mg = ma.gcd(&mb);
        let a = self.div_monomial(&ma).expect("content divides");
        let b = other.div_monomial(&mb).expect("content divides");
        let shared: Vec<Atom> = a.atoms().intersection(&b.atoms()).cloned().collect();
        let g = if a.is_constant() || b.is_constant() || shared.iter().all(|v| coprime_images(&a, &b, v)) {
            Poly::one()
        } else {
            Self::gcd_recursive(&a, &b)
        };
        g.mul_term(&mg, &Rational::one()).monic()
    }

    fn gcd_recursive(a: &Poly, b: &Poly) -> Poly {
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        let atoms_a = a.atoms();
        let atoms_b = b.atoms();
        // Prefer a variable present in both; otherwise any variable will do.
        let var = atoms_a
            .intersection(&atoms_b)
            .next()
            .or_else(|| atoms_a.iter().next())
            .cloned()
            .expect("non-constant polynomial has atoms");
        let ca = a.content_in(&var);
        let cb = b.content_in(&var);
        let content = ca.gcd(&cb);
        let pa = a.exact_div(&ca).expect("content divides");
        let pb = b.exact_div(&cb).expect("content divides");
        let prim = if pa.degree_in(&var) == 0 || pb.degree_in(&var) == 0 {
            Poly::one()
        } else {
            primitive_prs(pa, pb, &var)
        };
        prim.mul(&content).monic()
    }

    /// Gcd of the coefficients with respect to `var`.
    pub fn content_in(&self, var: &Atom) -> Poly {
        let coeffs = self.coefficients_in(var);
        let mut acc = Poly::zero();
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            acc = acc.gcd(c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    fn primitive_part_in(&self, var: &Atom) -> Poly {
        let c = self.content_in(var);
        self.exact_div(&c).expect("content divides").integer_primitive()
    }

    /// Scales to integer coefficients with gcd 1 and a positive leading term.
    fn integer_primitive(&self) -> Poly {
        let Some(lc) = self.leading_coefficient() else {
            return Poly::zero();
        };
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let k = Rational::new(if lc.is_negative() { -den } else { den }, num);
        self.scale(&k)
    }

    /// Formal partial derivative with respect to an even coordinate.
    pub fn diff(&self, coord: &str) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (i, (atom, e)) in m.0.iter().enumerate() {
                let d = atom.derivative(coord);
                let factor = match d {
                    AtomDerivative::Zero => continue,
                    AtomDerivative::One => Monomial::one(),
                    AtomDerivative::Atom(a) => Monomial::atom(a, 1),
                };
                let mut rest = m.0.clone();
                if *e == 1 {
                    rest.remove(i);
                } else {
                    rest[i].1 -= 1;
                }
                let k = c * Rational::from_integer(BigInt::from(*e));
                out.add_term(Monomial(rest).mul(&factor), k);
            }
        }
        out
    }

    /// Substitutes atoms by polynomials; atoms without an image are kept.
    pub fn substitute(&self, image: &impl Fn(&Atom) -> Option<Poly>) -> Poly {
        let mut out = Poly::zero();
        let mut cache: BTreeMap<Atom, Option<Poly>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            let mut kept = Monomial::one();
            for (a, e) in &m.0 {
                let img = cache.entry(a.clone()).or_insert_with(|| image(a)).clone();
                match img {
                    Some(p) => acc = acc.mul(&p.pow(*e)),
                    None => kept = kept.mul(&Monomial::atom(a.clone(), *e)),
                }
            }
            out = out.add(&acc.mul_term(&kept, &Rational::one()));
        }
        out
    }

    /// Evaluates every atom to a rational; `None` if an atom is unmapped.
    pub fn evaluate(&self, value: &impl Fn(&Atom) -> Option<Rational>) -> Option<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (a, e) in &m.0 {
                let v = value(a)?;
                t *= num_traits::pow(v, *e as usize);
            }
            total += t;
        }
        Some(total)
    }
}

/// True when images of `a` and `b` under an integer evaluation of every
/// atom but `var` keep their leading coefficients and are coprime, which
/// proves the gcd has degree 0 in `var`. `false` is inconclusive.
fn coprime_images(a: &Poly, b: &Poly, var: &Atom) -> bool {
    const POINTS: [i64; 8] = [3, -5, 7, 11, -13, 17, 19, -23];
    let atoms: Vec<Atom> = a.atoms().union(&b.atoms()).filter(|x| *x != var).cloned().collect();
    let value = |x: &Atom| {
        let i = atoms.iter().position(|y| y == x)?;
        Some(Rational::from_integer(BigInt::from(POINTS[i % POINTS.len()] + (i / POINTS.len()) as i64 * 29)))
    };
    let image = |p: &Poly| -> Option<Vec<Rational>> {
        let mut c: Vec<Rational> = p.coefficients_in(var).iter().map(|c| c.evaluate(&value)).collect::<Option<_>>()?;
        if c.last().map_or(true, Zero::is_zero) {
            return None;
        }
        c.shrink_to_fit();
        Some(c)
    };
    let (Some(mut f), Some(mut g)) = (image(a), image(b)) else {
        return false;
    };
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    // Euclid over the rationals on dense coefficient vectors.
    while g.len() > 1 {
        let lg = g[g.len() - 1].clone();
        while f.len() >= g.len() {
            let k = &f[f.len() - 1] / &lg;
            let shift = f.len() - g.len();
            for (i, gc) in g.iter().enumerate() {
                f[i + shift] -= &k * gc;
            }
            f.pop();
            while f.last().is_some_and(Zero::is_zero) {
                f.pop();
            }
        }
        if f.is_empty() {
            return false;
        }
        std::mem::swap(&mut f, &mut g);
    }
    true
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`.
fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    let mut owed = (a.len() - db) as u32;
    loop {
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        if r.len() <= db {
            if owed > 0 {
                let k = lb.pow(owed);
                for c in r.iter_mut() {
                    *c = c.mul(&k);
                }
            }
            return r;
        }
        owed -= 1;
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            if !bc.is_zero() {
                r[i + shift] = r[i + shift].sub(&lr.mul(bc));
            }
        }
    }
}

/// Gcd of two primitive polynomials by the subresultant remainder sequence.
fn primitive_prs(a: Poly, b: Poly, var: &Atom) -> Poly {
    let (mut a, mut b) = if a.degree_in(var) >= b.degree_in(var) { (a, b) } else { (b, a) };
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let (ca, cb) = (a.coefficients_in(var), b.coefficients_in(var));
        let delta = (ca.len() - cb.len()) as u32;
        let mut r = pseudo_remainder(&ca, &cb);
        if r.iter().all(|c| c.is_zero()) {
            return b.primitive_part_in(var).monic();
        }
        if r.len() == 1 {
            return Poly::one();
        }
        let divisor = g.mul(&h.pow(delta));
        for c in r.iter_mut() {
            *c = c.exact_div(&divisor).expect("subresultant division is exact");
        }
        a = b;
        b = Poly::from_coefficients_in(&r, var);
        g = a.coefficients_in(var).pop().expect("nonzero");
        h = if delta == 0 { h } else { g.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant division is exact") };
    }
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest total degree first, then map order.
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}
