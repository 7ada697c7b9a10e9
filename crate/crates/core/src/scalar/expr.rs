use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Atom, Monomial, Poly};
use super::{FunctionSymbol, Rational, ScalarError};

/// Canonical rational function `num / den`.
///
/// Invariants: `gcd(num, den) = 1`, the leading coefficient of `den` (in
/// term-map order) is one, and zero is stored as `0 / 1`. Two expressions
/// are equal iff their representations are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        ScalarExpr { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(i: i64) -> Self {
        ScalarExpr::from_poly(Poly::from_int(i))
    }

    pub fn from_rational(q: Rational) -> Self {
        ScalarExpr::from_poly(Poly::constant(q))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ScalarExpr::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_poly(p: Poly) -> Self {
        ScalarExpr { num: p, den: Poly::one() }
    }

    pub fn coord(name: &str) -> Self {
        ScalarExpr::from_poly(Poly::atom(Atom::Coord(name.into())))
    }

    pub fn function(sym: &std::sync::Arc<FunctionSymbol>) -> Self {
        ScalarExpr::from_poly(Poly::atom(Atom::Func(sym.clone(), Vec::new())))
    }

    pub fn unknown(i: u32) -> Self {
        ScalarExpr::from_poly(Poly::atom(Atom::Unknown(i)))
    }

    /// Builds `num / den` in canonical form. Panics if `den` is zero.
    pub fn fraction(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return ScalarExpr::zero();
        }
        if let Some(c) = den.as_constant() {
            return ScalarExpr { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        ScalarExpr::fraction_coprime(num, den)
    }

    /// Canonical form of `num / den` when the two share no factor.
    fn fraction_coprime(num: Poly, den: Poly) -> Self {
        if let Some(c) = den.as_constant() {
            return ScalarExpr { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let lc = den.leading_coefficient().expect("nonzero").recip();
        let den = den.scale(&lc);
        let num = num.scale(&lc);
        if let Some(c) = den.as_constant() {
            // Only reachable if the leading coefficient was already folded in.
            return ScalarExpr { num: num.scale(&c.recip()), den: Poly::one() };
        }
        ScalarExpr { num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut a = self.num.atoms();
        a.extend(self.den.atoms());
        a
    }

    pub fn contains_unknowns(&self) -> bool {
        self.num.contains_atom(Atom::is_unknown) || self.den.contains_atom(Atom::is_unknown)
    }

    pub fn contains_functions(&self) -> bool {
        self.num.contains_atom(Atom::is_function) || self.den.contains_atom(Atom::is_function)
    }

    pub fn depends_on_coord(&self, coord: &str) -> bool {
        !self.diff(coord).is_zero()
    }

    pub fn add_ref(&self, rhs: &ScalarExpr) -> ScalarExpr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return ScalarExpr::fraction(self.num.add(&rhs.num), self.den.clone());
        }
        ScalarExpr::fraction(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub_ref(&self, rhs: &ScalarExpr) -> ScalarExpr {
        self.add_ref(&rhs.neg_ref())
    }

    pub fn neg_ref(&self) -> ScalarExpr {
        ScalarExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul_ref(&self, rhs: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ScalarExpr::from_poly(self.num.mul(&rhs.num));
        }
        if let Some(c) = self.as_rational() {
            return ScalarExpr { num: rhs.num.scale(&c), den: rhs.den.clone() };
        }
        if let Some(c) = rhs.as_rational() {
            return ScalarExpr { num: self.num.scale(&c), den: self.den.clone() };
        }
        // Both factors are already reduced, so only cross factors can cancel.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let cancel = |p: &Poly, g: &Poly| if g.is_one() { p.clone() } else { p.exact_div(g).expect("gcd divides") };
        let num = cancel(&self.num, &g1).mul(&cancel(&rhs.num, &g2));
        let den = cancel(&self.den, &g2).mul(&cancel(&rhs.den, &g1));
        ScalarExpr::fraction_coprime(num, den)
    }

    pub fn scale(&self, k: &Rational) -> ScalarExpr {
        if k.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr { num: self.num.scale(k), den: self.den.clone() }
    }

    /// Multiplicative inverse in the fraction field. Panics on zero.
    pub fn inv(&self) -> ScalarExpr {
        assert!(!self.is_zero(), "inverse of zero");
        ScalarExpr::fraction(self.den.clone(), self.num.clone())
    }

    pub fn div_ref(&self, rhs: &ScalarExpr) -> ScalarExpr {
        self.mul_ref(&rhs.inv())
    }

    pub fn pow(&self, n: i32) -> ScalarExpr {
        if n >= 0 {
            let n = n as u32;
            ScalarExpr { num: self.num.pow(n), den: self.den.pow(n) }.renormalized()
        } else {
            self.inv().pow(-n)
        }
    }

    fn renormalized(self) -> ScalarExpr {
        if self.den.is_one() {
            self
        } else {
            ScalarExpr::fraction(self.num, self.den)
        }
    }

    /// Formal partial derivative with respect to an even coordinate.
    pub fn diff(&self, coord: &str) -> ScalarExpr {
        let dn = self.num.diff(coord);
        if self.den.is_one() {
            return ScalarExpr::from_poly(dn);
        }
        let dd = self.den.diff(coord);
        if dd.is_zero() {
            return ScalarExpr::fraction(dn, self.den.clone());
        }
        ScalarExpr::fraction(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// True when the expression is a nonzero rational times a product of
    /// atoms accepted by `nonvanishing` (denominators are always such a
    /// product when built through guarded division).
    pub fn is_provably_nonvanishing(&self, nonvanishing: &impl Fn(&Atom) -> bool) -> bool {
        let monomial_ok = |p: &Poly| match p.as_term() {
            Some((m, _)) => m.factors().iter().all(|(a, _)| nonvanishing(a)),
            None => false,
        };
        monomial_ok(&self.num) && (self.den.is_one() || monomial_ok(&self.den))
    }

    /// Splits an expression that is affine in `Unknown` atoms into
    /// `(coefficients, constant)`. Coefficients are indexed by unknown id.
    pub fn linear_parts(&self) -> Result<(Vec<(u32, ScalarExpr)>, ScalarExpr), ScalarError> {
        if self.den.contains_atom(Atom::is_unknown) {
            return Err(ScalarError::Nonlinear);
        }
        let mut per_unknown: std::collections::BTreeMap<u32, Poly> = Default::default();
        let mut constant = Poly::zero();
        for (m, c) in self.num.terms() {
            let (unk, rest) = m.partition(Atom::is_unknown);
            match unk.factors() {
                [] => constant.add_term(rest, c.clone()),
                [(Atom::Unknown(i), 1)] => per_unknown.entry(*i).or_default().add_term(rest, c.clone()),
                _ => return Err(ScalarError::Nonlinear),
            }
        }
        let coeffs = per_unknown
            .into_iter()
            .map(|(i, p)| (i, ScalarExpr::fraction(p, self.den.clone())))
            .collect();
        Ok((coeffs, ScalarExpr::fraction(constant, self.den.clone())))
    }

    /// Replaces atoms by scalar expressions.
    pub fn substitute(&self, image: &impl Fn(&Atom) -> Option<ScalarExpr>) -> ScalarExpr {
        let sub = |p: &Poly| -> ScalarExpr {
            let mut total = ScalarExpr::zero();
            for (m, c) in p.terms() {
                let mut t = ScalarExpr::from_rational(c.clone());
                let mut kept = Monomial::one();
                for (a, e) in m.factors() {
                    match image(a) {
                        Some(v) => t = t.mul_ref(&v.pow(*e as i32)),
                        None => kept = kept.mul(&Monomial::atom(a.clone(), *e)),
                    }
                }
                t = t.mul_ref(&ScalarExpr::from_poly(Poly::term(Rational::one(), kept)));
                total = total.add_ref(&t);
            }
            total
        };
        let n = sub(&self.num);
        if self.den.is_one() {
            n
        } else {
            n.div_ref(&sub(&self.den))
        }
    }

    /// Evaluates at a rational point; `None` if some atom has no value or the
    /// denominator vanishes there.
    pub fn evaluate(&self, value: &impl Fn(&Atom) -> Option<Rational>) -> Option<Rational> {
        let d = self.den.evaluate(value)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.evaluate(value)? / d)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.num_terms() > 1 || p.as_term().is_some_and(|(m, c)| !m.is_one() && !c.is_one()) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                self.$imp(rhs)
            }
        }
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$imp(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.neg_ref()
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.neg_ref()
    }
}

impl Zero for ScalarExpr {
    fn zero() -> Self {
        ScalarExpr::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for ScalarExpr {
    fn one() -> Self {
        ScalarExpr::one()
    }
}
