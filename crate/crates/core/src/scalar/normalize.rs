use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::poly::Atom;
use super::syntax::RawExpr;
use super::{FunctionSymbol, ScalarError, ScalarExpr};

/// Symbols visible to scalar normalization.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScalarContext {
    pub even: Vec<Arc<str>>,
    pub odd: Vec<Arc<str>>,
    pub nonvanishing_coords: BTreeSet<Arc<str>>,
    pub functions: BTreeMap<String, Arc<FunctionSymbol>>,
}

impl ScalarContext {
    pub fn new(even: &[&str]) -> Self {
        ScalarContext { even: even.iter().map(|s| Arc::from(*s)).collect(), ..Default::default() }
    }

    pub fn with_function(mut self, f: FunctionSymbol) -> Self {
        self.functions.insert(f.name.to_string(), Arc::new(f));
        self
    }

    pub fn is_even(&self, name: &str) -> bool {
        self.even.iter().any(|c| &**c == name)
    }

    pub fn is_odd(&self, name: &str) -> bool {
        self.odd.iter().any(|c| &**c == name)
    }

    /// Atoms that may appear in a denominator.
    pub fn atom_nonvanishing(&self, a: &Atom) -> bool {
        match a {
            Atom::Coord(c) => self.nonvanishing_coords.contains(c),
            Atom::Func(f, d) => f.nonvanishing && d.is_empty(),
            Atom::Unknown(_) => false,
        }
    }

    pub fn function(&self, name: &str, args: &[String]) -> Result<ScalarExpr, ScalarError> {
        let f = self.functions.get(name).ok_or_else(|| ScalarError::UnknownSymbol(name.to_string()))?;
        let declared: Vec<&str> = f.depends_on.iter().map(|d| &**d).collect();
        if declared != args.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(ScalarError::BadArguments {
                name: name.to_string(),
                expected: declared.join(", "),
                found: args.join(", "),
            });
        }
        Ok(ScalarExpr::function(f))
    }

    /// Guarded division: the divisor must be provably nonvanishing.
    pub fn checked_div(&self, a: &ScalarExpr, b: &ScalarExpr) -> Result<ScalarExpr, ScalarError> {
        if !b.is_provably_nonvanishing(&|x| self.atom_nonvanishing(x)) {
            return Err(ScalarError::DivisionByNonDeclared(b.to_string()));
        }
        Ok(a.div_ref(b))
    }

    pub fn checked_pow(&self, a: &ScalarExpr, n: i64) -> Result<ScalarExpr, ScalarError> {
        if n < 0 {
            let inv = self.checked_div(&ScalarExpr::one(), a)?;
            Ok(inv.pow((-n) as i32))
        } else {
            Ok(a.pow(n as i32))
        }
    }
}

/// Normalizes a raw expression in the even coefficient ring.
pub fn normalize(raw: &RawExpr, ctx: &ScalarContext) -> Result<ScalarExpr, ScalarError> {
    Ok(match raw {
        RawExpr::Num(q) => ScalarExpr::from_rational(q.clone()),
        RawExpr::Sym(s) => {
            if ctx.is_even(s) {
                ScalarExpr::coord(s)
            } else if ctx.is_odd(s) {
                return Err(ScalarError::OddCoordinate(s.clone()));
            } else if let Some(f) = ctx.functions.get(s) {
                if !f.depends_on.is_empty() {
                    return ctx.function(s, &[]);
                }
                ScalarExpr::function(f)
            } else {
                return Err(ScalarError::UnknownSymbol(s.clone()));
            }
        }
        RawExpr::Call(name, args) => ctx.function(name, args)?,
        RawExpr::Deriv(e, c) => {
            if ctx.is_odd(c) {
                return Err(ScalarError::OddCoordinate(c.clone()));
            }
            if !ctx.is_even(c) {
                return Err(ScalarError::UnknownSymbol(c.clone()));
            }
            normalize(e, ctx)?.diff(c)
        }
        RawExpr::Neg(e) => normalize(e, ctx)?.neg_ref(),
        RawExpr::Add(a, b) => normalize(a, ctx)?.add_ref(&normalize(b, ctx)?),
        RawExpr::Sub(a, b) => normalize(a, ctx)?.sub_ref(&normalize(b, ctx)?),
        RawExpr::Mul(a, b) => normalize(a, ctx)?.mul_ref(&normalize(b, ctx)?),
        RawExpr::Div(a, b) => ctx.checked_div(&normalize(a, ctx)?, &normalize(b, ctx)?)?,
        RawExpr::Pow(a, n) => ctx.checked_pow(&normalize(a, ctx)?, *n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ScalarContext {
        ScalarContext::new(&["x", "t"])
            .with_function(FunctionSymbol::new("f", &["x"], true))
            .with_function(FunctionSymbol::new("h", &["x", "t"], false))
    }

    fn n(s: &str) -> Result<ScalarExpr, ScalarError> {
        normalize(&RawExpr::parse(s).unwrap(), &ctx())
    }

    #[test]
    fn equal_forms_normalize_identically() {
        assert_eq!(n("(x + t)^2 - 2*x*t").unwrap(), n("x^2 + t^2").unwrap());
        assert_eq!(n("f(x)^2 / f(x)").unwrap(), n("f(x)").unwrap());
        assert_eq!(n("D(f(x)*x, x)").unwrap(), n("D(f(x), x)*x + f(x)").unwrap());
    }

    #[test]
    fn division_guard() {
        assert!(n("1/f(x)").is_ok());
        assert!(n("f(x)^(-2)").is_ok());
        assert!(matches!(n("1/x"), Err(ScalarError::DivisionByNonDeclared(_))));
        assert!(matches!(n("1/h(x, t)"), Err(ScalarError::DivisionByNonDeclared(_))));
        assert!(matches!(n("1/D(f(x), x)"), Err(ScalarError::DivisionByNonDeclared(_))));
    }

    #[test]
    fn arguments_must_match_declaration() {
        assert!(matches!(n("h(t, x)"), Err(ScalarError::BadArguments { .. })));
        assert!(matches!(n("g(x)"), Err(ScalarError::UnknownSymbol(_))));
        assert_eq!(n("D(f(x), t)").unwrap(), ScalarExpr::zero());
    }
}
