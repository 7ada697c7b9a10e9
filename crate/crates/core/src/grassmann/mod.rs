//! Superfunctions on a single chart with even coordinates and up to
//! sixteen odd coordinates.
//!
//! Odd partial derivatives are left derivatives: the generator is moved to
//! the front of the monomial before it is removed.

mod chart;
mod superfunction;

use thiserror::Error;

use crate::scalar::{syntax::RawExpr, ScalarError, ScalarExpr};

pub use chart::{Chart, MAX_ODD};
pub use superfunction::{OddMonomial, SuperFunction};
pub(crate) use superfunction::same_chart;

use std::sync::Arc;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GrassmannError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("`{0}` is an even coordinate")]
    EvenCoordinate(String),
    #[error("`{0}` is an odd coordinate")]
    OddCoordinate(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("cannot substitute into opaque function `{0}`")]
    OpaqueSubstitution(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Evaluates a raw expression on a chart. Odd coordinates are allowed;
/// division requires a divisor whose body is provably nonvanishing.
pub fn eval_raw(raw: &RawExpr, chart: &Arc<Chart>) -> Result<SuperFunction, GrassmannError> {
    let ctx = chart.scalar_context();
    Ok(match raw {
        RawExpr::Num(q) => SuperFunction::scalar(chart, ScalarExpr::from_rational(q.clone())),
        RawExpr::Sym(s) => match chart.index_of(s) {
            Some(i) => SuperFunction::coordinate_at(chart, i),
            None => SuperFunction::scalar(chart, crate::scalar::normalize(raw, ctx)?),
        },
        RawExpr::Call(..) => SuperFunction::scalar(chart, crate::scalar::normalize(raw, ctx)?),
        RawExpr::Deriv(e, c) => {
            let i = chart.index_of(c).ok_or_else(|| GrassmannError::Scalar(ScalarError::UnknownSymbol(c.clone())))?;
            eval_raw(e, chart)?.partial(i)
        }
        RawExpr::Neg(e) => eval_raw(e, chart)?.neg_ref(),
        RawExpr::Add(a, b) => eval_raw(a, chart)?.try_add(&eval_raw(b, chart)?)?,
        RawExpr::Sub(a, b) => eval_raw(a, chart)?.try_add(&eval_raw(b, chart)?.neg_ref())?,
        RawExpr::Mul(a, b) => eval_raw(a, chart)?.super_mul(&eval_raw(b, chart)?)?,
        RawExpr::Div(a, b) => {
            let inv = guarded_inverse(&eval_raw(b, chart)?)?;
            eval_raw(a, chart)?.super_mul(&inv)?
        }
        RawExpr::Pow(a, n) => {
            let base = eval_raw(a, chart)?;
            if *n < 0 {
                guarded_inverse(&base)?.pow(n.unsigned_abs() as u32)
            } else {
                base.pow(*n as u32)
            }
        }
    })
}

fn guarded_inverse(f: &SuperFunction) -> Result<SuperFunction, GrassmannError> {
    let body = f.reduce_eps();
    let ctx = f.chart().scalar_context();
    if !body.is_provably_nonvanishing(&|a| ctx.atom_nonvanishing(a)) {
        return Err(ScalarError::DivisionByNonDeclared(f.to_string()).into());
    }
    Ok(f.inverse().expect("nonvanishing body"))
}

/// Parses and evaluates an expression string on a chart.
pub fn parse_superfunction(src: &str, chart: &Arc<Chart>) -> Result<SuperFunction, String> {
    let raw = RawExpr::parse(src).map_err(|e| e.to_string())?;
    eval_raw(&raw, chart).map_err(|e| e.to_string())
}
