//! Coefficient ring: exact rational functions in even coordinates and
//! declared function symbols, with formal differentiation and a
//! deterministic fraction-field linear solver.

mod expr;
mod linsolve;
mod normalize;
mod poly;
pub mod syntax;

use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

use thiserror::Error;

pub use expr::ScalarExpr;
pub use linsolve::{constant_coefficient_rows, particular_solution, solve_linear_system, solve_sparse, LinearSolution, SparseRow};
pub use normalize::{normalize, ScalarContext};
pub use poly::{Atom, Monomial, Poly};
pub use syntax::RawExpr;

pub type Rational = num_rational::BigRational;

/// Z/2 grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Self {
        Parity::from_bit(!self.is_odd())
    }

    /// Koszul sign `(-1)^{p q}` as a boolean "negate?".
    pub fn koszul(p: Parity, q: Parity) -> bool {
        p.is_odd() && q.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.is_odd() ^ rhs.is_odd())
    }
}

impl Mul for Parity {
    type Output = Parity;
    fn mul(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.is_odd() && rhs.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A chart coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateSymbol {
    pub name: Arc<str>,
    pub parity: Parity,
}

impl CoordinateSymbol {
    pub fn even(name: &str) -> Self {
        CoordinateSymbol { name: name.into(), parity: Parity::Even }
    }

    pub fn odd(name: &str) -> Self {
        CoordinateSymbol { name: name.into(), parity: Parity::Odd }
    }
}

/// An opaque smooth function of some even coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionSymbol {
    pub name: Arc<str>,
    pub depends_on: Vec<Arc<str>>,
    pub nonvanishing: bool,
}

impl FunctionSymbol {
    pub fn new(name: &str, depends_on: &[&str], nonvanishing: bool) -> Self {
        FunctionSymbol {
            name: name.into(),
            depends_on: depends_on.iter().map(|d| Arc::from(*d)).collect(),
            nonvanishing,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by `{0}`, which is not provably nonvanishing")]
    DivisionByNonDeclared(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is an odd coordinate; use the Grassmann layer for odd derivatives")]
    OddCoordinate(String),
    #[error("function `{name}` expects arguments ({expected}), got ({found})")]
    BadArguments { name: String, expected: String, found: String },
    #[error("expression is not linear in the unknowns")]
    Nonlinear,
    #[error("coefficient matching needs polynomial coefficients, found `{0}`")]
    FunctionCoefficient(String),
}
