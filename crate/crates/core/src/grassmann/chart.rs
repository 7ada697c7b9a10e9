use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::scalar::{CoordinateSymbol, FunctionSymbol, Parity, ScalarContext};

use super::GrassmannError;

/// Maximum number of odd coordinates (monomials are stored as bitmasks).
pub const MAX_ODD: usize = 16;

/// A coordinate chart: even coordinates, then odd coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    even: Vec<CoordinateSymbol>,
    odd: Vec<CoordinateSymbol>,
    functions: Vec<Arc<FunctionSymbol>>,
    ctx: ScalarContext,
}

impl Chart {
    pub fn new(even: &[&str], odd: &[&str], functions: Vec<FunctionSymbol>) -> Result<Arc<Chart>, GrassmannError> {
        Chart::with_nonvanishing(even, odd, functions, &[])
    }

    /// Like [`Chart::new`], additionally declaring some even coordinates
    /// nonvanishing so they may appear in denominators.
    pub fn with_nonvanishing(
        even: &[&str],
        odd: &[&str],
        functions: Vec<FunctionSymbol>,
        nonvanishing: &[&str],
    ) -> Result<Arc<Chart>, GrassmannError> {
        if even.is_empty() {
            return Err(GrassmannError::InvalidChart("at least one even coordinate is required".into()));
        }
        if odd.len() > MAX_ODD {
            return Err(GrassmannError::InvalidChart(format!("at most {MAX_ODD} odd coordinates")));
        }
        let mut seen = BTreeSet::new();
        for name in even.iter().chain(odd).copied().chain(functions.iter().map(|f| &*f.name)) {
            if !seen.insert(name.to_string()) {
                return Err(GrassmannError::InvalidChart(format!("duplicate name `{name}`")));
            }
            if name == "D" || name == "d" {
                return Err(GrassmannError::InvalidChart(format!("`{name}` is reserved")));
            }
        }
        for f in &functions {
            for d in &f.depends_on {
                if !even.contains(&&**d) {
                    return Err(GrassmannError::InvalidChart(format!(
                        "function `{}` depends on `{d}`, which is not an even coordinate",
                        f.name
                    )));
                }
            }
        }
        for n in nonvanishing {
            if !even.contains(n) {
                return Err(GrassmannError::UnknownCoordinate(n.to_string()));
            }
        }
        let functions: Vec<Arc<FunctionSymbol>> = functions.into_iter().map(Arc::new).collect();
        let ctx = ScalarContext {
            even: even.iter().map(|s| Arc::from(*s)).collect(),
            odd: odd.iter().map(|s| Arc::from(*s)).collect(),
            nonvanishing_coords: nonvanishing.iter().map(|s| Arc::from(*s)).collect(),
            functions: functions.iter().map(|f| (f.name.to_string(), f.clone())).collect(),
        };
        Ok(Arc::new(Chart {
            even: even.iter().map(|s| CoordinateSymbol::even(s)).collect(),
            odd: odd.iter().map(|s| CoordinateSymbol::odd(s)).collect(),
            functions,
            ctx,
        }))
    }

    pub fn even(&self) -> &[CoordinateSymbol] {
        &self.even
    }

    pub fn odd(&self) -> &[CoordinateSymbol] {
        &self.odd
    }

    pub fn functions(&self) -> &[Arc<FunctionSymbol>] {
        &self.functions
    }

    pub fn scalar_context(&self) -> &ScalarContext {
        &self.ctx
    }

    pub fn n_even(&self) -> usize {
        self.even.len()
    }

    pub fn n_odd(&self) -> usize {
        self.odd.len()
    }

    pub fn dim(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    /// Coordinate by chart index (evens first).
    pub fn coord(&self, i: usize) -> &CoordinateSymbol {
        if i < self.even.len() {
            &self.even[i]
        } else {
            &self.odd[i - self.even.len()]
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = &CoordinateSymbol> {
        self.even.iter().chain(self.odd.iter())
    }

    pub fn parity(&self, i: usize) -> Parity {
        Parity::from_bit(i >= self.even.len())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords().position(|c| &*c.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, GrassmannError> {
        self.index_of(name).ok_or_else(|| GrassmannError::UnknownCoordinate(name.to_string()))
    }

    pub fn odd_index(&self, name: &str) -> Option<usize> {
        self.odd.iter().position(|c| &*c.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&Arc<FunctionSymbol>> {
        self.functions.iter().find(|f| &*f.name == name)
    }

    pub fn dimension_label(&self) -> String {
        format!("{}|{}", self.n_even(), self.n_odd())
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: &[CoordinateSymbol]| v.iter().map(|c| c.name.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "R^{} ({}; {})", self.dimension_label(), names(&self.even), names(&self.odd))
    }
}
