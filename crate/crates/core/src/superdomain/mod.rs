//! Vector fields, one-forms, rank-two tensors and vector-valued bilinear
//! forms on a chart, with the graded bracket and coordinate changes.
//!
//! Components sit to the left of basis derivations. Pairings pick up the
//! sign `(-1)^{ã|Y^b|}` when a component of the second argument moves past
//! the first basis index.

mod coordinate_map;
mod forms;
mod vector_field;

use thiserror::Error;

use crate::grassmann::GrassmannError;

pub use coordinate_map::{transform_tensor2, CoordinateMap};
pub use forms::{OneForm, Tensor12, Tensor2};
pub use vector_field::VectorField;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SuperdomainError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("graded symmetry violated: {0}")]
    SymmetryViolation(String),
    #[error("coordinate change is not invertible: {0}")]
    NonInvertibleJacobian(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}
