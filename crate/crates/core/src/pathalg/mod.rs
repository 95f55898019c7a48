//! Exact arithmetic in (localized) path algebras over ℚ.
//!
//! Words are written right to left: in `ba` the arrow `a` is traversed first.

mod element;
mod gdga;
pub mod io;
mod potential;
mod quiver;
pub mod random;
mod reduce;
mod word;

pub use element::Element;
pub use gdga::{check_d_squared, ginzburg_dga, DSquaredReport, GinzburgDga};
pub use potential::{
    coeff, commutator_sum, cyclic_derivative, jacobi_relations, least_rotation, parse_coeff, CyclicWord, Potential,
};
pub use quiver::{Arrow, ArrowId, Quiver, VertexId};
pub use reduce::{ideal_reduce, ideal_reduce_with, ReduceOptions, Reduction};
pub use word::{free_reduce_letters, Letter, Word};

/// Exact rational coefficients.
pub type Coeff = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("letters do not compose: {0}")]
    NonComposable(String),
    #[error("inverse of non-localized arrow {0}")]
    InverseOfNonLocalized(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("duplicate arrow id {0}")]
    DuplicateArrow(String),
    #[error("quiver has localized arrows")]
    LocalizedQuiverUnsupported,
    #[error("both {0} and its inverse occur; derivative refused")]
    MixedInverse(String),
    #[error("word is not closed: {0}")]
    NotClosed(String),
    #[error("cycle reduces to a constant path")]
    EmptyCycle,
    #[error("parse error: {0}")]
    Parse(String),
}
