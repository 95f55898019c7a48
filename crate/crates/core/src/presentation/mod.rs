//! Surface-group words, semidirect products with ℤ, the matrix-unit map out of
//! the orbit quiver, and a checker for relation-derivation scripts.

mod group;
mod psi;
mod script;

pub use group::{
    concat, cyclic_reduce, free_reduce, inverse, is_rotation, GWord, PhiAction, SemidirectElement, SurfacePresentation,
};
pub use psi::{
    verify_psi_relations, Backend, DehnBackend, MatrixUnitElement, PresentationConfig, PsiArrowCheck, PsiContext,
    PsiReport,
};
pub use script::{check_derivation_script, DerivationScript, Move, ScriptReport, ScriptStep, Side, StepResult};

use crate::equivariant::EquivError;
use crate::pathalg::PathError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PresentationError {
    #[error("genus {0} is too small for Dehn's algorithm")]
    GenusTooSmall(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid automorphism of the surface group: {0}")]
    InvalidPhiAction(String),
    #[error("Dehn mode needs phi_star and arrow_words")]
    MissingPhiAction,
    #[error("tree does not reach every vertex: {0}")]
    NotInTreeClosure(String),
    #[error("bad tree: {0}")]
    BadTree(String),
    #[error("bad arrow words: {0}")]
    BadArrowWords(String),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}
