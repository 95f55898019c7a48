//! Finite-order symmetries of tilings and quivers, the orbit quiver, the
//! embedding of the original path algebra into it, and transported potentials.

mod automorphism;
mod dimer;
mod orbit;
mod refine;

pub use automorphism::{orbit_sizes, AutomorphismFile, OrbitReport, QuiverAutomorphism, TilingAutomorphism};
pub use dimer::{all_dimers, equivariant_dimer, DimerOutcome};
pub use orbit::{
    build_orbit_quiver, choose_homogeneous_xi, choose_with_any_dimer, factor_word, transport_potential,
    verify_transport_identity, word_degree, xi_embed, ChoiceCertificate, ChoiceFile, IdentityCheck, OrbitChoice,
    SemidirectQuiver, TransportReport,
};
pub use refine::refine_tiling;

use crate::pathalg::PathError;
use crate::surfacemap::MapError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("orbit size violation: {0}")]
    OrbitSizeViolation(String),
    #[error("bad orbit choice: {0}")]
    BadChoice(String),
    #[error("letters do not compose: {0}")]
    NonComposable(String),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("iso arrow {0} occurs together with its inverse")]
    MixedInverseViolation(String),
    #[error("no admissible choice: {0}")]
    NoChoiceFound(String),
    #[error("colour imbalance {0} is not a multiple of the order; no dimer extension exists")]
    Unbalanceable(i64),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[cfg(test)]
mod tests;
