//! Hand-entered data for the genus-2 running example and a few small maps.
//!
//! These are reference values used by tests and the bundled pipeline config;
//! nothing in the library computes from them.

use crate::pathalg::{Potential, Quiver};

/// Two vertices; loops `a,b` at 1 and `i,j` at 2; `c,d,e: 1→2`; `f,g,h: 2→1`.
pub fn genus2_quiver() -> Quiver {
    let mut q = Quiver::with_vertices([1, 2]);
    for (n, s, t) in [
        ("a", 1, 1),
        ("b", 1, 1),
        ("c", 1, 2),
        ("d", 1, 2),
        ("e", 1, 2),
        ("f", 2, 1),
        ("g", 2, 1),
        ("h", 2, 1),
        ("i", 2, 2),
        ("j", 2, 2),
    ] {
        q.add_arrow_between(n, s, t, false).expect("fixture");
    }
    q
}

pub const GENUS2_TERMS: [(i64, &str); 6] =
    [(1, "abfjie"), (1, "gc"), (1, "hd"), (-1, "agic"), (-1, "bhjd"), (-1, "fe")];

pub fn genus2_potential(q: &Quiver) -> Potential {
    Potential::from_strs(q, &GENUS2_TERMS).expect("fixture")
}

/// Orbit quiver of the running example: generators `a..e` and one iso arrow `r: 2→1`.
pub fn genus2_orbit_quiver(localize_generators: bool) -> Quiver {
    let mut q = Quiver::with_vertices([1, 2]);
    for (n, s, t) in [("a", 1, 1), ("b", 1, 1), ("c", 1, 2), ("d", 1, 2), ("e", 1, 2)] {
        q.add_arrow_between(n, s, t, localize_generators).expect("fixture");
    }
    q.add_arrow_between("r", 2, 1, true).expect("fixture");
    q
}

pub const GENUS2_TRANSPORTED_TERMS: [(i64, &str); 4] = [(1, "abreabre"), (2, "rdrc"), (-2, "ardbrc"), (-1, "rere")];

pub fn genus2_transported(q: &Quiver) -> Potential {
    Potential::from_strs(q, &GENUS2_TRANSPORTED_TERMS).expect("fixture")
}

/// Derivatives of the transported potential by generator, as printed by hand.
pub const GENUS2_TRANSPORTED_DERIVATIVES: [(&str, [(i64, &str); 2]); 5] = [
    ("a", [(2, "breabre"), (-2, "rdbrc")]),
    ("b", [(2, "reabrea"), (-2, "rcard")]),
    ("c", [(2, "rdr"), (-2, "ardbr")]),
    ("d", [(2, "rcr"), (-2, "brcar")]),
    ("e", [(2, "abreabr"), (-2, "rer")]),
];

/// Images of the ten arrows under the embedding into the orbit quiver.
pub const GENUS2_XI: [(&str, &str); 10] = [
    ("a", "a"),
    ("b", "b"),
    ("c", "c"),
    ("d", "d"),
    ("e", "e"),
    ("f", "rer"),
    ("g", "rdr"),
    ("h", "rcr"),
    ("i", "r^-1 br"),
    ("j", "r^-1 ar"),
];

/// The genus-2 tiling with arrow labels `a..j`.
pub const GENUS2_TILING_JSON: &str = include_str!("../data/genus2.tiling.json");

/// One white and one black vertex joined by three edges on a torus.
pub const TORUS3_TILING_JSON: &str = include_str!("../data/torus3.tiling.json");

/// The order-2 symmetry of the genus-2 tiling, as half-edge, arrow and vertex permutations.
pub const GENUS2_AUTOMORPHISM_JSON: &str = include_str!("../data/genus2.automorphism.json");

/// Generators `a..e` with the iso chain based at vertex 2.
pub const GENUS2_CHOICE_JSON: &str = include_str!("../data/genus2.choice.json");

/// Square torus: one black and one white 4-valent vertex.
pub const SQUARE_TORUS_TILING_JSON: &str = include_str!("../data/square_torus.tiling.json");

/// Half-turn of the square torus about its vertices.
pub const SQUARE_TORUS_HALF_TURN_JSON: &str = include_str!("../data/square_torus.half_turn.json");

/// The central element `rere + erer` of the orbit quiver.
pub const GENUS2_OMEGA_TERMS: [(i64, &str); 2] = [(1, "rere"), (1, "erer")];

/// Dimension-one counts over `F_3` for the orbit quiver with `a..e` inverted,
/// taken from a separate scalar brute force over all 96 points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarCounts {
    pub total: u64,
    pub zero: u64,
    pub one: u64,
    pub crit: u64,
    pub crit_zero: u64,
    pub crit_one: u64,
    pub nilpotent: u64,
    pub invertible: u64,
}

pub const GENUS2_D1_Q3: ScalarCounts =
    ScalarCounts { total: 96, zero: 64, one: 16, crit: 48, crit_zero: 48, crit_one: 0, nilpotent: 32, invertible: 64 };

/// Surface-group data for the running example: `φ_*` and a word for every arrow.
pub const GENUS2_PRESENTATION_JSON: &str = include_str!("../data/genus2.presentation.json");

/// Derivation of the surface relations from the transported potential, with `e` contracted.
pub const GENUS2_SCRIPT_JSON: &str = include_str!("../data/genus2.script.json");

/// Pipeline config for the running example; file names are siblings in `data/`.
pub const GENUS2_PIPELINE_JSON: &str = include_str!("../data/genus2.pipeline.json");
