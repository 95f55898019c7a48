//! Brane tilings with a finite-order symmetry, their orbit quivers and
//! transported potentials, surface-group presentations, and exact point counts
//! of representation spaces over prime fields.

pub mod cli;
pub mod equivariant;
pub mod fixtures;
pub mod pathalg;
pub mod presentation;
pub mod repcount;
pub mod surfacemap;
