//! Monte Carlo estimation of intrinsic volumes of convex bodies from sections
//! by flats that contain (rotational design) or are parallel to (vertical
//! design) a fixed linear subspace `L0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`constants`] evaluates the dimensional constants (`κ_n`, `ω_n`, the
//!   Crofton and Blaschke–Petkantschin normalisations).
//! * [`geometry`] holds subspaces, flats, Gram volumes, subspace determinants
//!   and the invariant samplers on Grassmannians and flat spaces.
//! * [`bodies`] provides reference convex bodies with exact sectioning.
//! * [`estimators`] implements the unbiased nested Monte Carlo estimators.
//! * [`verify`] numerically checks the supporting integral-geometric identities.
//! * [`runner`] parses experiment configs, runs them and writes CSV tables.

pub mod bodies;
pub mod constants;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod runner;
pub mod verify;

pub use error::{Error, Result};
