//! Invariant subspaces of truncated weighted shifts and their powers.
//!
//! Exact rational linear algebra drives the structural side (invariance,
//! cyclic decompositions, canonical forms); floating point is confined to
//! [`asymptotics`].

pub mod asymptotics;
pub mod classify;
pub mod cli;
pub mod error;
pub mod exactlin;
pub mod invariants;
pub mod rng;
pub mod serial;
pub mod shifts;
pub mod weights;

pub use error::{Error, Result};
pub use exactlin::{Matrix, Scalar, Subspace, Vector};
