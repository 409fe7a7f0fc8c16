//! Quantum emitters coupled to a photonic Weyl-semimetal lattice.
//!
//! The crate builds the two-sublattice cubic tight-binding bath in bulk,
//! slab and finite real-space form ([`lattice`]), characterises its topology
//! ([`topology`]), propagates single-excitation emitter–bath dynamics
//! ([`dynamics`]) and turns snapshots into reciprocal-space and far-field
//! observables ([`analysis`]). The [`cli`] module drives everything from
//! TOML configuration files.

pub mod error;
pub mod lattice;
pub mod linalg;
pub mod topology;
pub mod dynamics;
pub mod analysis;
pub mod scenario;
pub mod scan;
pub mod cli;

pub use error::{Error, Result};
