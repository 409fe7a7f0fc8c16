//! Single-excitation dynamics of emitters coupled to a finite Weyl bath.

mod evolve;
mod observables;
mod system;

pub use evolve::{evolve, uniform_times, EvolveOptions, Trajectory, DEFAULT_DT, DEFAULT_SAMPLES, HALVING_TOL};
pub use observables::{angular_profile, concurrence, concurrence_of, timescales, Annulus, Regime, Timescales};
pub use system::{assemble, CoupledSystem, EmitterSpec, SystemState};
