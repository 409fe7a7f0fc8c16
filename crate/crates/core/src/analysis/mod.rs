//! Reciprocal-space and far-field observables of dynamical snapshots, and
//! scalar figures of merit (`C_max`, `J_12`).

mod bloch;
mod farfield;
mod fourier;
mod j12;
mod tof;

pub use bloch::{bloch_map, BlochPopulation, BORDER_WARNING};
pub use farfield::{direction, far_field, separability_defect, FarFieldSpec};
pub use j12::{dominant_frequency, extract_j12, extract_j12_adaptive, extract_j12_trajectory, extract_j12_trajectory_adaptive, first_maximum, moving_average, J12Estimate, J12_AGREEMENT, J12_WINDOW};
pub use tof::{
    column_integrate, cross_correlation, interpolate_periodic, momentum_distribution, Axis, Map2d, MomentumDistribution, MomentumGrid,
    SURFACE_PERIODS,
};
