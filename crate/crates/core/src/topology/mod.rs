//! Band structures, Weyl nodes, phase classification, Berry curvature, Chern
//! numbers, group velocities and Fermi arcs.

mod arcs;
mod bands;
mod berry;
mod chern;
mod phase;
mod velocity;
mod weyl;

pub use arcs::{band_on_grid, facet_weights, fermi_arcs, fermi_contours, ArcPoint, FermiArcs, SurfaceGrid, ARC_LOCALIZATION};
pub use bands::{band_structure, linspace, BandStructure, EigenDecomposition, HamiltonianFamily, KGrid, DEGENERACY_TOL, GAUGE_MAX_REAL};
pub use berry::{
    berry_curvature_bulk, berry_curvature_bulk_sum, berry_curvature_surface, berry_curvature_surface_all, berry_flux,
    curvature_from_eigensystem, hot_line_stats, surface_berry_map, Band,
};
pub use chern::{
    chern_closed_form, chern_from_dirac_points, chern_reduced, chern_reduced_with, dirac_points_2d, kz_modulation, DiracPoint,
    CHERN_GRID,
};
pub use phase::{analytic_phase, classify_phase, classify_phase_detailed, node_families, PhaseInfo, PhaseLabel, BOUNDARY_TOL};
pub use velocity::{bulk_velocity_analytic, group_velocity};
pub use weyl::{find_weyl_points, weyl_charge, weyl_charge_with_radius, WeylNode, CHARGE_RADIUS};
