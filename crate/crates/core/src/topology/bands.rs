//! Band structures and per-k eigendecompositions of the bulk and slab families.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{bloch_bulk, bloch_bulk_derivative, d_vector, slab_bloch, slab_bloch_derivative, KPoint, ModelParams, SlabSpec, SURFACE_PAR_HALF};
use crate::linalg::{eigh, eigvalsh, CMatrix, C64};

/// Label stored with every decomposition: columns are rotated so their
/// largest component is real and positive.
pub const GAUGE_MAX_REAL: &str = "max-component-real-positive";

/// Energies below this separation are treated as degenerate (units of `J`).
pub const DEGENERACY_TOL: f64 = 1e-8;

/// A Bloch Hamiltonian parameterised by momentum.
#[derive(Clone, Debug)]
pub enum HamiltonianFamily {
    /// Bulk 2x2 Hamiltonian; momenta are `(kx, ky, kz)`.
    Bulk(ModelParams),
    /// Slab Hamiltonian; momenta are `(k_par, k_z)`.
    Slab(SlabSpec),
}

impl HamiltonianFamily {
    pub fn dim(&self) -> usize {
        match self {
            HamiltonianFamily::Bulk(_) => 2,
            HamiltonianFamily::Slab(s) => s.n_s(),
        }
    }

    /// Number of momentum components.
    pub fn k_dim(&self) -> usize {
        match self {
            HamiltonianFamily::Bulk(_) => 3,
            HamiltonianFamily::Slab(_) => 2,
        }
    }

    pub fn matrix(&self, k: &[f64]) -> CMatrix {
        match self {
            HamiltonianFamily::Bulk(p) => from_matrix2(&bloch_bulk(p, &KPoint::new(k[0], k[1], k[2]))),
            HamiltonianFamily::Slab(s) => slab_bloch(s, k[0], k[1]),
        }
    }

    /// `dH/dk_axis`.
    pub fn derivative(&self, k: &[f64], axis: usize) -> CMatrix {
        match self {
            HamiltonianFamily::Bulk(p) => from_matrix2(&bloch_bulk_derivative(p, &KPoint::new(k[0], k[1], k[2]), axis)),
            HamiltonianFamily::Slab(s) => slab_bloch_derivative(s, k[0], k[1], axis),
        }
    }

    /// Ascending eigenvalues.
    pub fn energies(&self, k: &[f64]) -> Vec<f64> {
        match self {
            HamiltonianFamily::Bulk(p) => {
                let b = d_vector(p, &KPoint::new(k[0], k[1], k[2]));
                vec![b.d0 - b.norm(), b.d0 + b.norm()]
            }
            HamiltonianFamily::Slab(s) => eigvalsh(&slab_bloch(s, k[0], k[1])),
        }
    }

    pub fn eigen(&self, k: &[f64]) -> EigenDecomposition {
        let (energies, vectors) = eigh(&self.matrix(k));
        EigenDecomposition { k: k.to_vec(), energies, vectors, gauge: GAUGE_MAX_REAL }
    }
}

pub(crate) fn from_matrix2(m: &Matrix2<C64>) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Energies and gauge-fixed eigenvectors (as columns) at one momentum.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub k: Vec<f64>,
    pub energies: Vec<f64>,
    pub vectors: CMatrix,
    pub gauge: &'static str,
}

impl EigenDecomposition {
    /// Eigenvector of band `n` (zero-based).
    pub fn state(&self, n: usize) -> Vec<C64> {
        self.vectors.column(n).iter().copied().collect()
    }

    /// Smallest gap between band `n` and its neighbours.
    pub fn gap_around(&self, n: usize) -> f64 {
        let e = &self.energies;
        let below = if n > 0 { e[n] - e[n - 1] } else { f64::INFINITY };
        let above = if n + 1 < e.len() { e[n + 1] - e[n] } else { f64::INFINITY };
        below.min(above)
    }
}

/// A list of momenta with an optional rectangular shape (row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub points: Vec<Vec<f64>>,
    pub shape: Vec<usize>,
}

impl KGrid {
    pub fn from_points(points: Vec<Vec<f64>>) -> KGrid {
        let n = points.len();
        KGrid { points, shape: vec![n] }
    }

    /// Piecewise-linear path through `corners` with `per_segment` points per
    /// leg (the final corner is included once).
    pub fn path(corners: &[Vec<f64>], per_segment: usize) -> KGrid {
        let mut points = Vec::new();
        for w in corners.windows(2) {
            for i in 0..per_segment {
                let t = i as f64 / per_segment as f64;
                points.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
        if let Some(last) = corners.last() {
            points.push(last.clone());
        }
        KGrid::from_points(points)
    }

    /// Uniform grid over the closed surface zone `[-pi/sqrt2, pi/sqrt2] x
    /// [-pi, pi]`, `k_par` varying slowest.
    pub fn surface(n_par: usize, n_z: usize) -> KGrid {
        let par = linspace(-SURFACE_PAR_HALF, SURFACE_PAR_HALF, n_par);
        let z = linspace(-PI, PI, n_z);
        let points = par.iter().flat_map(|&p| z.iter().map(move |&q| vec![p, q])).collect();
        KGrid { points, shape: vec![n_par, n_z] }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Energies of every band at every grid point.
#[derive(Clone, Debug)]
pub struct BandStructure {
    pub grid: KGrid,
    /// `energies[p][n]`, ascending in `n`.
    pub energies: Vec<Vec<f64>>,
    pub n_bands: usize,
}

impl BandStructure {
    pub fn band(&self, n: usize) -> Vec<f64> {
        self.energies.iter().map(|e| e[n]).collect()
    }
}

pub fn band_structure(family: &HamiltonianFamily, grid: &KGrid) -> BandStructure {
    let energies = grid.points.par_iter().map(|k| family.energies(k)).collect();
    BandStructure { grid: grid.clone(), energies, n_bands: family.dim() }
}
