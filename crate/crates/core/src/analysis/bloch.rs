//! Projection of a real-space snapshot onto the slab Bloch modes,
//! `C_nk = [U(k)^dagger V(k)]_n` with `V_i(k)` the row-resolved Fourier sum.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fourier::Array3;
use crate::error::{Error, Result};
use crate::lattice::{slab_bloch, Facet, FiniteLattice, Geometry, SlabSpec};
use crate::linalg::{eigh, C64};
use crate::topology::SurfaceGrid;

/// Fraction of the photonic population on the `par`/`z` borders above which
/// the mapping is flagged as affected by reflections.
pub const BORDER_WARNING: f64 = 1e-4;

/// `|C_nk|^2` on the surface grid commensurate with the snapshot geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPopulation {
    pub grid: SurfaceGrid,
    pub n_bands: usize,
    /// Snapshot time.
    pub time: f64,
    /// `populations[k * n_bands + n]`, `k = i_par * n_z + i_z`.
    pub populations: Vec<f64>,
    /// Slab energies in the same layout.
    pub energies: Vec<f64>,
}

impl BlochPopulation {
    pub fn population(&self, k: usize, n: usize) -> f64 {
        self.populations[k * self.n_bands + n]
    }

    pub fn total(&self) -> f64 {
        self.populations.iter().sum()
    }

    /// `sum_n |C_nk|^2` per grid point.
    pub fn band_summed(&self) -> Vec<f64> {
        self.populations.chunks(self.n_bands).map(|c| c.iter().sum()).collect()
    }

    /// Fraction of the mapped weight carried by modes with
    /// `|E_n(k) - omega| <= window`.
    pub fn fraction_near(&self, omega: f64, window: f64) -> f64 {
        let near: f64 = self
            .populations
            .iter()
            .zip(&self.energies)
            .filter(|(_, e)| (*e - omega).abs() <= window)
            .map(|(p, _)| p)
            .sum();
        near / self.total()
    }
}

/// Map the site amplitudes of a [`Geometry::Block`] snapshot onto the Bloch
/// modes of `spec`. The block's `perp` rows must match the slab rows.
pub fn bloch_map(lattice: &FiniteLattice, sites: &[C64], time: f64, spec: &SlabSpec) -> Result<BlochPopulation> {
    let Geometry::Block { n_par, n_perp, n_z, terminations } = *lattice.geometry() else {
        return Err(Error::GridMismatch("Bloch mapping needs a block geometry".into()));
    };
    if n_perp != spec.n_s() || terminations[0] != spec.termination() {
        return Err(Error::GridMismatch(format!(
            "block of {n_perp} rows ({:?}-terminated) vs slab of {} rows ({:?}-terminated)",
            terminations[0],
            spec.n_s(),
            spec.termination()
        )));
    }
    if sites.len() != lattice.len() {
        return Err(Error::GridMismatch(format!("{} amplitudes for {} sites", sites.len(), lattice.len())));
    }
    if lattice.params() != &spec.params {
        log::warn!("snapshot lattice and slab use different model parameters");
    }
    let total: f64 = sites.iter().map(|z| z.norm_sqr()).sum();
    let border: f64 = [Facet::MinusPar, Facet::PlusPar, Facet::MinusZ, Facet::PlusZ]
        .iter()
        .flat_map(|&f| lattice.facet_sites(f))
        .map(|i| sites[i].norm_sqr())
        .sum();
    if total > 0.0 && border > BORDER_WARNING * total {
        log::warn!("{:.2e} of the photonic population sits on the block borders; reflections may distort the map", border / total);
    }

    let grid = SurfaceGrid::new(n_par, n_z);
    let mut a = Array3::zeros([n_perp, n_par, n_z]);
    for id in 0..lattice.len() {
        let [i, j, z] = lattice.block_coords(id).expect("block geometry");
        let idx = a.index(i, j, z);
        a.data[idx] = sites[id];
    }
    let k_par: Vec<f64> = (0..n_par).map(|i| grid.point(i, 0).par).collect();
    let k_z: Vec<f64> = (0..n_z).map(|j| grid.point(0, j).z).collect();
    let x_par: Vec<f64> = (0..n_par).map(|j| SQRT_2 * j as f64).collect();
    let x_z: Vec<f64> = (0..n_z).map(|z| z as f64).collect();
    let mut v = a.dft_axis(2, &x_z, &k_z).dft_axis(1, &x_par, &k_par);
    // row offset (u mod 2)/sqrt2 along e_par and the 1/sqrt(N) normalisation
    let norm = 1.0 / ((n_par * n_z) as f64).sqrt();
    let off = if terminations[0] == crate::lattice::Sublattice::A { 0 } else { 1 };
    for i in 0..n_perp {
        let shift = ((i + off) % 2) as f64 / SQRT_2;
        for (p, &kp) in k_par.iter().enumerate() {
            let phase = C64::from_polar(norm, -kp * shift);
            for q in 0..n_z {
                let idx = v.index(i, p, q);
                v.data[idx] *= phase;
            }
        }
    }
    let n_s = spec.n_s();
    let per_k: Vec<(Vec<f64>, Vec<f64>)> = (0..grid.len())
        .into_par_iter()
        .map(|kk| {
            let (p, q) = (kk / n_z, kk % n_z);
            let k = grid.point(p, q);
            let (energies, u) = eigh(&slab_bloch(spec, k.par, k.z));
            let pops = (0..n_s)
                .map(|n| {
                    let c: C64 = (0..n_s).map(|i| u[(i, n)].conj() * v.data[v.index(i, p, q)]).sum();
                    c.norm_sqr()
                })
                .collect();
            (pops, energies)
        })
        .collect();
    let mut populations = Vec::with_capacity(grid.len() * n_s);
    let mut energies = Vec::with_capacity(grid.len() * n_s);
    for (p, e) in per_k {
        populations.extend(p);
        energies.extend(e);
    }
    Ok(BlochPopulation { grid, n_bands: n_s, time, populations, energies })
}
