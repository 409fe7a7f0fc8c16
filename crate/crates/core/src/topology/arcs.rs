//! Fermi arcs: equifrequency contours of the slab edge band, traced by
//! marching squares on the periodic surface zone and attributed to a facet.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{fold_symmetric, slab_bloch, Facet, SlabSpec, SurfaceK, SURFACE_PAR_HALF};
use crate::linalg::{eigh, eigvalsh};

/// Default minimum facet weight for a contour point to count as part of an arc.
pub const ARC_LOCALIZATION: f64 = 0.5;

/// Periodic surface grid: `k_par = -pi/sqrt2 + i dpar`, `k_z = -pi + j dz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub n_par: usize,
    pub n_z: usize,
}

impl SurfaceGrid {
    pub fn new(n_par: usize, n_z: usize) -> SurfaceGrid {
        SurfaceGrid { n_par: n_par.max(2), n_z: n_z.max(2) }
    }

    pub fn d_par(&self) -> f64 {
        TAU / SQRT_2 / self.n_par as f64
    }

    pub fn d_z(&self) -> f64 {
        TAU / self.n_z as f64
    }

    pub fn point(&self, i: usize, j: usize) -> SurfaceK {
        SurfaceK::new(-SURFACE_PAR_HALF + i as f64 * self.d_par(), -PI + j as f64 * self.d_z())
    }

    pub fn len(&self) -> usize {
        self.n_par * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Energies of slab band `band` on the periodic grid, `k_par` slowest.
pub fn band_on_grid(spec: &SlabSpec, grid: &SurfaceGrid, band: usize) -> Vec<f64> {
    (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let k = grid.point(p / grid.n_z, p % grid.n_z);
            eigvalsh(&slab_bloch(spec, k.par, k.z))[band]
        })
        .collect()
}

/// Weight of an eigenvector in the first and last quarter of the rows.
pub fn facet_weights(spec: &SlabSpec, state: &[crate::linalg::C64]) -> (f64, f64) {
    let n = spec.n_s();
    let q = (n / 4).max(1);
    let first = state[..q].iter().map(|z| z.norm_sqr()).sum();
    let last = state[n - q..].iter().map(|z| z.norm_sqr()).sum();
    (first, last)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcPoint {
    /// Folded surface momentum.
    pub k: SurfaceK,
    /// Facet carrying the larger share of the state.
    pub facet: Facet,
    /// That share, in `[0, 1]`.
    pub localization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermiArcs {
    pub omega: f64,
    pub band: usize,
    pub grid: SurfaceGrid,
    /// Raw contours of `E_band = omega`; closed contours repeat their first
    /// point at the end.
    pub contours: Vec<Vec<ArcPoint>>,
}

impl FermiArcs {
    /// Facet-localized pieces of the contours: maximal runs of points with
    /// localization at least `threshold` on a single facet.
    pub fn arcs(&self, threshold: f64) -> Vec<Vec<ArcPoint>> {
        let mut out = Vec::new();
        for c in &self.contours {
            let mut run: Vec<ArcPoint> = Vec::new();
            for p in c {
                let keep = p.localization >= threshold;
                let same = run.last().map_or(true, |q| q.facet == p.facet);
                if !keep || !same {
                    if run.len() >= 2 {
                        out.push(std::mem::take(&mut run));
                    }
                    run.clear();
                }
                if keep {
                    run.push(*p);
                }
            }
            if run.len() >= 2 {
                out.push(run);
            }
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = &ArcPoint> {
        self.contours.iter().flatten()
    }

    /// Shortest distance on the surface torus from `k` to the polylines in
    /// `lines`.
    pub fn distance_to(lines: &[Vec<ArcPoint>], k: &SurfaceK) -> f64 {
        let mut best = f64::INFINITY;
        for line in lines {
            for w in line.windows(2) {
                best = best.min(segment_distance(&w[0].k, &w[1].k, k));
            }
            if line.len() == 1 {
                best = best.min(line[0].k.periodic_distance(k));
            }
        }
        best
    }
}

fn torus_delta(a: &SurfaceK, b: &SurfaceK) -> [f64; 2] {
    [fold_symmetric(b.par - a.par, SURFACE_PAR_HALF), fold_symmetric(b.z - a.z, PI)]
}

fn segment_distance(a: &SurfaceK, b: &SurfaceK, k: &SurfaceK) -> f64 {
    let ab = torus_delta(a, b);
    let ak = torus_delta(a, k);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ak[0] * ab[0] + ak[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let dx = ak[0] - t * ab[0];
    let dy = ak[1] - t * ab[1];
    (dx * dx + dy * dy).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeId {
    /// `(i, j) - (i + 1, j)`
    Par(usize, usize),
    /// `(i, j) - (i, j + 1)`
    Z(usize, usize),
}

/// Marching squares on a periodic grid of `values` (`k_par` slowest);
/// returns polylines of unfolded momenta.
fn march(grid: &SurfaceGrid, values: &[f64], level: f64) -> Vec<Vec<SurfaceK>> {
    let (np, nz) = (grid.n_par, grid.n_z);
    let f = |i: usize, j: usize| values[(i % np) * nz + (j % nz)] - level;
    let canon = |e: EdgeId| match e {
        EdgeId::Par(i, j) => EdgeId::Par(i % np, j % nz),
        EdgeId::Z(i, j) => EdgeId::Z(i % np, j % nz),
    };
    let crossing = |e: EdgeId| -> SurfaceK {
        let (a, b, base, dir) = match e {
            EdgeId::Par(i, j) => (f(i, j), f(i + 1, j), grid.point(i % np, j % nz), [grid.d_par(), 0.0]),
            EdgeId::Z(i, j) => (f(i, j), f(i, j + 1), grid.point(i % np, j % nz), [0.0, grid.d_z()]),
        };
        let t = a / (a - b);
        SurfaceK::new(base.par + t * dir[0], base.z + t * dir[1])
    };
    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..np {
        for j in 0..nz {
            let s = [f(i, j) >= 0.0, f(i + 1, j) >= 0.0, f(i + 1, j + 1) >= 0.0, f(i, j + 1) >= 0.0];
            let e = [EdgeId::Par(i, j), EdgeId::Z(i + 1, j), EdgeId::Par(i, j + 1), EdgeId::Z(i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| s[k] != s[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((canon(e[cut[0]]), canon(e[cut[1]]))),
                4 => {
                    let centre = 0.25 * (f(i, j) + f(i + 1, j) + f(i + 1, j + 1) + f(i, j + 1)) >= 0.0;
                    if centre == s[0] {
                        segments.push((canon(e[0]), canon(e[1])));
                        segments.push((canon(e[2]), canon(e[3])));
                    } else {
                        segments.push((canon(e[3]), canon(e[0])));
                        segments.push((canon(e[1]), canon(e[2])));
                    }
                }
                _ => {}
            }
        }
    }
    let mut incident: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(s);
        incident.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    // open chains first (start at an edge touched once), then cycles
    let mut starts: Vec<EdgeId> = segments.iter().flat_map(|&(a, b)| [a, b]).filter(|e| incident[e].len() == 1).collect();
    starts.extend(segments.iter().map(|&(a, _)| a));
    for start in starts {
        let Some(&first) = incident[&start].iter().find(|&&s| !used[s]) else { continue };
        let mut chain = vec![start];
        let mut current = start;
        let mut seg = Some(first);
        while let Some(s) = seg {
            used[s] = true;
            let (a, b) = segments[s];
            let next = if a == current { b } else { a };
            chain.push(next);
            current = next;
            seg = incident[&current].iter().copied().find(|&t| !used[t]);
        }
        // unwrap consecutive points so that each polyline is continuous
        let mut pts: Vec<SurfaceK> = Vec::with_capacity(chain.len());
        for e in chain {
            let p = crossing(e);
            let p = match pts.last() {
                Some(prev) => {
                    let d = torus_delta(prev, &p);
                    SurfaceK::new(prev.par + d[0], prev.z + d[1])
                }
                None => p,
            };
            pts.push(p);
        }
        lines.push(pts);
    }
    lines
}

/// Equifrequency contours `E_eb(k) = omega` of the edge band on a periodic
/// `n_par x n_z` grid, with every point tagged by facet.
pub fn fermi_arcs(spec: &SlabSpec, omega: f64, n_par: usize, n_z: usize) -> Result<FermiArcs> {
    fermi_contours(spec, spec.edge_band(), omega, n_par, n_z)
}

/// As [`fermi_arcs`] for an arbitrary slab band.
pub fn fermi_contours(spec: &SlabSpec, band: usize, omega: f64, n_par: usize, n_z: usize) -> Result<FermiArcs> {
    let grid = SurfaceGrid::new(n_par, n_z);
    let values = band_on_grid(spec, &grid, band);
    let lines = march(&grid, &values, omega);
    let contours = lines
        .into_par_iter()
        .map(|line| {
            line.into_iter()
                .map(|k| {
                    let kf = k.fold();
                    let (_, u) = eigh(&slab_bloch(spec, kf.par, kf.z));
                    let state: Vec<_> = u.column(band).iter().copied().collect();
                    let (first, last) = facet_weights(spec, &state);
                    let (facet, localization) =
                        if first >= last { (Facet::MinusPerp, first) } else { (Facet::PlusPerp, last) };
                    ArcPoint { k: kf, facet, localization }
                })
                .collect()
        })
        .collect();
    Ok(FermiArcs { omega, band, grid, contours })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ModelParams, Sublattice};

    #[test]
    fn marching_squares_traces_a_circle() {
        let grid = SurfaceGrid::new(64, 64);
        let mut v = Vec::new();
        for i in 0..64 {
            for j in 0..64 {
                let k = grid.point(i, j);
                v.push(k.par * k.par + k.z * k.z);
            }
        }
        let lines = march(&grid, &v, 1.0);
        assert_eq!(lines.len(), 1);
        let l = &lines[0];
        assert!(l.first().unwrap().periodic_distance(l.last().unwrap()) < 1e-12);
        for p in l {
            assert!(((p.par * p.par + p.z * p.z).sqrt() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn no_crossing_far_above_spectrum() {
        let s = SlabSpec::new(ModelParams::simplified(1.0, 0.4, 0.0, 0.0), 9, Sublattice::A).unwrap();
        let arcs = fermi_arcs(&s, 100.0, 24, 24).unwrap();
        assert!(arcs.contours.is_empty());
    }

    #[test]
    fn segment_distance_wraps() {
        let a = SurfaceK::new(0.0, PI - 0.1);
        let b = SurfaceK::new(0.0, -PI + 0.1);
        let k = SurfaceK::new(0.05, PI);
        assert!((segment_distance(&a, &b, &k) - 0.05).abs() < 1e-12);
    }
}
