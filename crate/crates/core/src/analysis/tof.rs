//! Time-of-flight quasimomentum distribution
//! `n(k) = |sum_r C_r exp(-i k.r)|^2` and its column integrals.

use std::f64::consts::{SQRT_2, TAU};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fourier::Array3;
use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::linalg::C64;

/// Momentum axes in the rotated frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Perp,
    Par,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::Perp => 0,
            Axis::Par => 1,
            Axis::Z => 2,
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Axis> {
        match s {
            "perp" => Ok(Axis::Perp),
            "par" => Ok(Axis::Par),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidAxis(other.to_string())),
        }
    }
}

/// Periodic product grid of `(k_perp, k_par, k_z)` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub axes: [Vec<f64>; 3],
    /// Spacing of each axis, used as the integration weight.
    pub spacing: [f64; 3],
}

impl MomentumGrid {
    /// Axes with uniform spacing; `spacing` must match the axis values.
    pub fn new(axes: [Vec<f64>; 3], spacing: [f64; 3]) -> MomentumGrid {
        MomentumGrid { axes, spacing }
    }

    /// Grid over one full period of every axis, fine enough for the
    /// discrete Plancherel identity on `lattice` (one point per lattice plane
    /// spanned along each axis).
    pub fn full_cell(lattice: &FiniteLattice) -> MomentumGrid {
        let span = |f: &dyn Fn(usize) -> i64| {
            let (lo, hi) = (0..lattice.len()).map(f).fold((i64::MAX, i64::MIN), |(a, b), x| (a.min(x), b.max(x)));
            (hi - lo + 1).max(1) as usize
        };
        let m_u = span(&|i| lattice.site(i).u());
        let m_v = span(&|i| lattice.site(i).v());
        let m_z = span(&|i| lattice.site(i).z());
        let axis = |m: usize, period: f64| -> (Vec<f64>, f64) {
            let d = period / m as f64;
            ((0..m).map(|a| -0.5 * period + a as f64 * d).collect(), d)
        };
        let (kp, dp) = axis(m_u, TAU * SQRT_2);
        let (kq, dq) = axis(m_v, TAU * SQRT_2);
        let (kz, dz) = axis(m_z, TAU);
        MomentumGrid { axes: [kp, kq, kz], spacing: [dp, dq, dz] }
    }

    /// Full `k_perp` period of `lattice` combined with the given `(k_par, k_z)`
    /// axes, e.g. those of a surface grid.
    pub fn with_surface_axes(lattice: &FiniteLattice, k_par: Vec<f64>, d_par: f64, k_z: Vec<f64>, d_z: f64) -> MomentumGrid {
        let full = MomentumGrid::full_cell(lattice);
        MomentumGrid { axes: [full.axes[0].clone(), k_par, k_z], spacing: [full.spacing[0], d_par, d_z] }
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.axes[0].len(), self.axes[1].len(), self.axes[2].len()]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub grid: MomentumGrid,
    /// `values[(a * n_par + b) * n_z + c]`.
    pub values: Vec<f64>,
}

impl MomentumDistribution {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// A 2D map over two momentum axes, row-major in the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Map2d {
    pub axes: [Vec<f64>; 2],
    pub values: Vec<f64>,
}

impl Map2d {
    pub fn shape(&self) -> [usize; 2] {
        [self.axes[0].len(), self.axes[1].len()]
    }
}

/// `n(k)` of the photonic amplitudes `sites` on `grid`; positions are taken
/// in the `(perp, par, z)` frame.
pub fn momentum_distribution(lattice: &FiniteLattice, sites: &[C64], grid: &MomentumGrid) -> Result<MomentumDistribution> {
    if sites.len() != lattice.len() {
        return Err(Error::GridMismatch(format!("{} amplitudes for {} sites", sites.len(), lattice.len())));
    }
    let bound = |f: &dyn Fn(usize) -> i64| (0..lattice.len()).map(f).fold((i64::MAX, i64::MIN), |(a, b), x| (a.min(x), b.max(x)));
    let (u0, u1) = bound(&|i| lattice.site(i).u());
    let (v0, v1) = bound(&|i| lattice.site(i).v());
    let (z0, z1) = bound(&|i| lattice.site(i).z());
    let shape = [(u1 - u0 + 1) as usize, (v1 - v0 + 1) as usize, (z1 - z0 + 1) as usize];
    let mut a = Array3::zeros(shape);
    for (id, &c) in sites.iter().enumerate() {
        let s = lattice.site(id);
        let idx = a.index((s.u() - u0) as usize, (s.v() - v0) as usize, (s.z() - z0) as usize);
        a.data[idx] = c;
    }
    let coords = |lo: i64, n: usize, scale: f64| -> Vec<f64> { (0..n).map(|i| (lo + i as i64) as f64 * scale).collect() };
    let r = 1.0 / SQRT_2;
    let f = a
        .dft_axis(2, &coords(z0, shape[2], 1.0), &grid.axes[2])
        .dft_axis(1, &coords(v0, shape[1], r), &grid.axes[1])
        .dft_axis(0, &coords(u0, shape[0], r), &grid.axes[0]);
    Ok(MomentumDistribution { grid: grid.clone(), values: f.data.iter().map(|z| z.norm_sqr()).collect() })
}

/// Integrate `nk` over `axis` with the periodic trapezoidal rule (every
/// point weighted by the axis spacing).
pub fn column_integrate(nk: &MomentumDistribution, axis: Axis) -> Map2d {
    let s = nk.grid.shape();
    let ax = axis.index();
    let keep: Vec<usize> = (0..3).filter(|&a| a != ax).collect();
    let (n0, n1) = (s[keep[0]], s[keep[1]]);
    let w = nk.grid.spacing[ax];
    let mut values = vec![0.0; n0 * n1];
    for a in 0..s[0] {
        for b in 0..s[1] {
            for c in 0..s[2] {
                let idx = [a, b, c];
                values[idx[keep[0]] * n1 + idx[keep[1]]] += w * nk.values[(a * s[1] + b) * s[2] + c];
            }
        }
    }
    Map2d { axes: [nk.grid.axes[keep[0]].clone(), nk.grid.axes[keep[1]].clone()], values }
}

/// Zero-lag normalised cross-correlation (Pearson coefficient) of two maps of
/// equal shape.
pub fn cross_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::GridMismatch(format!("maps of {} and {} points", a.len(), b.len())));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Periodic bilinear interpolation of a map given on uniform axes with the
/// periods `periods` (first point at `axes[i][0]`).
pub fn interpolate_periodic(map: &Map2d, periods: [f64; 2], x: f64, y: f64) -> f64 {
    let [n0, n1] = map.shape();
    let pos = |v: f64, axis: &[f64], period: f64, n: usize| -> (usize, usize, f64) {
        let t = (v - axis[0]).rem_euclid(period) / period * n as f64;
        let i = (t.floor() as usize) % n;
        (i, (i + 1) % n, t - t.floor())
    };
    let (i0, i1, fx) = pos(x, &map.axes[0], periods[0], n0);
    let (j0, j1, fy) = pos(y, &map.axes[1], periods[1], n1);
    let at = |i: usize, j: usize| map.values[i * n1 + j];
    (1.0 - fx) * ((1.0 - fy) * at(i0, j0) + fy * at(i0, j1)) + fx * ((1.0 - fy) * at(i1, j0) + fy * at(i1, j1))
}

/// Period of the `k_par` and `k_z` axes of surface maps.
pub const SURFACE_PERIODS: [f64; 2] = [TAU / SQRT_2, TAU];
