//! Berry curvature of the bulk bands (closed two-band form and general
//! sum over states) and of the slab bands.
//!
//! Conventions: `A = i <u|grad u>`, `Omega_{mu nu} = d_mu A_nu - d_nu A_mu`,
//! evaluated as
//! `Omega^n_{mu nu} = -2 Im sum_{m != n} <n|d_mu H|m><m|d_nu H|n> / (E_n - E_m)^2`.
//! For `H = d0 + d.sigma` the lower band carries
//! `Omega^- = +d.(d_mu d x d_nu d) / (2|d|^3)` and `Omega^+ = -Omega^-`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bands::{HamiltonianFamily, KGrid, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::lattice::{bloch_jet, KPoint, ModelParams, SlabSpec};
use crate::linalg::{eigh, CMatrix, C64};

/// One of the two bulk bands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    Lower,
    Upper,
}

impl Band {
    pub fn index(self) -> usize {
        match self {
            Band::Lower => 0,
            Band::Upper => 1,
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bulk Berry curvature vector `(Omega_yz, Omega_zx, Omega_xy)` from the
/// closed two-band formula.
pub fn berry_curvature_bulk(params: &ModelParams, k: &KPoint, band: Band) -> Result<[f64; 3]> {
    let jet = bloch_jet(params, k);
    let d = jet.data.d;
    let r = jet.data.norm();
    if 2.0 * r < DEGENERACY_TOL {
        return Err(Error::NearDegeneracy { k: k.as_array().to_vec(), gap: 2.0 * r });
    }
    // columns of the Jacobian: dd/dk_x, dd/dk_y, dd/dk_z
    let col = |a: usize| [jet.grad[1][a], jet.grad[2][a], jet.grad[3][a]];
    let (dx, dy, dz) = (col(0), col(1), col(2));
    let s = match band {
        Band::Lower => 0.5 / (r * r * r),
        Band::Upper => -0.5 / (r * r * r),
    };
    Ok([s * dot(d, cross(dy, dz)), s * dot(d, cross(dz, dx)), s * dot(d, cross(dx, dy))])
}

/// `Omega^n_{ab}` from an eigensystem and two derivative matrices.
pub fn curvature_from_eigensystem(energies: &[f64], vectors: &CMatrix, da: &CMatrix, db: &CMatrix, n: usize) -> Result<f64> {
    let un = vectors.column(n);
    let a_n = da * un;
    let b_n = db * un;
    let mut acc = 0.0;
    for m in 0..energies.len() {
        if m == n {
            continue;
        }
        let gap = energies[n] - energies[m];
        if gap.abs() < DEGENERACY_TOL {
            return Err(Error::NearDegeneracy { k: vec![], gap: gap.abs() });
        }
        let um = vectors.column(m);
        let x: C64 = a_n.dotc(&um); // <n|dH_a|m>
        let y: C64 = um.dotc(&b_n); // <m|dH_b|n>
        acc += (x * y).im / (gap * gap);
    }
    Ok(-2.0 * acc)
}

/// Bulk Berry curvature vector from the general sum over states.
pub fn berry_curvature_bulk_sum(params: &ModelParams, k: &KPoint, band: Band) -> Result<[f64; 3]> {
    let fam = HamiltonianFamily::Bulk(params.clone());
    let ka = k.as_array();
    let (e, u) = eigh(&fam.matrix(&ka));
    let d: Vec<CMatrix> = (0..3).map(|a| fam.derivative(&ka, a)).collect();
    let n = band.index();
    let omega = |a: usize, b: usize| {
        curvature_from_eigensystem(&e, &u, &d[a], &d[b], n).map_err(|err| match err {
            Error::NearDegeneracy { gap, .. } => Error::NearDegeneracy { k: ka.to_vec(), gap },
            other => other,
        })
    };
    Ok([omega(1, 2)?, omega(2, 0)?, omega(0, 1)?])
}

/// Flux of the lower-band curvature out of a sphere of `radius` around
/// `center`, in units of `2 pi` (Chern units). Gauss–Legendre-free midpoint
/// quadrature in `cos(theta)` and `phi` with `n` nodes per direction.
pub fn berry_flux(params: &ModelParams, center: &KPoint, radius: f64, n: usize) -> Result<f64> {
    let n_theta = n.max(8);
    let n_phi = 2 * n_theta;
    let dmu = 2.0 / n_theta as f64;
    let dphi = TAU / n_phi as f64;
    let mut total = 0.0;
    for i in 0..n_theta {
        let mu = -1.0 + (i as f64 + 0.5) * dmu;
        let s = (1.0 - mu * mu).sqrt();
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * dphi;
            let nrm = [s * phi.cos(), s * phi.sin(), mu];
            let k = KPoint::new(center.x + radius * nrm[0], center.y + radius * nrm[1], center.z + radius * nrm[2]);
            let om = berry_curvature_bulk(params, &k, Band::Lower)?;
            total += dot(om, nrm) * radius * radius * dmu * dphi;
        }
    }
    Ok(total / TAU)
}

/// Surface Berry curvature `Omega_{par,z}` of slab band `n` (zero-based).
pub fn berry_curvature_surface(spec: &SlabSpec, k_par: f64, k_z: f64, n: usize) -> Result<f64> {
    let fam = HamiltonianFamily::Slab(spec.clone());
    let k = [k_par, k_z];
    let (e, u) = eigh(&fam.matrix(&k));
    let da = fam.derivative(&k, 0);
    let db = fam.derivative(&k, 1);
    curvature_from_eigensystem(&e, &u, &da, &db, n).map_err(|err| match err {
        Error::NearDegeneracy { gap, .. } => Error::NearDegeneracy { k: k.to_vec(), gap },
        other => other,
    })
}

/// Surface Berry curvature of every slab band at one momentum. Degenerate
/// bands are reported as `NaN`.
pub fn berry_curvature_surface_all(spec: &SlabSpec, k_par: f64, k_z: f64) -> Vec<f64> {
    let fam = HamiltonianFamily::Slab(spec.clone());
    let k = [k_par, k_z];
    let (e, u) = eigh(&fam.matrix(&k));
    let da = fam.derivative(&k, 0);
    let db = fam.derivative(&k, 1);
    (0..e.len())
        .map(|n| curvature_from_eigensystem(&e, &u, &da, &db, n).unwrap_or(f64::NAN))
        .collect()
}

/// Surface Berry curvature of band `n` over a `(k_par, k_z)` grid; points
/// where the band is degenerate hold `NaN`.
pub fn surface_berry_map(spec: &SlabSpec, grid: &KGrid, n: usize) -> Vec<f64> {
    grid.points
        .par_iter()
        .map(|k| berry_curvature_surface(spec, k[0], k[1], n).unwrap_or(f64::NAN))
        .collect()
}

/// Summary statistics used to detect hot lines: `(max |Omega|, median |Omega|)`
/// over the finite entries.
pub fn hot_line_stats(values: &[f64]) -> (f64, f64) {
    let mut a: Vec<f64> = values.iter().filter(|v| v.is_finite()).map(|v| v.abs()).collect();
    if a.is_empty() {
        return (0.0, 0.0);
    }
    a.sort_by(f64::total_cmp);
    let median = if a.len() % 2 == 1 { a[a.len() / 2] } else { 0.5 * (a[a.len() / 2 - 1] + a[a.len() / 2]) };
    (*a.last().unwrap(), median)
}
