//! Weyl-node search (`|d(k)| = 0`) and monopole charges.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::berry::berry_flux;
use crate::error::{Error, Result};
use crate::lattice::{bloch_jet, d_vector, KPoint, ModelParams};

/// Seed grid points per axis over `[-pi, pi)^3`.
pub const SEED_GRID: usize = 64;
/// Folded nodes closer than this (units of `1/a`) are merged.
pub const MERGE_TOL: f64 = 1e-4;
/// Default radius of the flux sphere.
pub const CHARGE_RADIUS: f64 = 0.1;
/// Quadrature nodes in `cos(theta)` for the flux sphere; doubled up to
/// [`CHARGE_NODES_MAX`] while the flux is not quantised.
const CHARGE_NODES: usize = 48;
const CHARGE_NODES_MAX: usize = 768;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylNode {
    /// Folded node position.
    pub k: KPoint,
    /// Monopole charge of the lower band.
    pub chirality: i32,
    /// Degenerate frequency `d0(k_W)`.
    pub frequency: f64,
    /// Linearised dispersion `M_ij = dd_i/dk_j`.
    pub velocity: [[f64; 3]; 3],
    /// `|d|` at the refined position.
    pub residual: f64,
    /// True when the node sits within `10 tol` of the zone boundary, where
    /// the folded representative depends on tie-breaking.
    pub near_boundary: bool,
}

fn jacobian(params: &ModelParams, k: &KPoint) -> (Vector3<f64>, Matrix3<f64>) {
    let jet = bloch_jet(params, k);
    let j = jet.jacobian();
    (Vector3::from(jet.data.d), Matrix3::from_fn(|r, c| j[r][c]))
}

/// Damped Newton iteration on `d(k) = 0`.
fn refine(params: &ModelParams, seed: KPoint) -> Option<(KPoint, f64)> {
    let mut k = seed;
    let (mut d, mut jac) = jacobian(params, &k);
    let mut r = d.norm();
    for _ in 0..100 {
        if r < 1e-15 {
            break;
        }
        let step = jac.lu().solve(&(-d))?;
        if !step.iter().all(|s| s.is_finite()) {
            return None;
        }
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda > 1e-6 {
            let trial = KPoint::new(k.x + lambda * step[0], k.y + lambda * step[1], k.z + lambda * step[2]);
            let (dt, jt) = jacobian(params, &trial);
            if dt.norm() < r {
                k = trial;
                d = dt;
                jac = jt;
                r = d.norm();
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Some((k, r))
}

/// Local minima of `|d|^2` on the periodic seed grid.
fn seeds(params: &ModelParams, n: usize) -> Vec<KPoint> {
    let h = TAU / n as f64;
    let at = |i: usize| -PI + h * i as f64;
    let mut f = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let b = d_vector(params, &KPoint::new(at(i), at(j), at(l)));
                f[(i * n + j) * n + l] = b.norm();
            }
        }
    }
    let idx = |i: isize, j: isize, l: isize| {
        let w = |a: isize| a.rem_euclid(n as isize) as usize;
        (w(i) * n + w(j)) * n + w(l)
    };
    let mut out = Vec::new();
    for i in 0..n as isize {
        for j in 0..n as isize {
            for l in 0..n as isize {
                let v = f[idx(i, j, l)];
                let mut is_min = true;
                'nb: for di in -1..=1 {
                    for dj in -1..=1 {
                        for dl in -1..=1 {
                            if (di, dj, dl) != (0, 0, 0) && f[idx(i + di, j + dj, l + dl)] < v {
                                is_min = false;
                                break 'nb;
                            }
                        }
                    }
                }
                if is_min {
                    out.push(KPoint::new(at(i as usize), at(j as usize), at(l as usize)));
                }
            }
        }
    }
    out
}

/// Chirality of a node from the Berry flux through a sphere of `radius`.
/// Nearly annihilating nodes are strongly anisotropic and concentrate the
/// curvature in narrow caps, so the quadrature is refined until the flux
/// is an integer.
pub fn weyl_charge_with_radius(params: &ModelParams, k: &KPoint, radius: f64) -> Result<i32> {
    let mut n = CHARGE_NODES;
    loop {
        let flux = berry_flux(params, k, radius, n)?;
        let q = flux.round();
        if (flux - q).abs() < 0.1 {
            return Ok(q as i32);
        }
        if n >= CHARGE_NODES_MAX {
            return Err(Error::NonQuantizedFlux(flux));
        }
        n *= 2;
    }
}

/// Chirality of `node` from the Berry flux through a small sphere.
pub fn weyl_charge(params: &ModelParams, node: &WeylNode) -> Result<i32> {
    weyl_charge_with_radius(params, &node.k, CHARGE_RADIUS)
}

/// All distinct roots of `|d(k)| = 0` in the folded zone, refined to
/// `|d| < tol J`, with chiralities from Berry-flux quadrature.
pub fn find_weyl_points(params: &ModelParams, tol: f64) -> Result<Vec<WeylNode>> {
    let scale = params.energy_scale().max(f64::MIN_POSITIVE);
    let mut found: Vec<KPoint> = Vec::new();
    for s in seeds(params, SEED_GRID) {
        let Some((k, r)) = refine(params, s) else { continue };
        if r >= tol * scale {
            continue;
        }
        let k = k.fold();
        if !found.iter().any(|q| q.periodic_distance(&k) < MERGE_TOL) {
            found.push(k);
        }
    }
    found.sort_by(|a, b| (a.x, a.y, a.z).partial_cmp(&(b.x, b.y, b.z)).unwrap());

    let mut nodes = Vec::with_capacity(found.len());
    for (i, k) in found.iter().enumerate() {
        let nearest = found
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.periodic_distance(k))
            .fold(f64::INFINITY, f64::min);
        let radius = CHARGE_RADIUS.min(0.25 * nearest);
        let chirality = weyl_charge_with_radius(params, k, radius)?;
        let jet = bloch_jet(params, k);
        let det = Matrix3::from_fn(|r, c| jet.jacobian()[r][c]).determinant();
        if det != 0.0 && (det.signum() as i32) != chirality {
            log::warn!("node at {k:?}: flux charge {chirality} disagrees with sign(det M) = {}", det.signum());
        }
        let near_boundary = k.boundary_margin() < 10.0 * tol;
        if near_boundary {
            log::warn!("Weyl node at {k:?} lies within {:.1e} of the zone boundary", 10.0 * tol);
        }
        nodes.push(WeylNode {
            k: *k,
            chirality,
            frequency: jet.data.d0,
            velocity: jet.jacobian(),
            residual: jet.data.norm(),
            near_boundary,
        });
    }
    Ok(nodes)
}
