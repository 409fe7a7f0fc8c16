//! Chern numbers of the `k_z`-reduced two-dimensional Hamiltonians and the
//! Dirac points that control them.

use std::f64::consts::{PI, SQRT_2, TAU};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::bands::DEGENERACY_TOL;
use crate::error::{Error, Result};
use crate::lattice::{bloch_jet, two_band_eigen, KPoint, ModelParams};
use crate::linalg::C64;

/// Default plaquette grid per reciprocal direction.
pub const CHERN_GRID: usize = 101;

/// Lower-band eigenvector of the cell-periodic Hamiltonian, and `|d|`.
fn lower_state(params: &ModelParams, k: &KPoint) -> ([C64; 2], f64) {
    let b = bloch_jet(params, k).data;
    // h_AB e^{-i kx}: the cell-origin gauge is periodic in the reciprocal lattice
    let h_ab = C64::new(b.d[0], -b.d[1]) * C64::from_polar(1.0, -k.x);
    let d = [h_ab.re, -h_ab.im, b.d[2]];
    let r = b.norm();
    match two_band_eigen(b.d0, d) {
        Some((_, v)) => (v[0], r),
        None => ([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 0.0),
    }
}

/// Lattice field-strength Chern number of the lower band at fixed `k_z`, on
/// an `n x n` grid spanning the reciprocal cell. Returns the integer and the
/// distance of the raw field-strength sum from it.
pub fn chern_reduced_with(params: &ModelParams, k_z: f64, n: usize) -> Result<(i32, f64)> {
    let n = n.max(3);
    // k = s1 b2 + s2 b1 with b1 = pi(1, 1), b2 = pi(1, -1): positively oriented
    let at = |i: usize, j: usize| {
        let (s1, s2) = (i as f64 / n as f64, j as f64 / n as f64);
        KPoint::new(PI * (s1 + s2), PI * (s2 - s1), k_z)
    };
    let mut states = Vec::with_capacity(n * n);
    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (u, r) = lower_state(params, &at(i, j));
            min_gap = min_gap.min(2.0 * r);
            states.push(u);
        }
    }
    if min_gap < DEGENERACY_TOL {
        return Err(Error::Gapless(min_gap));
    }
    let st = |i: usize, j: usize| &states[(i % n) * n + (j % n)];
    let link = |a: &[C64; 2], b: &[C64; 2]| {
        let z = a[0].conj() * b[0] + a[1].conj() * b[1];
        z / z.norm()
    };
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u1 = link(st(i, j), st(i + 1, j));
            let u2 = link(st(i + 1, j), st(i + 1, j + 1));
            let u3 = link(st(i, j + 1), st(i + 1, j + 1));
            let u4 = link(st(i, j), st(i, j + 1));
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    // A = i<u|du> gives <u_k|u_{k+dk}> = exp(-i A dk): the plaquette phase is -F
    let c = -total / TAU;
    let q = c.round();
    Ok((q as i32, (c - q).abs()))
}

/// Chern number of the lower band of the 2D Hamiltonian at fixed `k_z`.
pub fn chern_reduced(params: &ModelParams, k_z: f64) -> Result<i32> {
    Ok(chern_reduced_with(params, k_z, CHERN_GRID)?.0)
}

/// Closed-form lower-band Chern number of the `phi = 0` simplified model:
/// `C(k_z) = (sign[-m - 2J cos k_z + 2sqrt2 J'] - sign[-m - 2J cos k_z - 2sqrt2 J']) / 2`.
pub fn chern_closed_form(j: f64, j_prime: f64, mass: f64, k_z: f64) -> i32 {
    let base = -mass - 2.0 * j * k_z.cos();
    let w = 2.0 * SQRT_2 * j_prime;
    ((sign(base + w) - sign(base - w)) / 2) as i32
}

fn sign(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// A gapless point of the in-plane part `(d_x, d_y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracPoint {
    /// Folded `(k_x, k_y)`.
    pub k: [f64; 2],
    /// `sign det v`, with `v_ij = d d_i / d k_j` for `i, j in {x, y}`.
    pub winding: i32,
    /// `det v`.
    pub det: f64,
    /// `k_z`-independent part of `d_z` at this point.
    pub mass_offset: f64,
}

/// In-plane `(d_x, d_y)` and their Jacobian at `(kx, ky)`.
fn inplane(params: &ModelParams, kx: f64, ky: f64) -> (Vector2<f64>, Matrix2<f64>) {
    let jet = bloch_jet(params, &KPoint::new(kx, ky, 0.0));
    let g = jet.grad;
    (Vector2::new(jet.data.d[0], jet.data.d[1]), Matrix2::new(g[1][0], g[1][1], g[2][0], g[2][1]))
}

/// Amplitude `R` and phase of the `k_z` modulation of `d_z`,
/// `d_z(k) = mass_offset(kx, ky) + R cos(k_z + theta)`.
pub fn kz_modulation(params: &ModelParams) -> (f64, f64) {
    let w = params.t(6) - params.t(5);
    (w.norm(), w.arg())
}

fn mass_offset(params: &ModelParams, kx: f64, ky: f64) -> f64 {
    let (r, theta) = kz_modulation(params);
    let jet = bloch_jet(params, &KPoint::new(kx, ky, 0.0));
    jet.data.d[2] - r * theta.cos()
}

/// Distinct zeros of `(d_x, d_y)` in the folded two-dimensional zone, with
/// their windings. Sorted by descending `k_y`, then ascending `k_x`.
pub fn dirac_points_2d(params: &ModelParams) -> Result<Vec<DiracPoint>> {
    let n = 64;
    let h = TAU / n as f64;
    let at = |i: usize| -PI + h * i as f64;
    let f: Vec<f64> = (0..n * n).map(|p| inplane(params, at(p / n), at(p % n)).0.norm()).collect();
    let idx = |i: isize, j: isize| (i.rem_euclid(n as isize) as usize) * n + j.rem_euclid(n as isize) as usize;
    let scale = params.energy_scale().max(f64::MIN_POSITIVE);
    let mut found: Vec<DiracPoint> = Vec::new();
    for i in 0..n as isize {
        for j in 0..n as isize {
            let v = f[idx(i, j)];
            let is_min = (-1..=1).all(|di| (-1..=1).all(|dj| (di, dj) == (0, 0) || f[idx(i + di, j + dj)] >= v));
            if !is_min {
                continue;
            }
            let mut k = Vector2::new(at(i as usize), at(j as usize));
            let (mut d, mut jac) = inplane(params, k[0], k[1]);
            for _ in 0..100 {
                if d.norm() < 1e-15 {
                    break;
                }
                let Some(step) = jac.lu().solve(&(-d)) else { break };
                let mut lambda = 1.0;
                let mut moved = false;
                while lambda > 1e-6 {
                    let t = k + step * lambda;
                    let (dt, jt) = inplane(params, t[0], t[1]);
                    if dt.norm() < d.norm() {
                        k = t;
                        d = dt;
                        jac = jt;
                        moved = true;
                        break;
                    }
                    lambda *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            if d.norm() > 1e-10 * scale {
                continue;
            }
            let folded = KPoint::new(k[0], k[1], 0.0).fold();
            let kk = [folded.x, folded.y];
            let dup = found.iter().any(|p| {
                KPoint::new(p.k[0], p.k[1], 0.0).periodic_distance(&KPoint::new(kk[0], kk[1], 0.0)) < 1e-6
            });
            if dup {
                continue;
            }
            let det = jac.determinant();
            if det.abs() < 1e-10 {
                return Err(Error::InvalidParameter(format!("degenerate Dirac point at {kk:?}: det v = {det:.3e}")));
            }
            found.push(DiracPoint { k: kk, winding: det.signum() as i32, det, mass_offset: mass_offset(params, kk[0], kk[1]) });
        }
    }
    found.sort_by(|a, b| (-a.k[1], a.k[0]).partial_cmp(&(-b.k[1], b.k[0])).unwrap());
    Ok(found)
}

/// Brouwer-degree Chern number `sum_i winding_i sign(d_z(K_i, k_z)) / 2`.
pub fn chern_from_dirac_points(points: &[DiracPoint], params: &ModelParams, k_z: f64) -> i32 {
    let (r, theta) = kz_modulation(params);
    let s: i64 = points.iter().map(|p| p.winding as i64 * sign(p.mass_offset + r * (k_z + theta).cos())).sum();
    (s / 2) as i32
}
