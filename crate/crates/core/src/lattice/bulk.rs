//! Two-band Bloch Hamiltonian of the bulk lattice, `H(k) = d0(k) + d(k).sigma`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::kpoint::KPoint;
use super::params::ModelParams;
use crate::linalg::{c, C64};

/// Coefficients of the identity and Pauli matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochData {
    pub d0: f64,
    pub d: [f64; 3],
}

impl BlochData {
    pub fn norm(&self) -> f64 {
        let [x, y, z] = self.d;
        (x * x + y * y + z * z).sqrt()
    }
}

/// `d0`, `d` and their first derivatives. `grad[0]` is `grad d0`,
/// `grad[1..4]` the gradients of `dx, dy, dz`; each row indexes `kx, ky, kz`.
#[derive(Clone, Copy, Debug)]
pub struct BlochJet {
    pub data: BlochData,
    pub grad: [[f64; 3]; 4],
}

impl BlochJet {
    /// Jacobian `dd_i/dk_j` of the Pauli vector.
    pub fn jacobian(&self) -> [[f64; 3]; 3] {
        [self.grad[1], self.grad[2], self.grad[3]]
    }
}

/// Evaluate `d0`, `d` and their gradients at `k` using the site-position
/// Fourier convention.
pub fn bloch_jet(p: &ModelParams, k: &KPoint) -> BlochJet {
    let (kx, ky, kz) = (k.x, k.y, k.z);
    let kp = kx + ky;
    let km = kx - ky;
    let h = |j: usize| p.hopping(j);
    let (a1, f1) = (h(1).amplitude, h(1).phase);
    let (a2, f2) = (h(2).amplitude, h(2).phase);
    let (a3, f3) = (h(3).amplitude, h(3).phase);
    let (a4, f4) = (h(4).amplitude, h(4).phase);
    let (a5, f5) = (h(5).amplitude, h(5).phase);
    let (a6, f6) = (h(6).amplitude, h(6).phase);
    let (a7, f7) = (h(7).amplitude, h(7).phase);
    let (a8, f8) = (h(8).amplitude, h(8).phase);
    let (a9, f9) = (h(9).amplitude, h(9).phase);
    let (a10, f10) = (h(10).amplitude, h(10).phase);

    let (s1, c1) = (kx + f1).sin_cos();
    let (s2, c2) = (kx - f2).sin_cos();
    let (s3, c3) = (ky + f3).sin_cos();
    let (s4, c4) = (ky - f4).sin_cos();
    let (s5, c5) = (kz + f5).sin_cos();
    let (s6, c6) = (kz + f6).sin_cos();
    let (s7, c7) = (kp + f7).sin_cos();
    let (s8, c8) = (km + f8).sin_cos();
    let (s9, c9) = (kp + f9).sin_cos();
    let (s10, c10) = (km + f10).sin_cos();

    let dx = -(a1 * c1 + a2 * c2 + a3 * c3 + a4 * c4);
    let dy = a1 * s1 - a2 * s2 + a3 * s3 - a4 * s4;

    // Sublattice-diagonal next-nearest-neighbour sums on A (p) and B (q).
    let pa = a7 * c7 + a8 * c8;
    let qb = a9 * c9 + a10 * c10;
    let dpa = [-a7 * s7 - a8 * s8, -a7 * s7 + a8 * s8];
    let dqb = [-a9 * s9 - a10 * s10, -a9 * s9 + a10 * s10];

    let d0 = p.onsite - a5 * c5 - a6 * c6 - pa - qb;
    let dz = -p.mass - a5 * c5 + a6 * c6 - pa + qb;

    let grad = [
        [-dpa[0] - dqb[0], -dpa[1] - dqb[1], a5 * s5 + a6 * s6],
        [a1 * s1 + a2 * s2, a3 * s3 + a4 * s4, 0.0],
        [a1 * c1 - a2 * c2, a3 * c3 - a4 * c4, 0.0],
        [-dpa[0] + dqb[0], -dpa[1] + dqb[1], a5 * s5 - a6 * s6],
    ];
    BlochJet { data: BlochData { d0, d: [dx, dy, dz] }, grad }
}

pub fn d_vector(p: &ModelParams, k: &KPoint) -> BlochData {
    bloch_jet(p, k).data
}

/// `d0 + d.sigma` as a 2x2 matrix in the (A, B) basis.
pub fn pauli_matrix(d0: f64, d: [f64; 3]) -> Matrix2<C64> {
    let [x, y, z] = d;
    Matrix2::new(c(d0 + z, 0.0), c(x, -y), c(x, y), c(d0 - z, 0.0))
}

/// Bulk Bloch Hamiltonian with orbitals phased by their site positions.
pub fn bloch_bulk(p: &ModelParams, k: &KPoint) -> Matrix2<C64> {
    let b = d_vector(p, k);
    pauli_matrix(b.d0, b.d)
}

/// Derivative `dH/dk_axis` of [`bloch_bulk`].
pub fn bloch_bulk_derivative(p: &ModelParams, k: &KPoint, axis: usize) -> Matrix2<C64> {
    let jet = bloch_jet(p, k);
    pauli_matrix(jet.grad[0][axis], [jet.grad[1][axis], jet.grad[2][axis], jet.grad[3][axis]])
}

/// Bulk Bloch Hamiltonian with orbitals phased by their cell origin (B sits
/// at `+x` inside the cell). Strictly periodic under every reciprocal
/// lattice vector; unitarily equivalent to [`bloch_bulk`].
pub fn bloch_bulk_periodic(p: &ModelParams, k: &KPoint) -> Matrix2<C64> {
    let mut h = bloch_bulk(p, k);
    let phase = C64::from_polar(1.0, -k.x);
    h[(0, 1)] *= phase;
    h[(1, 0)] = h[(0, 1)].conj();
    h
}

/// Analytic eigenpairs of `d0 + d.sigma`: energies `[lower, upper]` and the
/// matching normalised eigenvectors. Returns `None` at `|d| = 0`.
pub fn two_band_eigen(d0: f64, d: [f64; 3]) -> Option<([f64; 2], [[C64; 2]; 2])> {
    let [x, y, z] = d;
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return None;
    }
    let normalize = |v: [C64; 2]| {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    let lower = if z >= 0.0 {
        normalize([c(-x, y), c(z + r, 0.0)])
    } else {
        normalize([c(r - z, 0.0), c(-x, -y)])
    };
    let upper = if z >= 0.0 {
        normalize([c(z + r, 0.0), c(x, y)])
    } else {
        normalize([c(x, -y), c(r - z, 0.0)])
    };
    Some(([d0 - r, d0 + r], [lower, upper]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn d_vector_at_gamma() {
        let b = d_vector(&ModelParams::simplified(1.0, 0.0, 0.0, 0.0), &KPoint::new(0.0, 0.0, 0.0));
        assert!(close(b.d[0], -3.0, 1e-15) && close(b.d[1], 1.0, 1e-15) && close(b.d[2], -2.0, 1e-15));
        assert_eq!(b.d0, 0.0);
    }

    #[test]
    fn d_vector_matches_reduced_formula() {
        // closed form of the simplified model, written out independently
        let reduced = |j: f64, jp: f64, m: f64, phi: f64, k: [f64; 3]| {
            [
                -j * ((k[0] + phi).cos() + k[0].sin() + 2.0 * k[1].cos()),
                j * ((k[0] + phi).sin() + k[0].cos()),
                -m - 2.0 * j * k[2].cos() + 4.0 * jp * k[0].sin() * k[1].sin(),
            ]
        };
        for &(j, jp, m, phi) in &[(1.0, 0.0, 0.0, 0.0), (1.0, 0.4, 0.0, FRAC_PI_2), (0.7, 1.3, -0.6, 2.1)] {
            let p = ModelParams::simplified(j, jp, m, phi).with_onsite(0.25);
            for i in 0..50 {
                let t = i as f64;
                let k = [(0.37 * t).sin() * 3.0, (1.1 * t).cos() * 3.0, 0.53 * t - 10.0];
                let b = d_vector(&p, &KPoint::new(k[0], k[1], k[2]));
                let r = reduced(j, jp, m, phi, k);
                for a in 0..3 {
                    assert!(close(b.d[a], r[a], 1e-13), "component {a} at {k:?}");
                }
                assert!(close(b.d0, 0.25, 1e-13));
            }
        }
    }

    #[test]
    fn weyl_node_root() {
        let b = d_vector(&ModelParams::simplified(1.0, 0.0, 0.0, 0.0), &KPoint::new(-FRAC_PI_4, FRAC_PI_2, FRAC_PI_2));
        assert!(b.norm() < 1e-15);
    }

    #[test]
    fn phi_half_pi_collapse() {
        let p = ModelParams::simplified(1.0, 0.4, 0.0, FRAC_PI_2);
        for kz in [-3.0, -1.0, 0.0, 0.5, 2.9] {
            let b = d_vector(&p, &KPoint::new(FRAC_PI_2, FRAC_PI_2, kz));
            assert!(b.d[0].abs() < 1e-15 && b.d[1].abs() < 1e-15);
            assert!(close(b.d[2], -2.0 * kz.cos() + 1.6, 1e-14));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = ModelParams::new(
            std::array::from_fn(|j| crate::lattice::Hopping::new(0.3 + 0.1 * j as f64, 0.7 * j as f64)),
            0.4,
            0.1,
        )
        .unwrap();
        let k = KPoint::new(0.3, -1.2, 2.2);
        let jet = bloch_jet(&p, &k);
        let h = 1e-6;
        for axis in 0..3 {
            let mut kp = k.as_array();
            let mut km = k.as_array();
            kp[axis] += h;
            km[axis] -= h;
            let bp = d_vector(&p, &KPoint::new(kp[0], kp[1], kp[2]));
            let bm = d_vector(&p, &KPoint::new(km[0], km[1], km[2]));
            let fd0 = (bp.d0 - bm.d0) / (2.0 * h);
            assert!(close(jet.grad[0][axis], fd0, 1e-8));
            for comp in 0..3 {
                let fd = (bp.d[comp] - bm.d[comp]) / (2.0 * h);
                assert!(close(jet.grad[comp + 1][axis], fd, 1e-8), "d{comp}/dk{axis}");
            }
        }
    }

    #[test]
    fn two_band_eigen_is_consistent() {
        for d in [[0.3, -0.2, 0.9], [0.3, -0.2, -0.9], [0.0, 0.0, -1.0], [1.0, 2.0, 0.0]] {
            let (e, v) = two_band_eigen(0.5, d).unwrap();
            let h = pauli_matrix(0.5, d);
            for n in 0..2 {
                let x = nalgebra::Vector2::new(v[n][0], v[n][1]);
                let r = h * x - x * c(e[n], 0.0);
                assert!(r.norm() < 1e-14);
            }
        }
        assert!(two_band_eigen(0.0, [0.0; 3]).is_none());
    }

    #[test]
    fn periodic_gauge_is_periodic() {
        let p = ModelParams::simplified(1.0, 0.3, 0.2, 0.9);
        let k = KPoint::new(0.4, -0.8, 1.3);
        let h = bloch_bulk_periodic(&p, &k);
        for g in crate::lattice::RECIPROCAL_VECTORS {
            let kg = KPoint::new(k.x + g[0], k.y + g[1], k.z + g[2]);
            assert!((bloch_bulk_periodic(&p, &kg) - h).norm() < 1e-12);
        }
        let _ = PI;
    }
}
