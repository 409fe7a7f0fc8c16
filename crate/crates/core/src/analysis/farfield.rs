//! Far-field form factor of an emitter array,
//! `f = |(R x d) x R|^2 |sum_j C_j exp(-i k0 R.r_j)|^2`.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Dipole orientation, wavelength and angular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarFieldSpec {
    /// Unit dipole vector in the `(perp, par, z)` frame.
    pub dipole: [f64; 3],
    /// Transition wavelength in units of `a`.
    pub wavelength: f64,
    /// Elevation angles in `[-pi/2, pi/2]`.
    pub theta: Vec<f64>,
    /// Azimuths in `[0, 2 pi)`.
    pub phi: Vec<f64>,
}

impl FarFieldSpec {
    /// Uniform grid: `n_theta` elevations including both poles and `n_phi`
    /// periodic azimuths. The dipole is normalised.
    pub fn new(dipole: [f64; 3], wavelength: f64, n_theta: usize, n_phi: usize) -> Result<FarFieldSpec> {
        let norm = dipole.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("dipole orientation must be a non-zero vector".into()));
        }
        if !(wavelength > 0.0) {
            return Err(Error::InvalidParameter(format!("wavelength must be positive, got {wavelength}")));
        }
        if n_theta < 2 || n_phi == 0 {
            return Err(Error::InvalidParameter("far-field grid needs n_theta >= 2 and n_phi >= 1".into()));
        }
        let theta = (0..n_theta).map(|i| -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (n_theta - 1) as f64).collect();
        let phi = (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect();
        Ok(FarFieldSpec { dipole: dipole.map(|x| x / norm), wavelength, theta, phi })
    }

    pub fn k0(&self) -> f64 {
        TAU / self.wavelength
    }
}

/// `R = cos(theta) cos(phi) e_perp + cos(theta) sin(phi) e_par + sin(theta) e_z`.
pub fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.cos() * phi.cos(), theta.cos() * phi.sin(), theta.sin()]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Form factor on the grid of `spec`, `values[i_theta * n_phi + i_phi]`.
/// Positions are in the `(perp, par, z)` frame in units of `a`; the
/// dimensional prefactor is dropped.
pub fn far_field(amplitudes: &[C64], positions: &[[f64; 3]], spec: &FarFieldSpec) -> Result<Vec<f64>> {
    if amplitudes.is_empty() || amplitudes.len() != positions.len() {
        return Err(Error::InvalidParameter(format!("{} amplitudes for {} emitter positions", amplitudes.len(), positions.len())));
    }
    let k0 = spec.k0();
    let n_phi = spec.phi.len();
    Ok((0..spec.theta.len() * n_phi)
        .into_par_iter()
        .map(|idx| {
            let r = direction(spec.theta[idx / n_phi], spec.phi[idx % n_phi]);
            // |(R x d) x R|^2 = |d|^2 - (R.d)^2 for unit R
            let rd = dot(&r, &spec.dipole);
            let pattern = (1.0 - rd * rd).max(0.0);
            let array: C64 = amplitudes.iter().zip(positions).map(|(c, p)| c * C64::from_polar(1.0, -k0 * dot(&r, p))).sum();
            pattern * array.norm_sqr()
        })
        .collect())
}

/// `1 - s_1^2 / sum s_i^2` of the `n_theta x n_phi` map: zero for a product
/// `f(theta) g(phi)`, positive otherwise.
pub fn separability_defect(values: &[f64], n_theta: usize, n_phi: usize) -> f64 {
    let m = DMatrix::from_row_slice(n_theta, n_phi, values);
    let s = m.singular_values();
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0.0;
    }
    let top = s.iter().copied().fold(0.0, f64::max);
    1.0 - top * top / total
}
