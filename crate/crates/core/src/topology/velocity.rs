//! Group velocities `grad_k E_n(k)` by Richardson-checked central differences.

use super::bands::{HamiltonianFamily, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::lattice::{bloch_jet, KPoint, ModelParams};

/// Base finite-difference step (units of `1/a`).
pub const VELOCITY_STEP: f64 = 1e-3;
/// Maximum allowed disagreement between the `h` and `h/2` estimates.
pub const RICHARDSON_TOL: f64 = 1e-4;

fn gap_at(family: &HamiltonianFamily, k: &[f64], band: usize) -> f64 {
    let e = family.energies(k);
    let below = if band > 0 { e[band] - e[band - 1] } else { f64::INFINITY };
    let above = if band + 1 < e.len() { e[band + 1] - e[band] } else { f64::INFINITY };
    below.min(above)
}

fn central(family: &HamiltonianFamily, k: &[f64], band: usize, axis: usize, h: f64) -> f64 {
    let mut kp = k.to_vec();
    let mut km = k.to_vec();
    kp[axis] += h;
    km[axis] -= h;
    (family.energies(&kp)[band] - family.energies(&km)[band]) / (2.0 * h)
}

/// Gradient of band `band` (zero-based) at `k`; the returned value is the
/// Richardson extrapolation of the `h` and `h/2` central differences.
pub fn group_velocity(family: &HamiltonianFamily, k: &[f64], band: usize) -> Result<Vec<f64>> {
    if band >= family.dim() || k.len() != family.k_dim() {
        return Err(Error::InvalidParameter(format!("band {band} / momentum of length {} not valid here", k.len())));
    }
    let gap = gap_at(family, k, band);
    if gap < DEGENERACY_TOL {
        return Err(Error::NearDegeneracy { k: k.to_vec(), gap });
    }
    let h = VELOCITY_STEP;
    let mut v = Vec::with_capacity(k.len());
    for axis in 0..k.len() {
        let coarse = central(family, k, band, axis, h);
        let fine = central(family, k, band, axis, h / 2.0);
        if (coarse - fine).abs() > RICHARDSON_TOL {
            return Err(Error::NearDegeneracy { k: k.to_vec(), gap });
        }
        v.push((4.0 * fine - coarse) / 3.0);
    }
    Ok(v)
}

/// Analytic bulk velocity `grad d0 +- M^T d/|d|`.
pub fn bulk_velocity_analytic(params: &ModelParams, k: &KPoint, upper: bool) -> Result<[f64; 3]> {
    let jet = bloch_jet(params, k);
    let r = jet.data.norm();
    if 2.0 * r < DEGENERACY_TOL {
        return Err(Error::NearDegeneracy { k: k.as_array().to_vec(), gap: 2.0 * r });
    }
    let s = if upper { 1.0 } else { -1.0 };
    let d = jet.data.d;
    Ok(std::array::from_fn(|a| {
        jet.grad[0][a] + s * (0..3).map(|i| d[i] * jet.grad[i + 1][a]).sum::<f64>() / r
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{SlabSpec, Sublattice};

    #[test]
    fn matches_analytic_bulk_velocity() {
        let p = ModelParams::simplified(1.0, 0.4, 0.2, 0.0);
        let f = HamiltonianFamily::Bulk(p.clone());
        for k in [[0.1, 0.2, 0.3], [1.0, -2.0, 0.5], [-0.4, 0.9, 2.8]] {
            let v = group_velocity(&f, &k, 1).unwrap();
            let a = bulk_velocity_analytic(&p, &KPoint::new(k[0], k[1], k[2]), true).unwrap();
            for i in 0..3 {
                assert!((v[i] - a[i]).abs() < 1e-6, "{v:?} vs {a:?}");
            }
        }
    }

    /// The phi = 0, J' = 0 spectrum is not even under k -> -k but under
    /// inversion through K0 = (pi/4, 0, 0); velocities at K0 +- q are opposite.
    #[test]
    fn opposite_velocities_at_inversion_pairs() {
        let f = HamiltonianFamily::Bulk(ModelParams::simplified(1.0, 0.0, 0.3, 0.0));
        let k0 = [std::f64::consts::FRAC_PI_4, 0.0, 0.0];
        for q in [[0.3, 0.7, 1.1], [1.2, -0.4, 2.0], [-0.5, 0.2, -0.9]] {
            let kp: Vec<f64> = (0..3).map(|i| k0[i] + q[i]).collect();
            let km: Vec<f64> = (0..3).map(|i| k0[i] - q[i]).collect();
            assert!((f.energies(&kp)[1] - f.energies(&km)[1]).abs() < 1e-12);
            let a = group_velocity(&f, &kp, 1).unwrap();
            let b = group_velocity(&f, &km, 1).unwrap();
            for i in 0..3 {
                assert!((a[i] + b[i]).abs() < 1e-8);
            }
        }
        // whereas the plain k -> -k partner generally has a different energy
        let k = [0.3, 0.7, 1.1];
        assert!((f.energies(&k)[1] - f.energies(&[-0.3, -0.7, -1.1])[1]).abs() > 1e-3);
    }

    #[test]
    fn stationary_at_band_maximum() {
        // E_+ of the bare model peaks at (pi/4, 0, pi) with |d|^2 = 12 + 4 sqrt2
        let f = HamiltonianFamily::Bulk(ModelParams::simplified(1.0, 0.0, 0.0, 0.0));
        let grid: Vec<[f64; 3]> = (0..4096)
            .map(|i| {
                let g = |j: usize| -std::f64::consts::PI + std::f64::consts::TAU * j as f64 / 16.0;
                [g(i / 256), g((i / 16) % 16), g(i % 16)]
            })
            .collect();
        let best = grid.iter().max_by(|a, b| f.energies(&a[..])[1].total_cmp(&f.energies(&b[..])[1])).unwrap();
        assert!((f.energies(&best[..])[1] - (12.0 + 4.0 * std::f64::consts::SQRT_2).sqrt()).abs() < 1e-12);
        let v = group_velocity(&f, &best[..], 1).unwrap();
        assert!(v.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-4);
    }

    #[test]
    fn slab_velocity_runs() {
        let s = SlabSpec::new(ModelParams::simplified(1.0, 0.4, 0.0, 0.0), 9, Sublattice::A).unwrap();
        let v = group_velocity(&HamiltonianFamily::Slab(s), &[0.4, 1.0], 4).unwrap();
        assert_eq!(v.len(), 2);
    }
}
