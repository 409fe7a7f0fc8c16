//! Phase classification of the `(m, J')` plane.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::chern::{chern_reduced, dirac_points_2d, kz_modulation, DiracPoint};
use crate::error::{Error, Result};
use crate::lattice::ModelParams;

/// Default distance to a phase boundary (units of `J`) below which the
/// classification is refused.
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    /// Band (normal) insulator.
    BI,
    /// Quantum (anomalous) Hall insulator.
    QHI,
    /// One pair of Weyl nodes.
    WSM1,
    /// Two pairs of Weyl nodes.
    WSM2,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PhaseLabel::BI => "BI",
            PhaseLabel::QHI => "QHI",
            PhaseLabel::WSM1 => "WSM1",
            PhaseLabel::WSM2 => "WSM2",
        };
        f.write_str(s)
    }
}

/// Classification together with the data it was derived from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseInfo {
    pub label: PhaseLabel,
    /// Lower-band Chern number at `k_z = pi/2` for gapped phases.
    pub chern: Option<i32>,
    /// Distance `min_i ||c_i| - R|` to the nearest boundary.
    pub margin: f64,
    pub dirac_points: Vec<DiracPoint>,
}

/// Whether the `k_z` line through each Dirac point hosts a pair of Weyl
/// nodes: `|c_i| < R` where `d_z = c_i + R cos(k_z + theta)` on that line.
pub fn node_families(params: &ModelParams, points: &[DiracPoint]) -> (Vec<bool>, f64) {
    let (r, _) = kz_modulation(params);
    let hosts = points.iter().map(|p| p.mass_offset.abs() < r).collect();
    let margin = points.iter().map(|p| (p.mass_offset.abs() - r).abs()).fold(f64::INFINITY, f64::min);
    (hosts, margin)
}

pub fn classify_phase_detailed(params: &ModelParams, tol: f64) -> Result<PhaseInfo> {
    let points = dirac_points_2d(params)?;
    let (hosts, margin) = node_families(params, &points);
    if margin < tol {
        return Err(Error::OnBoundary(margin));
    }
    let count = hosts.iter().filter(|&&h| h).count();
    let (label, chern) = match count {
        0 => {
            let c = chern_reduced(params, FRAC_PI_2)?;
            (if c == 0 { PhaseLabel::BI } else { PhaseLabel::QHI }, Some(c))
        }
        1 => (PhaseLabel::WSM1, None),
        _ => (PhaseLabel::WSM2, None),
    };
    Ok(PhaseInfo { label, chern, margin, dirac_points: points })
}

/// Phase of `params`; errors with [`Error::OnBoundary`] within
/// [`BOUNDARY_TOL`] of a transition.
pub fn classify_phase(params: &ModelParams) -> Result<PhaseLabel> {
    Ok(classify_phase_detailed(params, BOUNDARY_TOL)?.label)
}

/// Analytic phase of the `phi = 0` simplified model from
/// `|m +- 2 sqrt2 J'| < 2J`; `None` on a boundary.
pub fn analytic_phase(j: f64, j_prime: f64, mass: f64, tol: f64) -> Option<PhaseLabel> {
    let w = 2.0 * std::f64::consts::SQRT_2 * j_prime;
    let a = (mass + w).abs();
    let b = (mass - w).abs();
    if (a - 2.0 * j).abs() < tol || (b - 2.0 * j).abs() < tol {
        return None;
    }
    Some(match (a < 2.0 * j, b < 2.0 * j) {
        (true, true) => PhaseLabel::WSM2,
        (true, false) | (false, true) => PhaseLabel::WSM1,
        // both pairs annihilated: Chern 1 iff the two masses have opposite sign
        (false, false) => {
            if (mass + w).signum() != (mass - w).signum() {
                PhaseLabel::QHI
            } else {
                PhaseLabel::BI
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        let p = |jp, m| ModelParams::simplified(1.0, jp, m, 0.0);
        assert_eq!(classify_phase(&p(0.0, 0.0)).unwrap(), PhaseLabel::WSM2);
        let qhi = classify_phase_detailed(&p(1.0, 0.0), BOUNDARY_TOL).unwrap();
        assert_eq!((qhi.label, qhi.chern), (PhaseLabel::QHI, Some(1)));
        let bi = classify_phase_detailed(&p(0.0, 10.0), BOUNDARY_TOL).unwrap();
        assert_eq!((bi.label, bi.chern), (PhaseLabel::BI, Some(0)));
        assert_eq!(classify_phase(&p(0.5, 1.0)).unwrap(), PhaseLabel::WSM1);
        assert_eq!(classify_phase(&p(0.4, 0.0)).unwrap(), PhaseLabel::WSM2);
        assert!(matches!(classify_phase(&p(0.0, 2.0)), Err(Error::OnBoundary(_))));
    }

    #[test]
    fn agrees_with_analytic_conditions() {
        for i in 0..9 {
            for j in 0..9 {
                let (m, jp) = (0.45 * i as f64, 0.23 * j as f64);
                let Some(expect) = analytic_phase(1.0, jp, m, 1e-6) else { continue };
                assert_eq!(classify_phase(&ModelParams::simplified(1.0, jp, m, 0.0)).unwrap(), expect, "m={m} J'={jp}");
            }
        }
    }
}
