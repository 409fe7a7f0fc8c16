//! Concurrence, angular emission profiles and the dynamical timescales.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::system::SystemState;
use crate::error::{Error, Result};
use crate::lattice::{Facet, FiniteLattice};
use crate::linalg::C64;

/// `2 |C_1 C_2^*|`.
pub fn concurrence_of(c1: C64, c2: C64) -> f64 {
    2.0 * (c1 * c2.conj()).norm()
}

/// Two-emitter concurrence of a single-excitation state.
pub fn concurrence(state: &SystemState) -> Result<f64> {
    match state.emitters() {
        [a, b] => Ok(concurrence_of(*a, *b)),
        e => Err(Error::EmitterCount { expected: 2, found: e.len() }),
    }
}

/// Annulus used by [`angular_profile`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub radius: f64,
    pub width: f64,
    pub n_bins: usize,
}

/// Photonic population on `facet` inside the annulus around `center`,
/// binned by polar angle `alpha in [0, 2 pi)` measured from the first
/// in-plane axis. Bins are normalised by the total photonic population, so
/// they sum to the fraction of it found in the annulus.
pub fn angular_profile(state: &SystemState, lattice: &FiniteLattice, center: usize, facet: Facet, annulus: &Annulus) -> Result<Vec<f64>> {
    if annulus.n_bins == 0 || !(annulus.radius > 0.0) || !(annulus.width > 0.0) {
        return Err(Error::InvalidParameter(format!("bad annulus {annulus:?}")));
    }
    if state.sites().len() != lattice.len() {
        return Err(Error::InvalidParameter("state does not belong to this lattice".into()));
    }
    let c = lattice.facet_plane_position(center, facet);
    let (lo, hi) = (annulus.radius - 0.5 * annulus.width, annulus.radius + 0.5 * annulus.width);
    let total = state.photonic_population();
    let mut bins = vec![0.0; annulus.n_bins];
    let mut count = 0usize;
    let mut outer = 0.0f64;
    let mut nearest_edge = f64::INFINITY;
    for id in lattice.facet_sites(facet) {
        let p = lattice.facet_plane_position(id, facet);
        let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
        let r = dx.hypot(dy);
        outer = outer.max(r);
        if r < lo || r > hi {
            continue;
        }
        count += 1;
        nearest_edge = nearest_edge.min(r);
        let alpha = dy.atan2(dx).rem_euclid(TAU);
        let b = ((alpha / TAU * annulus.n_bins as f64) as usize).min(annulus.n_bins - 1);
        bins[b] += state.sites()[id].norm_sqr();
    }
    if count == 0 {
        return Err(Error::EmptyAnnulus);
    }
    let facet_half = extent_from(lattice, center, facet);
    if hi > facet_half {
        log::warn!("annulus (outer radius {hi:.2}) reaches the facet border ({facet_half:.2} from the centre)");
    }
    if total > 0.0 {
        bins.iter_mut().for_each(|b| *b /= total);
    }
    Ok(bins)
}

/// Distance from `center` to the nearest border of `facet`.
fn extent_from(lattice: &FiniteLattice, center: usize, facet: Facet) -> f64 {
    let c = lattice.facet_plane_position(center, facet);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for id in lattice.facet_sites(facet) {
        let p = lattice.facet_plane_position(id, facet);
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (0..2).map(|a| (c[a] - lo[a]).min(hi[a] - c[a])).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// The emitter decays before the photon returns (`tau < T_R`).
    Dissipative,
    /// Round trips are faster than the decay (`T_R <= tau`).
    Cavity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timescales {
    /// Markovian decay time `~ J / g^2`.
    pub tau: f64,
    /// Round-trip time `~ l / (J a)`.
    pub round_trip: f64,
    pub regime: Regime,
}

/// Order-of-magnitude decay and round-trip times for coupling `g` and path
/// length `path` (units of `J` and `a`).
pub fn timescales(g: f64, path: f64, j: f64) -> Timescales {
    let tau = if g > 0.0 { j / (g * g) } else { f64::INFINITY };
    let round_trip = path / j;
    let regime = if tau < round_trip { Regime::Dissipative } else { Regime::Cavity };
    Timescales { tau, round_trip, regime }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_finite, Geometry, ModelParams, Sublattice};

    #[test]
    fn concurrence_values() {
        let s = |a: C64, b: C64| SystemState::from_parts(0.0, &[a, b], &[]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(concurrence(&s(C64::new(1.0, 0.0), C64::new(0.0, 0.0))).unwrap(), 0.0);
        assert!((concurrence(&s(C64::new(r, 0.0), C64::new(r, 0.0))).unwrap() - 1.0).abs() < 1e-15);
        assert!((concurrence(&s(C64::new(0.6, 0.0), C64::new(0.0, 0.5))).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(
            concurrence(&SystemState::from_parts(0.0, &[C64::new(1.0, 0.0)], &[])),
            Err(Error::EmitterCount { expected: 2, found: 1 })
        ));
    }

    fn block() -> FiniteLattice {
        build_finite(&ModelParams::simplified(1.0, 0.4, 0.0, 0.0), &Geometry::rect_block(61, 3, 87, [Sublattice::A; 2])).unwrap()
    }

    #[test]
    fn isotropic_state_gives_flat_profile() {
        let l = block();
        let n = l.len();
        let state = SystemState::from_parts(0.0, &[], &vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
        let center = l.facet_center(Facet::MinusPerp).unwrap();
        let p = angular_profile(&state, &l, center, Facet::MinusPerp, &Annulus { radius: 30.0, width: 8.0, n_bins: 8 }).unwrap();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        assert!(p.iter().all(|x| (x - mean).abs() < 0.05 * mean), "{p:?}");
    }

    #[test]
    fn centre_population_leaves_annulus_empty() {
        let l = block();
        let center = l.facet_center(Facet::MinusPerp).unwrap();
        let mut sites = vec![C64::new(0.0, 0.0); l.len()];
        sites[center] = C64::new(1.0, 0.0);
        let state = SystemState::from_parts(0.0, &[], &sites);
        let a = Annulus { radius: 20.0, width: 2.0, n_bins: 36 };
        let p = angular_profile(&state, &l, center, Facet::MinusPerp, &a).unwrap();
        assert!(p.iter().all(|&x| x == 0.0));
        let tiny = Annulus { radius: 0.1, width: 0.1, n_bins: 4 };
        assert!(matches!(angular_profile(&state, &l, center, Facet::MinusPerp, &tiny), Err(Error::EmptyAnnulus)));
    }

    #[test]
    fn timescale_regimes() {
        let a = timescales(0.5, 100.0, 1.0);
        assert_eq!((a.tau, a.round_trip, a.regime), (4.0, 100.0, Regime::Dissipative));
        let b = timescales(0.1, 40.0, 1.0);
        assert!((b.tau - 100.0).abs() < 1e-9);
        assert_eq!(b.regime, Regime::Cavity);
        assert_eq!(timescales(0.3, 0.0, 1.0).round_trip, 0.0);
    }
}
