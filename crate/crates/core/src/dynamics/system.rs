//! Emitters, the coupled emitter–bath operator and single-excitation states.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::linalg::{CsrMatrix, C64};

/// A two-level emitter coupled locally to one lattice site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmitterSpec {
    /// Site the emitter couples to.
    pub site: usize,
    /// Transition frequency.
    pub omega: f64,
    /// Coupling to its site.
    pub g: f64,
    /// Free-space decay rate, entering as `-i gamma0 / 2`.
    pub gamma0: f64,
}

impl EmitterSpec {
    pub fn new(site: usize, omega: f64, g: f64) -> EmitterSpec {
        EmitterSpec { site, omega, g, gamma0: 0.0 }
    }

    pub fn with_decay(mut self, gamma0: f64) -> EmitterSpec {
        self.gamma0 = gamma0;
        self
    }
}

/// The operator of the single-excitation sector. Emitter amplitudes come
/// first (indices `0..N`), then the lattice sites in lattice order.
#[derive(Clone, Debug)]
pub struct CoupledSystem {
    emitters: Vec<EmitterSpec>,
    n_sites: usize,
    matrix: CsrMatrix,
    hermitian: bool,
}

/// Couple `emitters` to `lattice`.
pub fn assemble(lattice: &FiniteLattice, emitters: &[EmitterSpec]) -> Result<CoupledSystem> {
    let mut seen = HashSet::new();
    for e in emitters {
        if e.site >= lattice.len() {
            return Err(Error::InvalidSite(e.site));
        }
        if !seen.insert(e.site) {
            return Err(Error::DuplicateSite(e.site));
        }
        if !(e.g >= 0.0 && e.gamma0 >= 0.0 && e.g.is_finite() && e.gamma0.is_finite() && e.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "emitter on site {}: need finite omega, g >= 0 and gamma0 >= 0",
                e.site
            )));
        }
    }
    let n = emitters.len();
    let bath = lattice.matrix().triplets();
    let mut t = Vec::with_capacity(bath.len() + 3 * n);
    for (j, e) in emitters.iter().enumerate() {
        t.push((j, j, C64::new(e.omega, -0.5 * e.gamma0)));
        t.push((j, n + e.site, C64::new(e.g, 0.0)));
        t.push((n + e.site, j, C64::new(e.g, 0.0)));
    }
    t.extend(bath.into_iter().map(|(r, c, v)| (r + n, c + n, v)));
    let hermitian = !lattice.has_losses() && emitters.iter().all(|e| e.gamma0 == 0.0);
    Ok(CoupledSystem { emitters: emitters.to_vec(), n_sites: lattice.len(), matrix: CsrMatrix::from_triplets(n + lattice.len(), t), hermitian })
}

impl CoupledSystem {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn n_emitters(&self) -> usize {
        self.emitters.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn emitters(&self) -> &[EmitterSpec] {
        &self.emitters
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// No absorbers and no free-space decay.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }
}

/// Single-excitation amplitudes `(C_1..C_N, C_r...)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub t: f64,
    n_emitters: usize,
    amplitudes: Vec<C64>,
}

impl SystemState {
    pub fn from_parts(t: f64, emitters: &[C64], sites: &[C64]) -> SystemState {
        let mut amplitudes = emitters.to_vec();
        amplitudes.extend_from_slice(sites);
        SystemState { t, n_emitters: emitters.len(), amplitudes }
    }

    pub fn from_amplitudes(t: f64, n_emitters: usize, amplitudes: Vec<C64>) -> Result<SystemState> {
        if n_emitters > amplitudes.len() {
            return Err(Error::InvalidParameter(format!("{n_emitters} emitters but only {} amplitudes", amplitudes.len())));
        }
        Ok(SystemState { t, n_emitters, amplitudes })
    }

    /// Emitter `j` excited, everything else empty.
    pub fn single_excited(system: &CoupledSystem, j: usize) -> Result<SystemState> {
        if j >= system.n_emitters() {
            return Err(Error::InvalidParameter(format!("emitter {j} does not exist ({} emitters)", system.n_emitters())));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); system.dim()];
        amplitudes[j] = C64::new(1.0, 0.0);
        Ok(SystemState { t: 0.0, n_emitters: system.n_emitters(), amplitudes })
    }

    /// One photon on site `r`, all emitters in the ground state.
    pub fn vacuum_photon(system: &CoupledSystem, r: usize) -> Result<SystemState> {
        if r >= system.n_sites() {
            return Err(Error::InvalidSite(r));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); system.dim()];
        amplitudes[system.n_emitters() + r] = C64::new(1.0, 0.0);
        Ok(SystemState { t: 0.0, n_emitters: system.n_emitters(), amplitudes })
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn emitters(&self) -> &[C64] {
        &self.amplitudes[..self.n_emitters]
    }

    pub fn sites(&self) -> &[C64] {
        &self.amplitudes[self.n_emitters..]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn emitter_populations(&self) -> Vec<f64> {
        self.emitters().iter().map(|z| z.norm_sqr()).collect()
    }

    /// `sum_r |C_r|^2`.
    pub fn photonic_population(&self) -> f64 {
        self.sites().iter().map(|z| z.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_finite, Geometry, ModelParams};

    fn lattice() -> FiniteLattice {
        build_finite(&ModelParams::simplified(1.0, 0.4, 0.0, 0.0), &Geometry::cubic(3, 3, 3)).unwrap()
    }

    #[test]
    fn operator_layout() {
        let l = lattice();
        let s = assemble(&l, &[EmitterSpec::new(4, 0.3, 0.5), EmitterSpec::new(7, -0.1, 0.2)]).unwrap();
        assert_eq!(s.dim(), l.len() + 2);
        let m = s.matrix();
        assert_eq!(m.get(0, 0), C64::new(0.3, 0.0));
        assert_eq!(m.get(0, 2 + 4), C64::new(0.5, 0.0));
        assert_eq!(m.get(2 + 7, 1), C64::new(0.2, 0.0));
        assert_eq!(m.get(5, 6), l.matrix().get(3, 4));
        assert!(s.is_hermitian());
        assert!(m.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        let l = lattice();
        let s = assemble(&l, &[EmitterSpec::new(0, 0.7, 0.0)]).unwrap();
        assert_eq!(s.matrix().row(0).count(), 1);
    }

    #[test]
    fn rejects_bad_emitters() {
        let l = lattice();
        assert!(matches!(
            assemble(&l, &[EmitterSpec::new(1, 0.0, 0.1), EmitterSpec::new(1, 0.0, 0.1)]),
            Err(Error::DuplicateSite(1))
        ));
        assert!(matches!(assemble(&l, &[EmitterSpec::new(27, 0.0, 0.1)]), Err(Error::InvalidSite(27))));
        assert!(assemble(&l, &[EmitterSpec::new(0, 0.0, -0.1)]).is_err());
        let lossy = assemble(&l, &[EmitterSpec::new(0, 0.0, 0.1).with_decay(0.2)]).unwrap();
        assert!(!lossy.is_hermitian());
        assert_eq!(lossy.matrix().get(0, 0), C64::new(0.0, -0.1));
    }

    #[test]
    fn presets() {
        let l = lattice();
        let s = assemble(&l, &[EmitterSpec::new(2, 0.0, 0.1)]).unwrap();
        let a = SystemState::single_excited(&s, 0).unwrap();
        assert_eq!(a.emitter_populations(), vec![1.0]);
        assert_eq!(a.photonic_population(), 0.0);
        let b = SystemState::vacuum_photon(&s, 5).unwrap();
        assert_eq!(b.sites()[5], C64::new(1.0, 0.0));
        assert!(SystemState::single_excited(&s, 1).is_err());
    }
}
