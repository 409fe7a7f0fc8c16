//! Named parameter sets and geometries of the reference experiments.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{assemble, CoupledSystem, EmitterSpec};
use crate::error::{Error, Result};
use crate::lattice::{apply_absorbers, build_finite, Facet, FiniteLattice, Geometry, ModelParams, SlabSpec, Sublattice};

/// Reference points of the `(m, J')` phase diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Configuration {
    /// `J' = 0, m = 0`: WSM2 with vanishing surface Berry curvature.
    I,
    /// `J' = 0.4 J, m = 0`: WSM2 with hot lines; the imaging configuration.
    II,
    /// `J' = 0.5 J, m = J`: WSM1.
    III,
    /// `phi = pi/2, J' = 0.4 J, m = 0`: the negative-refraction configuration.
    Chiral,
}

impl Configuration {
    /// `(J, J', m, phi)` of the simplified model.
    pub fn reduced(self) -> [f64; 4] {
        match self {
            Configuration::I => [1.0, 0.0, 0.0, 0.0],
            Configuration::II => [1.0, 0.4, 0.0, 0.0],
            Configuration::III => [1.0, 0.5, 1.0, 0.0],
            Configuration::Chiral => [1.0, 0.4, 0.0, FRAC_PI_2],
        }
    }

    pub fn params(self) -> ModelParams {
        let [j, jp, m, phi] = self.reduced();
        ModelParams::simplified(j, jp, m, phi)
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Configuration::I),
            "II" => Ok(Configuration::II),
            "III" => Ok(Configuration::III),
            "chiral" => Ok(Configuration::Chiral),
            other => Err(Error::InvalidParameter(format!("unknown configuration {other:?} (I, II, III, chiral)"))),
        }
    }
}

/// Straight path through the `phi = 0` phase diagram from the band insulator
/// `(m, J') = (3.5 J, 0)` at `s = 0` to the Chern insulator `(0, 1.5 J)` at
/// `s = 1`.
pub fn chern_path(s: f64) -> ModelParams {
    ModelParams::simplified(1.0, 1.5 * s, 3.5 * (1.0 - s), 0.0)
}

/// Surface width (rows) of the reference slab.
pub const SLAB_ROWS: usize = 33;

/// Reference slab of `SLAB_ROWS` A-terminated rows.
pub fn reference_slab(params: ModelParams) -> SlabSpec {
    SlabSpec::new(params, SLAB_ROWS, Sublattice::A).expect("odd row count")
}

/// One emitter at the centre of a facet of a finite lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleEmitter {
    pub params: ModelParams,
    pub geometry: Geometry,
    pub facet: Facet,
    pub g: f64,
    /// Detuning of the emitter from the Weyl frequency.
    pub detuning: f64,
}

impl SingleEmitter {
    /// Block resembling the reference slab: 63 sites along `par` and `z`,
    /// 33 rows, emitter on the `(0 -1 0)` facet, `g = 0.5 J`.
    pub fn imaging() -> SingleEmitter {
        SingleEmitter {
            params: Configuration::II.params(),
            geometry: Geometry::slab_block(63, SLAB_ROWS, 63),
            facet: Facet::MinusPerp,
            g: 0.5,
            detuning: 0.0,
        }
    }

    /// The 31 x 31 x 61 block used for time-of-flight imaging.
    pub fn time_of_flight() -> SingleEmitter {
        SingleEmitter { geometry: Geometry::slab_block(31, 31, 61), ..SingleEmitter::imaging() }
    }

    /// Lattice, coupled operator and emitter site.
    pub fn build(&self) -> Result<(FiniteLattice, CoupledSystem, usize)> {
        let lattice = build_finite(&self.params, &self.geometry)?;
        let site = lattice.facet_center(self.facet)?;
        let omega = self.params.weyl_frequency() + self.detuning;
        let system = assemble(&lattice, &[EmitterSpec::new(site, omega, self.g)])?;
        Ok((lattice, system, site))
    }
}

/// One emitter on every site of a facet; the one at the facet centre is
/// initially excited.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmitterArray {
    pub params: ModelParams,
    pub geometry: Geometry,
    pub facet: Facet,
    pub g: f64,
}

impl EmitterArray {
    pub fn reference() -> EmitterArray {
        EmitterArray { params: Configuration::II.params(), geometry: Geometry::slab_block(31, 31, 61), facet: Facet::MinusPerp, g: 0.2 }
    }

    /// Lattice, operator, emitter sites and the index of the central emitter.
    pub fn build(&self) -> Result<(FiniteLattice, CoupledSystem, Vec<usize>, usize)> {
        let lattice = build_finite(&self.params, &self.geometry)?;
        let sites = lattice.facet_sites(self.facet);
        let center = lattice.facet_center(self.facet)?;
        let omega = self.params.weyl_frequency();
        let emitters: Vec<EmitterSpec> = sites.iter().map(|&s| EmitterSpec::new(s, omega, self.g)).collect();
        let system = assemble(&lattice, &emitters)?;
        let index = sites.iter().position(|&s| s == center).expect("centre lies on the facet");
        Ok((lattice, system, sites, index))
    }
}

/// Layers of the closed braid box. The exchange frequency depends only
/// weakly on the box height; a thin box keeps size scans cheap.
pub const CAVITY_LAYERS: usize = 11;

/// Two emitters on the `(0 -1 0)` and `(100)` facets of a braid box, both
/// at hinge distance index `d` on the `z` mid-plane. With absorbers the far
/// `(010)` and `(-1 0 0)` facets swallow everything that reaches them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HingePair {
    pub params: ModelParams,
    pub n_side: usize,
    pub n_z: usize,
    pub d: usize,
    pub g: f64,
    /// Absorber strength on the far facets; `0` closes the box.
    pub gamma: f64,
    pub absorber_layers: usize,
}

impl HingePair {
    /// Dissipative chiral-channel setup.
    pub fn chiral_channel(d: usize, g: f64) -> HingePair {
        HingePair { params: Configuration::Chiral.params(), n_side: 31, n_z: 41, d, g, gamma: 1.0, absorber_layers: 4 }
    }

    /// Closed braid box (effective cavity) with four equal faces of
    /// `n_side` sites and [`CAVITY_LAYERS`] layers.
    pub fn cavity(n_side: usize, d: usize, g: f64) -> HingePair {
        HingePair { params: Configuration::Chiral.params(), n_side, n_z: CAVITY_LAYERS, d, g, gamma: 0.0, absorber_layers: 1 }
    }

    pub fn build(&self) -> Result<(FiniteLattice, CoupledSystem)> {
        let mut lattice = build_finite(&self.params, &Geometry::braid_box(self.n_side, self.n_z))?;
        if self.gamma > 0.0 {
            lattice = apply_absorbers(&lattice, &[Facet::PlusPerp, Facet::MinusPar], self.gamma, self.absorber_layers)?;
        }
        let (a, b) = lattice.hinge_pair(self.d)?;
        let omega = self.params.weyl_frequency();
        let system = assemble(&lattice, &[EmitterSpec::new(a, omega, self.g), EmitterSpec::new(b, omega, self.g)])?;
        Ok((lattice, system))
    }
}
