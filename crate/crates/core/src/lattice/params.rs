use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// One complex hopping `t_j = |t_j| e^{i phi_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hopping {
    pub amplitude: f64,
    pub phase: f64,
}

impl Hopping {
    pub fn new(amplitude: f64, phase: f64) -> Self {
        Hopping { amplitude, phase: wrap_phase(phase) }
    }

    pub fn value(&self) -> C64 {
        C64::from_polar(self.amplitude, self.phase)
    }
}

/// Phase reduced to `[0, 2pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

const TYPE_ONE_TOL: f64 = 1e-12;

/// Hopping amplitudes and phases of the two-sublattice cubic model, plus the
/// staggered mass and bare on-site energy. Lengths are in units of the
/// nearest-neighbour spacing.
///
/// Bond table (`r` on the listed sublattice, hopping `-t_j` from `r + delta`
/// to `r`):
///
/// | sublattice | +x | -x | +y | -y | +z | +(x+y) | +(x-y) |
/// |------------|----|----|----|----|----|--------|--------|
/// | A          | t1 | t2 | t3 | t4 | t5 | t7     | t8     |
/// | B          |    |    |    |    | t6 | t9     | t10    |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    hoppings: [Hopping; 10],
    pub mass: f64,
    pub onsite: f64,
}

impl ModelParams {
    pub fn new(hoppings: [Hopping; 10], mass: f64, onsite: f64) -> Result<Self> {
        for (j, h) in hoppings.iter().enumerate() {
            if !(h.amplitude >= 0.0) || !h.amplitude.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "|t{}| = {} must be finite and non-negative",
                    j + 1,
                    h.amplitude
                )));
            }
            if !h.phase.is_finite() {
                return Err(Error::InvalidParameter(format!("phi{} is not finite", j + 1)));
            }
        }
        if !mass.is_finite() || !onsite.is_finite() {
            return Err(Error::InvalidParameter("mass and on-site energy must be finite".into()));
        }
        let hoppings = hoppings.map(|h| Hopping::new(h.amplitude, h.phase));
        Ok(ModelParams { hoppings, mass, onsite })
    }

    /// The reduced parameter set: nearest-neighbour amplitude `j`,
    /// next-nearest-neighbour amplitude `j_prime`, staggered mass `mass`, and
    /// the phase `phi` picked up hopping from B to A along -x.
    pub fn simplified(j: f64, j_prime: f64, mass: f64, phi: f64) -> Self {
        let h = Hopping::new;
        let hoppings = [
            h(j, phi),
            h(j, FRAC_PI_2),
            h(j, 0.0),
            h(j, 0.0),
            h(j, 0.0),
            h(j, PI),
            h(j_prime, 0.0),
            h(j_prime, PI),
            h(j_prime, PI),
            h(j_prime, 0.0),
        ];
        ModelParams::new(hoppings, mass, 0.0).expect("simplified parameters are finite")
    }

    pub fn with_onsite(mut self, onsite: f64) -> Self {
        self.onsite = onsite;
        self
    }

    /// Hopping `t_j` for `j` in `1..=10`.
    pub fn hopping(&self, j: usize) -> Hopping {
        self.hoppings[j - 1]
    }

    /// Complex value of `t_j` for `j` in `1..=10`.
    pub fn t(&self, j: usize) -> C64 {
        self.hoppings[j - 1].value()
    }

    pub fn hoppings(&self) -> &[Hopping; 10] {
        &self.hoppings
    }

    /// True when the sublattice-diagonal hoppings cancel in `d0(k)`, so that
    /// `d0 = epsilon` everywhere and the Weyl cones are untilted.
    pub fn is_type_one(&self) -> bool {
        let pair = |a: usize, b: usize| {
            let (ha, hb) = (self.hopping(a), self.hopping(b));
            let dphi = wrap_phase(ha.phase - hb.phase);
            (dphi - PI).abs() < TYPE_ONE_TOL && (ha.amplitude - hb.amplitude).abs() < TYPE_ONE_TOL
        };
        pair(5, 6) && pair(7, 9) && pair(8, 10)
    }

    /// Weyl frequency of a type-I configuration.
    pub fn weyl_frequency(&self) -> f64 {
        self.onsite
    }

    /// Nearest-neighbour energy scale, the largest of `|t1|..|t6|`.
    pub fn energy_scale(&self) -> f64 {
        self.hoppings[..6].iter().map(|h| h.amplitude).fold(0.0, f64::max)
    }
}
