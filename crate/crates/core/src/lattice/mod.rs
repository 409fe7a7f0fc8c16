//! The Weyl bath in its three representations: bulk Bloch (2x2), slab Bloch
//! (`N_s x N_s`) and finite real-space sparse matrix.

mod bulk;
mod finite;
mod kpoint;
mod params;
mod slab;

use serde::{Deserialize, Serialize};

pub use bulk::{
    bloch_bulk, bloch_bulk_derivative, bloch_bulk_periodic, bloch_jet, d_vector, pauli_matrix, two_band_eigen,
    BlochData, BlochJet,
};
pub use finite::{apply_absorbers, build_finite, Bond, BondKind, FiniteLattice, Geometry, Site};
pub use kpoint::{fold_symmetric, KPoint, SurfaceK, RECIPROCAL_VECTORS, SURFACE_PAR_HALF};
pub use params::{wrap_phase, Hopping, ModelParams};
pub use slab::{slab_bloch, slab_bloch_derivative, SlabSpec};

#[cfg(test)]
pub(crate) use finite::enumerate_bonds;

/// Sublattice label of the two-site cell; A sites have even `x + y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    /// Sublattice of the site at integer position `(x, y, _)`.
    pub fn of(x: i64, y: i64) -> Sublattice {
        if (x + y).rem_euclid(2) == 0 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    pub fn other(self) -> Sublattice {
        match self {
            Sublattice::A => Sublattice::B,
            Sublattice::B => Sublattice::A,
        }
    }
}

impl std::str::FromStr for Sublattice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Sublattice::A),
            "B" | "b" => Ok(Sublattice::B),
            other => Err(format!("unknown sublattice '{other}' (expected A or B)")),
        }
    }
}

/// Outer faces of a finite geometry in the `(perp, par, z)` frame, where
/// `e_perp = (x - y)/sqrt2` and `e_par = (x + y)/sqrt2`. `MinusPerp` is the
/// `(0 -1 0)` facet, `PlusPerp` the `(010)` facet, `MinusPar` the `(-1 0 0)`
/// facet and `PlusPar` the `(100)` facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Facet {
    MinusPerp,
    PlusPerp,
    MinusPar,
    PlusPar,
    MinusZ,
    PlusZ,
}

impl Facet {
    pub const ALL: [Facet; 6] =
        [Facet::MinusPerp, Facet::PlusPerp, Facet::MinusPar, Facet::PlusPar, Facet::MinusZ, Facet::PlusZ];

    /// Miller-style label used in configuration files.
    pub fn label(self) -> &'static str {
        match self {
            Facet::MinusPerp => "0-10",
            Facet::PlusPerp => "010",
            Facet::MinusPar => "-100",
            Facet::PlusPar => "100",
            Facet::MinusZ => "00-1",
            Facet::PlusZ => "001",
        }
    }
}

impl std::str::FromStr for Facet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Facet::ALL
            .into_iter()
            .find(|f| f.label() == s || format!("{f:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown facet '{s}' (expected one of 0-10, 010, -100, 100, 00-1, 001)"))
    }
}
