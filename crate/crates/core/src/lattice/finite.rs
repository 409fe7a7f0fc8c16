//! Finite real-space lattices and their sparse hopping matrices.
//!
//! Sites are labelled by integer Cartesian positions `(x, y, z)`. The shaped
//! geometries are described in the rotated in-plane coordinates
//! `u = x - y` (along `e_perp`) and `v = x + y` (along `e_par`), with
//! `u = v (mod 2)`. Sites are ordered by `(z, u, v)`, which keeps every
//! `z`-layer contiguous and makes the matrix layout deterministic.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::{Facet, Sublattice};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, C64};

/// A lattice site and its sublattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub pos: [i64; 3],
    pub sublattice: Sublattice,
}

impl Site {
    pub fn new(pos: [i64; 3]) -> Site {
        Site { pos, sublattice: Sublattice::of(pos[0], pos[1]) }
    }

    /// `x - y`, the plane index along `e_perp`.
    pub fn u(&self) -> i64 {
        self.pos[0] - self.pos[1]
    }

    /// `x + y`, the plane index along `e_par`.
    pub fn v(&self) -> i64 {
        self.pos[0] + self.pos[1]
    }

    pub fn z(&self) -> i64 {
        self.pos[2]
    }

    /// Position in the `(perp, par, z)` frame, in units of `a`.
    pub fn frame_position(&self) -> [f64; 3] {
        [self.u() as f64 / SQRT_2, self.v() as f64 / SQRT_2, self.z() as f64]
    }
}

/// Displacements `delta` with hopping `-t_j` from `r + delta` to `r`, for `r`
/// on the listed sublattice. Each bond of the lattice appears exactly once.
const BOND_TABLE: [(Sublattice, u8, [i64; 3]); 10] = [
    (Sublattice::A, 1, [1, 0, 0]),
    (Sublattice::A, 2, [-1, 0, 0]),
    (Sublattice::A, 3, [0, 1, 0]),
    (Sublattice::A, 4, [0, -1, 0]),
    (Sublattice::A, 5, [0, 0, 1]),
    (Sublattice::B, 6, [0, 0, 1]),
    (Sublattice::A, 7, [1, 1, 0]),
    (Sublattice::A, 8, [1, -1, 0]),
    (Sublattice::B, 9, [1, 1, 0]),
    (Sublattice::B, 10, [1, -1, 0]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BondKind {
    NearestInPlane,
    Vertical,
    NextNearestInPlane,
}

/// One directed bond: `H[from, to] = value = -t_j` and its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    /// Hopping label `j` in `1..=10`.
    pub hopping: u8,
    pub value: C64,
}

impl Bond {
    pub fn kind(&self) -> BondKind {
        match self.hopping {
            1..=4 => BondKind::NearestInPlane,
            5 | 6 => BondKind::Vertical,
            _ => BondKind::NextNearestInPlane,
        }
    }
}

/// Enumerate every bond of `sites` whose partner is found by `lookup`.
pub(crate) fn enumerate_bonds(
    params: &ModelParams,
    sites: &[Site],
    lookup: impl Fn([i64; 3]) -> Option<usize>,
) -> Vec<Bond> {
    let mut bonds = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        for &(sub, j, d) in &BOND_TABLE {
            if sub != s.sublattice {
                continue;
            }
            let target = [s.pos[0] + d[0], s.pos[1] + d[1], s.pos[2] + d[2]];
            if let Some(to) = lookup(target) {
                bonds.push(Bond { from: i, to, hopping: j, value: -params.t(j as usize) });
            }
        }
    }
    bonds
}

/// Shape of a finite lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    /// Axis-aligned box `[0, nx) x [0, ny) x [0, nz)`. For facet selection
    /// `par` maps to `x` and `perp` to `y`.
    Cubic { nx: usize, ny: usize, nz: usize },
    /// `n_perp` zig-zag rows `u = const`, each holding `n_par` sites spaced
    /// by `sqrt2 a` along `e_par`, stacked `n_z` times. Row 0 is the
    /// `(0 -1 0)` facet; `terminations` are the sublattices of the
    /// `(0 -1 0)` and `(010)` facets.
    Block { n_par: usize, n_perp: usize, n_z: usize, terminations: [Sublattice; 2] },
    /// Square in the rotated frame, `u in [0, 2n]`, `v in [1, 2n + 1]`, with
    /// four faces of `n` sites each. The `(0 -1 0)` and `(010)` faces are A,
    /// the `(-1 0 0)` and `(100)` faces are B, so every hinge joins an A and
    /// a B facet.
    Box { n_side: usize, n_z: usize },
}

impl Geometry {
    pub fn cubic(nx: usize, ny: usize, nz: usize) -> Geometry {
        Geometry::Cubic { nx, ny, nz }
    }

    /// Slab-like block with both `perp` facets A-terminated; `n_s` must be odd.
    pub fn slab_block(n_par: usize, n_s: usize, n_z: usize) -> Geometry {
        Geometry::Block { n_par, n_perp: n_s, n_z, terminations: [Sublattice::A, Sublattice::A] }
    }

    pub fn rect_block(n_par: usize, n_perp: usize, n_z: usize, terminations: [Sublattice; 2]) -> Geometry {
        Geometry::Block { n_par, n_perp, n_z, terminations }
    }

    pub fn braid_box(n_side: usize, n_z: usize) -> Geometry {
        Geometry::Box { n_side, n_z }
    }

    /// Extents `(N_par, N_perp, N_z)` in sites.
    pub fn extents(&self) -> [usize; 3] {
        match *self {
            Geometry::Cubic { nx, ny, nz } => [nx, ny, nz],
            Geometry::Block { n_par, n_perp, n_z, .. } => [n_par, n_perp, n_z],
            Geometry::Box { n_side, n_z } => [n_side, n_side, n_z],
        }
    }

    pub fn site_count(&self) -> usize {
        match *self {
            Geometry::Cubic { nx, ny, nz } => nx * ny * nz,
            Geometry::Block { n_par, n_perp, n_z, .. } => n_par * n_perp * n_z,
            Geometry::Box { n_side, n_z } => 2 * n_side * (n_side + 1) * n_z,
        }
    }

    fn validate(&self) -> Result<()> {
        let e = self.extents();
        if e.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter(format!("geometry extents must be positive, got {e:?}")));
        }
        if let Geometry::Block { n_perp, terminations, .. } = *self {
            let same = terminations[0] == terminations[1];
            let odd = n_perp % 2 == 1;
            if same != odd {
                return Err(Error::InconsistentTermination(format!(
                    "{:?}/{:?} facets need an {} perp extent, got {n_perp}",
                    terminations[0],
                    terminations[1],
                    if same { "odd" } else { "even" }
                )));
            }
        }
        Ok(())
    }

    /// `u` of the first row of a block.
    fn block_offset(terminations: [Sublattice; 2]) -> i64 {
        match terminations[0] {
            Sublattice::A => 0,
            Sublattice::B => 1,
        }
    }

    /// Site positions in canonical `(z, u, v)` order.
    fn positions(&self) -> Vec<[i64; 3]> {
        let from_uv = |u: i64, v: i64, z: i64| [(u + v) / 2, (v - u) / 2, z];
        let mut out = Vec::with_capacity(self.site_count());
        match *self {
            Geometry::Cubic { nx, ny, nz } => {
                for z in 0..nz as i64 {
                    for x in 0..nx as i64 {
                        for y in 0..ny as i64 {
                            out.push([x, y, z]);
                        }
                    }
                }
                out.sort_by_key(|p| (p[2], p[0] - p[1], p[0] + p[1]));
            }
            Geometry::Block { n_par, n_perp, n_z, terminations } => {
                let off = Self::block_offset(terminations);
                for z in 0..n_z as i64 {
                    for i in 0..n_perp as i64 {
                        let u = i + off;
                        for j in 0..n_par as i64 {
                            out.push(from_uv(u, u.rem_euclid(2) + 2 * j, z));
                        }
                    }
                }
            }
            Geometry::Box { n_side, n_z } => {
                let n = n_side as i64;
                for z in 0..n_z as i64 {
                    for u in 0..=2 * n {
                        let mut v = if u % 2 == 0 { 2 } else { 1 };
                        while v <= 2 * n + 1 {
                            out.push(from_uv(u, v, z));
                            v += 2;
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of lattice planes between `site` and `facet` (0 on the facet).
    fn facet_depth(&self, site: &Site, facet: Facet) -> usize {
        let [x, y, z] = site.pos;
        let (u, v) = (site.u(), site.v());
        let nz = self.extents()[2] as i64;
        let d = match (self, facet) {
            (_, Facet::MinusZ) => z,
            (_, Facet::PlusZ) => nz - 1 - z,
            (Geometry::Cubic { .. }, Facet::MinusPerp) => y,
            (Geometry::Cubic { ny, .. }, Facet::PlusPerp) => *ny as i64 - 1 - y,
            (Geometry::Cubic { .. }, Facet::MinusPar) => x,
            (Geometry::Cubic { nx, .. }, Facet::PlusPar) => *nx as i64 - 1 - x,
            (Geometry::Block { terminations, .. }, Facet::MinusPerp) => u - Self::block_offset(*terminations),
            (Geometry::Block { n_perp, terminations, .. }, Facet::PlusPerp) => {
                Self::block_offset(*terminations) + *n_perp as i64 - 1 - u
            }
            (Geometry::Block { .. }, Facet::MinusPar) => (v - u.rem_euclid(2)) / 2,
            (Geometry::Block { n_par, .. }, Facet::PlusPar) => *n_par as i64 - 1 - (v - u.rem_euclid(2)) / 2,
            (Geometry::Box { .. }, Facet::MinusPerp) => u,
            (Geometry::Box { n_side, .. }, Facet::PlusPerp) => 2 * *n_side as i64 - u,
            (Geometry::Box { .. }, Facet::MinusPar) => v - 1,
            (Geometry::Box { n_side, .. }, Facet::PlusPar) => 2 * *n_side as i64 + 1 - v,
        };
        debug_assert!(d >= 0);
        d as usize
    }

    /// Sublattice of a `perp`/`par` facet when it is a single plane.
    pub fn facet_termination(&self, facet: Facet) -> Option<Sublattice> {
        match (self, facet) {
            (Geometry::Block { terminations, .. }, Facet::MinusPerp) => Some(terminations[0]),
            (Geometry::Block { terminations, .. }, Facet::PlusPerp) => Some(terminations[1]),
            (Geometry::Box { .. }, Facet::MinusPerp | Facet::PlusPerp) => Some(Sublattice::A),
            (Geometry::Box { .. }, Facet::MinusPar | Facet::PlusPar) => Some(Sublattice::B),
            _ => None,
        }
    }
}

/// Finite lattice: site table, bond list and sparse (optionally lossy)
/// Hamiltonian.
#[derive(Clone, Debug)]
pub struct FiniteLattice {
    params: ModelParams,
    geometry: Geometry,
    sites: Vec<Site>,
    bonds: Vec<Bond>,
    onsite: Vec<C64>,
    matrix: CsrMatrix,
    index: HashMap<[i64; 3], usize>,
}

/// Assemble the real-space Hamiltonian of `geometry` with open boundaries.
pub fn build_finite(params: &ModelParams, geometry: &Geometry) -> Result<FiniteLattice> {
    geometry.validate()?;
    let sites: Vec<Site> = geometry.positions().into_iter().map(Site::new).collect();
    let index: HashMap<[i64; 3], usize> = sites.iter().enumerate().map(|(i, s)| (s.pos, i)).collect();
    let bonds = enumerate_bonds(params, &sites, |p| index.get(&p).copied());
    let onsite: Vec<C64> = sites
        .iter()
        .map(|s| match s.sublattice {
            Sublattice::A => C64::new(params.onsite - params.mass, 0.0),
            Sublattice::B => C64::new(params.onsite + params.mass, 0.0),
        })
        .collect();
    let matrix = assemble_matrix(sites.len(), &onsite, &bonds);
    Ok(FiniteLattice { params: params.clone(), geometry: geometry.clone(), sites, bonds, onsite, matrix, index })
}

fn assemble_matrix(n: usize, onsite: &[C64], bonds: &[Bond]) -> CsrMatrix {
    let mut t = Vec::with_capacity(n + 2 * bonds.len());
    t.extend(onsite.iter().enumerate().map(|(i, &e)| (i, i, e)));
    for b in bonds {
        t.push((b.from, b.to, b.value));
        t.push((b.to, b.from, b.value.conj()));
    }
    CsrMatrix::from_triplets(n, t)
}

/// Add `-i gamma/2` on the sites of the selected facets. With `layers > 1`
/// the loss ramps linearly, layer `l` (0 on the facet) receiving
/// `gamma (layers - l)/layers`. Sites shared by several selected facets take
/// the largest loss rather than the sum.
pub fn apply_absorbers(lattice: &FiniteLattice, facets: &[Facet], gamma: f64, layers: usize) -> Result<FiniteLattice> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("absorber strength must be finite and >= 0, got {gamma}")));
    }
    if layers == 0 {
        return Err(Error::InvalidParameter("absorber ramp needs at least one layer".into()));
    }
    let mut out = lattice.clone();
    if gamma == 0.0 || facets.is_empty() {
        return Ok(out);
    }
    let mut updates = Vec::new();
    for (i, s) in lattice.sites.iter().enumerate() {
        let loss = facets
            .iter()
            .map(|&f| {
                let l = lattice.geometry.facet_depth(s, f);
                if l < layers {
                    gamma * (layers - l) as f64 / layers as f64
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        if loss > 0.0 {
            let delta = C64::new(0.0, -0.5 * loss);
            out.onsite[i] += delta;
            updates.push((i, delta));
        }
    }
    out.matrix.add_to_diagonal(&updates);
    Ok(out)
}

impl FiniteLattice {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, id: usize) -> &Site {
        &self.sites[id]
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// All bonds interior to the geometry, including zero-amplitude ones.
    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// Complex on-site energies.
    pub fn onsite(&self) -> &[C64] {
        &self.onsite
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn has_losses(&self) -> bool {
        self.onsite.iter().any(|e| e.im != 0.0)
    }

    pub fn site_id(&self, pos: [i64; 3]) -> Option<usize> {
        self.index.get(&pos).copied()
    }

    pub fn site_id_uv(&self, u: i64, v: i64, z: i64) -> Option<usize> {
        if (u - v).rem_euclid(2) != 0 {
            return None;
        }
        self.site_id([(u + v) / 2, (v - u) / 2, z])
    }

    pub fn facet_depth(&self, id: usize, facet: Facet) -> usize {
        self.geometry.facet_depth(&self.sites[id], facet)
    }

    /// Sites lying on `facet`, in canonical order.
    pub fn facet_sites(&self, facet: Facet) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.facet_depth(i, facet) == 0).collect()
    }

    /// In-facet coordinates used for centring.
    fn facet_coords(&self, id: usize, facet: Facet) -> [i64; 2] {
        let s = &self.sites[id];
        match (&self.geometry, facet) {
            (Geometry::Cubic { .. }, Facet::MinusPerp | Facet::PlusPerp) => [s.pos[0], s.z()],
            (Geometry::Cubic { .. }, Facet::MinusPar | Facet::PlusPar) => [s.pos[1], s.z()],
            (Geometry::Cubic { .. }, _) => [s.pos[0], s.pos[1]],
            (_, Facet::MinusPerp | Facet::PlusPerp) => [s.v(), s.z()],
            (_, Facet::MinusPar | Facet::PlusPar) => [s.u(), s.z()],
            (_, _) => [s.u(), s.v()],
        }
    }

    /// In-plane position of a site on `facet`, in units of `a`: `(par, z)`
    /// for `perp` facets, `(perp, z)` for `par` facets and `(perp, par)` for
    /// `z` facets.
    pub fn facet_plane_position(&self, id: usize, facet: Facet) -> [f64; 2] {
        if let Geometry::Cubic { .. } = self.geometry {
            let c = self.facet_coords(id, facet);
            return [c[0] as f64, c[1] as f64];
        }
        let [perp, par, z] = self.sites[id].frame_position();
        match facet {
            Facet::MinusPerp | Facet::PlusPerp => [par, z],
            Facet::MinusPar | Facet::PlusPar => [perp, z],
            Facet::MinusZ | Facet::PlusZ => [perp, par],
        }
    }

    /// Central site of a facet: the median of the distinct values of each
    /// in-facet coordinate (lower median for even counts), or the closest
    /// facet site when no site sits there exactly.
    pub fn facet_center(&self, facet: Facet) -> Result<usize> {
        let ids = self.facet_sites(facet);
        if ids.is_empty() {
            return Err(Error::InvalidParameter(format!("facet {} has no sites", facet.label())));
        }
        let mut target = [0i64; 2];
        for (axis, slot) in target.iter_mut().enumerate() {
            let mut vals: Vec<i64> = ids.iter().map(|&i| self.facet_coords(i, facet)[axis]).collect();
            vals.sort_unstable();
            vals.dedup();
            *slot = vals[(vals.len() - 1) / 2];
        }
        let best = ids
            .iter()
            .copied()
            .min_by_key(|&i| {
                let c = self.facet_coords(i, facet);
                ((c[0] - target[0]).pow(2) + (c[1] - target[1]).pow(2), i)
            })
            .expect("non-empty");
        Ok(best)
    }

    /// Partner of `id` under the mirror `z -> N_z - 1 - z`.
    pub fn z_mirror(&self, id: usize) -> Option<usize> {
        let nz = self.geometry.extents()[2] as i64;
        let [x, y, z] = self.sites[id].pos;
        self.site_id([x, y, nz - 1 - z])
    }

    /// Row, in-row and layer indices `(i, j, z)` of a site of a
    /// [`Geometry::Block`]; `None` for other shapes.
    pub fn block_coords(&self, id: usize) -> Option<[usize; 3]> {
        match self.geometry {
            Geometry::Block { terminations, .. } => {
                let s = &self.sites[id];
                let i = s.u() - Geometry::block_offset(terminations);
                let j = (s.v() - s.u().rem_euclid(2)) / 2;
                Some([i as usize, j as usize, s.z() as usize])
            }
            _ => None,
        }
    }

    /// Emitter sites of the hinge configuration of a [`Geometry::Box`]: one
    /// on the A-terminated `(0 -1 0)` facet and one on the B-terminated
    /// `(100)` facet, both `(2d - 1)/sqrt2` from the shared hinge and on the
    /// `z` mid-plane. Surface channels launched on `(0 -1 0)` travel towards
    /// `+par`, i.e. towards this hinge.
    pub fn hinge_pair(&self, d: usize) -> Result<(usize, usize)> {
        let Geometry::Box { n_side, n_z } = self.geometry else {
            return Err(Error::InvalidParameter("hinge emitters need a braid box geometry".into()));
        };
        if d == 0 || d > n_side {
            return Err(Error::InvalidParameter(format!("hinge distance index {d} outside 1..={n_side}")));
        }
        let z = (n_z as i64 - 1) / 2;
        let d = d as i64;
        let top = 2 * n_side as i64 + 1;
        let first = self.site_id_uv(0, top + 1 - 2 * d, z).ok_or(Error::InvalidSite(0))?;
        let second = self.site_id_uv(2 * d - 1, top, z).ok_or(Error::InvalidSite(0))?;
        Ok((first, second))
    }
}
