use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

/// Snap tolerance used when deciding whether a folded coordinate sits on the
/// zone boundary.
const BOUNDARY_SNAP: f64 = 1e-12;

/// Reduce `x` into the half-open interval `(-half, half]`.
pub fn fold_symmetric(x: f64, half: f64) -> f64 {
    let period = 2.0 * half;
    let mut y = (x + half).rem_euclid(period) - half;
    if y <= -half + BOUNDARY_SNAP * half.max(1.0) {
        y += period;
    }
    if y > half {
        y = half;
    }
    y
}

/// Bulk quasi-momentum in Cartesian components, units of `1/a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl KPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        KPoint { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Canonical representative in the first Brillouin zone of the two-site
    /// cell: `|kx| + |ky| <= pi`, `|kz| <= pi`.
    ///
    /// In the rotated variables `s = kx + ky`, `t = kx - ky` the reciprocal
    /// lattice is `2pi Z^2` and the zone is the square `|s|, |t| <= pi`, so
    /// both are folded into `(-pi, pi]`. Boundary ties therefore resolve
    /// towards non-negative `kx`, then non-negative `ky`.
    pub fn fold(&self) -> KPoint {
        let s = fold_symmetric(self.x + self.y, PI);
        let t = fold_symmetric(self.x - self.y, PI);
        KPoint { x: 0.5 * (s + t), y: 0.5 * (s - t), z: fold_symmetric(self.z, PI) }
    }

    /// Distance to the zone boundary (positive inside).
    pub fn boundary_margin(&self) -> f64 {
        let f = self.fold();
        let inplane = (PI - (f.x.abs() + f.y.abs())) / SQRT_2;
        inplane.min(PI - f.z.abs())
    }

    /// Projection onto the surface Brillouin zone of the slab cut along
    /// `e_perp = (x - y)/sqrt2`.
    pub fn to_surface(&self) -> SurfaceK {
        SurfaceK::new((self.x + self.y) / SQRT_2, self.z).fold()
    }

    /// Euclidean distance between the folded representatives, minimised over
    /// neighbouring reciprocal-lattice images.
    pub fn periodic_distance(&self, other: &KPoint) -> f64 {
        let d = KPoint::new(self.x - other.x, self.y - other.y, self.z - other.z).fold();
        let mut best = f64::INFINITY;
        for (gx, gy) in [(0.0, 0.0), (PI, PI), (PI, -PI), (-PI, PI), (-PI, -PI), (TAU, 0.0), (-TAU, 0.0), (0.0, TAU), (0.0, -TAU)] {
            for gz in [-TAU, 0.0, TAU] {
                let v = [d.x + gx, d.y + gy, d.z + gz];
                best = best.min((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
            }
        }
        best
    }
}

/// Reciprocal lattice vectors of the two-site cell.
pub const RECIPROCAL_VECTORS: [[f64; 3]; 3] = [[PI, PI, 0.0], [PI, -PI, 0.0], [0.0, 0.0, TAU]];

/// Half-width of the surface zone along `k_par`.
pub const SURFACE_PAR_HALF: f64 = PI / SQRT_2;

/// Surface quasi-momentum `(k_par, k_z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceK {
    pub par: f64,
    pub z: f64,
}

impl SurfaceK {
    pub const fn new(par: f64, z: f64) -> Self {
        SurfaceK { par, z }
    }

    /// Canonical representative: `|k_par| <= pi/sqrt2`, `|k_z| <= pi`.
    pub fn fold(&self) -> SurfaceK {
        SurfaceK { par: fold_symmetric(self.par, SURFACE_PAR_HALF), z: fold_symmetric(self.z, PI) }
    }

    /// Distance on the surface torus.
    pub fn periodic_distance(&self, other: &SurfaceK) -> f64 {
        let dp = fold_symmetric(self.par - other.par, SURFACE_PAR_HALF);
        let dz = fold_symmetric(self.z - other.z, PI);
        (dp * dp + dz * dz).sqrt()
    }
}
