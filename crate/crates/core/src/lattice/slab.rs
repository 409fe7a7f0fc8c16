//! Slab Bloch Hamiltonian: finite along `e_perp`, periodic along `e_par` and `z`.
//!
//! Rows are lattice planes `u = x - y = const`, ordered from the `(0 -1 0)`
//! facet (row 0) to the `(010)` facet (row `N_s - 1`). Every row holds a single
//! sublattice, and orbitals carry the Bloch phase of their own position, so
//! the in-row coordinate `r_par = (x + y)/sqrt2` differs by `+-1/sqrt2` between
//! neighbouring rows.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::Sublattice;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabSpec {
    pub params: ModelParams,
    n_s: usize,
    termination: Sublattice,
}

impl SlabSpec {
    /// Slab of `n_s` rows whose two facets are both of sublattice
    /// `termination`.
    pub fn new(params: ModelParams, n_s: usize, termination: Sublattice) -> Result<Self> {
        if n_s % 2 == 0 {
            return Err(Error::EvenSlabWidth(n_s));
        }
        if n_s < 3 {
            return Err(Error::InvalidParameter(format!("N_s must be at least 3 (got {n_s})")));
        }
        Ok(SlabSpec { params, n_s, termination })
    }

    /// Slab with explicit facet terminations `(0 -1 0)` and `(010)`. An odd
    /// row count forces both facets onto the same sublattice.
    pub fn with_terminations(params: ModelParams, n_s: usize, terminations: [Sublattice; 2]) -> Result<Self> {
        if n_s % 2 == 0 {
            return Err(Error::EvenSlabWidth(n_s));
        }
        if terminations[0] != terminations[1] {
            return Err(Error::InconsistentTermination(format!(
                "an odd slab of {n_s} rows has identical facets; requested {:?}/{:?}",
                terminations[0], terminations[1]
            )));
        }
        SlabSpec::new(params, n_s, terminations[0])
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn termination(&self) -> Sublattice {
        self.termination
    }

    /// Sublattice of row `i`.
    pub fn row_sublattice(&self, i: usize) -> Sublattice {
        if i % 2 == 0 {
            self.termination
        } else {
            self.termination.other()
        }
    }

    /// Zero-based index of the edge band, `(N_s + 1)/2 - 1`.
    pub fn edge_band(&self) -> usize {
        (self.n_s - 1) / 2
    }
}

/// Parameters of one `k`-dependent matrix element `sum_j c_j e^{i q_j . k}`,
/// kept symbolic so that the Hamiltonian and its derivatives share one table.
struct Term {
    row: usize,
    col: usize,
    coeff: C64,
    /// Wave-vector multipliers along `(k_par, k_z)`.
    q: [f64; 2],
}

fn terms(spec: &SlabSpec) -> Vec<Term> {
    let p = &spec.params;
    let n = spec.n_s;
    let h = 1.0 / SQRT_2;
    let mut out = Vec::new();
    let mut push_hermitian = |row: usize, col: usize, coeff: C64, q: [f64; 2]| {
        out.push(Term { row, col, coeff, q });
        out.push(Term { row: col, col: row, coeff: coeff.conj(), q: [-q[0], -q[1]] });
    };
    for i in 0..n {
        let a_row = spec.row_sublattice(i) == Sublattice::A;
        let (jz, jd, jo) = if a_row { (5, 7, 8) } else { (6, 9, 10) };
        // vertical and in-row next-nearest-neighbour bonds
        push_hermitian(i, i, -p.t(jz), [0.0, 1.0]);
        push_hermitian(i, i, -p.t(jd), [SQRT_2, 0.0]);
        if i + 2 < n {
            push_hermitian(i, i + 2, -p.t(jo), [0.0, 0.0]);
        }
        if a_row {
            // +x and -y lead to row i + 1, -x and +y to row i - 1
            if i + 1 < n {
                push_hermitian(i, i + 1, -p.t(1), [h, 0.0]);
                push_hermitian(i, i + 1, -p.t(4), [-h, 0.0]);
            }
            if i >= 1 {
                push_hermitian(i, i - 1, -p.t(2), [-h, 0.0]);
                push_hermitian(i, i - 1, -p.t(3), [h, 0.0]);
            }
        }
    }
    out
}

fn onsite(spec: &SlabSpec, i: usize) -> f64 {
    let p = &spec.params;
    match spec.row_sublattice(i) {
        Sublattice::A => p.onsite - p.mass,
        Sublattice::B => p.onsite + p.mass,
    }
}

/// Slab Bloch Hamiltonian at surface momentum `(k_par, k_z)`.
pub fn slab_bloch(spec: &SlabSpec, k_par: f64, k_z: f64) -> CMatrix {
    let n = spec.n_s;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(onsite(spec, i), 0.0);
    }
    for t in terms(spec) {
        m[(t.row, t.col)] += t.coeff * C64::from_polar(1.0, t.q[0] * k_par + t.q[1] * k_z);
    }
    m
}

/// Derivative of [`slab_bloch`] with respect to `k_par` (`axis = 0`) or
/// `k_z` (`axis = 1`).
pub fn slab_bloch_derivative(spec: &SlabSpec, k_par: f64, k_z: f64, axis: usize) -> CMatrix {
    assert!(axis < 2, "slab momentum axis must be 0 (par) or 1 (z)");
    let n = spec.n_s;
    let mut m = CMatrix::zeros(n, n);
    for t in terms(spec) {
        if t.q[axis] != 0.0 {
            m[(t.row, t.col)] += t.coeff * I * t.q[axis] * C64::from_polar(1.0, t.q[0] * k_par + t.q[1] * k_z);
        }
    }
    m
}
