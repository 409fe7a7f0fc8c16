//! Dense Hermitian eigensolver wrapper and a compressed-sparse-row matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Rotate every column so that its largest-magnitude component is real and
/// positive. Ties go to the lowest row index.
pub fn fix_gauge(vectors: &mut CMatrix) {
    for mut col in vectors.column_iter_mut() {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (i, z) in col.iter().enumerate() {
            let n = z.norm_sqr();
            if n > best_norm * (1.0 + 1e-12) {
                best = i;
                best_norm = n;
            }
        }
        let z = col[best];
        if best_norm > 0.0 {
            let phase = z.conj() / z.norm();
            for v in col.iter_mut() {
                *v *= phase;
            }
            col[best] = C64::new(col[best].norm(), 0.0);
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching gauge-fixed eigenvectors as columns.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    fix_gauge(&mut vectors);
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(h: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Maximum absolute entry of `a - b^dagger`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Compressed sparse row matrix with column indices sorted within each row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<C64>,
}

const PAR_MIN_ROWS: usize = 1 << 14;

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut row = 0;
        let mut last: Option<(usize, usize)> = None;
        for (r, col, v) in triplets {
            assert!(r < n && col < n, "triplet ({r}, {col}) outside {n}x{n}");
            if last == Some((r, col)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            while row < r {
                indptr.push(indices.len());
                row += 1;
            }
            indices.push(col as u32);
            values.push(v);
            last = Some((r, col));
        }
        while row < n {
            indptr.push(indices.len());
            row += 1;
        }
        let mut m = CsrMatrix { n, indptr, indices, values };
        m.prune_zeros();
        m
    }

    fn prune_zeros(&mut self) {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return;
        }
        let mut indptr = Vec::with_capacity(self.n + 1);
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        indptr.push(0);
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != C64::new(0.0, 0.0) {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of one row as (column, value) pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.indptr[r]..self.indptr[r + 1];
        self.indices[range.clone()]
            .iter()
            .zip(&self.values[range])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, r: usize, col: usize) -> C64 {
        let range = self.indptr[r]..self.indptr[r + 1];
        match self.indices[range.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.values[range.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        (0..self.n)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    /// Add `delta` to diagonal entry `i`, inserting it if absent.
    pub fn add_to_diagonal(&mut self, updates: &[(usize, C64)]) {
        let mut t = self.triplets();
        t.extend(updates.iter().map(|&(i, v)| (i, i, v)));
        *self = CsrMatrix::from_triplets(self.n, t);
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        let row_dot = |r: usize| {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k] as usize];
            }
            acc
        };
        if self.n >= PAR_MIN_ROWS {
            y.par_iter_mut()
                .with_min_len(4096)
                .enumerate()
                .for_each(|(r, out)| *out = row_dot(r));
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = row_dot(r);
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// `<x|A|x>`.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    }

    /// Maximum of `|A_ij - conj(A_ji)|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for (col, v) in self.row(r) {
                worst = worst.max((v - self.get(col, r).conj()).norm());
            }
        }
        worst
    }

    /// Gershgorin bound on the spectral radius.
    pub fn spectral_bound(&self) -> f64 {
        (0..self.n)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (r, col, v) in self.triplets() {
            m[(r, col)] = v;
        }
        m
    }
}
