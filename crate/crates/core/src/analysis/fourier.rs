//! Separable discrete Fourier sums over dense 3D arrays at arbitrary
//! wavenumbers.

use rayon::prelude::*;

use crate::linalg::C64;

/// Dense row-major complex array.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Array3 {
    pub shape: [usize; 3],
    pub data: Vec<C64>,
}

impl Array3 {
    pub fn zeros(shape: [usize; 3]) -> Array3 {
        Array3 { shape, data: vec![C64::new(0.0, 0.0); shape[0] * shape[1] * shape[2]] }
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.shape[1] + j) * self.shape[2] + k
    }

    /// `out[.., m, ..] = sum_i in[.., i, ..] exp(-i ks[m] coords[i])` along
    /// `axis`.
    pub fn dft_axis(&self, axis: usize, coords: &[f64], ks: &[f64]) -> Array3 {
        assert_eq!(coords.len(), self.shape[axis]);
        let twiddle: Vec<C64> = ks
            .iter()
            .flat_map(|&k| coords.iter().map(move |&x| C64::from_polar(1.0, -k * x)))
            .collect();
        let n_in = coords.len();
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut shape = self.shape;
        shape[axis] = ks.len();
        let mut out = Array3::zeros(shape);
        let block_in = n_in * inner;
        let block_out = ks.len() * inner;
        let work = |(o, dst): (usize, &mut [C64])| {
            let src = &self.data[o * block_in..(o + 1) * block_in];
            for (m, tw) in twiddle.chunks(n_in).enumerate() {
                let row = &mut dst[m * inner..(m + 1) * inner];
                for (i, &w) in tw.iter().enumerate() {
                    let s = &src[i * inner..(i + 1) * inner];
                    if s.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                        continue;
                    }
                    for (r, &x) in row.iter_mut().zip(s) {
                        *r += w * x;
                    }
                }
            }
        };
        if outer * block_out >= 1 << 15 {
            out.data.par_chunks_mut(block_out).enumerate().for_each(work);
        } else {
            out.data.chunks_mut(block_out).enumerate().for_each(work);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_sum_matches_direct_sum() {
        let mut a = Array3::zeros([2, 3, 4]);
        for (n, z) in a.data.iter_mut().enumerate() {
            *z = C64::new((n as f64 * 0.37).sin(), (n as f64 * 0.11).cos());
        }
        let cx = [0.0, 1.5];
        let cy = [0.0, 1.0, 2.0];
        let cz = [-1.0, 0.0, 1.0, 2.0];
        let (kx, ky, kz) = ([0.3, -1.2, 2.0], [0.5, 0.1], [1.0]);
        let out = a.dft_axis(0, &cx, &kx).dft_axis(1, &cy, &ky).dft_axis(2, &cz, &kz);
        assert_eq!(out.shape, [3, 2, 1]);
        for (p, &qx) in kx.iter().enumerate() {
            for (q, &qy) in ky.iter().enumerate() {
                let mut direct = C64::new(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..3 {
                        for k in 0..4 {
                            direct += a.data[a.index(i, j, k)] * C64::from_polar(1.0, -(qx * cx[i] + qy * cy[j] + kz[0] * cz[k]));
                        }
                    }
                }
                assert!((out.data[out.index(p, q, 0)] - direct).norm() < 1e-12);
            }
        }
    }
}
