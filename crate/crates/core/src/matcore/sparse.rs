//! Compressed sparse rows, only what the ball-compression operators need.

use super::lanczos::LinearOperator;
use super::{CMatrix, C64};

/// CSR matrix that also keeps its conjugate transpose, so both products
/// parallelize over output rows.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    fwd: Csr,
    adj: Csr,
}

#[derive(Debug, Clone)]
struct Csr {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl Csr {
    fn from_triplets(nrows: usize, mut t: Vec<(usize, usize, C64)>) -> Csr {
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Csr {
            indptr,
            indices,
            values,
        }
    }

    fn row_dot(&self, r: usize, x: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in self.indptr[r]..self.indptr[r + 1] {
            acc += self.values[p] * x[self.indices[p]];
        }
        acc
    }

    fn mul(&self, x: &[C64], y: &mut [C64]) {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            y.par_iter_mut()
                .enumerate()
                .with_min_len(1024)
                .for_each(|(r, yr)| *yr = self.row_dot(r, x));
        }
        #[cfg(not(feature = "parallel"))]
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row_dot(r, x);
        }
    }
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: Vec<(usize, usize, C64)>) -> Self {
        let adj_t = triplets.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        Self {
            nrows,
            ncols,
            fwd: Csr::from_triplets(nrows, triplets),
            adj: Csr::from_triplets(ncols, adj_t),
        }
    }

    pub fn nnz(&self) -> usize {
        self.fwd.values.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for p in self.fwd.indptr[r]..self.fwd.indptr[r + 1] {
                m[(r, self.fwd.indices[p])] += self.fwd.values[p];
            }
        }
        m
    }
}

impl LinearOperator for SparseMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.fwd.mul(x, y);
    }
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.adj.mul(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{largest_singular_value, op_norm, LanczosOptions};

    #[test]
    fn duplicates_are_summed_and_adjoint_matches_dense() {
        let t = vec![
            (0, 1, C64::new(1.0, 0.0)),
            (0, 1, C64::new(0.5, 1.0)),
            (2, 0, C64::new(-2.0, 0.0)),
            (1, 1, C64::new(0.0, 3.0)),
        ];
        let s = SparseMatrix::from_triplets(3, 2, t);
        assert_eq!(s.nnz(), 3);
        let d = s.to_dense();
        assert_eq!(d[(0, 1)], C64::new(1.5, 1.0));
        let x = vec![C64::new(1.0, 2.0), C64::new(-1.0, 0.5), C64::new(0.3, 0.0)];
        let mut y = vec![C64::new(0.0, 0.0); 2];
        s.apply_adjoint(&x, &mut y);
        let expect = d.adjoint() * nalgebra::DVector::from_vec(x);
        for i in 0..2 {
            assert!((y[i] - expect[i]).norm() < 1e-15);
        }
        let b = largest_singular_value(&s, &LanczosOptions::default());
        assert!((b.value - op_norm(&d).unwrap()).abs() < 1e-12);
    }
}
