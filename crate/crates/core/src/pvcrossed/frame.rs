use std::f64::consts::PI;

use serde::Serialize;

use super::PvError;
use crate::matcore::sparse::SparseMatrix;
use crate::matcore::{c64, largest_singular_value, op_norm_bracket, CMatrix, CVector, LanczosOptions, DENSE_SVD_LIMIT};

/// `N×N` truncated unilateral shift, `e_k ↦ e_{k+1}` and `e_{N-1} ↦ 0`.
pub fn truncated_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i == j + 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
}

/// Bilateral shift on `l²(Z)` cut down to indices `-L..=L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftTruncation {
    pub half_width: usize,
}

impl ShiftTruncation {
    pub fn new(half_width: usize) -> Self {
        Self { half_width }
    }

    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Position of `e_n` in the truncated basis.
    pub fn index(&self, n: i64) -> Option<usize> {
        let l = self.half_width as i64;
        (-l..=l).contains(&n).then(|| (n + l) as usize)
    }

    pub fn matrix(&self) -> CMatrix {
        truncated_shift(self.dim())
    }
}

/// Orthonormal vectors `f_k = cos(kπ/2n)·e_k + sin(kπ/2n)·e_{k-n}`,
/// `k = 0..n`, and the projection `q` onto their span.
#[derive(Debug, Clone, Serialize)]
pub struct PVFrame {
    pub n_j: usize,
    pub ambient: ShiftTruncation,
    /// `‖uq - qu‖` for the bilateral shift `u`, measured on the window
    /// `[-2n_j, 2n_j]`.
    pub commutator_norm: f64,
    /// Width of the certified bracket around `commutator_norm`.
    pub commutator_bracket: f64,
}

impl PVFrame {
    /// Coefficients of `f_k`: `(cos, sin)` on `(e_k, e_{k-n})`.
    pub fn coeffs(&self, k: usize) -> (f64, f64) {
        let a = k as f64 * PI / (2 * self.n_j) as f64;
        (a.cos(), a.sin())
    }

    /// `f_k` in the basis of an arbitrary window `-w..=w`.
    fn vector_in(&self, k: usize, window: ShiftTruncation) -> CVector {
        let mut v = CVector::zeros(window.dim());
        let (c, s) = self.coeffs(k);
        let k = k as i64;
        let n = self.n_j as i64;
        v[window.index(k).expect("window holds the frame")] += c64(c, 0.0);
        v[window.index(k - n).expect("window holds the frame")] += c64(s, 0.0);
        v
    }

    /// `f_k` in the ambient truncation.
    pub fn vector(&self, k: usize) -> CVector {
        self.vector_in(k, self.ambient)
    }

    /// Nonzero entries of `q` on a window; each `f_k f_k*` touches four.
    fn q_triplets(&self, window: ShiftTruncation) -> Vec<(usize, usize, f64)> {
        let n = self.n_j as i64;
        let mut out = Vec::with_capacity(4 * self.n_j);
        for k in 0..self.n_j {
            let (c, s) = self.coeffs(k);
            let i = window.index(k as i64).expect("window holds the frame");
            let j = window.index(k as i64 - n).expect("window holds the frame");
            out.extend([(i, i, c * c), (i, j, c * s), (j, i, s * c), (j, j, s * s)]);
        }
        out
    }

    fn q_in(&self, window: ShiftTruncation) -> CMatrix {
        let mut q = CMatrix::zeros(window.dim(), window.dim());
        for (i, j, v) in self.q_triplets(window) {
            q[(i, j)] += c64(v, 0.0);
        }
        q
    }

    /// `q = Σ_k f_k f_k*` on the ambient truncation.
    pub fn q(&self) -> CMatrix {
        self.q_in(self.ambient)
    }

    /// Matrix of `q u q` in the basis `f_0..f_{n-1}`, with `u` the
    /// bilateral shift: entries `⟨f_k, u f_l⟩`.
    pub fn compressed_shift(&self) -> CMatrix {
        let n = self.n_j;
        let ni = n as i64;
        // f_l has mass on e_l and e_{l-n}; u moves them to e_{l+1}, e_{l+1-n}.
        let coeff_at = |k: usize, idx: i64| {
            let (c, s) = self.coeffs(k);
            let k = k as i64;
            let mut v = 0.0;
            if idx == k {
                v += c;
            }
            if idx == k - ni {
                v += s;
            }
            v
        };
        CMatrix::from_fn(n, n, |k, l| {
            let (c, s) = self.coeffs(l);
            let l = l as i64;
            c64(c * coeff_at(k, l + 1) + s * coeff_at(k, l + 1 - ni), 0.0)
        })
    }
}

/// Builds the frame on `-L..=L` and measures `‖uq - qu‖`.
///
/// `q` lives on `[-n, n-1]`, so on the window `[-2n, 2n]` the truncated
/// shift agrees with the bilateral one wherever the commutator is nonzero
/// and the measurement carries no boundary artifact.
pub fn pv_frame(n_j: usize, half_width: usize) -> Result<PVFrame, PvError> {
    if n_j == 0 || half_width < n_j {
        return Err(PvError::Frame { n_j, half_width });
    }
    let mut frame = PVFrame {
        n_j,
        ambient: ShiftTruncation::new(half_width),
        commutator_norm: 0.0,
        commutator_bracket: 0.0,
    };
    let window = ShiftTruncation::new(2 * n_j);
    let dim = window.dim();
    // (Tq - qT)[i, j] = q[i-1, j] - q[i, j+1], with T e_j = e_{j+1}.
    let mut triplets = Vec::new();
    for (i, j, v) in frame.q_triplets(window) {
        if i + 1 < dim {
            triplets.push((i + 1, j, c64(v, 0.0)));
        }
        if j > 0 {
            triplets.push((i, j - 1, c64(-v, 0.0)));
        }
    }
    let comm = SparseMatrix::from_triplets(dim, dim, triplets);
    let b = if dim <= DENSE_SVD_LIMIT {
        op_norm_bracket(&comm.to_dense())?
    } else {
        largest_singular_value(&comm, &LanczosOptions::default())
    };
    frame.commutator_norm = b.value;
    frame.commutator_bracket = b.width();
    Ok(frame)
}

/// Default ambient half-width `L = 4 n_j`.
pub fn pv_frame_default(n_j: usize) -> Result<PVFrame, PvError> {
    pv_frame(n_j, 4 * n_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{op_norm, projection_defect};

    #[test]
    fn shift_truncation_is_partial_isometry() {
        let s = ShiftTruncation::new(3);
        let t = s.matrix();
        let mut expect = CMatrix::identity(7, 7);
        expect[(6, 6)] = c64(0.0, 0.0);
        assert_eq!(t.adjoint() * &t, expect);
        assert_eq!(s.index(-3), Some(0));
        assert_eq!(s.index(4), None);
    }

    #[test]
    fn frame_is_orthonormal_with_rank_n() {
        for n in [1, 3, 8] {
            let f = pv_frame(n, 2 * n).unwrap();
            for k in 0..n {
                for l in 0..n {
                    let g = f.vector(k).dotc(&f.vector(l));
                    let e = if k == l { 1.0 } else { 0.0 };
                    assert!((g - c64(e, 0.0)).norm() < 1e-12);
                }
            }
            let q = f.q();
            assert!(projection_defect(&q) < 1e-12);
            let trace: f64 = (0..q.nrows()).map(|i| q[(i, i)].re).sum();
            assert!((trace - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn single_vector_frame() {
        let f = pv_frame(1, 4).unwrap();
        assert_eq!(f.vector(0)[4], c64(1.0, 0.0));
        assert!((f.commutator_norm - 1.0).abs() < 1e-12);
        assert!(pv_frame(4, 3).is_err());
    }

    #[test]
    fn compressed_shift_matches_dense() {
        let f = pv_frame(5, 10).unwrap();
        let dense = f.ambient.matrix();
        let m = f.compressed_shift();
        for k in 0..5 {
            for l in 0..5 {
                let v = f.vector(k).dotc(&(&dense * f.vector(l)));
                assert!((v - m[(k, l)]).norm() < 1e-14);
            }
        }
        // cos(π/2n) times the cyclic shift.
        let c = (std::f64::consts::PI / 10.0).cos();
        assert!((op_norm(&m).unwrap() - c).abs() < 1e-12);
    }
}
