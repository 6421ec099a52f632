//! Complex matrix engine.
//!
//! Dense matrices are `nalgebra` matrices over [`C64`]; the large sparse
//! operators used by the free-group ball compressions live in [`sparse`].
//! Norms above the dense threshold go through the Lanczos routine in
//! [`lanczos`], which reports a bracket rather than a bare number.

mod json;
pub mod lanczos;
pub mod sparse;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub use json::{MatrixJson, TupleJson};
pub use lanczos::{largest_singular_value, LanczosOptions, LinearOperator, NormBracket};

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest dimension for which [`op_norm`] runs a full SVD.
pub const DENSE_SVD_LIMIT: usize = 512;
/// Default cap on the number of entries of a single matrix built by [`kron`].
pub const DEFAULT_ENTRY_CAP: usize = 1 << 20;
/// Eigenvalues of a PSD input in `[-PSD_CLAMP, 0)` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Eigenvalues below `-PSD_REJECT` make [`psd_sqrt`] fail.
pub const PSD_REJECT: f64 = 1e-6;
/// Tolerance for the Hermitian test in [`psd_sqrt`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix has eigenvalue {0:e} below the PSD tolerance")]
    NotPositive(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("result would have {entries} entries, above the cap of {cap}")]
    TooLarge { entries: usize, cap: usize },
    #[error("zero vector has no projection")]
    ZeroVector,
}

/// Ordered tuple of equal-size square matrices: one matrix model of a
/// generator tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct MatTuple {
    dim: usize,
    mats: Vec<CMatrix>,
}

impl MatTuple {
    pub fn new(dim: usize, mats: Vec<CMatrix>) -> Result<Self, MatError> {
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(MatError::Dimension(format!(
                    "matrix {i} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { dim, mats })
    }

    /// Builds a tuple from a non-empty list, taking the dimension from the
    /// first matrix.
    pub fn from_mats(mats: Vec<CMatrix>) -> Result<Self, MatError> {
        let dim = mats
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| MatError::Dimension("empty tuple".into()))?;
        Self::new(dim, mats)
    }

    pub fn identity(dim: usize, count: usize) -> Self {
        Self {
            dim,
            mats: vec![CMatrix::identity(dim, dim); count],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn get(&self, i: usize) -> Option<&CMatrix> {
        self.mats.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMatrix> {
        self.mats.iter()
    }

    pub fn into_mats(self) -> Vec<CMatrix> {
        self.mats
    }

    /// Concatenation `(self, other)` as one tuple.
    pub fn concat(&self, other: &MatTuple) -> Result<MatTuple, MatError> {
        if self.dim != other.dim {
            return Err(MatError::Dimension(format!(
                "cannot concatenate tuples of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        let mut mats = self.mats.clone();
        mats.extend(other.mats.iter().cloned());
        Ok(MatTuple { dim: self.dim, mats })
    }

    /// Applies `f` to every matrix.
    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Result<MatTuple, MatError> {
        let mats: Vec<CMatrix> = self.mats.iter().map(f).collect();
        let dim = mats.first().map(|m| m.nrows()).unwrap_or(self.dim);
        MatTuple::new(dim, mats)
    }

    /// Componentwise direct sum of several tuples of equal length.
    pub fn direct_sum(tuples: &[MatTuple]) -> Result<MatTuple, MatError> {
        let count = tuples
            .first()
            .map(|t| t.len())
            .ok_or_else(|| MatError::Dimension("no tuples to sum".into()))?;
        if tuples.iter().any(|t| t.len() != count) {
            return Err(MatError::Dimension("tuples differ in length".into()));
        }
        let dim = tuples.iter().map(|t| t.dim).sum();
        let mats = (0..count)
            .map(|i| {
                let blocks: Vec<&CMatrix> = tuples.iter().map(|t| &t.mats[i]).collect();
                direct_sum_refs(&blocks)
            })
            .collect();
        Ok(MatTuple { dim, mats })
    }
}

impl std::ops::Index<usize> for MatTuple {
    type Output = CMatrix;
    fn index(&self, i: usize) -> &CMatrix {
        &self.mats[i]
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Operator norm (largest singular value).
///
/// Full SVD up to [`DENSE_SVD_LIMIT`], Lanczos above it.
pub fn op_norm(m: &CMatrix) -> Result<f64, MatError> {
    Ok(op_norm_bracket(m)?.value)
}

/// Operator norm together with lower and upper estimates. For the SVD path
/// all three coincide.
pub fn op_norm_bracket(m: &CMatrix) -> Result<NormBracket, MatError> {
    if !is_finite(m) {
        return Err(MatError::NonFinite);
    }
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(NormBracket::exact(0.0));
    }
    if m.nrows().max(m.ncols()) <= DENSE_SVD_LIMIT {
        if let Some(svd) = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0) {
            let s = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            return Ok(NormBracket::exact(s));
        }
    }
    Ok(largest_singular_value(&DenseOp(m), &LanczosOptions::default()))
}

/// `m` viewed as a linear operator for the Lanczos routine.
pub struct DenseOp<'a>(pub &'a CMatrix);

impl LinearOperator for DenseOp<'_> {
    fn nrows(&self) -> usize {
        self.0.nrows()
    }
    fn ncols(&self) -> usize {
        self.0.ncols()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let m = self.0;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                acc += m[(i, j)] * xj;
            }
            *yi = acc;
        }
    }
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        let m = self.0;
        for (j, yj) in y.iter_mut().enumerate() {
            let col = m.column(j);
            let mut acc = C64::new(0.0, 0.0);
            for (i, xi) in x.iter().enumerate() {
                acc += col[i].conj() * xi;
            }
            *yj = acc;
        }
    }
}

/// Largest absolute entry of `m - m*`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, symmetrized first.
pub fn hermitian_eigen(m: &CMatrix) -> SymmetricEigen<C64, nalgebra::Dyn> {
    let sym = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(sym)
}

/// Positive semidefinite square root.
///
/// Eigenvalues in `[-PSD_REJECT·max(1,‖m‖), 0)` are clamped to zero;
/// anything more negative is rejected since it signals an upstream input that
/// was not a contraction.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix, MatError> {
    if m.nrows() != m.ncols() {
        return Err(MatError::Dimension(format!(
            "psd_sqrt needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_finite(m) {
        return Err(MatError::NonFinite);
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * scale {
        return Err(MatError::NotHermitian(defect));
    }
    let eig = hermitian_eigen(m);
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |a, l| a.max(l.abs())).max(1.0);
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -PSD_REJECT * norm {
            return Err(MatError::NotPositive(lambda));
        }
        roots.push(C64::new(lambda.max(0.0).sqrt(), 0.0));
    }
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&CVector::from_vec(roots));
    let s = v * d * v.adjoint();
    Ok((&s + s.adjoint()).scale(0.5))
}

/// Haar-distributed unitary of size `dim`, deterministic per seed.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<CMatrix, MatError> {
    haar_unitary_with(dim, &mut crate::par::task_rng(seed, 0))
}

/// Haar unitary drawn from a caller-supplied generator: QR of a complex
/// Ginibre matrix, with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix, MatError> {
    if dim == 0 {
        return Err(MatError::ZeroDimension);
    }
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(q)
}

/// Matrix of i.i.d. standard complex Gaussians, `E|z|² = 1`.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Standard complex Gaussian vector.
pub fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    ginibre(len, 1, rng).column(0).into_owned()
}

/// Kronecker product with the default entry cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatError> {
    kron_capped(a, b, DEFAULT_ENTRY_CAP)
}

pub fn kron_capped(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix, MatError> {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    let entries = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c)).unwrap_or(usize::MAX);
    if entries > cap {
        return Err(MatError::TooLarge { entries, cap });
    }
    Ok(a.kronecker(b))
}

/// Block-diagonal matrix with the given blocks.
pub fn direct_sum(ms: &[CMatrix]) -> CMatrix {
    let refs: Vec<&CMatrix> = ms.iter().collect();
    direct_sum_refs(&refs)
}

fn direct_sum_refs(ms: &[&CMatrix]) -> CMatrix {
    let rows = ms.iter().map(|m| m.nrows()).sum();
    let cols = ms.iter().map(|m| m.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for m in ms {
        out.view_mut((r, c), (m.nrows(), m.ncols())).copy_from(*m);
        r += m.nrows();
        c += m.ncols();
    }
    out
}

/// Orthogonal projection onto the span of `v`.
pub fn rank1_projection(v: &CVector) -> Result<CMatrix, MatError> {
    let n2 = v.norm_squared();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(MatError::ZeroVector);
    }
    Ok((v * v.adjoint()).unscale(n2))
}

/// `‖m* m - I‖`, the unitarity defect of a square matrix.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.ncols();
    let g = m.adjoint() * m - CMatrix::identity(n, n);
    op_norm(&g).unwrap_or(f64::INFINITY)
}

/// `max(‖p² - p‖, ‖p - p*‖)`.
pub fn projection_defect(p: &CMatrix) -> f64 {
    let idem = op_norm(&(p * p - p)).unwrap_or(f64::INFINITY);
    let herm = op_norm(&(p - p.adjoint())).unwrap_or(f64::INFINITY);
    idem.max(herm)
}

/// `‖ab - ba‖`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a * b - b * a)).unwrap_or(f64::INFINITY)
}

/// Coordinate projection onto the first `rank` basis vectors of `C^dim`.
pub fn coordinate_projection(dim: usize, rank: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j && i < rank {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Orthonormal basis of the range of a projection, as the columns of an
/// isometry. Eigenvectors with eigenvalue above one half are kept.
pub fn range_isometry(p: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(p);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .collect();
    let mut out = CMatrix::zeros(p.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &eig.eigenvectors.column(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::task_rng;

    fn diag(vals: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(vals.to_vec()))
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, v.iter().map(|&x| c64(x, 0.0)))
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&CMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-14);
        let d = diag(&[c64(3.0, 0.0), c64(0.0, -4.0)]);
        assert!((op_norm(&d).unwrap() - 4.0).abs() < 1e-14);
        // [[0,2],[0,0]] has singular values {2, 0}.
        let n = real(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((op_norm(&n).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_rejects_nan() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c64(f64::NAN, 0.0);
        assert_eq!(op_norm(&m), Err(MatError::NonFinite));
    }

    #[test]
    fn lanczos_path_agrees_with_svd() {
        let mut rng = task_rng(11, 0);
        let m = ginibre(40, 30, &mut rng);
        let exact = op_norm(&m).unwrap();
        let b = largest_singular_value(&DenseOp(&m), &LanczosOptions::default());
        assert!((b.value - exact).abs() <= 1e-10 * exact, "{b:?} vs {exact}");
        assert!(b.lower <= exact * (1.0 + 1e-12));
        assert!(b.upper >= exact * (1.0 - 1e-12));
    }

    #[test]
    fn large_dense_uses_bracket() {
        let n = 600;
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c64(1.0 + i as f64 / n as f64, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let b = op_norm_bracket(&d).unwrap();
        let expect = 1.0 + (n - 1) as f64 / n as f64;
        assert!((b.value - expect).abs() < 1e-10 * expect, "{b:?}");
        assert!(b.upper - b.lower <= 1e-6);
    }

    #[test]
    fn psd_sqrt_examples() {
        let i = CMatrix::identity(3, 3);
        assert!((psd_sqrt(&i).unwrap() - &i).norm() < 1e-12);
        let d = diag(&[c64(4.0, 0.0), c64(9.0, 0.0)]);
        let s = psd_sqrt(&d).unwrap();
        assert!((s - diag(&[c64(2.0, 0.0), c64(3.0, 0.0)])).norm() < 1e-12);
        let m = real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let s = psd_sqrt(&m).unwrap();
        // Eigenvalues 1 and 3 with eigenvectors (1,-1)/√2 and (1,1)/√2.
        let r3 = 3f64.sqrt();
        let expect = real(2, 2, &[(1.0 + r3) / 2.0, (r3 - 1.0) / 2.0, (r3 - 1.0) / 2.0, (1.0 + r3) / 2.0]);
        assert!((&s - expect).norm() < 1e-12);
        assert!((&s * &s - &m).norm() < 1e-10);
    }

    #[test]
    fn psd_sqrt_errors() {
        let nh = real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(psd_sqrt(&nh), Err(MatError::NotHermitian(_))));
        let neg = diag(&[c64(1.0, 0.0), c64(-0.1, 0.0)]);
        assert!(matches!(psd_sqrt(&neg), Err(MatError::NotPositive(_))));
        let tiny = diag(&[c64(1.0, 0.0), c64(-1e-12, 0.0)]);
        let s = psd_sqrt(&tiny).unwrap();
        assert_eq!(s[(1, 1)].re, 0.0);
    }

    #[test]
    fn haar_examples() {
        let u = haar_unitary(1, 5).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(haar_unitary(6, 9).unwrap(), haar_unitary(6, 9).unwrap());
        assert_ne!(haar_unitary(6, 9).unwrap(), haar_unitary(6, 10).unwrap());
        for dim in [2, 7, 32, 64] {
            assert!(unitarity_defect(&haar_unitary(dim, 1).unwrap()) <= 1e-12);
        }
        assert_eq!(haar_unitary(0, 1), Err(MatError::ZeroDimension));
    }

    #[test]
    fn haar_trace_second_moment() {
        // E|tr U|^2 = 1 for Haar U(d), d >= 1. |tr U|^2 has variance 1 for d >= 2,
        // so the mean of 1000 samples has standard error about 1/sqrt(1000).
        let samples = 1000;
        let vals: Vec<f64> = crate::par::map_range(samples, |i| {
            let u = haar_unitary_with(8, &mut task_rng(2024, i as u64)).unwrap();
            u.trace().norm_sqr()
        });
        let mean = vals.iter().sum::<f64>() / samples as f64;
        let sigma = (1.0 / samples as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn kron_examples() {
        let i2 = CMatrix::identity(2, 2);
        let i3 = CMatrix::identity(3, 3);
        assert_eq!(kron(&i2, &i3).unwrap(), CMatrix::identity(6, 6));
        let mut rng = task_rng(3, 0);
        let a = ginibre(3, 3, &mut rng);
        let b = ginibre(4, 4, &mut rng);
        let i4 = CMatrix::identity(4, 4);
        let x = kron(&a, &i4).unwrap();
        let y = kron(&i3, &b).unwrap();
        assert_eq!(&x * &y, &y * &x);
        let lhs = op_norm(&kron(&a, &b).unwrap()).unwrap();
        let rhs = op_norm(&a).unwrap() * op_norm(&b).unwrap();
        assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0));
        assert!(matches!(
            kron_capped(&a, &b, 100),
            Err(MatError::TooLarge { entries: 144, cap: 100 })
        ));
    }

    #[test]
    fn direct_sum_examples() {
        let s = direct_sum(&[real(1, 1, &[2.0]), real(1, 1, &[5.0])]);
        assert_eq!(s, diag(&[c64(2.0, 0.0), c64(5.0, 0.0)]));
        assert!((op_norm(&s).unwrap() - 5.0).abs() < 1e-14);
        let mut rng = task_rng(4, 0);
        let blocks: Vec<CMatrix> = (1..5).map(|d| ginibre(d, d, &mut rng)).collect();
        let max_block = blocks.iter().map(|b| op_norm(b).unwrap()).fold(0.0, f64::max);
        assert!((op_norm(&direct_sum(&blocks)).unwrap() - max_block).abs() < 1e-12);
    }

    #[test]
    fn rank1_projection_examples() {
        let e0 = CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(rank1_projection(&e0).unwrap(), diag(&[c64(1.0, 0.0), c64(0.0, 0.0)]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![c64(h, 0.0), c64(h, 0.0)]);
        let p = rank1_projection(&v).unwrap();
        assert!((p - real(2, 2, &[0.5, 0.5, 0.5, 0.5])).norm() < 1e-15);
        let mut rng = task_rng(5, 0);
        let v = gaussian_vector(6, &mut rng);
        let p = rank1_projection(&v).unwrap();
        assert!(projection_defect(&p) <= 1e-12);
        assert_eq!(rank1_projection(&CVector::zeros(3)), Err(MatError::ZeroVector));
    }

    #[test]
    fn tuple_validation() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(3, 3);
        assert!(MatTuple::new(2, vec![a.clone(), b]).is_err());
        let t = MatTuple::new(2, vec![a.clone(), a]).unwrap();
        assert_eq!(t.len(), 2);
        let s = MatTuple::direct_sum(&[t.clone(), t]).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s[0], CMatrix::identity(4, 4));
    }
}
