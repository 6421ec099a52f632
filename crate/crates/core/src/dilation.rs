//! Unitary dilations of compressed commuting unitaries, with a certified
//! bound on how far the dilated pair is from commuting.
//!
//! Given commuting unitaries `u_i`, `v_j`, a finite-rank projection `p` and
//! a partial isometry `w` carrying `p` onto an orthogonal copy `q = ww*`,
//! the dilation
//!
//! ```text
//! U_i = pu_ip + (p - pu_ipu_i*p)^{1/2} w* + w (p - pu_i*pu_ip)^{1/2} - w pu_i*p w*
//! V_j = pv_jp + w v_j w*
//! ```
//!
//! lives on `range(p + q)`. Every `U_i` is unitary and
//! `‖U_iV_j - V_jU_i‖ ≤ 4t + 2tD_δ + δ` with `t = max_j ‖pv_j - v_jp‖`.
//!
//! `D_δ` comes from a polynomial approximation of the square root, written
//! in the basis `1 - (1-t)^k`:
//!
//! ```text
//! P(t) = Σ_{k=1}^{K+1} w_k (1 - (1-t)^k),   w_k ≥ 0,   Σ w_k = 1
//! ```
//!
//! The weights are the binomial-series coefficients of `1 - √(1-s)` with the
//! tail mass lumped into the last weight, which makes `0 ≤ √t - P(t) ≤ w_{K+1}`
//! on `[0, 1]`. Since `‖[B, S^k]‖ ≤ k‖[B, S]‖` for a positive contraction `S`,
//! the Leibniz constant is `D_δ = 3·Σ k·w_k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{
    self, c64, commutator_norm, direct_sum, hermitian_eigen, op_norm, projection_defect,
    range_isometry, unitarity_defect, CMatrix, CVector, MatError, MatTuple, MatrixJson, TupleJson,
    C64,
};
use crate::ncpoly::{NCPoly, PolyError};
use crate::par;

/// Default cap on the degree of the square-root approximation.
pub const DEFAULT_DEGREE_CAP: usize = 131_072;
/// Tolerance for the unitary / projection / partial-isometry checks on input.
pub const INPUT_TOL: f64 = 1e-10;
/// `u_i` and `v_j` must commute to within this.
pub const COMMUTE_TOL: f64 = 1e-9;
/// Contractions whose norm exceeds one by more than this get clamped.
pub const CONTRACTION_CLAMP: f64 = 1e-10;
/// Contractions whose norm exceeds one by more than this are rejected.
pub const CONTRACTION_REJECT: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DilationError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("delta must lie in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("approximating to {delta} needs degree {needed}, above the cap {cap}")]
    DegreeCap { delta: f64, needed: usize, cap: usize },
    #[error("matrix of norm {0} is not a contraction")]
    NotContraction(f64),
    #[error("invalid dilation input: {0}")]
    Invalid(String),
    #[error("model range {n1}..={m} is invalid for {count} models")]
    Range { n1: usize, m: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, DilationError>;

/// Polynomial approximation of `√t` on `[0, 1]` with `P(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtApprox {
    /// `w_k` for `k = 1..=degree`, the coefficients of `1 - (1-t)^k`.
    pub weights: Vec<f64>,
    /// Certified bound on `sup |√t - P(t)|`.
    pub delta: f64,
    pub degree: usize,
}

pub fn sqrt_poly_approx(delta: f64) -> Result<SqrtApprox> {
    sqrt_poly_approx_capped(delta, DEFAULT_DEGREE_CAP)
}

pub fn sqrt_poly_approx_capped(delta: f64, cap: usize) -> Result<SqrtApprox> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DilationError::BadDelta(delta));
    }
    // a_1 = 1/2, a_{k+1} = a_k (2k-1)/(2k+2); remainder R_K = 1 - Σ_{k≤K} a_k
    // decays like 1/√(πK).
    let mut weights = Vec::new();
    let mut a = 0.5;
    let mut rest = 1.0_f64;
    while rest > delta {
        if weights.len() + 1 >= cap {
            let needed = (1.0 / (std::f64::consts::PI * delta * delta)).ceil() as usize + 1;
            return Err(DilationError::DegreeCap { delta, needed, cap });
        }
        weights.push(a);
        rest -= a;
        let k = weights.len() as f64;
        a *= (2.0 * k - 1.0) / (2.0 * k + 2.0);
    }
    let rest = rest.max(0.0);
    weights.push(rest);
    Ok(SqrtApprox {
        degree: weights.len(),
        weights,
        delta: rest,
    })
}

impl SqrtApprox {
    pub fn eval(&self, t: f64) -> f64 {
        let s = 1.0 - t;
        let mut pow = 1.0;
        let mut acc = 0.0;
        for &w in &self.weights {
            pow *= s;
            acc += w * (1.0 - pow);
        }
        acc
    }

    /// `P(I - S)` for a positive contraction `S`, as `Σ w_k (I - S^k)`.
    pub fn eval_complement(&self, s: &CMatrix) -> CMatrix {
        let n = s.nrows();
        let id = CMatrix::identity(n, n);
        let mut pow = id.clone();
        let mut acc = CMatrix::zeros(n, n);
        for &w in &self.weights {
            pow = &pow * s;
            acc += (&id - &pow).scale(w);
        }
        acc
    }

    /// `Σ k·w_k`, which bounds `|P'|` on `[0, 1]`.
    pub fn derivative_bound(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i + 1) as f64 * w)
            .sum()
    }

    /// `D_δ = 3·Σ k·w_k`.
    pub fn d_constant(&self) -> f64 {
        3.0 * self.derivative_bound()
    }

    /// Coefficients in the monomial basis, constant term first. Only offered
    /// up to degree 60; past that the alternating binomial sums are useless
    /// in floating point.
    pub fn monomial_coeffs(&self) -> Option<Vec<f64>> {
        if self.degree > 60 {
            return None;
        }
        let mut c = vec![0.0; self.degree + 1];
        for (i, &w) in self.weights.iter().enumerate() {
            let k = i + 1;
            // 1 - (1-t)^k = Σ_{j≥1} (-1)^{j+1} C(k,j) t^j
            let mut binom = 1.0;
            for j in 1..=k {
                binom = binom * (k - j + 1) as f64 / j as f64;
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                c[j] += sign * w * binom;
            }
        }
        Some(c)
    }

    /// Grid-based bound on the sup error: the largest sampled error plus the
    /// moduli of continuity of `√t` and `P` across one grid step.
    pub fn grid_certificate(&self, points: usize) -> f64 {
        let points = points.max(2);
        let h = 1.0 / (points - 1) as f64;
        let worst = (0..points)
            .map(|i| {
                let t = i as f64 * h;
                (t.sqrt() - self.eval(t)).abs()
            })
            .fold(0.0, f64::max);
        worst + h.sqrt() + self.derivative_bound() * h
    }
}

/// The Halmos unitary `[[A, (I-AA*)^{1/2}], [(I-A*A)^{1/2}, -A*]]`.
///
/// Everything comes from one eigendecomposition `A*A = VΛV*`. The right
/// defect is `V(1-Λ)^{1/2}V*`; the left one is `I - A k(A*A) A*` with
/// `k(λ) = 1/(1+√(1-λ))`, which equals `(I-AA*)^{1/2}` and keeps the two
/// defects consistent to roundoff even when eigenvalues sit at 1. The
/// top-left block is `A` itself unless `‖A‖` exceeds one by more than
/// `CONTRACTION_CLAMP`; then `A` is rescaled to norm 1 on the offending
/// directions (up to `CONTRACTION_REJECT`).
pub fn halmos_dilate(a: &CMatrix) -> Result<CMatrix> {
    let d = a.nrows();
    if d != a.ncols() {
        return Err(MatError::Dimension(format!("halmos_dilate needs a square matrix, got {}x{}", d, a.ncols())).into());
    }
    if d == 0 {
        return Err(MatError::ZeroDimension.into());
    }
    if !matcore::is_finite(a) {
        return Err(MatError::NonFinite.into());
    }
    let gram = |m: &CMatrix| {
        let g = m.adjoint() * m;
        (&g + g.adjoint()).scale(0.5)
    };
    let eig = matcore::hermitian_eigen(&gram(a));
    let top = eig.eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l)).max(0.0).sqrt();
    if top > 1.0 + CONTRACTION_REJECT {
        return Err(DilationError::NotContraction(top));
    }
    let v = &eig.eigenvectors;
    let spectral = |f: &dyn Fn(f64) -> f64, lams: &[f64]| {
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(d, lams.iter().map(|&l| c64(f(l), 0.0))));
        v * diag * v.adjoint()
    };
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (a, lams) = if top > 1.0 + CONTRACTION_CLAMP {
        let shrink = spectral(&|l: f64| if l > 1.0 { 1.0 / l.sqrt() } else { 1.0 }, &raw);
        (a * shrink, raw.iter().map(|&l| l.min(1.0)).collect::<Vec<_>>())
    } else {
        (a.clone(), raw)
    };
    let lams: Vec<f64> = lams.iter().map(|&l| l.clamp(0.0, 1.0)).collect();
    let right = spectral(&|l: f64| (1.0 - l).sqrt(), &lams);
    let k = spectral(&|l: f64| 1.0 / (1.0 + (1.0 - l).sqrt()), &lams);
    let left = CMatrix::identity(d, d) - &a * k * a.adjoint();
    let left = (&left + left.adjoint()).scale(0.5);
    let mut u = CMatrix::zeros(2 * d, 2 * d);
    u.view_mut((0, 0), (d, d)).copy_from(&a);
    u.view_mut((0, d), (d, d)).copy_from(&left);
    u.view_mut((d, 0), (d, d)).copy_from(&right);
    u.view_mut((d, d), (d, d)).copy_from(&(-a.adjoint()));
    Ok(u)
}

/// Partial isometry `w` with `w*w = p` and `ww* = q`, matching the
/// eigenbases of two orthogonal projections of equal rank.
pub fn partial_isometry(p: &CMatrix, q: &CMatrix) -> Result<CMatrix> {
    for (name, m) in [("p", p), ("q", q)] {
        let e = projection_defect(m);
        if e > INPUT_TOL {
            return Err(DilationError::Invalid(format!("{name} is not a projection (defect {e:e})")));
        }
    }
    if op_norm(&(p * q))? > INPUT_TOL {
        return Err(DilationError::Invalid("p and q are not orthogonal".into()));
    }
    let pb = range_isometry(p);
    let qb = range_isometry(q);
    if pb.ncols() != qb.ncols() {
        return Err(DilationError::Invalid(format!(
            "ranks differ: {} vs {}",
            pb.ncols(),
            qb.ncols()
        )));
    }
    Ok(qb * pb.adjoint())
}

/// Validated input to [`commuting_pair`].
#[derive(Debug, Clone)]
pub struct DilationInput {
    us: MatTuple,
    vs: MatTuple,
    p: CMatrix,
    w: CMatrix,
}

impl DilationInput {
    pub fn new(us: MatTuple, vs: MatTuple, p: CMatrix, w: CMatrix) -> Result<Self> {
        let d = us.dim();
        if vs.dim() != d || p.shape() != (d, d) || w.shape() != (d, d) {
            return Err(DilationError::Invalid(format!(
                "shapes disagree: us {d}, vs {}, p {:?}, w {:?}",
                vs.dim(),
                p.shape(),
                w.shape()
            )));
        }
        for (name, t) in [("u", &us), ("v", &vs)] {
            for (i, m) in t.iter().enumerate() {
                let e = unitarity_defect(m);
                if e > INPUT_TOL {
                    return Err(DilationError::Invalid(format!("{name}{} is not unitary (defect {e:e})", i + 1)));
                }
            }
        }
        let e = projection_defect(&p);
        if e > INPUT_TOL {
            return Err(DilationError::Invalid(format!("p is not a projection (defect {e:e})")));
        }
        let e = op_norm(&(w.adjoint() * &w - &p))?;
        if e > INPUT_TOL {
            return Err(DilationError::Invalid(format!("w*w differs from p by {e:e}")));
        }
        let e = op_norm(&(&w * w.adjoint() * &p))?;
        if e > INPUT_TOL {
            return Err(DilationError::Invalid(format!("ww* is not orthogonal to p ({e:e})")));
        }
        for (i, u) in us.iter().enumerate() {
            for (j, v) in vs.iter().enumerate() {
                let e = commutator_norm(u, v);
                if e > COMMUTE_TOL {
                    return Err(DilationError::Invalid(format!(
                        "u{} and v{} do not commute ({e:e})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { us, vs, p, w })
    }

    pub fn us(&self) -> &MatTuple {
        &self.us
    }
    pub fn vs(&self) -> &MatTuple {
        &self.vs
    }
    pub fn p(&self) -> &CMatrix {
        &self.p
    }
    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    /// `max_j ‖pv_j - v_jp‖`.
    pub fn t(&self) -> f64 {
        self.vs
            .iter()
            .map(|v| commutator_norm(&self.p, v))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationInputJson {
    pub us: TupleJson,
    pub vs: TupleJson,
    pub p: MatrixJson,
    pub w: MatrixJson,
}

impl TryFrom<DilationInputJson> for DilationInput {
    type Error = DilationError;

    fn try_from(j: DilationInputJson) -> Result<Self> {
        DilationInput::new(
            MatTuple::try_from(j.us)?,
            MatTuple::try_from(j.vs)?,
            CMatrix::try_from(j.p)?,
            CMatrix::try_from(j.w)?,
        )
    }
}

impl From<&DilationInput> for DilationInputJson {
    fn from(d: &DilationInput) -> Self {
        Self {
            us: (&d.us).into(),
            vs: (&d.vs).into(),
            p: (&d.p).into(),
            w: (&d.w).into(),
        }
    }
}

/// Parameters for [`random_input`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub dim: usize,
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    /// Size of the rotation applied to `p`; `t` scales with it.
    pub eps: f64,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(dim: usize, n: usize, m: usize, seed: u64) -> Self {
        Self {
            dim,
            n,
            m,
            rank: (dim / 4).max(1),
            eps: 0.01,
            seed,
        }
    }
}

/// Random commuting unitaries, diagonal in a shared Haar basis `W`, with
/// `p = e^{iεH} W E W* e^{-iεH}` for a coordinate projection `E` and a random
/// Hermitian `H`. `q` is built the same way on the next `rank` coordinates.
pub fn random_input(spec: &RandomSpec) -> Result<DilationInput> {
    let RandomSpec { dim, n, m, rank, eps, seed } = *spec;
    if rank == 0 || 2 * rank > dim {
        return Err(DilationError::Invalid(format!("rank {rank} does not fit twice into dimension {dim}")));
    }
    let mut rng = par::task_rng(seed, 0);
    let basis = matcore::haar_unitary_with(dim, &mut rng)?;
    let phases = |rng: &mut rand_chacha::ChaCha8Rng| {
        use rand::Rng;
        let d = CVector::from_iterator(
            dim,
            (0..dim).map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))),
        );
        &basis * CMatrix::from_diagonal(&d) * basis.adjoint()
    };
    let us = MatTuple::new(dim, (0..n).map(|_| phases(&mut rng)).collect())?;
    let vs = MatTuple::new(dim, (0..m).map(|_| phases(&mut rng)).collect())?;
    let g = matcore::ginibre(dim, dim, &mut rng);
    let h = (&g + g.adjoint()).scale(0.5);
    let rot = unitary_exp(&h, eps);
    let coords = |lo: usize| {
        CMatrix::from_fn(dim, dim, |i, j| {
            if i == j && (lo..lo + rank).contains(&i) {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
    };
    let frame = &rot * &basis;
    let p = &frame * coords(0) * frame.adjoint();
    let q = &frame * coords(rank) * frame.adjoint();
    let p = (&p + p.adjoint()).scale(0.5);
    let q = (&q + q.adjoint()).scale(0.5);
    let w = partial_isometry(&p, &q)?;
    DilationInput::new(us, vs, p, w)
}

/// `e^{iεH}` for Hermitian `H`.
fn unitary_exp(h: &CMatrix, eps: f64) -> CMatrix {
    let eig = hermitian_eigen(h);
    let d = CVector::from_iterator(
        h.nrows(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, eps * l)),
    );
    &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Dilated pair and everything needed to audit its commutator bound.
#[derive(Debug, Clone)]
pub struct DilationResult {
    pub us: MatTuple,
    pub vs: MatTuple,
    pub t_measured: f64,
    pub delta: f64,
    pub d_delta: f64,
    pub bound: f64,
    /// `commutators[i][j] = ‖U_iV_j - V_jU_i‖`.
    pub commutators: Vec<Vec<f64>>,
    /// Largest `‖U_i*U_i - I‖`.
    pub unitarity_defect: f64,
}

impl DilationResult {
    pub fn max_commutator(&self) -> f64 {
        self.commutators
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn certified(&self) -> bool {
        self.max_commutator() <= self.bound
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationResultJson {
    pub us: TupleJson,
    pub vs: TupleJson,
    pub t_measured: f64,
    pub delta: f64,
    pub d_delta: f64,
    pub bound: f64,
    pub commutators: Vec<Vec<f64>>,
    pub max_commutator: f64,
    pub unitarity_defect: f64,
    pub certified: bool,
}

impl From<&DilationResult> for DilationResultJson {
    fn from(r: &DilationResult) -> Self {
        Self {
            us: (&r.us).into(),
            vs: (&r.vs).into(),
            t_measured: r.t_measured,
            delta: r.delta,
            d_delta: r.d_delta,
            bound: r.bound,
            commutators: r.commutators.clone(),
            max_commutator: r.max_commutator(),
            unitarity_defect: r.unitarity_defect,
            certified: r.certified(),
        }
    }
}

/// Dilates the compressions of `input` to `range(p + ww*)` and certifies
/// `‖U_iV_j - V_jU_i‖ ≤ 4t + 2tD_δ + δ`.
///
/// Blocks are written in the basis `[P_b, wP_b]` where `P_b` is an isometry
/// onto `range(p)`; there `U_i` is the Halmos dilation of `P_b* u_i P_b` and
/// `V_j = diag(B_j, B_j)` with `B_j = P_b* v_j P_b`.
pub fn commuting_pair(input: &DilationInput, delta: f64) -> Result<DilationResult> {
    let approx = sqrt_poly_approx(delta / 4.0)?;
    let pb = range_isometry(&input.p);
    let r = pb.ncols();
    if r == 0 {
        return Err(DilationError::Invalid("p has rank zero".into()));
    }
    let compress = |m: &CMatrix| pb.adjoint() * m * &pb;
    let us = input
        .us
        .iter()
        .map(|u| halmos_dilate(&compress(u)))
        .collect::<Result<Vec<_>>>()?;
    let vs: Vec<CMatrix> = input
        .vs
        .iter()
        .map(|v| {
            let b = compress(v);
            direct_sum(&[b.clone(), b])
        })
        .collect();
    let t = input.t();
    let (n, m) = (us.len(), vs.len());
    let flat = par::map_range(n * m, |k| commutator_norm(&us[k / m.max(1)], &vs[k % m.max(1)]));
    let commutators = (0..n).map(|i| flat[i * m..(i + 1) * m].to_vec()).collect();
    let defect = us.iter().map(unitarity_defect).fold(0.0, f64::max);
    let d_delta = approx.d_constant();
    Ok(DilationResult {
        us: MatTuple::new(2 * r, us)?,
        vs: MatTuple::new(2 * r, vs)?,
        t_measured: t,
        delta,
        d_delta,
        bound: 4.0 * t + 2.0 * t * d_delta + delta,
        commutators,
        unitarity_defect: defect,
    })
}

/// Componentwise direct sum of `models[N1..=M]` (1-based, inclusive).
pub fn tail_direct_sum(models: &[MatTuple], n1: usize, m: usize) -> Result<MatTuple> {
    if n1 < 1 || n1 > m || m > models.len() {
        return Err(DilationError::Range { n1, m, count: models.len() });
    }
    Ok(MatTuple::direct_sum(&models[n1 - 1..m])?)
}

/// [`commuting_pair`] for tensor-type input (`u_i ⊗ 1`, `1 ⊗ z_j`), plus the
/// norms `‖P(U, V)‖` of caller polynomials in the variables
/// `U_1..U_n, V_1..V_m`.
#[derive(Debug, Clone)]
pub struct TensorMicrostate {
    pub result: DilationResult,
    pub witnesses: Vec<f64>,
}

pub fn tensor_microstate(
    us: &MatTuple,
    zs: &MatTuple,
    p: &CMatrix,
    w: &CMatrix,
    delta: f64,
    polys: &[NCPoly],
) -> Result<TensorMicrostate> {
    let input = DilationInput::new(us.clone(), zs.clone(), p.clone(), w.clone())?;
    let result = commuting_pair(&input, delta)?;
    let joint = result.us.concat(&result.vs)?;
    let witnesses = par::map_slice(polys, |poly| -> Result<f64> {
        Ok(op_norm(&poly.evaluate(&joint)?)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TensorMicrostate { result, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::coordinate_projection;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        op_norm(&(a - b)).unwrap() <= tol
    }

    #[test]
    fn sqrt_weights_small_cases() {
        let s = sqrt_poly_approx(0.5).unwrap();
        assert_eq!(s.degree, 2);
        assert_eq!(s.weights, vec![0.5, 0.5]);
        assert_eq!(s.monomial_coeffs().unwrap(), vec![0.0, 1.5, -0.5]);
        assert!(s.grid_certificate(1_000_001) <= 0.5);
        assert_eq!(s.eval(0.0), 0.0);
    }

    #[test]
    fn sqrt_error_is_one_sided_and_bounded() {
        for delta in [0.2, 0.05, 0.01] {
            let s = sqrt_poly_approx(delta).unwrap();
            assert!(s.delta <= delta);
            assert_eq!(s.eval(0.0), 0.0);
            assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..=2000 {
                let t = i as f64 / 2000.0;
                let e = t.sqrt() - s.eval(t);
                assert!(e >= -1e-12 && e <= s.delta + 1e-12, "t={t} e={e}");
            }
        }
        let s = sqrt_poly_approx(0.05).unwrap();
        assert!(s.grid_certificate(1_000_001) <= 0.05);
    }

    #[test]
    fn degree_cap_is_enforced() {
        assert!(matches!(
            sqrt_poly_approx_capped(0.01, 512),
            Err(DilationError::DegreeCap { .. })
        ));
        assert!(matches!(sqrt_poly_approx(0.0), Err(DilationError::BadDelta(_))));
        // δ/4 for δ = 0.01 stays under the default cap.
        assert!(sqrt_poly_approx(0.0025).is_ok());
    }

    #[test]
    fn complement_evaluation_matches_scalar() {
        let s = sqrt_poly_approx(0.1).unwrap();
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.0, 0.0), c64(0.3, 0.0), c64(1.0, 0.0)]));
        let e = s.eval_complement(&m);
        for (i, x) in [0.0, 0.3, 1.0].iter().enumerate() {
            assert!((e[(i, i)].re - s.eval(1.0 - x)).abs() < 1e-14);
        }
    }

    #[test]
    fn halmos_examples() {
        let one = CMatrix::from_element(1, 1, c64(1.0, 0.0));
        let u = halmos_dilate(&one).unwrap();
        assert!(close(&u, &CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)]), 1e-15));
        let zero = CMatrix::zeros(1, 1);
        let u = halmos_dilate(&zero).unwrap();
        assert!(close(&u, &CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]), 1e-15));
        let half = CMatrix::from_element(1, 1, c64(0.5, 0.0));
        let u = halmos_dilate(&half).unwrap();
        let r3 = 3f64.sqrt() / 2.0;
        let expect = CMatrix::from_row_slice(2, 2, &[c64(0.5, 0.0), c64(r3, 0.0), c64(r3, 0.0), c64(-0.5, 0.0)]);
        assert!(close(&u, &expect, 1e-15));
        let big = CMatrix::from_element(1, 1, c64(1.01, 0.0));
        assert!(matches!(halmos_dilate(&big), Err(DilationError::NotContraction(_))));
        let barely = CMatrix::from_element(1, 1, c64(1.0 + 1e-9, 0.0));
        let u = halmos_dilate(&barely).unwrap();
        assert_eq!(u[(0, 0)], c64(1.0, 0.0));
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn halmos_keeps_top_left_block() {
        let u = matcore::haar_unitary(6, 3).unwrap();
        let a = u.view((0, 0), (4, 4)).into_owned();
        let d = halmos_dilate(&a).unwrap();
        assert_eq!(d.view((0, 0), (4, 4)).into_owned(), a);
        assert!(unitarity_defect(&d) < 1e-12);
    }

    #[test]
    fn partial_isometry_links_projections() {
        let p = coordinate_projection(4, 2);
        let q = CMatrix::identity(4, 4) - &p;
        let w = partial_isometry(&p, &q).unwrap();
        assert!(close(&(w.adjoint() * &w), &p, 1e-12));
        assert!(close(&(&w * w.adjoint()), &q, 1e-12));
        assert!(partial_isometry(&p, &p).is_err());
    }

    #[test]
    fn input_validation() {
        let spec = RandomSpec::new(8, 1, 1, 1);
        let good = random_input(&spec).unwrap();
        let bad_u = MatTuple::new(8, vec![CMatrix::identity(8, 8).scale(2.0)]).unwrap();
        assert!(DilationInput::new(bad_u, good.vs.clone(), good.p.clone(), good.w.clone()).is_err());
        let other = matcore::haar_unitary(8, 99).unwrap();
        let noncommuting = MatTuple::new(8, vec![other]).unwrap();
        assert!(DilationInput::new(good.us.clone(), noncommuting, good.p.clone(), good.w.clone()).is_err());
        assert!(DilationInput::new(good.us.clone(), good.vs.clone(), good.p.clone(), good.p.clone()).is_err());
    }

    #[test]
    fn spectral_projection_gives_zero_t() {
        // u, v diagonal on C^8, p a spectral projection of v.
        let diag = |ph: &[f64]| CMatrix::from_diagonal(&CVector::from_iterator(8, ph.iter().map(|&a| C64::from_polar(1.0, a))));
        let u = diag(&[0.1, 0.7, 1.3, 2.0, 2.9, 3.5, 4.4, 5.8]);
        let v = diag(&[1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0]);
        let p = coordinate_projection(8, 2);
        let q = coordinate_projection(8, 4) - &p;
        let w = partial_isometry(&p, &q).unwrap();
        let input = DilationInput::new(MatTuple::new(8, vec![u]).unwrap(), MatTuple::new(8, vec![v]).unwrap(), p, w).unwrap();
        let r = commuting_pair(&input, 0.1).unwrap();
        assert_eq!(r.t_measured, 0.0);
        assert_eq!(r.bound, 0.1);
        assert!(r.max_commutator() <= 0.1);
        assert!(r.unitarity_defect < 1e-12);
    }

    #[test]
    fn random_pair_respects_bound_and_is_delta_independent() {
        let input = random_input(&RandomSpec::new(16, 2, 2, 5)).unwrap();
        let t = input.t();
        assert!(t > 1e-4 && t < 0.1, "t = {t}");
        let a = commuting_pair(&input, 0.1).unwrap();
        let b = commuting_pair(&input, 0.01).unwrap();
        assert!(a.certified() && b.certified());
        assert_eq!(a.commutators, b.commutators);
    }

    #[test]
    fn tail_sum_is_blockwise_max() {
        let m = |x: f64| MatTuple::new(1, vec![CMatrix::from_element(1, 1, c64(x, 0.0))]).unwrap();
        let models = vec![m(2.0), m(5.0), m(3.0)];
        let d = tail_direct_sum(&models, 1, 2).unwrap();
        assert_eq!(op_norm(&d[0]).unwrap(), 5.0);
        assert_eq!(tail_direct_sum(&models, 3, 3).unwrap(), models[2]);
        assert!(tail_direct_sum(&models, 0, 2).is_err());
        assert!(tail_direct_sum(&models, 2, 4).is_err());
    }

    #[test]
    fn identity_zs_keep_commutators_below_delta() {
        let dim = 8;
        let us = MatTuple::new(dim, vec![matcore::haar_unitary(dim, 4).unwrap()]).unwrap();
        let zs = MatTuple::identity(dim, 1);
        let p = coordinate_projection(dim, 3);
        let q = coordinate_projection(dim, 6) - &p;
        let w = partial_isometry(&p, &q).unwrap();
        let poly = crate::ncpoly::parse("X1*X2", 2).unwrap();
        let tm = tensor_microstate(&us, &zs, &p, &w, 0.05, &[poly]).unwrap();
        assert!(tm.result.max_commutator() <= 0.05);
        assert!((tm.witnesses[0] - 1.0).abs() < 1e-10);
    }
}
