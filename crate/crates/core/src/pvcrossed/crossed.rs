use serde::Serialize;

use super::{OrbitModel, PVFrame, PvError};
use crate::matcore::{coordinate_projection, kron, op_norm, range_isometry, CMatrix, MatTuple, C64};
use crate::mfcheck::circle_norm;
use crate::ncpoly::NCPoly;

/// Caller polynomials probed on a crossed model.
///
/// * `g`: one variable, evaluated on `U` and compared with the circle oracle.
/// * `h`: `2m` variables `(A_1..A_m, B_1..B_m)`, compared with `h_refs`
///   (default: the same polynomial on the base pair `(x, y)`).
/// * `p`: `m + 1` variables `(A_1..A_m, U)`, reported as plain norms.
#[derive(Debug, Clone, Default)]
pub struct CrossedProbes {
    pub g: Vec<NCPoly>,
    pub h: Vec<NCPoly>,
    pub h_refs: Option<Vec<f64>>,
    pub p: Vec<NCPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub poly: String,
    pub model_norm: f64,
    pub reference: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    pub poly: String,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonReport {
    /// `max_i ‖U*A_i - B_iU*‖`.
    pub intertwine: f64,
    pub intertwine_per_generator: Vec<f64>,
    /// `‖uq - qu‖` of the frame.
    pub frame_commutator: f64,
    /// `max_i ‖p(x_{n,i} - x_{0,i})p‖`, the only place the model fails to
    /// close up.
    pub wraparound: f64,
    pub g_deviations: Vec<ProbeRow>,
    pub h_deviations: Vec<ProbeRow>,
    pub p_witnesses: Vec<WitnessRow>,
}

#[derive(Debug, Clone)]
pub struct CrossedModel {
    pub a: MatTuple,
    pub b: MatTuple,
    pub u: CMatrix,
    pub n_j: usize,
    pub p_rank: usize,
    pub epsilon_report: EpsilonReport,
}

/// `‖U*A_i - B_iU*‖` for each `i`.
pub fn intertwining_defects(a: &MatTuple, b: &MatTuple, u: &CMatrix) -> Result<Vec<f64>, PvError> {
    if a.len() != b.len() || a.dim() != b.dim() || u.nrows() != a.dim() {
        return Err(PvError::Dimension(format!(
            "A: {}×{}, B: {}×{}, U: {}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim(),
            u.nrows()
        )));
    }
    let us = u.adjoint();
    a.iter()
        .zip(b.iter())
        .map(|(ai, bi)| Ok(op_norm(&(&us * ai - bi * &us))?))
        .collect()
}

/// Diagonal matrix unit `E_kk` of size `n`.
fn unit(n: usize, k: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(k, k)] = C64::new(1.0, 0.0);
    e
}

/// Builds `A_i = Σ_k p a_{k,i} p ⊗ q_k`, `B_i = Σ_k p b_{k,i} p ⊗ q_k` and
/// `U = 1 ⊗ q u q` in the basis `h ⊗ f_k`, with `a_k = x_k` and
/// `b_k = y_k = x_{k+1}`, and `p` the coordinate projection of rank
/// `p_rank` (compressed to its range).
pub fn build_crossed_model(orbit: &OrbitModel, frame: &PVFrame, p_rank: usize, probes: &CrossedProbes) -> Result<CrossedModel, PvError> {
    let n = frame.n_j;
    let d = orbit.base.dim();
    if n > orbit.range_k {
        return Err(PvError::Dimension(format!("n_j = {n} exceeds the orbit range {}", orbit.range_k)));
    }
    if p_rank == 0 || p_rank > d {
        return Err(PvError::Dimension(format!("p_rank {p_rank} on a {d}-dimensional model")));
    }
    let iso = range_isometry(&coordinate_projection(d, p_rank));
    let compress = |x: &CMatrix| iso.adjoint() * x * &iso;
    let m = orbit.m();
    let dim = p_rank * n;
    let mut a = vec![CMatrix::zeros(dim, dim); m];
    let mut b = vec![CMatrix::zeros(dim, dim); m];
    for k in 0..n {
        let e = unit(n, k);
        let xk = orbit.x(k as i64).expect("orbit covers 0..n_j");
        let yk = orbit.y(k as i64).expect("orbit covers 0..=n_j");
        for i in 0..m {
            a[i] += kron(&compress(&xk[i]), &e)?;
            b[i] += kron(&compress(&yk[i]), &e)?;
        }
    }
    let a = MatTuple::new(dim, a)?;
    let b = MatTuple::new(dim, b)?;
    let u = kron(&CMatrix::identity(p_rank, p_rank), &frame.compressed_shift())?;

    let per_gen = intertwining_defects(&a, &b, &u)?;
    let x0 = orbit.x(0).expect("orbit holds k = 0");
    let xn = orbit.x(n as i64).expect("orbit covers n_j");
    let mut wraparound = 0.0_f64;
    for (p, q) in xn.iter().zip(x0.iter()) {
        wraparound = wraparound.max(op_norm(&compress(&(p - q)))?);
    }

    let ut = MatTuple::new(dim, vec![u.clone()])?;
    let mut g_deviations = Vec::new();
    for g in &probes.g {
        let model_norm = op_norm(&g.evaluate(&ut)?)?;
        let reference = circle_norm(g).map_err(|e| PvError::Oracle(e.to_string()))?;
        g_deviations.push(ProbeRow {
            poly: g.to_string(),
            model_norm,
            reference,
            deviation: (model_norm - reference).abs(),
        });
    }

    let ab = a.concat(&b)?;
    let refs = match &probes.h_refs {
        Some(r) if r.len() == probes.h.len() => r.clone(),
        Some(r) => {
            return Err(PvError::Dimension(format!("{} references for {} H-polynomials", r.len(), probes.h.len())));
        }
        None => {
            let base_xy = x0.concat(orbit.y(0).expect("orbit holds k = 1"))?;
            probes
                .h
                .iter()
                .map(|h| Ok(op_norm(&h.evaluate(&base_xy)?)?))
                .collect::<Result<Vec<_>, PvError>>()?
        }
    };
    let mut h_deviations = Vec::new();
    for (h, &reference) in probes.h.iter().zip(&refs) {
        let model_norm = op_norm(&h.evaluate(&ab)?)?;
        h_deviations.push(ProbeRow {
            poly: h.to_string(),
            model_norm,
            reference,
            deviation: (model_norm - reference).abs(),
        });
    }

    let au = a.concat(&ut)?;
    let mut p_witnesses = Vec::new();
    for p in &probes.p {
        p_witnesses.push(WitnessRow {
            poly: p.to_string(),
            norm: op_norm(&p.evaluate(&au)?)?,
        });
    }

    Ok(CrossedModel {
        epsilon_report: EpsilonReport {
            intertwine: per_gen.iter().cloned().fold(0.0, f64::max),
            intertwine_per_generator: per_gen,
            frame_commutator: frame.commutator_norm,
            wraparound,
            g_deviations,
            h_deviations,
            p_witnesses,
        },
        a,
        b,
        u,
        n_j: n,
        p_rank,
    })
}
