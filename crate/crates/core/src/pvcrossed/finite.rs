use serde::Serialize;

use super::PvError;
use crate::groups::Perm;
use crate::matcore::{kron, max_abs, unitarity_defect, CMatrix, MatTuple, C64};

/// Small finite groups, realized as permutation groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiniteGroup {
    /// `Z_p` as rotations of `p` points; element `k` is rotation by `k`.
    Cyclic(usize),
    /// `S_n` in the order of [`Perm::all`].
    Symmetric(usize),
}

impl FiniteGroup {
    pub fn name(&self) -> String {
        match self {
            FiniteGroup::Cyclic(p) => format!("Z{p}"),
            FiniteGroup::Symmetric(n) => format!("S{n}"),
        }
    }

    pub fn elements(&self) -> Vec<Perm> {
        match *self {
            FiniteGroup::Cyclic(p) => (0..p)
                .map(|k| Perm::new((0..p).map(|i| (i + k) % p).collect()).expect("rotation"))
                .collect(),
            FiniteGroup::Symmetric(n) => Perm::all(n),
        }
    }

    pub fn order(&self) -> usize {
        match *self {
            FiniteGroup::Cyclic(p) => p,
            FiniteGroup::Symmetric(n) => (1..=n).product(),
        }
    }
}

pub const HOMOMORPHISM_TOL: f64 = 1e-10;

/// Covariant pair `(π, λ)` on `C^d ⊗ l²(G)` for `α_g = Ad W_g` on `M_d`.
#[derive(Debug, Clone)]
pub struct FiniteCrossed {
    pub group: FiniteGroup,
    pub base_dim: usize,
    pub elements: Vec<Perm>,
    pub conjugators: Vec<CMatrix>,
    /// `λ_h`, one per element, in element order.
    pub lambdas: MatTuple,
    index: std::collections::HashMap<Perm, usize>,
}

impl FiniteCrossed {
    fn idx(&self, g: &Perm) -> usize {
        self.index[g]
    }

    pub fn alpha(&self, g: usize, a: &CMatrix) -> CMatrix {
        let w = &self.conjugators[g];
        w * a * w.adjoint()
    }

    /// `π(a)`: block `g` holds `α(g⁻¹)(a)`.
    pub fn pi(&self, a: &CMatrix) -> CMatrix {
        let d = self.base_dim;
        let n = self.elements.len();
        let mut out = CMatrix::zeros(d * n, d * n);
        for (g, perm) in self.elements.iter().enumerate() {
            let block = self.alpha(self.idx(&perm.inv()), a);
            out.view_mut((g * d, g * d), (d, d)).copy_from(&block);
        }
        out
    }

    /// `max_h ‖λ_h π(a) λ_h* - π(α_h(a))‖_max`.
    pub fn covariance_residual(&self, a: &CMatrix) -> f64 {
        let pa = self.pi(a);
        (0..self.elements.len())
            .map(|h| {
                let l = &self.lambdas[h];
                max_abs(&(l * &pa * l.adjoint() - self.pi(&self.alpha(h, a))))
            })
            .fold(0.0, f64::max)
    }
}

/// Regular covariant representation of `(M_d, G, Ad W)`. `conjugators[g]`
/// implements `α_g` for the `g`-th element of [`FiniteGroup::elements`];
/// `g ↦ W_g` must be a projective homomorphism.
pub fn finite_group_crossed(base_dim: usize, group: FiniteGroup, conjugators: Vec<CMatrix>) -> Result<FiniteCrossed, PvError> {
    let elements = group.elements();
    if elements.is_empty() || base_dim == 0 {
        return Err(PvError::EmptyGroup);
    }
    if conjugators.len() != elements.len() {
        return Err(PvError::Dimension(format!("{} conjugators for a group of order {}", conjugators.len(), elements.len())));
    }
    for (g, w) in conjugators.iter().enumerate() {
        if w.nrows() != base_dim || w.ncols() != base_dim {
            return Err(PvError::Dimension(format!("conjugator {g} is {}×{}", w.nrows(), w.ncols())));
        }
        let e = unitarity_defect(w);
        if e > HOMOMORPHISM_TOL {
            return Err(PvError::NotHomomorphism(e));
        }
    }
    let index: std::collections::HashMap<Perm, usize> = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    // Ad W is a homomorphism iff W_{gh}* W_g W_h is a scalar.
    for (g, pg) in elements.iter().enumerate() {
        for (h, ph) in elements.iter().enumerate() {
            let gh = index[&pg.compose(ph)];
            let m = conjugators[gh].adjoint() * &conjugators[g] * &conjugators[h];
            let s = m[(0, 0)];
            let dev = max_abs(&(m - CMatrix::identity(base_dim, base_dim) * s));
            if dev > HOMOMORPHISM_TOL {
                return Err(PvError::NotHomomorphism(dev));
            }
        }
    }
    let n = elements.len();
    let id = CMatrix::identity(base_dim, base_dim);
    let mut lambdas = Vec::with_capacity(n);
    for ph in &elements {
        let mut p = CMatrix::zeros(n, n);
        for (g, pg) in elements.iter().enumerate() {
            p[(index[&ph.compose(pg)], g)] = C64::new(1.0, 0.0);
        }
        lambdas.push(kron(&p, &id)?);
    }
    Ok(FiniteCrossed {
        group,
        base_dim,
        lambdas: MatTuple::new(base_dim * n, lambdas)?,
        elements,
        conjugators,
        index,
    })
}

/// Orthonormal basis of the sum-zero subspace of `R^n`, as the columns of
/// an `n × (n-1)` matrix.
fn helmert(n: usize) -> CMatrix {
    let mut b = CMatrix::zeros(n, n - 1);
    for j in 1..n {
        let s = ((j * (j + 1)) as f64).sqrt();
        for i in 0..j {
            b[(i, j - 1)] = C64::new(1.0 / s, 0.0);
        }
        b[(j, j - 1)] = C64::new(-(j as f64) / s, 0.0);
    }
    b
}

/// Standard `(n-1)`-dimensional representation of `S_n`, one matrix per
/// element of [`Perm::all`].
pub fn standard_representation(n: usize) -> Vec<CMatrix> {
    let b = helmert(n);
    Perm::all(n)
        .iter()
        .map(|p| {
            let mut m = CMatrix::zeros(n, n);
            for i in 0..n {
                m[(p.apply(i), i)] = C64::new(1.0, 0.0);
            }
            b.adjoint() * m * &b
        })
        .collect()
}
