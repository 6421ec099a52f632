use std::collections::BTreeMap;

use super::PvError;
use crate::groups::Perm;
use crate::matcore::{op_norm, unitarity_defect, CMatrix, MatTuple, C64};

/// A `Z`-action on the algebra generated by a model tuple. `apply(n, x)`
/// realizes `α(n)` on the tuple's matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupAction {
    Trivial,
    /// `α(n)(x_i) = e^{2πinθ} x_i` for every generator.
    Gauge { theta: f64 },
    /// `α(n)(x) = W^n x W^{-n}`.
    Conjugation { w: CMatrix },
    /// `α(n)(x_i) = x_{σ^n(i)}`.
    Permutation { perm: Perm },
}

impl GroupAction {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupAction::Trivial => "trivial",
            GroupAction::Gauge { .. } => "gauge",
            GroupAction::Conjugation { .. } => "conjugation",
            GroupAction::Permutation { .. } => "permutation",
        }
    }

    pub fn apply(&self, n: i64, x: &MatTuple) -> Result<MatTuple, PvError> {
        match self {
            GroupAction::Trivial => Ok(x.clone()),
            GroupAction::Gauge { theta } => {
                let phase = gauge_phase(*theta, n);
                Ok(x.map(|m| m * phase)?)
            }
            GroupAction::Conjugation { w } => {
                if w.nrows() != x.dim() {
                    return Err(PvError::Action(format!(
                        "conjugator of size {} on models of dimension {}",
                        w.nrows(),
                        x.dim()
                    )));
                }
                let base = if n < 0 { w.adjoint() } else { w.clone() };
                let mut wn = CMatrix::identity(x.dim(), x.dim());
                for _ in 0..n.unsigned_abs() {
                    wn = &wn * &base;
                }
                let wn_inv = wn.adjoint();
                Ok(x.map(|m| &wn * m * &wn_inv)?)
            }
            GroupAction::Permutation { perm } => {
                if perm.degree() != x.len() {
                    return Err(PvError::Action(format!(
                        "permutation of {} points on {} generators",
                        perm.degree(),
                        x.len()
                    )));
                }
                let step = if n < 0 { perm.inv() } else { perm.clone() };
                let mut p = Perm::identity(x.len());
                for _ in 0..n.unsigned_abs() {
                    p = step.compose(&p);
                }
                let mats = (0..x.len()).map(|i| x[p.apply(i)].clone()).collect();
                Ok(MatTuple::new(x.dim(), mats)?)
            }
        }
    }
}

/// `e^{2πinθ}`, with `nθ` reduced mod 1 first so large `n` keeps full
/// precision. Quarter turns are exact.
pub fn gauge_phase(theta: f64, n: i64) -> C64 {
    let t = (n as f64 * theta).rem_euclid(1.0);
    let quarters = 4.0 * t;
    if quarters.fract() == 0.0 {
        return [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ][quarters as usize % 4];
    }
    C64::from_polar(1.0, std::f64::consts::TAU * t)
}

/// Gauge action `α(n)(u_i) = e^{2πinθ}u_i` on unitary generators.
pub fn gauge_action(theta: f64, generators: &MatTuple) -> Result<GroupAction, PvError> {
    if !theta.is_finite() {
        return Err(PvError::Action("theta must be finite".into()));
    }
    for (i, u) in generators.iter().enumerate() {
        let e = unitarity_defect(u);
        if e > 1e-10 {
            return Err(PvError::Action(format!("generator {} is not unitary ({e:e})", i + 1)));
        }
    }
    Ok(GroupAction::Gauge { theta })
}

/// Models of `x_{k,i} = α(-k)x_i` for `-range_k ≤ k ≤ range_k + 1`; the
/// model of `y_{k,i} = α(-k)α(-1)x_i` is the one of `x_{k+1,i}`.
#[derive(Debug, Clone)]
pub struct OrbitModel {
    pub action: GroupAction,
    pub base: MatTuple,
    pub range_k: usize,
    shifted: BTreeMap<i64, MatTuple>,
}

impl OrbitModel {
    pub fn m(&self) -> usize {
        self.base.len()
    }

    pub fn x(&self, k: i64) -> Option<&MatTuple> {
        self.shifted.get(&k)
    }

    pub fn y(&self, k: i64) -> Option<&MatTuple> {
        self.shifted.get(&(k + 1))
    }

    /// `max_{k,i} ‖x_{k+n,i} - x_{k,i}‖` over the computed range.
    pub fn near_periodicity(&self, n: i64) -> f64 {
        let mut worst = 0.0_f64;
        for (&k, xk) in &self.shifted {
            if let Some(xn) = self.shifted.get(&(k + n)) {
                for (a, b) in xn.iter().zip(xk.iter()) {
                    worst = worst.max(op_norm(&(a - b)).unwrap_or(f64::INFINITY));
                }
            }
        }
        worst
    }
}

pub fn orbit_model(base: &MatTuple, action: &GroupAction, range_k: usize) -> Result<OrbitModel, PvError> {
    let r = range_k as i64;
    let mut shifted = BTreeMap::new();
    for k in -r..=r + 1 {
        let x = if k == 0 { base.clone() } else { action.apply(-k, base)? };
        shifted.insert(k, x);
    }
    Ok(OrbitModel {
        action: action.clone(),
        base: base.clone(),
        range_k,
        shifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{haar_unitary, op_norm};

    fn unitary_tuple(dim: usize, seed: u64) -> MatTuple {
        MatTuple::new(dim, vec![haar_unitary(dim, seed).unwrap()]).unwrap()
    }

    #[test]
    fn trivial_orbit_is_constant() {
        let base = unitary_tuple(4, 1);
        let o = orbit_model(&base, &GroupAction::Trivial, 5).unwrap();
        assert_eq!(o.x(3).unwrap(), &base);
        assert_eq!(o.near_periodicity(2), 0.0);
    }

    #[test]
    fn gauge_quarter_has_period_four() {
        let base = unitary_tuple(4, 2);
        let act = gauge_action(0.25, &base).unwrap();
        let o = orbit_model(&base, &act, 4).unwrap();
        assert_eq!(o.x(4).unwrap(), &base);
        assert_eq!(o.near_periodicity(4), 0.0);
        let half = gauge_action(0.5, &base).unwrap();
        let minus = half.apply(1, &base).unwrap();
        assert_eq!(minus[0], -&base[0]);
        assert!((op_norm(&(&minus[0] - &base[0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_norm_identity() {
        let base = unitary_tuple(3, 3);
        let theta = 0.30000000001;
        let act = gauge_action(theta, &base).unwrap();
        let mut prev = f64::INFINITY;
        // Continued-fraction denominators of 0.3: 3, 10 (then huge).
        for n in [1, 3, 10] {
            let moved = act.apply(n, &base).unwrap();
            let d = op_norm(&(&moved[0] - &base[0])).unwrap();
            let exact = (gauge_phase(theta, n) - C64::new(1.0, 0.0)).norm();
            assert!((d - exact).abs() < 1e-12);
            assert!(d < prev);
            prev = d;
        }
        let not_unitary = MatTuple::new(2, vec![CMatrix::identity(2, 2) * C64::new(2.0, 0.0)]).unwrap();
        assert!(gauge_action(0.3, &not_unitary).is_err());
    }

    #[test]
    fn conjugation_orbit() {
        let base = unitary_tuple(4, 4);
        let w = haar_unitary(4, 5).unwrap();
        let act = GroupAction::Conjugation { w: w.clone() };
        let o = orbit_model(&base, &act, 2).unwrap();
        let expect = w.adjoint() * w.adjoint() * &base[0] * &w * &w;
        assert!(op_norm(&(o.x(2).unwrap()[0].clone() - expect)).unwrap() < 1e-12);
        assert!((op_norm(&o.x(-2).unwrap()[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_orbit_cycles() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(2, 2) * C64::new(-1.0, 0.0);
        let base = MatTuple::new(2, vec![a, b]).unwrap();
        let act = GroupAction::Permutation { perm: Perm::transposition(2, 0, 1) };
        let o = orbit_model(&base, &act, 2).unwrap();
        assert_eq!(o.x(1).unwrap()[0], base[1]);
        assert_eq!(o.near_periodicity(2), 0.0);
        assert!((o.near_periodicity(1) - 2.0).abs() < 1e-12);
    }
}
