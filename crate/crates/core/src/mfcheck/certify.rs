use serde::Serialize;

use super::report::{BoundKind, NormOracle};
use super::CheckError;
use crate::matcore::{commutator_norm, op_norm, MatTuple};
use crate::ncpoly::NCPoly;
use crate::pvcrossed::{intertwining_defects, CrossedModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    /// `None` when the reference is not exact and nothing can be measured.
    pub measured: Option<f64>,
    pub threshold: f64,
    /// `threshold - measured`; negative on failure.
    pub slack: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Condition {
    fn measured(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured: Some(measured),
            threshold,
            slack: Some(threshold - measured),
            pass: measured <= threshold,
            note: None,
        }
    }

    fn uncertifiable(name: impl Into<String>, threshold: f64, note: &str) -> Self {
        Self {
            name: name.into(),
            measured: None,
            threshold,
            slack: None,
            pass: false,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub r1: usize,
    pub threshold: f64,
    pub conditions: Vec<Condition>,
    pub passed: bool,
}

impl Certificate {
    fn new(r1: usize, conditions: Vec<Condition>) -> Self {
        Self {
            r1,
            threshold: 1.0 / r1 as f64,
            passed: conditions.iter().all(|c| c.pass),
            conditions,
        }
    }
}

const LOWER_ONLY: &str = "oracle gives a lower bound only; deviation cannot be certified";

/// `|‖Q_j(model)‖ - oracle_j| ≤ 1/r₁` for the first `r₁` polynomials.
fn norm_conditions(label: &str, model: &MatTuple, polys: &[NCPoly], oracle: &NormOracle, r1: usize) -> Result<Vec<Condition>, CheckError> {
    let take = polys.len().min(r1);
    let polys = &polys[..take];
    let thr = 1.0 / r1 as f64;
    let refs = match oracle {
        // Constants line up with the full list, not the truncated one.
        NormOracle::Constant { values } if values.len() >= take => {
            NormOracle::Constant { values: values[..take].to_vec() }.evaluate(polys)?
        }
        _ => oracle.evaluate(polys)?,
    };
    let mut out = Vec::with_capacity(take);
    for (j, (p, r)) in polys.iter().zip(refs).enumerate() {
        if p.num_vars() as usize != model.len() {
            return Err(CheckError::Arity(format!("{label}_{} has {} variables for {} matrices", j + 1, p.num_vars(), model.len())));
        }
        let name = format!("{label}_{}: {p}", j + 1);
        out.push(match r.kind {
            BoundKind::Exact => Condition::measured(name, (op_norm(&p.evaluate(model)?)? - r.value).abs(), thr),
            BoundKind::LowerBound => Condition::uncertifiable(name, thr, LOWER_ONLY),
        });
    }
    Ok(out)
}

/// Checks `‖U_iV_j - V_jU_i‖ ≤ 1/r₁` for all `i, j` and
/// `|‖Q_j(V)‖ - ‖Q_j(v)‖| ≤ 1/r₁` for `j ≤ r₁`.
pub fn certify_commuting_conditions(
    us: &MatTuple,
    vs: &MatTuple,
    polys_q: &[NCPoly],
    oracle_q: &NormOracle,
    r1: usize,
) -> Result<Certificate, CheckError> {
    if r1 == 0 {
        return Err(CheckError::BadR1);
    }
    if us.dim() != vs.dim() {
        return Err(CheckError::Arity(format!("U has dimension {}, V has {}", us.dim(), vs.dim())));
    }
    let mut worst = 0.0_f64;
    for u in us.iter() {
        for v in vs.iter() {
            worst = worst.max(commutator_norm(u, v));
        }
    }
    let mut conds = vec![Condition::measured("commutator", worst, 1.0 / r1 as f64)];
    conds.extend(norm_conditions("Q", vs, polys_q, oracle_q, r1)?);
    Ok(Certificate::new(r1, conds))
}

/// Checks `‖U*A_i - B_iU*‖ ≤ 1/r₁`, `|‖G_j(U)‖ - oracle_j| ≤ 1/r₁` and
/// `|‖H_j(A, B)‖ - ref_j| ≤ 1/r₁`.
pub fn certify_crossed_conditions(
    model: &CrossedModel,
    polys_g: &[NCPoly],
    polys_h: &[NCPoly],
    oracle_g: &NormOracle,
    refs_h: &[f64],
    r1: usize,
) -> Result<Certificate, CheckError> {
    if r1 == 0 {
        return Err(CheckError::BadR1);
    }
    if refs_h.len() != polys_h.len() {
        return Err(CheckError::KindMismatch(format!("{} references for {} H-polynomials", refs_h.len(), polys_h.len())));
    }
    let defect = intertwining_defects(&model.a, &model.b, &model.u)?.into_iter().fold(0.0, f64::max);
    let mut conds = vec![Condition::measured("intertwining", defect, 1.0 / r1 as f64)];
    let u = MatTuple::new(model.u.nrows(), vec![model.u.clone()])?;
    conds.extend(norm_conditions("G", &u, polys_g, oracle_g, r1)?);
    let ab = model.a.concat(&model.b)?;
    conds.extend(norm_conditions("H", &ab, polys_h, &NormOracle::Constant { values: refs_h.to_vec() }, r1)?);
    Ok(Certificate::new(r1, conds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c64, CMatrix, CVector};
    use crate::ncpoly::parse;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(v.iter().map(|&x| c64(x, 0.0)).collect()))
    }

    #[test]
    fn commuting_diagonals_pass() {
        let u = MatTuple::new(2, vec![diag(&[1.0, -1.0])]).unwrap();
        let v = MatTuple::new(2, vec![diag(&[-1.0, 1.0])]).unwrap();
        let q = vec![parse("X1", 1).unwrap()];
        for r1 in [1, 10, 1_000_000] {
            let c = certify_commuting_conditions(&u, &v, &q, &NormOracle::ExactMatrix { target: v.clone() }, r1).unwrap();
            assert!(c.passed);
        }
    }

    #[test]
    fn threshold_arithmetic() {
        // ‖[U, V]‖ = 0.02 exactly.
        let u = MatTuple::new(2, vec![diag(&[1.0, 0.0])]).unwrap();
        let mut off = CMatrix::zeros(2, 2);
        off[(0, 1)] = c64(0.02, 0.0);
        let v = MatTuple::new(2, vec![off]).unwrap();
        let oracle = NormOracle::Constant { values: vec![] };
        let fail = certify_commuting_conditions(&u, &v, &[], &oracle, 100).unwrap();
        assert!(!fail.passed);
        assert!(fail.conditions[0].slack.unwrap() < 0.0);
        let pass = certify_commuting_conditions(&u, &v, &[], &oracle, 50).unwrap();
        assert!(pass.passed);
        assert!(pass.conditions[0].slack.unwrap() >= 0.0);
        assert_eq!(pass, certify_commuting_conditions(&u, &v, &[], &oracle, 50).unwrap());
    }

    #[test]
    fn lower_bound_oracle_cannot_certify() {
        let u = MatTuple::new(1, vec![diag(&[1.0])]).unwrap();
        let q = vec![parse("X1", 1).unwrap()];
        let c = certify_commuting_conditions(&u, &u, &q, &NormOracle::BallLowerBound { n: 1, radius: 1 }, 10).unwrap();
        assert!(!c.passed);
        assert!(c.conditions[1].note.is_some());
    }
}
