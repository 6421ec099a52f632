use serde::Serialize;

use super::ball::ball_lower_bound;
use super::oracle::{circle_norm, torus_norm};
use super::CheckError;
use crate::matcore::{op_norm, projection_defect, range_isometry, CMatrix, CVector, MatTuple};
use crate::ncpoly::NCPoly;
use crate::par;

/// Where reference norms come from.
#[derive(Debug, Clone, PartialEq)]
pub enum NormOracle {
    /// `C(T)`, the algebra of the bilateral shift.
    Circle,
    /// `C(T^m)`, `m ≤ 3`.
    Torus { m: usize },
    /// Norms evaluated on a fixed target tuple.
    ExactMatrix { target: MatTuple },
    /// Ball compressions of the left regular representation of `F_n`.
    BallLowerBound { n: u32, radius: usize },
    /// One caller-supplied value per polynomial.
    Constant { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub kind: BoundKind,
}

impl NormOracle {
    pub fn kind(&self) -> String {
        match self {
            NormOracle::Circle => "circle".into(),
            NormOracle::Torus { m } => format!("torus-{m}"),
            NormOracle::ExactMatrix { .. } => "exact-matrix".into(),
            NormOracle::BallLowerBound { .. } => "ball-lower-bound".into(),
            NormOracle::Constant { .. } => "user-constant".into(),
        }
    }

    pub fn bound_kind(&self) -> BoundKind {
        match self {
            NormOracle::BallLowerBound { .. } => BoundKind::LowerBound,
            _ => BoundKind::Exact,
        }
    }

    /// Reference value for each polynomial, in order.
    pub fn evaluate(&self, polys: &[NCPoly]) -> Result<Vec<OracleValue>, CheckError> {
        let kind = self.bound_kind();
        let values: Vec<f64> = match self {
            NormOracle::Constant { values } => {
                if values.len() != polys.len() {
                    return Err(CheckError::KindMismatch(format!(
                        "{} constants for {} polynomials",
                        values.len(),
                        polys.len()
                    )));
                }
                values.clone()
            }
            _ => par::map_slice(polys, |p| self.norm_of(p)).into_iter().collect::<Result<_, _>>()?,
        };
        Ok(values.into_iter().map(|value| OracleValue { value, kind }).collect())
    }

    fn norm_of(&self, p: &NCPoly) -> Result<f64, CheckError> {
        match self {
            NormOracle::Circle => circle_norm(p),
            NormOracle::Torus { m } => torus_norm(p, *m),
            NormOracle::ExactMatrix { target } => Ok(op_norm(&p.evaluate(target)?)?),
            NormOracle::BallLowerBound { n, radius } => Ok(ball_lower_bound(p, *n, *radius)?.lower_bound),
            NormOracle::Constant { .. } => unreachable!("handled in evaluate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub model: usize,
    pub poly: String,
    pub model_norm: f64,
    pub oracle_value: f64,
    pub bound: BoundKind,
    /// `|model_norm - oracle_value|`, only for exact oracles.
    pub deviation: Option<f64>,
    /// `model_norm - lower_bound`, only for lower-bound oracles. The true
    /// deviation is unknown; the model undershoots the reference by at
    /// least `-slack` when this is negative.
    pub one_sided_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicrostateReport {
    pub oracle: String,
    pub dims: Vec<usize>,
    pub rows: Vec<ReportRow>,
    /// Largest deviation over all rows (exact oracles only).
    pub max_deviation: Option<f64>,
    /// Largest deviation per model, in model order.
    pub trend: Vec<Option<f64>>,
}

pub fn microstate_report(models: &[MatTuple], polys: &[NCPoly], oracle: &NormOracle) -> Result<MicrostateReport, CheckError> {
    for (i, m) in models.iter().enumerate() {
        if let Some(p) = polys.iter().find(|p| p.num_vars() as usize != m.len()) {
            return Err(CheckError::Arity(format!(
                "model {i} has {} matrices, polynomial {p} has {} variables",
                m.len(),
                p.num_vars()
            )));
        }
    }
    let refs = oracle.evaluate(polys)?;
    let cells: Vec<(usize, usize)> = (0..models.len()).flat_map(|i| (0..polys.len()).map(move |j| (i, j))).collect();
    let norms = par::map_slice(&cells, |&(i, j)| -> Result<f64, CheckError> { Ok(op_norm(&polys[j].evaluate(&models[i])?)?) });
    let mut rows = Vec::with_capacity(cells.len());
    for (&(i, j), norm) in cells.iter().zip(norms) {
        let model_norm = norm?;
        let r = refs[j];
        let (deviation, one_sided_slack) = match r.kind {
            BoundKind::Exact => (Some((model_norm - r.value).abs()), None),
            BoundKind::LowerBound => (None, Some(model_norm - r.value)),
        };
        rows.push(ReportRow {
            model: i,
            poly: polys[j].to_string(),
            model_norm,
            oracle_value: r.value,
            bound: r.kind,
            deviation,
            one_sided_slack,
        });
    }
    let trend: Vec<Option<f64>> = (0..models.len())
        .map(|i| {
            rows.iter()
                .filter(|r| r.model == i)
                .filter_map(|r| r.deviation)
                .reduce(f64::max)
        })
        .collect();
    let max_deviation = trend.iter().flatten().copied().reduce(f64::max);
    Ok(MicrostateReport {
        oracle: oracle.kind(),
        dims: models.iter().map(MatTuple::dim).collect(),
        rows,
        max_deviation,
        trend,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressRow {
    pub poly: String,
    /// `‖P(px p)ξ - P(x)ξ‖` per caller vector.
    pub vector_discrepancy: Vec<f64>,
    /// `|‖P(px p)|_{pH}‖ - ‖P(x)‖|`.
    pub norm_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressReport {
    pub rank: usize,
    pub rows: Vec<CompressRow>,
}

pub const PROJECTION_TOL: f64 = 1e-10;

/// Compares `P(x)` with `P(pxp)`: on the given vectors inside the ambient
/// space, and in norm with `P(pxp)` restricted to the range of `p`.
pub fn compress_compare(model: &MatTuple, proj: &CMatrix, polys: &[NCPoly], vectors: &[CVector]) -> Result<CompressReport, CheckError> {
    let d = model.dim();
    if proj.nrows() != d || proj.ncols() != d {
        return Err(CheckError::Arity(format!("projection of size {} on dimension {d}", proj.nrows())));
    }
    let defect = projection_defect(proj);
    if defect > PROJECTION_TOL {
        return Err(CheckError::InvalidProjection(defect));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(CheckError::Arity(format!("vector of length {} on dimension {d}", v.len())));
    }
    let v = range_isometry(proj);
    let pinned = model.map(|x| proj * x * proj)?;
    let small = MatTuple::new(v.ncols().max(1), if v.ncols() == 0 {
        vec![CMatrix::zeros(1, 1); model.len()]
    } else {
        model.iter().map(|x| v.adjoint() * x * &v).collect()
    })?;
    let rows = par::map_slice(polys, |p| -> Result<CompressRow, CheckError> {
        let full = p.evaluate(model)?;
        let pinned_p = p.evaluate(&pinned)?;
        let vector_discrepancy = vectors.iter().map(|xi| (&pinned_p * xi - &full * xi).norm()).collect();
        let small_norm = if v.ncols() == 0 { 0.0 } else { op_norm(&p.evaluate(&small)?)? };
        Ok(CompressRow {
            poly: p.to_string(),
            vector_discrepancy,
            norm_discrepancy: (small_norm - op_norm(&full)?).abs(),
        })
    });
    Ok(CompressReport {
        rank: v.ncols(),
        rows: rows.into_iter().collect::<Result<_, _>>()?,
    })
}
