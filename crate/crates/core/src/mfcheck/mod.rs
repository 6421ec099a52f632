//! Norm oracles, microstate reports and the finite-family certificates.

use thiserror::Error;

use crate::matcore::MatError;
use crate::ncpoly::PolyError;
use crate::pvcrossed::PvError;

mod ball;
mod certify;
mod oracle;
mod report;

pub use ball::{ball_lower_bound, ball_lower_bound_capped, ball_size, BallBound, DEFAULT_VERTEX_CAP};
pub use certify::{certify_commuting_conditions, certify_crossed_conditions, Certificate, Condition};
pub use oracle::{abelianize, circle_norm, circle_sup, laurent, torus_norm, torus_sup, SupNorm, Trig, CIRCLE_GRID, TORUS_GRID, TORUS_MAX_ARITY};
pub use report::{
    compress_compare, microstate_report, BoundKind, CompressReport, CompressRow, MicrostateReport, NormOracle, OracleValue, ReportRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Crossed(#[from] Box<PvError>),
    #[error("not a Laurent polynomial in X1: {0}")]
    NotLaurent(String),
    #[error("torus oracle supports 1 to 3 variables, got {0}")]
    TorusArity(usize),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("radius {radius} is below the polynomial degree {degree}")]
    RadiusTooSmall { radius: usize, degree: usize },
    #[error("ball has {vertices} vertices, above the cap of {cap}")]
    BallTooLarge { vertices: u128, cap: usize },
    #[error("oracle mismatch: {0}")]
    KindMismatch(String),
    #[error("projection defect {0:e} exceeds tolerance")]
    InvalidProjection(f64),
    #[error("r1 must be at least 1")]
    BadR1,
}

impl From<PvError> for CheckError {
    fn from(e: PvError) -> Self {
        CheckError::Crossed(Box::new(e))
    }
}
