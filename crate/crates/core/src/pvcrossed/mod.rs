//! Almost-reducing frames for the bilateral shift, orbit models of a
//! `Z`-action, crossed-product matrix models and finite-group covariant
//! representations.

use thiserror::Error;

use crate::matcore::MatError;
use crate::ncpoly::PolyError;

mod action;
mod crossed;
mod finite;
mod frame;

pub use action::{gauge_action, gauge_phase, orbit_model, GroupAction, OrbitModel};
pub use crossed::{build_crossed_model, intertwining_defects, CrossedModel, CrossedProbes, EpsilonReport, ProbeRow, WitnessRow};
pub use finite::{finite_group_crossed, standard_representation, FiniteCrossed, FiniteGroup, HOMOMORPHISM_TOL};
pub use frame::{pv_frame, pv_frame_default, truncated_shift, PVFrame, ShiftTruncation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PvError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("frame of size {n_j} needs half-width at least {n_j}, got {half_width}")]
    Frame { n_j: usize, half_width: usize },
    #[error("action: {0}")]
    Action(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("conjugators are not a homomorphism (deviation {0:e})")]
    NotHomomorphism(f64),
    #[error("group and base must be nonempty")]
    EmptyGroup,
    #[error("oracle: {0}")]
    Oracle(String),
}
