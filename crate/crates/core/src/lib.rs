//! Finite-dimensional constructions behind MF-algebra arguments, made checkable.
//!
//! The crate builds matrix models (microstates) for tuples of operators and
//! measures how well they reproduce norms of noncommutative *-polynomials:
//!
//! * [`ncpoly`]: *-polynomials in noncommuting indeterminates, with a small
//!   text grammar, canonical printing and evaluation on matrix tuples.
//! * [`matcore`]: the complex matrix engine (operator norms, PSD roots,
//!   Haar unitaries, Kronecker products, direct sums, sparse operators).
//! * [`dilation`]: polynomial square-root approximation, the Halmos unitary
//!   dilation and the almost-commuting dilated pair with its certified bound.
//! * [`pvcrossed`]: Pimsner–Voiculescu frames on a truncated bilateral shift,
//!   orbit models of a Z-action and the resulting crossed-product models,
//!   plus covariant representations for finite groups.
//! * [`groups`]: free-group words, semidirect products with permutation
//!   groups, free products and coset decompositions.
//! * [`mfcheck`]: norm oracles and certificates.
//!
//! Randomized routines take explicit seeds; see [`par`] for how independent
//! trials derive their streams.

pub mod dilation;
pub mod groups;
pub mod matcore;
pub mod mfcheck;
pub mod ncpoly;
pub mod par;
pub mod pvcrossed;

pub use matcore::{CMatrix, MatTuple, C64};
pub use ncpoly::NCPoly;
