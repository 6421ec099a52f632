use std::collections::HashMap;

use serde::Serialize;

use super::CheckError;
use crate::groups::FWord;
use crate::matcore::sparse::SparseMatrix;
use crate::matcore::{largest_singular_value, LanczosOptions, C64};
use crate::ncpoly::NCPoly;

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallBound {
    pub n: u32,
    pub radius: usize,
    pub vertices: usize,
    /// Certified lower bound for the reduced norm.
    pub lower_bound: f64,
    /// Lanczos estimate of the compressed norm (at least `lower_bound`).
    pub estimate: f64,
}

/// `|B_r|` in the Cayley graph of `F_n`.
pub fn ball_size(n: u32, radius: usize) -> u128 {
    let n = n as u128;
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return 2 * radius as u128 + 1;
    }
    let mut total = 1u128;
    let mut sphere = 2 * n;
    for _ in 0..radius {
        total += sphere;
        sphere *= 2 * n - 1;
    }
    total
}

/// Reduced words of length ≤ `radius`, in breadth-first order.
fn enumerate_ball(n: u32, radius: usize) -> Vec<FWord> {
    let gens: Vec<FWord> = (1..=n).flat_map(|i| [FWord::gen_pow(i, 1), FWord::gen_pow(i, -1)]).collect();
    let mut out = vec![FWord::identity()];
    let mut start = 0;
    for _ in 0..radius {
        let end = out.len();
        for v in start..end {
            for g in &gens {
                let w = out[v].mul(g);
                if w.len() == out[v].len() + 1 {
                    out.push(w);
                }
            }
        }
        start = end;
    }
    out
}

/// Norm of `P_B λ(p) P_B` for the ball `B` of radius `radius` in `F_n`,
/// where `X_i ↦ λ(g_i)` and `X_i' ↦ λ(g_i)^{-1}`.
pub fn ball_lower_bound(p: &NCPoly, n: u32, radius: usize) -> Result<BallBound, CheckError> {
    ball_lower_bound_capped(p, n, radius, DEFAULT_VERTEX_CAP)
}

pub fn ball_lower_bound_capped(p: &NCPoly, n: u32, radius: usize, cap: usize) -> Result<BallBound, CheckError> {
    if n == 0 {
        return Err(CheckError::Arity("free group of rank 0".into()));
    }
    if p.max_index() > n {
        return Err(CheckError::Arity(format!("polynomial uses X{} in F_{n}", p.max_index())));
    }
    if radius < p.degree() {
        return Err(CheckError::RadiusTooSmall { radius, degree: p.degree() });
    }
    let size = ball_size(n, radius);
    if size > cap as u128 {
        return Err(CheckError::BallTooLarge { vertices: size, cap });
    }
    let verts = enumerate_ball(n, radius);
    debug_assert_eq!(verts.len() as u128, size);
    let index: HashMap<&FWord, usize> = verts.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let terms: Vec<(FWord, C64)> = p
        .terms()
        .iter()
        .map(|(w, c)| {
            let letters: Vec<(u32, i8)> = w.letters().iter().map(|l| (l.index, if l.starred { -1 } else { 1 })).collect();
            Ok((FWord::reduce(&letters)?, *c))
        })
        .collect::<Result<_, crate::groups::GroupError>>()
        .map_err(|e| CheckError::Arity(e.to_string()))?;
    let mut triplets = Vec::new();
    for (col, v) in verts.iter().enumerate() {
        for (w, c) in &terms {
            if let Some(&row) = index.get(&w.mul(v)) {
                triplets.push((row, col, *c));
            }
        }
    }
    let op = SparseMatrix::from_triplets(verts.len(), verts.len(), triplets);
    let b = largest_singular_value(&op, &LanczosOptions::default());
    Ok(BallBound {
        n,
        radius,
        vertices: verts.len(),
        lower_bound: b.lower,
        estimate: b.value.max(b.lower),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse;

    #[test]
    fn sizes() {
        assert_eq!(ball_size(2, 0), 1);
        assert_eq!(ball_size(2, 1), 5);
        assert_eq!(ball_size(2, 10), 118_097);
        assert_eq!(ball_size(1, 4), 9);
        assert_eq!(enumerate_ball(2, 3).len(), 53);
    }

    #[test]
    fn single_generator() {
        let p = parse("X1", 2).unwrap();
        for r in 1..4 {
            let b = ball_lower_bound(&p, 2, r).unwrap();
            assert!((b.lower_bound - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn kesten_sum_on_small_balls() {
        let p = parse("X1 + X1' + X2 + X2'", 2).unwrap();
        let mut prev = 0.0;
        for r in 1..=5 {
            let b = ball_lower_bound(&p, 2, r).unwrap();
            assert!(b.lower_bound >= prev - 1e-12);
            assert!(b.lower_bound <= 2.0 * 3f64.sqrt() + 1e-6);
            prev = b.lower_bound;
        }
        // Radius 1: star K_{1,4}, norm 2.
        let b = ball_lower_bound(&p, 2, 1).unwrap();
        assert!((b.lower_bound - 2.0).abs() < 1e-10);
    }

    #[test]
    fn guards() {
        let p = parse("X1*X1", 1).unwrap();
        assert!(matches!(ball_lower_bound(&p, 1, 1), Err(CheckError::RadiusTooSmall { .. })));
        let q = parse("X1", 3).unwrap();
        assert!(matches!(ball_lower_bound_capped(&q, 3, 8, 1000), Err(CheckError::BallTooLarge { .. })));
    }
}
