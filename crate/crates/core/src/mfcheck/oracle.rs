use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;

use super::CheckError;
use crate::matcore::C64;
use crate::ncpoly::NCPoly;
use crate::par;

/// Points on the circle grid.
pub const CIRCLE_GRID: usize = 1 << 16;
/// Points per axis on the torus grid.
pub const TORUS_GRID: usize = 256;
pub const TORUS_MAX_ARITY: usize = 3;

/// Sup of a trigonometric polynomial with a certified upper end:
/// `value ≤ sup ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorm {
    pub value: f64,
    pub upper: f64,
}

/// `Σ c_k z^k` with `k ∈ Z^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trig {
    pub arity: usize,
    pub terms: Vec<(Vec<i64>, C64)>,
}

impl Trig {
    fn eval(&self, angles: &[f64]) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let phase: f64 = k.iter().zip(angles).map(|(&k, &a)| k as f64 * a).sum();
            acc += c * C64::from_polar(1.0, phase);
        }
        acc.norm()
    }

    /// Lipschitz constant of `|f|` along each axis, summed: `Σ|c_k|·|k_i|`.
    fn lipschitz(&self) -> Vec<f64> {
        (0..self.arity)
            .map(|i| self.terms.iter().map(|(k, c)| c.norm() * k[i].unsigned_abs() as f64).sum())
            .collect()
    }
}

/// Laurent coefficients of a polynomial in one unitary letter. Every word
/// must be a pure power of `X1` or of `X1'`.
pub fn laurent(p: &NCPoly) -> Result<Trig, CheckError> {
    let mut acc: BTreeMap<i64, C64> = BTreeMap::new();
    for (w, c) in p.terms() {
        let letters = w.letters();
        if letters.iter().any(|l| l.index != 1) {
            return Err(CheckError::NotLaurent(format!("word {w} uses a letter other than X1")));
        }
        let k = match letters.first() {
            None => 0,
            Some(first) => {
                if letters.iter().any(|l| l.starred != first.starred) {
                    return Err(CheckError::NotLaurent(format!("word {w} mixes X1 and X1'")));
                }
                let len = letters.len() as i64;
                if first.starred {
                    -len
                } else {
                    len
                }
            }
        };
        *acc.entry(k).or_default() += c;
    }
    Ok(Trig {
        arity: 1,
        terms: acc.into_iter().map(|(k, c)| (vec![k], c)).collect(),
    })
}

/// Image of `p` in `C(T^m)`: letters commute and `X_i' = X_i^{-1}`.
pub fn abelianize(p: &NCPoly, m: usize) -> Result<Trig, CheckError> {
    let mut acc: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
    for (w, c) in p.terms() {
        let mut k = vec![0i64; m];
        for l in w.letters() {
            let i = l.index as usize;
            if i == 0 || i > m {
                return Err(CheckError::Arity(format!("letter {l} outside a {m}-torus")));
            }
            k[i - 1] += if l.starred { -1 } else { 1 };
        }
        *acc.entry(k).or_default() += c;
    }
    Ok(Trig { arity: m, terms: acc.into_iter().collect() })
}

/// Golden-section search for a max of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

const REFINE_CANDIDATES: usize = 64;

/// Sup over the circle: grid of [`CIRCLE_GRID`] points, golden-section
/// refinement of the grid maxima that could still carry the sup, and the
/// certified upper end `grid max + L·h/2`.
pub fn circle_sup(t: &Trig) -> SupNorm {
    let n = CIRCLE_GRID;
    let h = TAU / n as f64;
    let vals = par::map_range(n, |i| t.eval(&[i as f64 * h]));
    let grid_max = vals.iter().cloned().fold(0.0, f64::max);
    let lip = t.lipschitz()[0];
    let upper = grid_max + lip * h / 2.0;
    let mut cands: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = vals[i];
            v >= grid_max - lip * h && v >= vals[(i + n - 1) % n] && v >= vals[(i + 1) % n]
        })
        .collect();
    cands.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    cands.truncate(REFINE_CANDIDATES);
    let mut best = grid_max;
    for i in cands {
        let x = i as f64 * h;
        let (_, v) = golden_max(|a| t.eval(&[a]), x - h, x + h);
        best = best.max(v);
    }
    SupNorm { value: best, upper: upper.max(best) }
}

/// Sup over the `m`-torus on a `TORUS_GRID^m` grid, refined by cyclic
/// coordinate ascent from the best grid points.
pub fn torus_sup(t: &Trig) -> SupNorm {
    let m = t.arity;
    let g = TORUS_GRID;
    let h = TAU / g as f64;
    let total = g.pow(m as u32);
    let point = |mut idx: usize| -> Vec<f64> {
        let mut a = vec![0.0; m];
        for slot in a.iter_mut() {
            *slot = (idx % g) as f64 * h;
            idx /= g;
        }
        a
    };
    let vals = par::map_range(total, |i| t.eval(&point(i)));
    let grid_max = vals.iter().cloned().fold(0.0, f64::max);
    let lip: f64 = t.lipschitz().iter().sum();
    let upper = grid_max + lip * h / 2.0;
    let mut order: Vec<usize> = (0..total).filter(|&i| vals[i] >= grid_max - lip * h).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    order.truncate(8);
    let mut best = grid_max;
    for i in order {
        let mut x = point(i);
        for _ in 0..6 {
            for axis in 0..m {
                let f = |a: f64| {
                    let mut y = x.clone();
                    y[axis] = a;
                    t.eval(&y)
                };
                let (a, v) = golden_max(f, x[axis] - h, x[axis] + h);
                if v > t.eval(&x) {
                    x[axis] = a;
                }
            }
        }
        best = best.max(t.eval(&x));
    }
    SupNorm { value: best, upper: upper.max(best) }
}

/// `sup_{|z|=1} |p(z)|` for a Laurent polynomial in `X1`.
pub fn circle_norm(p: &NCPoly) -> Result<f64, CheckError> {
    Ok(circle_sup(&laurent(p)?).value)
}

/// `sup` over the `m`-torus of the abelianized polynomial, `m ≤ 3`.
pub fn torus_norm(p: &NCPoly, m: usize) -> Result<f64, CheckError> {
    if m == 0 || m > TORUS_MAX_ARITY {
        return Err(CheckError::TorusArity(m));
    }
    if p.max_index() as usize > m {
        return Err(CheckError::Arity(format!("polynomial uses X{} on a {m}-torus", p.max_index())));
    }
    Ok(torus_sup(&abelianize(p, m)?).value)
}
