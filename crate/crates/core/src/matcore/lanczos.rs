//! Largest singular value of a linear operator by Lanczos on `A*A`.
//!
//! No reorthogonalization is done; the Ritz vector is rebuilt in a second pass
//! over the (deterministically regenerated) Lanczos basis. The Rayleigh
//! quotient of that explicit vector gives the lower end of the bracket, which
//! is a rigorous lower bound up to floating-point rounding. The upper end adds
//! the residual norm of the Ritz pair.

use super::C64;

/// Matrix-free operator `C^ncols -> C^nrows`.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[C64], y: &mut [C64]);
    /// `y = A* x`
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBracket {
    /// Best estimate of the norm.
    pub value: f64,
    /// `‖Ax‖/‖x‖` for an explicit vector `x`.
    pub lower: f64,
    /// Lower end plus the Ritz residual (see module docs).
    pub upper: f64,
    pub iterations: usize,
}

impl NormBracket {
    pub fn exact(v: f64) -> Self {
        Self {
            value: v,
            lower: v,
            upper: v,
            iterations: 0,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Stop once the estimated Ritz residual drops below `tol · θ`.
    pub tol: f64,
    /// Seed for the random part of the start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_iter: 3000,
            tol: 1e-12,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(n: usize, seed: u64) -> Vec<C64> {
    use rand::Rng;
    let mut rng = crate::par::task_rng(seed, 0);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(1.0 + 0.1 * rng.random::<f64>(), 0.05 * rng.random::<f64>()))
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|z| *z /= s);
    v
}

struct Gram<'a, A: LinearOperator + ?Sized> {
    op: &'a A,
    tmp: Vec<C64>,
}

impl<A: LinearOperator + ?Sized> Gram<'_, A> {
    fn apply(&mut self, x: &[C64], y: &mut [C64]) {
        self.op.apply(x, &mut self.tmp);
        self.op.apply_adjoint(&self.tmp, y);
    }
}

/// One sweep of the three-term recurrence. Calls `visit(k, v_k)` for every
/// basis vector and returns the tridiagonal coefficients. With `stop` it ends
/// as soon as `stop(alphas, betas)` returns true.
fn lanczos_sweep<A: LinearOperator + ?Sized>(
    op: &A,
    start: &[C64],
    steps: usize,
    mut visit: impl FnMut(usize, &[C64]),
    mut stop: impl FnMut(&[f64], &[f64]) -> bool,
) -> (Vec<f64>, Vec<f64>) {
    let n = op.ncols();
    let mut gram = Gram {
        op,
        tmp: vec![C64::new(0.0, 0.0); op.nrows()],
    };
    let mut v = start.to_vec();
    let mut v_prev = vec![C64::new(0.0, 0.0); n];
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for k in 0..steps {
        visit(k, &v);
        gram.apply(&v, &mut w);
        let beta_prev = if k > 0 { betas[k - 1] } else { 0.0 };
        for i in 0..n {
            w[i] -= v_prev[i] * beta_prev;
        }
        let alpha = dot(&v, &w).re;
        for i in 0..n {
            w[i] -= v[i] * alpha;
        }
        // One round of local reorthogonalization against v_k.
        let c = dot(&v, &w);
        for i in 0..n {
            w[i] -= v[i] * c;
        }
        alphas.push(alpha);
        let beta = norm(&w);
        betas.push(beta);
        if stop(&alphas, &betas) || beta <= 1e-14 * alpha.abs().max(1e-300) {
            break;
        }
        std::mem::swap(&mut v_prev, &mut v);
        for i in 0..n {
            v[i] = w[i] / beta;
        }
    }
    (alphas, betas)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(alphas: &[f64], offs: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alphas.len() {
        let b2 = if i == 0 { 0.0 } else { offs[i - 1] * offs[i - 1] };
        q = alphas[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (alphas[i].abs() + x.abs()).max(1e-300);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by bisection.
fn top_eigenvalue(alphas: &[f64], offs: &[f64]) -> f64 {
    let k = alphas.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { offs[i - 1].abs() } else { 0.0 } + if i + 1 < k { offs[i].abs() } else { 0.0 };
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alphas, offs, mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Eigenvector of a symmetric tridiagonal matrix for eigenvalue `theta` by
/// inverse iteration, using Gaussian elimination with partial pivoting.
fn tridiagonal_eigenvector(alphas: &[f64], offs: &[f64], theta: f64) -> Vec<f64> {
    let k = alphas.len();
    if k == 1 {
        return vec![1.0];
    }
    let scale = alphas.iter().chain(offs.iter()).fold(0.0_f64, |a, x| a.max(x.abs())).max(1e-300);
    let shift = theta + 1e-13 * scale;
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        y = solve_shifted(alphas, offs, shift, &y, scale);
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= n);
    }
    y
}

fn solve_shifted(alphas: &[f64], offs: &[f64], shift: f64, rhs: &[f64], scale: f64) -> Vec<f64> {
    let k = alphas.len();
    // Rows kept as (sub, diag, sup, sup2) after pivoting.
    let mut d: Vec<f64> = alphas.iter().map(|a| a - shift).collect();
    let mut sup: Vec<f64> = (0..k).map(|i| if i + 1 < k { offs[i] } else { 0.0 }).collect();
    let mut sup2 = vec![0.0; k];
    let mut b = rhs.to_vec();
    let mut sub: Vec<f64> = (0..k).map(|i| if i > 0 { offs[i - 1] } else { 0.0 }).collect();
    for i in 0..k - 1 {
        // Pivot between row i and row i+1 on column i.
        if sub[i + 1].abs() > d[i].abs() {
            // swap rows i and i+1 (row i+1 has entries sub[i+1], d[i+1], sup[i+1] at cols i, i+1, i+2)
            let (ri_d, ri_sup, ri_sup2, ri_b) = (d[i], sup[i], sup2[i], b[i]);
            d[i] = sub[i + 1];
            sup[i] = d[i + 1];
            sup2[i] = sup[i + 1];
            b[i] = b[i + 1];
            sub[i + 1] = ri_d;
            d[i + 1] = ri_sup;
            sup[i + 1] = ri_sup2;
            b[i + 1] = ri_b;
        }
        if d[i] == 0.0 {
            d[i] = f64::EPSILON * scale;
        }
        let m = sub[i + 1] / d[i];
        d[i + 1] -= m * sup[i];
        sup[i + 1] -= m * sup2[i];
        b[i + 1] -= m * b[i];
        sub[i + 1] = 0.0;
    }
    if d[k - 1] == 0.0 {
        d[k - 1] = f64::EPSILON * scale;
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        if i + 1 < k {
            s -= sup[i] * x[i + 1];
        }
        if i + 2 < k {
            s -= sup2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    x
}

/// Largest singular value of `op` with a lower/upper bracket.
pub fn largest_singular_value<A: LinearOperator + ?Sized>(op: &A, opts: &LanczosOptions) -> NormBracket {
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return NormBracket::exact(0.0);
    }
    let start = start_vector(n, opts.seed);
    let steps = opts.max_iter.min(n.max(1));
    let tol = opts.tol;
    let (alphas, betas) = lanczos_sweep(
        op,
        &start,
        steps,
        |_, _| {},
        |a, b| {
            let k = a.len();
            if k < 2 || (k % 4 != 0 && k != steps) {
                return false;
            }
            let offs = &b[..k - 1];
            let theta = top_eigenvalue(a, offs);
            let y = tridiagonal_eigenvector(a, offs, theta);
            b[k - 1] * y[k - 1].abs() <= tol * theta.abs().max(1e-300)
        },
    );
    let k = alphas.len();
    let offs = &betas[..k.saturating_sub(1)];
    let theta = top_eigenvalue(&alphas, offs);
    let y = tridiagonal_eigenvector(&alphas, offs, theta);

    // Second pass: accumulate the Ritz vector.
    let mut x = vec![C64::new(0.0, 0.0); n];
    lanczos_sweep(
        op,
        &start,
        k,
        |i, v| {
            for (xj, vj) in x.iter_mut().zip(v) {
                *xj += vj * y[i];
            }
        },
        |_, _| false,
    );
    let xn = norm(&x);
    if !(xn > 0.0) {
        let s = theta.max(0.0).sqrt();
        return NormBracket {
            value: s,
            lower: 0.0,
            upper: f64::INFINITY,
            iterations: k,
        };
    }
    x.iter_mut().for_each(|z| *z /= xn);
    let mut ax = vec![C64::new(0.0, 0.0); op.nrows()];
    op.apply(&x, &mut ax);
    let lower = norm(&ax);
    let mut bx = vec![C64::new(0.0, 0.0); n];
    op.apply_adjoint(&ax, &mut bx);
    let rho = lower * lower;
    let resid = bx
        .iter()
        .zip(&x)
        .map(|(b, xi)| (b - xi * rho).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let upper = (rho + resid).sqrt();
    NormBracket {
        value: lower,
        lower,
        upper,
        iterations: k,
    }
}
