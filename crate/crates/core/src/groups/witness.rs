use rand::Rng;
use serde::Serialize;

use super::{FWord, GroupError, Perm};
use crate::par;

/// Outcome of reducing `g^{n_1} α(β_1)(g)^{n_2} ⋯ α(β_{m-1})(g)^{n_m}` with
/// `g = (g_1⋯g_n)^power`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub word: String,
    pub length: usize,
    pub nonidentity: bool,
    /// The reduced word ends in `g_{β(1)}⋯g_{β(n)}` (positive last exponent)
    /// or `g_{β(n)}^{-1}⋯g_{β(1)}^{-1}` (negative), `β = β_{m-1}`.
    pub suffix_matches: bool,
    pub expected_suffix: String,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.nonidentity && self.suffix_matches
    }
}

pub fn freeness_witness(n: usize, exponents: &[i64], perms: &[Perm], power: u32) -> Result<WitnessReport, GroupError> {
    if n == 0 {
        return Err(GroupError::Malformed("rank must be positive".into()));
    }
    if power == 0 {
        return Err(GroupError::Malformed("power must be positive".into()));
    }
    if exponents.is_empty() || exponents.contains(&0) {
        return Err(GroupError::Malformed("exponents must be nonempty and nonzero".into()));
    }
    if perms.len() + 1 != exponents.len() {
        return Err(GroupError::Malformed(format!(
            "{} exponents need {} permutations, got {}",
            exponents.len(),
            exponents.len() - 1,
            perms.len()
        )));
    }
    if let Some(p) = perms.iter().find(|p| p.degree() != n) {
        return Err(GroupError::SizeMismatch(p.degree(), n));
    }
    if perms.first().is_some_and(Perm::is_identity) {
        return Err(GroupError::Malformed("the first permutation must not be the identity".into()));
    }
    if perms.windows(2).any(|w| w[0] == w[1]) {
        return Err(GroupError::Malformed("adjacent permutations must differ".into()));
    }
    let cycle: Vec<(u32, i8)> = (1..=n as u32).map(|i| (i, 1)).collect();
    let g = FWord::reduce(&cycle)?.pow(power as i64);
    let mut word = g.pow(exponents[0]);
    for (beta, &e) in perms.iter().zip(&exponents[1..]) {
        word = word.mul(&g.permute(beta).pow(e));
    }
    let last = perms.last().cloned().unwrap_or_else(|| Perm::identity(n));
    let forward: Vec<(u32, i8)> = (0..n).map(|i| (last.apply(i) as u32 + 1, 1)).collect();
    let suffix = if *exponents.last().expect("nonempty") > 0 {
        forward
    } else {
        forward.iter().rev().map(|&(g, _)| (g, -1)).collect()
    };
    let expected = FWord::reduce(&suffix)?;
    Ok(WitnessReport {
        length: word.len(),
        nonidentity: !word.is_identity(),
        suffix_matches: word.ends_with(&suffix),
        word: word.to_string(),
        expected_suffix: expected.to_string(),
    })
}

/// Ranges for [`fuzz_freeness`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FuzzSpec {
    pub n_min: usize,
    pub n_max: usize,
    pub m_min: usize,
    pub m_max: usize,
    pub exp_max: i64,
    pub power: u32,
    pub trials: usize,
    pub seed: u64,
}

impl FuzzSpec {
    pub fn fixed(n: usize, m: usize, trials: usize, seed: u64) -> Self {
        Self {
            n_min: n,
            n_max: n,
            m_min: m,
            m_max: m,
            exp_max: 3,
            power: 3,
            trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessInstance {
    pub n: usize,
    pub exponents: Vec<i64>,
    /// 1-based images of each `β_j`.
    pub perms: Vec<Vec<usize>>,
}

/// Draws an instance. The `β_j` are running products `σ_1⋯σ_j` of
/// nonidentity permutations, which is how they arise from a product
/// `g^{n_1}σ_1 g^{n_2}σ_2 ⋯` in `F_n ⋊ S_n`; consecutive `β`s therefore
/// differ and `β_1 ≠ e`.
pub fn random_witness_instance<R: Rng + ?Sized>(spec: &FuzzSpec, rng: &mut R) -> (usize, Vec<i64>, Vec<Perm>) {
    let n = rng.random_range(spec.n_min.max(2)..=spec.n_max.max(spec.n_min.max(2)));
    let m = rng.random_range(spec.m_min.max(1)..=spec.m_max.max(spec.m_min.max(1)));
    let exp_max = spec.exp_max.max(1);
    let exponents: Vec<i64> = (0..m)
        .map(|_| {
            let k = rng.random_range(1..=exp_max);
            if rng.random_bool(0.5) {
                k
            } else {
                -k
            }
        })
        .collect();
    let mut beta = Perm::identity(n);
    let mut perms = Vec::with_capacity(m - 1);
    for _ in 1..m {
        let sigma = loop {
            let s = Perm::random(n, rng);
            if !s.is_identity() {
                break s;
            }
        };
        beta = beta.compose(&sigma);
        perms.push(beta.clone());
    }
    (n, exponents, perms)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzFailure {
    pub instance: WitnessInstance,
    pub report: WitnessReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub spec: FuzzSpec,
    pub nonidentity: usize,
    pub suffix_matches: usize,
    pub max_length: usize,
    pub failures: Vec<FuzzFailure>,
}

/// Runs `spec.trials` independent witnesses; trial `k` draws from stream
/// `(seed, k)`.
pub fn fuzz_freeness(spec: &FuzzSpec) -> Result<FuzzReport, GroupError> {
    let rows = par::map_range(spec.trials, |k| {
        let mut rng = par::task_rng(spec.seed, k as u64);
        let (n, exponents, perms) = random_witness_instance(spec, &mut rng);
        let report = freeness_witness(n, &exponents, &perms, spec.power)?;
        Ok::<_, GroupError>((
            WitnessInstance {
                n,
                exponents,
                perms: perms.iter().map(|p| p.images().iter().map(|i| i + 1).collect()).collect(),
            },
            report,
        ))
    });
    let mut out = FuzzReport {
        spec: *spec,
        nonidentity: 0,
        suffix_matches: 0,
        max_length: 0,
        failures: Vec::new(),
    };
    for row in rows {
        let (instance, report) = row?;
        out.nonidentity += report.nonidentity as usize;
        out.suffix_matches += report.suffix_matches as usize;
        out.max_length = out.max_length.max(report.length);
        if !report.passed() {
            out.failures.push(FuzzFailure { instance, report });
        }
    }
    Ok(out)
}
