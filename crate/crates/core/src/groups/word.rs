use std::fmt;

use super::GroupError;

/// Freely reduced word in the free group on generators `g1, g2, ...`,
/// stored as runs `(generator, nonzero exponent)` with adjacent runs on
/// distinct generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FWord {
    runs: Vec<(u32, i64)>,
}

impl FWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn gen(index: u32) -> Self {
        Self::gen_pow(index, 1)
    }

    pub fn gen_pow(index: u32, exp: i64) -> Self {
        let mut w = Self::identity();
        w.push_run(index, exp);
        w
    }

    /// Reduces a list of `(generator, ±1)` letters.
    pub fn reduce(letters: &[(u32, i8)]) -> Result<Self, GroupError> {
        let mut w = Self::identity();
        for &(g, s) in letters {
            if g == 0 {
                return Err(GroupError::Generator(g));
            }
            if s != 1 && s != -1 {
                return Err(GroupError::Malformed(format!("letter exponent {s} is not ±1")));
            }
            w.push_run(g, s as i64);
        }
        Ok(w)
    }

    /// Reduces arbitrary runs, merging and cancelling at every seam.
    pub fn from_runs(runs: &[(u32, i64)]) -> Result<Self, GroupError> {
        let mut w = Self::identity();
        for &(g, e) in runs {
            if g == 0 {
                return Err(GroupError::Generator(g));
            }
            w.push_run(g, e);
        }
        Ok(w)
    }

    fn push_run(&mut self, g: u32, e: i64) {
        if e == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    self.runs.pop();
                }
            }
            _ => self.runs.push((g, e)),
        }
    }

    pub fn runs(&self) -> &[(u32, i64)] {
        &self.runs
    }

    /// Expanded `(generator, ±1)` letters.
    pub fn letters(&self) -> Vec<(u32, i8)> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.runs {
            let s = if e > 0 { 1 } else { -1 };
            out.extend(std::iter::repeat_n((g, s), e.unsigned_abs() as usize));
        }
        out
    }

    /// Word length (number of letters).
    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.1.unsigned_abs() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn max_generator(&self) -> u32 {
        self.runs.iter().map(|r| r.0).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &FWord) -> FWord {
        let mut w = self.clone();
        for &(g, e) in &other.runs {
            w.push_run(g, e);
        }
        w
    }

    pub fn inv(&self) -> FWord {
        FWord {
            runs: self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> FWord {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut w = FWord::identity();
        for _ in 0..k.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// `α(σ)`: relabels `g_i` as `g_{σ(i)}`. Relabeling by a bijection
    /// cannot create cancellation, so the result stays reduced.
    pub fn permute(&self, sigma: &Perm) -> FWord {
        FWord {
            runs: self
                .runs
                .iter()
                .map(|&(g, e)| (sigma.apply(g as usize - 1) as u32 + 1, e))
                .collect(),
        }
    }

    /// Sum of exponents, i.e. the image in the abelianization `Z`.
    pub fn exponent_sum(&self) -> i64 {
        self.runs.iter().map(|r| r.1).sum()
    }

    /// Whether the last letters are exactly `suffix`.
    pub fn ends_with(&self, suffix: &[(u32, i8)]) -> bool {
        let letters = self.letters();
        letters.len() >= suffix.len() && letters[letters.len() - suffix.len()..] == *suffix
    }

    /// Parses `e`, `g1^2*g2^-1`, `g1 g2'` (a tick inverts one letter).
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let t = text.trim();
        if t == "e" || t == "1" || t.is_empty() {
            return Ok(Self::identity());
        }
        let mut w = Self::identity();
        for tok in t.split(|c: char| c == '*' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let (g, e) = parse_power(tok, 'g')?;
            if g == 0 {
                return Err(GroupError::Generator(0));
            }
            w.push_run(g, e);
        }
        Ok(w)
    }
}

/// Parses `<prefix><index>[^exp]['...]`; without an index the generator is 1.
pub(crate) fn parse_power(tok: &str, prefix: char) -> Result<(u32, i64), GroupError> {
    let bad = || GroupError::Malformed(format!("cannot parse '{tok}'"));
    let rest = tok.strip_prefix(prefix).ok_or_else(bad)?;
    let ticks = rest.len() - rest.trim_end_matches('\'').len();
    let rest = rest.trim_end_matches('\'');
    let (idx, exp) = match rest.split_once('^') {
        Some((i, e)) => (i, e.parse::<i64>().map_err(|_| bad())?),
        None => (rest, 1),
    };
    let g = if idx.is_empty() { 1 } else { idx.parse::<u32>().map_err(|_| bad())? };
    let exp = if ticks % 2 == 1 { -exp } else { exp };
    Ok((g, exp))
}

impl fmt::Display for FWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "e");
        }
        for (i, &(g, e)) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "g{g}")?;
            } else {
                write!(f, "g{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Permutation of `{0, .., n-1}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Self, GroupError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(GroupError::Malformed(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// From 1-based images, e.g. `[2, 1]` for the swap.
    pub fn from_one_based(images: &[usize]) -> Result<Self, GroupError> {
        if images.contains(&0) {
            return Err(GroupError::Malformed("permutation images are 1-based".into()));
        }
        Self::new(images.iter().map(|&i| i - 1).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a, b);
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inv(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j] = i;
        }
        Perm(out)
    }

    /// All permutations of `n` points in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Perm> {
        fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
            if cur.len() == used.len() {
                out.push(Perm(cur.clone()));
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Perm {
        use rand::seq::SliceRandom;
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Perm(v)
    }

    /// Parses 1-based images separated by spaces or commas: `"2 1"`, `"[2,3,1]"`.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let t = text.trim().trim_start_matches('[').trim_end_matches(']');
        let images = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| GroupError::Malformed(format!("bad image '{s}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_one_based(&images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, &j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, "]")
    }
}

/// Element `(w, σ)` of `F_n ⋊ S_n` with `α(σ)(g_i) = g_{σ(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemidirectElem {
    pub word: FWord,
    pub perm: Perm,
}

impl SemidirectElem {
    pub fn new(word: FWord, perm: Perm) -> Result<Self, GroupError> {
        if word.max_generator() as usize > perm.degree() {
            return Err(GroupError::Generator(word.max_generator()));
        }
        Ok(Self { word, perm })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            word: FWord::identity(),
            perm: Perm::identity(n),
        }
    }

    pub fn rank(&self) -> usize {
        self.perm.degree()
    }

    /// `(w₁, σ₁)(w₂, σ₂) = (w₁·α(σ₁)(w₂), σ₁σ₂)`.
    pub fn mul(&self, other: &Self) -> Result<Self, GroupError> {
        if self.rank() != other.rank() {
            return Err(GroupError::SizeMismatch(self.rank(), other.rank()));
        }
        Ok(Self {
            word: self.word.mul(&other.word.permute(&self.perm)),
            perm: self.perm.compose(&other.perm),
        })
    }

    pub fn inv(&self) -> Self {
        let pinv = self.perm.inv();
        Self {
            word: self.word.inv().permute(&pinv),
            perm: pinv,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_identity() && self.perm.is_identity()
    }
}

impl fmt::Display for SemidirectElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.word, self.perm)
    }
}
