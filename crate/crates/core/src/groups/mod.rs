//! Word combinatorics for the groups that appear in the crossed-product
//! constructions: free groups, `F_n ⋊ S_n`, free products of small groups,
//! freeness witnesses and coset decompositions.

use std::fmt;

use rand::Rng;
use thiserror::Error;

mod coset;
mod witness;
mod word;

pub use coset::{coset_decompose, CosetDecomposition, CosetSystem, Subgroup};
pub use witness::{
    freeness_witness, fuzz_freeness, random_witness_instance, FuzzReport, FuzzSpec, WitnessInstance,
    WitnessReport,
};
pub use word::{FWord, Perm, SemidirectElem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("generator index {0} is invalid")]
    Generator(u32),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("element {elem} does not belong to {group}")]
    NotMember { elem: String, group: String },
    #[error("free product has no factor {0}")]
    UnknownFactor(usize),
    #[error("inconsistent coset system: {0}")]
    Inconsistent(String),
}

/// One of the built-in group families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupHandle {
    Z,
    Zp(u64),
    Sn(usize),
    Fn(u32),
    FnSn(usize),
    FreeProduct(Vec<GroupHandle>),
}

/// Element of a [`GroupHandle`]. `Int` serves both `Z` and `Z_p`; free
/// product elements are syllable lists `(factor, element)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElem {
    Int(i64),
    Perm(Perm),
    Word(FWord),
    Semi(SemidirectElem),
    Free(Vec<(usize, GroupElem)>),
}

impl GroupHandle {
    pub fn name(&self) -> String {
        match self {
            GroupHandle::Z => "Z".into(),
            GroupHandle::Zp(p) => format!("Z{p}"),
            GroupHandle::Sn(n) => format!("S{n}"),
            GroupHandle::Fn(n) => format!("F{n}"),
            GroupHandle::FnSn(n) => format!("F{n}xS{n}"),
            GroupHandle::FreeProduct(hs) => hs.iter().map(|h| h.name()).collect::<Vec<_>>().join("*"),
        }
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            GroupHandle::Z | GroupHandle::Zp(_) => GroupElem::Int(0),
            GroupHandle::Sn(n) => GroupElem::Perm(Perm::identity(*n)),
            GroupHandle::Fn(_) => GroupElem::Word(FWord::identity()),
            GroupHandle::FnSn(n) => GroupElem::Semi(SemidirectElem::identity(*n)),
            GroupHandle::FreeProduct(_) => GroupElem::Free(Vec::new()),
        }
    }

    fn not_member(&self, e: &GroupElem) -> GroupError {
        GroupError::NotMember {
            elem: e.to_string(),
            group: self.name(),
        }
    }

    /// Normal form of `e`; errors when `e` is not an element of this group.
    pub fn normalize(&self, e: &GroupElem) -> Result<GroupElem, GroupError> {
        match (self, e) {
            (GroupHandle::Z, GroupElem::Int(_)) => Ok(e.clone()),
            (GroupHandle::Zp(p), GroupElem::Int(k)) if *p > 0 => Ok(GroupElem::Int(k.rem_euclid(*p as i64))),
            (GroupHandle::Sn(n), GroupElem::Perm(s)) if s.degree() == *n => Ok(e.clone()),
            (GroupHandle::Fn(n), GroupElem::Word(w)) if w.max_generator() <= *n => Ok(e.clone()),
            (GroupHandle::FnSn(n), GroupElem::Semi(s)) if s.rank() == *n && s.word.max_generator() as usize <= *n => {
                Ok(e.clone())
            }
            (GroupHandle::FreeProduct(hs), GroupElem::Free(syl)) => free_product_nf(hs, syl).map(GroupElem::Free),
            _ => Err(self.not_member(e)),
        }
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem, GroupError> {
        let (a, b) = (self.normalize(a)?, self.normalize(b)?);
        Ok(match (self, a, b) {
            (GroupHandle::Z, GroupElem::Int(x), GroupElem::Int(y)) => GroupElem::Int(x + y),
            (GroupHandle::Zp(p), GroupElem::Int(x), GroupElem::Int(y)) => GroupElem::Int((x + y).rem_euclid(*p as i64)),
            (GroupHandle::Sn(_), GroupElem::Perm(x), GroupElem::Perm(y)) => GroupElem::Perm(x.compose(&y)),
            (GroupHandle::Fn(_), GroupElem::Word(x), GroupElem::Word(y)) => GroupElem::Word(x.mul(&y)),
            (GroupHandle::FnSn(_), GroupElem::Semi(x), GroupElem::Semi(y)) => GroupElem::Semi(x.mul(&y)?),
            (GroupHandle::FreeProduct(hs), GroupElem::Free(mut x), GroupElem::Free(y)) => {
                x.extend(y);
                GroupElem::Free(free_product_nf(hs, &x)?)
            }
            _ => unreachable!("normalize checked membership"),
        })
    }

    pub fn inv(&self, a: &GroupElem) -> Result<GroupElem, GroupError> {
        Ok(match (self, self.normalize(a)?) {
            (GroupHandle::Z, GroupElem::Int(x)) => GroupElem::Int(-x),
            (GroupHandle::Zp(p), GroupElem::Int(x)) => GroupElem::Int((-x).rem_euclid(*p as i64)),
            (_, GroupElem::Perm(x)) => GroupElem::Perm(x.inv()),
            (_, GroupElem::Word(x)) => GroupElem::Word(x.inv()),
            (_, GroupElem::Semi(x)) => GroupElem::Semi(x.inv()),
            (GroupHandle::FreeProduct(hs), GroupElem::Free(x)) => {
                let inv = x
                    .iter()
                    .rev()
                    .map(|(i, e)| Ok((*i, hs[*i].inv(e)?)))
                    .collect::<Result<Vec<_>, GroupError>>()?;
                GroupElem::Free(inv)
            }
            _ => unreachable!("normalize checked membership"),
        })
    }

    pub fn is_identity(&self, a: &GroupElem) -> Result<bool, GroupError> {
        Ok(self.normalize(a)? == self.identity())
    }

    /// Random element; `size` bounds word lengths, syllable counts and
    /// integer magnitudes.
    pub fn random<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> GroupElem {
        let size = size.max(1);
        match self {
            GroupHandle::Z => GroupElem::Int(rng.random_range(-(size as i64)..=size as i64)),
            GroupHandle::Zp(p) => GroupElem::Int(rng.random_range(0..*p as i64)),
            GroupHandle::Sn(n) => GroupElem::Perm(Perm::random(*n, rng)),
            GroupHandle::Fn(n) => GroupElem::Word(random_word(*n, size, rng)),
            GroupHandle::FnSn(n) => GroupElem::Semi(SemidirectElem {
                word: random_word(*n as u32, size, rng),
                perm: Perm::random(*n, rng),
            }),
            GroupHandle::FreeProduct(hs) => {
                let len = rng.random_range(0..=size);
                let syl: Vec<(usize, GroupElem)> = (0..len)
                    .map(|_| {
                        let i = rng.random_range(0..hs.len());
                        (i, hs[i].random(size, rng))
                    })
                    .collect();
                GroupElem::Free(free_product_nf(hs, &syl).expect("random syllables are members"))
            }
        }
    }

    /// Parses an element. Formats: `Z` takes `t^k` or an integer, `Z_p`
    /// an integer, `S_n` 1-based images, `F_n` a word like `g1^2*g2^-1`,
    /// `F_n ⋊ S_n` takes `word|images`, free products `i:elem; j:elem`.
    pub fn parse_elem(&self, text: &str) -> Result<GroupElem, GroupError> {
        let t = text.trim();
        let e = match self {
            GroupHandle::Z | GroupHandle::Zp(_) => {
                if t == "e" {
                    GroupElem::Int(0)
                } else if let Ok(k) = t.parse::<i64>() {
                    GroupElem::Int(k)
                } else {
                    let mut total = 0;
                    for tok in t.split(|c: char| c == '*' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                        total += word::parse_power(tok, 't')?.1;
                    }
                    GroupElem::Int(total)
                }
            }
            GroupHandle::Sn(_) => GroupElem::Perm(Perm::parse(t)?),
            GroupHandle::Fn(_) => GroupElem::Word(FWord::parse(t)?),
            GroupHandle::FnSn(n) => {
                let (w, p) = t.split_once('|').unwrap_or((t, ""));
                let perm = if p.trim().is_empty() { Perm::identity(*n) } else { Perm::parse(p)? };
                GroupElem::Semi(SemidirectElem::new(FWord::parse(w)?, perm)?)
            }
            GroupHandle::FreeProduct(hs) => {
                let mut syl = Vec::new();
                for part in t.split(';').map(str::trim).filter(|s| !s.is_empty() && *s != "e") {
                    let (i, e) = part
                        .split_once(':')
                        .ok_or_else(|| GroupError::Malformed(format!("syllable '{part}' lacks 'factor:'")))?;
                    let i: usize = i.trim().parse().map_err(|_| GroupError::Malformed(format!("bad factor '{i}'")))?;
                    let h = hs.get(i).ok_or(GroupError::UnknownFactor(i))?;
                    syl.push((i, h.parse_elem(e)?));
                }
                GroupElem::Free(syl)
            }
        };
        self.normalize(&e)
    }
}

fn random_word<R: Rng + ?Sized>(n: u32, len: usize, rng: &mut R) -> FWord {
    let letters: Vec<(u32, i8)> = (0..rng.random_range(0..=len))
        .map(|_| (rng.random_range(1..=n.max(1)), if rng.random_bool(0.5) { 1 } else { -1 }))
        .collect();
    FWord::reduce(&letters).expect("indices start at 1")
}

/// Alternating normal form of a syllable sequence in the free product of
/// `handles`: each syllable is normalized in its factor, identities are
/// dropped and neighbours from the same factor merged.
pub fn free_product_nf(handles: &[GroupHandle], syllables: &[(usize, GroupElem)]) -> Result<Vec<(usize, GroupElem)>, GroupError> {
    let mut stack: Vec<(usize, GroupElem)> = Vec::with_capacity(syllables.len());
    for (i, e) in syllables {
        let h = handles.get(*i).ok_or(GroupError::UnknownFactor(*i))?;
        let mut cur = h.normalize(e)?;
        if let Some((j, top)) = stack.last() {
            if j == i {
                cur = h.mul(top, &cur)?;
                stack.pop();
            }
        }
        if cur != h.identity() {
            stack.push((*i, cur));
        }
    }
    Ok(stack)
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Int(k) => write!(f, "{k}"),
            GroupElem::Perm(p) => write!(f, "{p}"),
            GroupElem::Word(w) => write!(f, "{w}"),
            GroupElem::Semi(s) => write!(f, "{}|{}", s.word, s.perm),
            GroupElem::Free(syl) if syl.is_empty() => write!(f, "e"),
            GroupElem::Free(syl) => {
                for (k, (i, e)) in syl.iter().enumerate() {
                    if k > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{i}:{e}")?;
                }
                Ok(())
            }
        }
    }
}
