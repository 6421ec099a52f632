//! Noncommutative *-polynomials `C<X1, …, Xn, X1*, …, Xn*>`.
//!
//! Polynomials are kept in canonical form: terms sorted by the graded
//! lexicographic order on words, like terms merged, exact zeros dropped.
//! Coefficients are compared exactly; there is no epsilon cleanup in the
//! algebra.
//!
//! Text syntax (whitespace is insignificant between tokens):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*          // a number may also prefix a factor: 2X1
//! factor := primary '\''*
//! primary:= 'X' int | '(' expr ')' | number ['i'] | 'i'
//! ```
//!
//! A trailing apostrophe is the adjoint, so `X1'` is `X1*` and `(X1*X2)'` is
//! `X2'*X1'`.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::matcore::{CMatrix, CVector, MatTuple, C64};

pub use parse::parse;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable X{index} at byte {offset} exceeds the {num_vars} declared variables")]
    VarOutOfRange {
        index: u32,
        num_vars: u32,
        offset: usize,
    },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("polynomial has {expected} variables but the model has {got} matrices")]
    CountMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// One indeterminate `X_index` or its adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    /// 1-based.
    pub index: u32,
    pub starred: bool,
}

impl Letter {
    pub fn new(index: u32, starred: bool) -> Self {
        assert!(index >= 1, "letter indices are 1-based");
        Self { index, starred }
    }

    pub fn x(index: u32) -> Self {
        Self::new(index, false)
    }

    pub fn x_star(index: u32) -> Self {
        Self::new(index, true)
    }

    pub fn adjoint(self) -> Self {
        Self {
            index: self.index,
            starred: !self.starred,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}{}", self.index, if self.starred { "'" } else { "" })
    }
}

/// A monomial. Ordered by degree first, then letter by letter with
/// `X1 < X1' < X2 < X2' < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Noncommutative *-polynomial in `num_vars` indeterminates.
#[derive(Debug, Clone, PartialEq)]
pub struct NCPoly {
    num_vars: u32,
    terms: Vec<(Word, C64)>,
}

impl NCPoly {
    pub fn zero(num_vars: u32) -> Self {
        Self {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(num_vars: u32, c: C64) -> Self {
        Self::monomial(num_vars, c, Word::empty())
    }

    pub fn one(num_vars: u32) -> Self {
        Self::constant(num_vars, C64::new(1.0, 0.0))
    }

    /// `X_index`.
    pub fn var(num_vars: u32, index: u32) -> Self {
        Self::monomial(num_vars, C64::new(1.0, 0.0), Word(vec![Letter::x(index)]))
    }

    fn monomial(num_vars: u32, c: C64, w: Word) -> Self {
        let terms = if c == C64::new(0.0, 0.0) { vec![] } else { vec![(w, c)] };
        Self { num_vars, terms }
    }

    /// Canonicalizing constructor.
    pub fn from_terms(
        num_vars: u32,
        terms: impl IntoIterator<Item = (C64, Vec<Letter>)>,
    ) -> Result<Self, PolyError> {
        let mut acc: BTreeMap<Word, C64> = BTreeMap::new();
        for (c, letters) in terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(PolyError::NonFinite);
            }
            if let Some(l) = letters.iter().find(|l| l.index == 0 || l.index > num_vars) {
                return Err(PolyError::VarOutOfRange {
                    index: l.index,
                    num_vars,
                    offset: 0,
                });
            }
            *acc.entry(Word(letters)).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(Self::from_map(num_vars, acc))
    }

    fn from_map(num_vars: u32, acc: BTreeMap<Word, C64>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .collect();
        Self { num_vars, terms }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> &[(Word, C64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.last().map(|(w, _)| w.degree()).unwrap_or(0)
    }

    /// Same polynomial viewed in a larger variable set.
    pub fn with_num_vars(&self, num_vars: u32) -> Result<Self, PolyError> {
        let used = self.max_index();
        if used > num_vars {
            return Err(PolyError::VarOutOfRange {
                index: used,
                num_vars,
                offset: 0,
            });
        }
        Ok(Self {
            num_vars,
            terms: self.terms.clone(),
        })
    }

    /// Largest variable index occurring in a term (0 for constants).
    pub fn max_index(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|(w, _)| w.0.iter().map(|l| l.index))
            .max()
            .unwrap_or(0)
    }

    fn merged(&self, other: &NCPoly, sign: f64) -> NCPoly {
        let n = self.num_vars.max(other.num_vars);
        let mut acc: BTreeMap<Word, C64> = self.terms.iter().cloned().collect();
        for (w, c) in &other.terms {
            *acc.entry(w.clone()).or_insert(C64::new(0.0, 0.0)) += c * sign;
        }
        Self::from_map(n, acc)
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        self.merged(other, 1.0)
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        self.merged(other, -1.0)
    }

    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        let n = self.num_vars.max(other.num_vars);
        let mut acc: BTreeMap<Word, C64> = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                *acc.entry(wa.concat(wb)).or_insert(C64::new(0.0, 0.0)) += ca * cb;
            }
        }
        Self::from_map(n, acc)
    }

    pub fn scale(&self, c: C64) -> NCPoly {
        let acc = self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect();
        Self::from_map(self.num_vars, acc)
    }

    pub fn neg(&self) -> NCPoly {
        Self {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    /// Conjugates coefficients and reverses words with stars flipped.
    pub fn adjoint(&self) -> NCPoly {
        let acc = self.terms.iter().map(|(w, c)| (w.adjoint(), c.conj())).collect();
        Self::from_map(self.num_vars, acc)
    }

    fn check_model(&self, model: &MatTuple) -> Result<(), PolyError> {
        if model.len() != self.num_vars as usize {
            return Err(PolyError::CountMismatch {
                expected: self.num_vars as usize,
                got: model.len(),
            });
        }
        Ok(())
    }

    /// `Σ c_w · w(M)`, with the empty word evaluating to the identity.
    pub fn evaluate(&self, model: &MatTuple) -> Result<CMatrix, PolyError> {
        self.check_model(model)?;
        let d = model.dim();
        let adjoints: Vec<CMatrix> = model.iter().map(|m| m.adjoint()).collect();
        let letter = |l: &Letter| -> &CMatrix {
            let i = (l.index - 1) as usize;
            if l.starred {
                &adjoints[i]
            } else {
                &model[i]
            }
        };
        let mut out = CMatrix::zeros(d, d);
        for (w, c) in &self.terms {
            match w.0.split_first() {
                None => {
                    for i in 0..d {
                        out[(i, i)] += c;
                    }
                }
                Some((first, rest)) => {
                    let mut prod = letter(first).clone();
                    for l in rest {
                        prod = prod * letter(l);
                    }
                    out += prod * *c;
                }
            }
        }
        Ok(out)
    }

    /// `P(M) v` without forming `P(M)`.
    pub fn evaluate_on(&self, model: &MatTuple, v: &CVector) -> Result<CVector, PolyError> {
        self.check_model(model)?;
        if v.len() != model.dim() {
            return Err(PolyError::Dimension(format!(
                "vector of length {} against model dimension {}",
                v.len(),
                model.dim()
            )));
        }
        let mut out = CVector::zeros(v.len());
        for (w, c) in &self.terms {
            let mut x = v.clone();
            for l in w.0.iter().rev() {
                let m = &model[(l.index - 1) as usize];
                x = if l.starred { m.ad_mul(&x) } else { m * x };
            }
            out += x * *c;
        }
        Ok(out)
    }
}

fn fmt_real(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

/// Body of a term without its leading sign; returns (negative, body).
fn fmt_term(w: &Word, c: C64) -> (bool, String) {
    let word = w.to_string();
    let glue = |coef: String| {
        if word.is_empty() {
            coef
        } else {
            format!("{coef}*{word}")
        }
    };
    if c.im == 0.0 {
        let neg = c.re < 0.0;
        let a = c.re.abs();
        if a == 1.0 && !word.is_empty() {
            return (neg, word);
        }
        (neg, glue(fmt_real(a)))
    } else if c.re == 0.0 {
        let neg = c.im < 0.0;
        let b = c.im.abs();
        let coef = if b == 1.0 { "i".to_string() } else { format!("{}i", fmt_real(b)) };
        (neg, glue(coef))
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        let re = if c.re < 0.0 {
            format!("-{}", fmt_real(-c.re))
        } else {
            fmt_real(c.re)
        };
        let coef = format!("({re}{sign}{}i)", fmt_real(c.im.abs()));
        (false, glue(coef))
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let (neg, body) = fmt_term(w, *c);
            match (i, neg) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Canonical text form; `parse(&format(p), n) == p`.
pub fn format(p: &NCPoly) -> String {
    p.to_string()
}

/// Random polynomial with up to `max_terms` terms of degree ≤ `max_degree`.
/// Coefficients are multiples of 1/8 in `[-2, 2] + i[-2, 2]`, so sums and
/// products of small polynomials stay exact.
pub fn random_poly<R: rand::Rng + ?Sized>(rng: &mut R, num_vars: u32, max_terms: usize, max_degree: usize) -> NCPoly {
    let terms = rng.random_range(0..=max_terms);
    let mut part = || rng.random_range(-16i32..=16) as f64 / 8.0;
    let coeffs: Vec<C64> = (0..terms).map(|_| C64::new(part(), part())).collect();
    let words: Vec<Vec<Letter>> = (0..terms)
        .map(|_| {
            let len = rng.random_range(0..=max_degree);
            (0..len)
                .map(|_| Letter::new(rng.random_range(1..=num_vars), rng.random_bool(0.5)))
                .collect()
        })
        .collect();
    NCPoly::from_terms(num_vars, coeffs.into_iter().zip(words)).expect("letters in range, finite coefficients")
}
