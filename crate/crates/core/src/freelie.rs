//! Free Lie algebras in the Lyndon basis.
//!
//! Products of basis elements are computed over the integers by rewriting
//! along the standard factorization and cached process-wide, so the cache
//! is shared by every field and every truncation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::solve_combination;

/// Default ceiling on generated basis sizes.
pub const BASIS_LIMIT: u64 = 2_000_000;

/// A word over generator indices `0..rank`, ordered by (length, lexicographic).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Arc<[u8]>);

impl Word {
    pub fn new(letters: &[u8]) -> Word {
        Word(Arc::from(letters))
    }

    pub fn letter(i: u8) -> Word {
        Word::new(&[i])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.to_vec();
        v.extend_from_slice(&o.0);
        Word::new(&v)
    }

    /// Plain lexicographic comparison (a proper prefix is smaller).
    pub fn lex_cmp(&self, o: &Word) -> Ordering {
        self.0.cmp(&o.0)
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Word) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Word) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| (l + 1).to_string()).collect();
        write!(f, "w{}", s.join("."))
    }
}

/// True when `w` is strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| {
        let rot: Vec<u8> = w[i..].iter().chain(&w[..i]).copied().collect();
        w < rot.as_slice()
    })
}

/// Split point of the standard factorization: the longest proper Lyndon suffix.
pub fn standard_split(w: &[u8]) -> Option<usize> {
    (1..w.len()).find(|&i| is_lyndon(&w[i..]))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BracketTree {
    Letter(u8),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn of(w: &[u8]) -> BracketTree {
        match standard_split(w) {
            None => BracketTree::Letter(w[0]),
            Some(i) => BracketTree::Node(Box::new(BracketTree::of(&w[..i])), Box::new(BracketTree::of(&w[i..]))),
        }
    }

    pub fn render(&self, names: &dyn Fn(u8) -> String) -> String {
        match self {
            BracketTree::Letter(l) => names(*l),
            BracketTree::Node(a, b) => format!("[{},{}]", a.render(names), b.render(names)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LyndonBasisElement {
    pub word: Word,
    pub degree: usize,
    pub bracketing: BracketTree,
}

/// Dimension of the degree-`n` component of the free Lie algebra of rank `r`
/// (necklace count).
pub fn witt_dimension(r: u64, n: u64) -> u64 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            total += mobius(d) as i128 * (r as i128).pow((n / d) as u32);
        }
    }
    (total / n as i128) as u64
}

fn mobius(mut n: u64) -> i64 {
    let mut m = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// All Lyndon words of length at most `max_degree`, sorted by (degree, lex).
pub fn lyndon_words(rank: usize, max_degree: usize) -> Result<Vec<Word>> {
    lyndon_words_limited(rank, max_degree, BASIS_LIMIT)
}

pub fn lyndon_words_limited(rank: usize, max_degree: usize, limit: u64) -> Result<Vec<Word>> {
    if rank == 0 || max_degree == 0 {
        return Ok(Vec::new());
    }
    let mut needed: u128 = 0;
    for n in 1..=max_degree as u64 {
        needed += witt_dimension(rank as u64, n) as u128;
    }
    if needed > limit as u128 {
        return Err(Error::capacity("Lyndon basis", needed, limit as u128));
    }
    // Duval's generation in lexicographic order.
    let k = rank as u8;
    let mut out = Vec::new();
    let mut w: Vec<u8> = vec![0];
    loop {
        out.push(Word::new(&w));
        let m = w.len();
        while w.len() < max_degree {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            None => break,
            Some(last) => *last += 1,
        }
    }
    out.sort();
    Ok(out)
}

pub fn lyndon_basis(rank: usize, max_degree: usize) -> Result<Vec<LyndonBasisElement>> {
    Ok(lyndon_words(rank, max_degree)?
        .into_iter()
        .map(|w| {
            let bracketing = BracketTree::of(w.letters());
            LyndonBasisElement { degree: w.len(), bracketing, word: w }
        })
        .collect())
}

type Combo = Arc<Vec<(Word, i64)>>;

fn memo() -> &'static RwLock<HashMap<(Word, Word), Combo>> {
    static MEMO: OnceLock<RwLock<HashMap<(Word, Word), Combo>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn accumulate(acc: &mut BTreeMap<Word, i64>, w: &Word, c: i64) {
    if c == 0 {
        return;
    }
    let e = acc.entry(w.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        acc.remove(w);
    }
}

/// `[u, v]` for Lyndon words, expanded in the Lyndon basis over the integers.
pub fn bracket_words(u: &Word, v: &Word) -> Combo {
    let key = (u.clone(), v.clone());
    if let Some(c) = memo().read().unwrap().get(&key) {
        return c.clone();
    }
    let result = Arc::new(compute_bracket_words(u, v));
    memo().write().unwrap().insert(key, result.clone());
    result
}

fn compute_bracket_words(u: &Word, v: &Word) -> Vec<(Word, i64)> {
    match u.lex_cmp(v) {
        Ordering::Equal => Vec::new(),
        Ordering::Greater => bracket_words(v, u).iter().map(|(w, c)| (w.clone(), -c)).collect(),
        Ordering::Less => {
            let split = standard_split(u.letters());
            let standard = match split {
                None => true,
                Some(i) => Word::new(&u.letters()[i..]).lex_cmp(v) != Ordering::Less,
            };
            if standard {
                return vec![(u.concat(v), 1)];
            }
            let i = split.unwrap();
            let u1 = Word::new(&u.letters()[..i]);
            let u2 = Word::new(&u.letters()[i..]);
            // [[u1,u2],v] = [u1,[u2,v]] - [u2,[u1,v]]
            let mut acc = BTreeMap::new();
            for (w, c) in bracket_words(&u2, v).iter() {
                for (x, d) in bracket_words(&u1, w).iter() {
                    accumulate(&mut acc, x, c * d);
                }
            }
            for (w, c) in bracket_words(&u1, v).iter() {
                for (x, d) in bracket_words(&u2, w).iter() {
                    accumulate(&mut acc, x, -c * d);
                }
            }
            acc.into_iter().collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    max_degree: usize,
}

impl Truncation {
    pub fn new(max_degree: usize) -> Result<Truncation> {
        if max_degree == 0 {
            return Err(Error::InvalidField("truncation degree must be at least 1".into()));
        }
        Ok(Truncation { max_degree })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FreeLieInner {
    rank: usize,
    field: FieldSpec,
}

/// Handle to the free Lie algebra of a given rank over a field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeLie(Arc<FreeLieInner>);

impl FreeLie {
    pub fn new(rank: usize, field: FieldSpec) -> FreeLie {
        FreeLie(Arc::new(FreeLieInner { rank, field }))
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn field(&self) -> &FieldSpec {
        &self.0.field
    }

    pub fn zero(&self) -> FreeLieElement {
        FreeLieElement { alg: self.clone(), terms: BTreeMap::new() }
    }

    pub fn generator(&self, i: usize) -> FreeLieElement {
        assert!(i < self.rank(), "generator index out of range");
        self.basis_element(Word::letter(i as u8))
    }

    pub fn basis_element(&self, w: Word) -> FreeLieElement {
        self.term(w, self.field().one())
    }

    pub fn term(&self, w: Word, c: Scalar) -> FreeLieElement {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        FreeLieElement { alg: self.clone(), terms }
    }

    pub fn from_terms(&self, it: impl IntoIterator<Item = (Word, Scalar)>) -> FreeLieElement {
        let mut e = self.zero();
        for (w, c) in it {
            e.add_term(w, c);
        }
        e
    }

    /// Left-normed bracket `[[g_{i1}, g_{i2}], ..., g_{in}]`.
    pub fn left_normed(&self, idx: &[usize]) -> FreeLieElement {
        let mut acc = self.generator(idx[0]);
        for &i in &idx[1..] {
            acc = acc.bracket_unchecked(&self.generator(i), None);
        }
        acc
    }

    pub fn bracket(&self, u: &FreeLieElement, v: &FreeLieElement, trunc: Option<Truncation>) -> Result<FreeLieElement> {
        if &u.alg != self || &v.alg != self {
            return Err(Error::AlgebraMismatch("operands from different free Lie algebras".into()));
        }
        Ok(u.bracket_unchecked(v, trunc))
    }

    /// Same algebra over another field (coefficients must be re-expressed by the caller).
    pub fn with_field(&self, field: FieldSpec) -> FreeLie {
        FreeLie::new(self.rank(), field)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeLieElement {
    alg: FreeLie,
    terms: BTreeMap<Word, Scalar>,
}

impl PartialOrd for FreeLie {
    fn partial_cmp(&self, o: &FreeLie) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for FreeLie {
    fn cmp(&self, o: &FreeLie) -> Ordering {
        (self.0.rank, &self.0.field).cmp(&(o.0.rank, &o.0.field))
    }
}

impl FreeLieElement {
    pub fn algebra(&self) -> &FreeLie {
        &self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.alg.field().zero())
    }

    fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, o: &FreeLieElement) -> FreeLieElement {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> FreeLieElement {
        FreeLieElement { alg: self.alg.clone(), terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &FreeLieElement) -> FreeLieElement {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.neg());
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> FreeLieElement {
        if c.is_zero() {
            return self.alg.zero();
        }
        FreeLieElement { alg: self.alg.clone(), terms: self.terms.iter().map(|(w, v)| (w.clone(), v.mul(c))).collect() }
    }

    /// Bracket without the algebra check; products above the truncation are dropped.
    pub fn bracket_unchecked(&self, o: &FreeLieElement, trunc: Option<Truncation>) -> FreeLieElement {
        let mut acc: BTreeMap<Word, Scalar> = BTreeMap::new();
        let field = self.alg.field();
        for (u, cu) in &self.terms {
            for (v, cv) in &o.terms {
                if let Some(t) = trunc {
                    if u.len() + v.len() > t.max_degree {
                        continue;
                    }
                }
                let prod = bracket_words(u, v);
                if prod.is_empty() {
                    continue;
                }
                let c = cu.mul(cv);
                for (w, n) in prod.iter() {
                    let k = c.mul(&field.from_i64(*n));
                    if k.is_zero() {
                        continue;
                    }
                    match acc.get_mut(w) {
                        Some(x) => *x = x.add(&k),
                        None => {
                            acc.insert(w.clone(), k);
                        }
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        FreeLieElement { alg: self.alg.clone(), terms: acc }
    }

    pub fn bracket(&self, o: &FreeLieElement) -> Result<FreeLieElement> {
        self.alg.bracket(self, o, None)
    }

    /// Highest degree present (0 for the zero element).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.terms.keys().map(Word::len).min().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn homogeneous_component(&self, d: usize) -> FreeLieElement {
        FreeLieElement {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Drops every term of degree above `t`.
    pub fn truncate(&self, t: Truncation) -> FreeLieElement {
        FreeLieElement {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|(w, _)| w.len() <= t.max_degree).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Coefficient of the smallest basis word, used to normalize cache keys.
    pub fn first_coeff(&self) -> Option<&Scalar> {
        self.terms.values().next()
    }

    /// Re-normalizing a normal form returns it unchanged.
    pub fn renormalize(&self) -> FreeLieElement {
        self.alg.from_terms(self.terms.iter().map(|(w, c)| (w.clone(), c.clone())))
    }

    pub fn render(&self, names: &dyn Fn(u8) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let b = BracketTree::of(w.letters()).render(names);
                if c.is_one() {
                    b
                } else {
                    format!("{c}*{b}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Debug for FreeLieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|l| format!("x{}", l + 1)))
    }
}

impl fmt::Display for FreeLieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|l| format!("x{}", l + 1)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Coordinates(Vec<Scalar>),
    NotInSpan,
}

/// Coordinates of `v` in `basis`, or `NotInSpan`.
pub fn subspace_membership(v: &FreeLieElement, basis: &[FreeLieElement]) -> Result<Membership> {
    for b in basis {
        if b.alg != v.alg {
            return Err(Error::AlgebraMismatch("basis element from another algebra".into()));
        }
    }
    let field = v.alg.field().clone();
    let mut keys: Vec<Word> = v.terms.keys().cloned().collect();
    for b in basis {
        keys.extend(b.terms.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let cols: Vec<Vec<Scalar>> = basis.iter().map(|b| keys.iter().map(|k| b.coeff(k)).collect()).collect();
    let target: Vec<Scalar> = keys.iter().map(|k| v.coeff(k)).collect();
    Ok(match solve_combination(&field, &cols, &target) {
        Some(x) => Membership::Coordinates(x),
        None => Membership::NotInSpan,
    })
}

/// Rank of a list of elements over the field.
pub fn span_rank(elems: &[FreeLieElement]) -> usize {
    let Some(first) = elems.first() else {
        return 0;
    };
    let field = first.alg.field().clone();
    let mut keys: Vec<Word> = elems.iter().flat_map(|e| e.terms.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<Scalar>> = elems.iter().map(|e| keys.iter().map(|k| e.coeff(k)).collect()).collect();
    crate::linalg::rank(&field, &rows)
}
