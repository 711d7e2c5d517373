//! Carriers: Lie algebras in which terms are evaluated.
//!
//! Exact infinite algebras (free, free metabelian, extensions) implement
//! [`LieCarrier`] directly. For enumeration, [`FiniteAlgebra`] holds a graded
//! algebra over GF(p) as structure constants that are exact up to a table
//! degree; a window is the set of elements of degree ≤ d, with exact products.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::field::{BaseElem, BaseField, FieldSpec, Scalar};
use crate::freelie::{bracket_words, lyndon_words, BracketTree, FreeLie, FreeLieElement, Truncation, Word};
use crate::linalg::{Echelon, ModulePresentation};
use crate::metabelian::{monomials_from, Extension, ExtensionElement, Metabelian, MetabelianElement};
use crate::poly::{Mono, Poly};

/// Default point budget for enumeration.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Operations needed to evaluate terms.
pub trait LieCarrier {
    type Elem: Clone + PartialEq + Eq + Hash + Debug;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Result<Self::Elem>;
    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    /// The designated image of the i-th generator of the coefficient algebra.
    fn constant(&self, i: usize) -> Result<Self::Elem>;
    fn constant_count(&self) -> usize;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn render(&self, a: &Self::Elem) -> String;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

fn constant_out_of_range(i: usize, n: usize) -> Error {
    Error::CarrierMismatch(format!("constant a{} requested but the carrier designates {n}", i + 1))
}

fn base_scalar(field: BaseField, c: &Scalar) -> Result<BaseElem> {
    match c.as_base() {
        Some(b) if b.field() == field => Ok(b.clone()),
        _ => Err(Error::FieldMismatch(c.spec().to_string(), field.to_string())),
    }
}

/// The free Lie algebra with its first `constants` generators designated.
#[derive(Clone, Debug)]
pub struct FreeCarrier {
    pub alg: FreeLie,
    pub constants: usize,
    pub trunc: Option<Truncation>,
}

impl LieCarrier for FreeCarrier {
    type Elem = FreeLieElement;
    fn zero(&self) -> FreeLieElement {
        self.alg.zero()
    }
    fn add(&self, a: &FreeLieElement, b: &FreeLieElement) -> FreeLieElement {
        a.add(b)
    }
    fn neg(&self, a: &FreeLieElement) -> FreeLieElement {
        a.neg()
    }
    fn scale(&self, c: &Scalar, a: &FreeLieElement) -> Result<FreeLieElement> {
        if &c.spec() != self.alg.field() && !self.alg.field().contains(c) {
            return Err(Error::FieldMismatch(c.spec().to_string(), self.alg.field().to_string()));
        }
        Ok(a.scale(c))
    }
    fn bracket(&self, a: &FreeLieElement, b: &FreeLieElement) -> Result<FreeLieElement> {
        if a.algebra() != &self.alg || b.algebra() != &self.alg {
            return Err(Error::CarrierMismatch("element from another free Lie algebra".into()));
        }
        Ok(a.bracket_unchecked(b, self.trunc))
    }
    fn constant(&self, i: usize) -> Result<FreeLieElement> {
        if i >= self.constants {
            return Err(constant_out_of_range(i, self.constants));
        }
        Ok(self.alg.generator(i))
    }
    fn constant_count(&self) -> usize {
        self.constants
    }
    fn is_zero(&self, a: &FreeLieElement) -> bool {
        a.is_zero()
    }
    fn render(&self, a: &FreeLieElement) -> String {
        a.render(&|l| format!("a{}", l + 1))
    }
}

/// 𝔉_r with its first `constants` generators designated.
#[derive(Clone, Debug)]
pub struct MetabelianCarrier {
    pub alg: Metabelian,
    pub constants: usize,
}

impl LieCarrier for MetabelianCarrier {
    type Elem = MetabelianElement;
    fn zero(&self) -> MetabelianElement {
        self.alg.zero()
    }
    fn add(&self, a: &MetabelianElement, b: &MetabelianElement) -> MetabelianElement {
        a.add(b)
    }
    fn neg(&self, a: &MetabelianElement) -> MetabelianElement {
        a.neg()
    }
    fn scale(&self, c: &Scalar, a: &MetabelianElement) -> Result<MetabelianElement> {
        Ok(a.scale(&base_scalar(self.alg.field(), c)?))
    }
    fn bracket(&self, a: &MetabelianElement, b: &MetabelianElement) -> Result<MetabelianElement> {
        self.alg.bracket(a, b).map_err(|_| Error::CarrierMismatch("element from another metabelian algebra".into()))
    }
    fn constant(&self, i: usize) -> Result<MetabelianElement> {
        if i >= self.constants {
            return Err(constant_out_of_range(i, self.constants));
        }
        Ok(self.alg.generator(i))
    }
    fn constant_count(&self) -> usize {
        self.constants
    }
    fn is_zero(&self, a: &MetabelianElement) -> bool {
        a.is_zero()
    }
    fn render(&self, a: &MetabelianElement) -> String {
        a.to_string()
    }
}

/// 𝔉_r ⊕ M with the generators of 𝔉_r designated.
#[derive(Clone, Debug)]
pub struct ExtensionCarrier {
    pub ext: Extension,
}

impl LieCarrier for ExtensionCarrier {
    type Elem = ExtensionElement;
    fn zero(&self) -> ExtensionElement {
        self.ext.zero()
    }
    fn add(&self, a: &ExtensionElement, b: &ExtensionElement) -> ExtensionElement {
        a.add(b)
    }
    fn neg(&self, a: &ExtensionElement) -> ExtensionElement {
        a.neg()
    }
    fn scale(&self, c: &Scalar, a: &ExtensionElement) -> Result<ExtensionElement> {
        Ok(a.scale(&base_scalar(self.ext.base().field(), c)?))
    }
    fn bracket(&self, a: &ExtensionElement, b: &ExtensionElement) -> Result<ExtensionElement> {
        Ok(self.ext.bracket(a, b))
    }
    fn constant(&self, i: usize) -> Result<ExtensionElement> {
        if i >= self.ext.base().rank() {
            return Err(constant_out_of_range(i, self.ext.base().rank()));
        }
        Ok(self.ext.lift(&self.ext.base().generator(i)))
    }
    fn constant_count(&self) -> usize {
        self.ext.base().rank()
    }
    fn is_zero(&self, a: &ExtensionElement) -> bool {
        a.is_zero()
    }
    fn render(&self, a: &ExtensionElement) -> String {
        let xs: Vec<String> = (0..self.ext.base().rank()).map(|k| format!("x{}", k + 1)).collect();
        let mut s = a.base.to_string();
        for (k, p) in a.ext.iter().enumerate() {
            if !p.is_zero() {
                s.push_str(&format!(" + g{}*({})", k + 1, p.render_with(&xs)));
            }
        }
        s
    }
}

/// Description of a finite carrier family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CarrierSpec {
    /// Free Lie algebra of the given rank; its generators are the constants.
    Free { rank: usize },
    /// 𝔉_r; its generators are the constants.
    Metabelian { rank: usize },
    /// 𝔉_r ⊕ M for a module with homogeneous relations.
    Extension { rank: usize, module: ModulePresentation },
    /// Class-two nilpotent algebra on a_i, b_i (i ≤ pairs) with a_i∘b_i = c_i
    /// the only nonzero products; no constants.
    NonQwComp { pairs: usize },
    /// Abelian algebra of the given dimension; the first `constants` basis
    /// vectors are designated.
    Abelian { dim: usize, constants: usize },
}

impl CarrierSpec {
    pub fn describe(&self) -> String {
        match self {
            CarrierSpec::Free { rank } => format!("free Lie algebra of rank {rank}"),
            CarrierSpec::Metabelian { rank } => format!("free metabelian Lie algebra of rank {rank}"),
            CarrierSpec::Extension { rank, module } => format!(
                "free metabelian Lie algebra of rank {rank} extended by a module on {} generators with {} relations",
                module.generators,
                module.relations.cols()
            ),
            CarrierSpec::NonQwComp { pairs } => format!("class-two nilpotent algebra on {pairs} pairs"),
            CarrierSpec::Abelian { dim, constants } => format!("abelian algebra of dimension {dim} with {constants} constants"),
        }
    }

    /// True when the algebra is finite dimensional (no table degree needed).
    pub fn is_bounded(&self) -> bool {
        matches!(self, CarrierSpec::NonQwComp { .. } | CarrierSpec::Abelian { .. })
    }
}

/// Describes how Fit sits inside the carrier, when known in closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FitInfo {
    /// Fit is the kernel of the listed coordinates (the linear part).
    Kernel(Vec<usize>),
    /// Fit is the whole algebra.
    Whole,
    /// Fit is zero.
    Zero,
}

pub type FElem = Vec<u32>;

#[derive(Debug)]
struct Tables {
    spec: CarrierSpec,
    p: u64,
    table_degree: Option<usize>,
    degrees: Vec<usize>,
    labels: Vec<String>,
    constants: Vec<FElem>,
    generators: Vec<FElem>,
    fit: FitInfo,
    products: RwLock<HashMap<(u32, u32), Arc<[(u32, u32)]>>>,
    kind: KindData,
}

#[derive(Debug)]
enum KindData {
    Free { words: Vec<Word>, index: HashMap<Word, u32> },
    Metabelian { alg: Metabelian, basis: Vec<MbBasis>, index: HashMap<MbBasis, u32>, module: Option<ModuleData> },
    NonQwComp { pairs: usize },
    Abelian,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum MbBasis {
    Lin(usize),
    Fit(usize, usize, Mono),
    Mod(usize, Mono),
}

/// Module part of an extension window: per degree, the relation subspace
/// in (generator, monomial) coordinates and the surviving coordinates.
#[derive(Debug)]
struct ModuleData {
    coords: Vec<Vec<(usize, Mono)>>,
    relations: Vec<Echelon>,
}

/// A graded Lie algebra over GF(p) given by lazily computed structure
/// constants. Products of degree above the table degree are either dropped
/// (under a truncation) or reported as [`Error::TruncationRequired`].
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    t: Arc<Tables>,
    trunc: Option<usize>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, o: &FiniteAlgebra) -> bool {
        Arc::ptr_eq(&self.t, &o.t) && self.trunc == o.trunc
    }
}

impl FiniteAlgebra {
    /// Builds the algebra exact up to `degree` (ignored for finite-dimensional kinds).
    pub fn build(spec: CarrierSpec, p: u64, degree: usize) -> Result<FiniteAlgebra> {
        if !crate::field::is_prime(p) || p >= 1 << 31 {
            return Err(Error::InvalidField(format!("GF({p})")));
        }
        let field = BaseField::Prime(p);
        let unit = |dim: usize, i: usize| {
            let mut v = vec![0u32; dim];
            v[i] = 1;
            v
        };
        let tables = match &spec {
            CarrierSpec::Free { rank } => {
                let words = lyndon_words(*rank, degree)?;
                let index: HashMap<Word, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
                let dim = words.len();
                let names = |l: u8| format!("a{}", l + 1);
                Tables {
                    degrees: words.iter().map(Word::len).collect(),
                    labels: words.iter().map(|w| BracketTree::of(w.letters()).render(&names)).collect(),
                    constants: (0..*rank).map(|i| unit(dim, i)).collect(),
                    generators: (0..*rank).map(|i| unit(dim, i)).collect(),
                    fit: FitInfo::Zero,
                    kind: KindData::Free { words, index },
                    spec: spec.clone(),
                    p,
                    table_degree: Some(degree),
                    products: RwLock::new(HashMap::new()),
                }
            }
            CarrierSpec::Metabelian { rank } | CarrierSpec::Extension { rank, .. } => {
                let alg = Metabelian::new(*rank, field);
                let mut basis: Vec<MbBasis> = (0..*rank).map(MbBasis::Lin).collect();
                let mut degrees = vec![1; *rank];
                for d in 0..degree.saturating_sub(1) as u32 {
                    for (j, i, m) in alg.fit_basis(d) {
                        basis.push(MbBasis::Fit(j, i, m));
                        degrees.push(d as usize + 2);
                    }
                }
                let module = match &spec {
                    CarrierSpec::Extension { module, .. } => {
                        if module.ring != *alg.ring() {
                            return Err(Error::RingMismatch("module ring differs from k[x_1..x_r]".into()));
                        }
                        let data = module_data(module, *rank, degree, p)?;
                        for (t, coords) in data.coords.iter().enumerate() {
                            let rel = &data.relations[t];
                            let pivots = rel.pivots();
                            for (c, (g, m)) in coords.iter().enumerate() {
                                if !pivots.contains(&c) {
                                    basis.push(MbBasis::Mod(*g, m.clone()));
                                    degrees.push(t + 1);
                                }
                            }
                        }
                        Some(data)
                    }
                    _ => None,
                };
                let dim = basis.len();
                let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect();
                let xs: Vec<String> = (0..*rank).map(|k| format!("x{}", k + 1)).collect();
                let labels = basis
                    .iter()
                    .map(|b| match b {
                        MbBasis::Lin(i) => format!("a{}", i + 1),
                        MbBasis::Fit(j, i, m) => {
                            let mp = Poly::monomial(alg.ring(), m.clone(), field.one());
                            if m.degree() == 0 {
                                format!("[a{},a{}]", j + 1, i + 1)
                            } else {
                                format!("[a{},a{}]*{}", j + 1, i + 1, mp.render_with(&xs))
                            }
                        }
                        MbBasis::Mod(g, m) => {
                            let mp = Poly::monomial(alg.ring(), m.clone(), field.one());
                            if m.degree() == 0 {
                                format!("g{}", g + 1)
                            } else {
                                format!("g{}*{}", g + 1, mp.render_with(&xs))
                            }
                        }
                    })
                    .collect();
                Tables {
                    degrees,
                    labels,
                    constants: (0..*rank).map(|i| unit(dim, i)).collect(),
                    generators: (0..*rank).map(|i| unit(dim, i)).collect(),
                    fit: FitInfo::Kernel((0..*rank).collect()),
                    kind: KindData::Metabelian { alg, basis, index, module },
                    spec: spec.clone(),
                    p,
                    table_degree: Some(degree),
                    products: RwLock::new(HashMap::new()),
                }
            }
            CarrierSpec::NonQwComp { pairs } => {
                let n = *pairs;
                let dim = 3 * n;
                let mut labels = Vec::new();
                labels.extend((0..n).map(|i| format!("a{}", i + 1)));
                labels.extend((0..n).map(|i| format!("b{}", i + 1)));
                labels.extend((0..n).map(|i| format!("[a{},b{}]", i + 1, i + 1)));
                let mut degrees = vec![1; 2 * n];
                degrees.extend(vec![2; n]);
                Tables {
                    degrees,
                    labels,
                    constants: Vec::new(),
                    generators: (0..2 * n).map(|i| unit(dim, i)).collect(),
                    fit: FitInfo::Whole,
                    kind: KindData::NonQwComp { pairs: n },
                    spec: spec.clone(),
                    p,
                    table_degree: None,
                    products: RwLock::new(HashMap::new()),
                }
            }
            CarrierSpec::Abelian { dim, constants } => {
                if constants > dim {
                    return Err(Error::InvalidField("more constants than dimensions".into()));
                }
                Tables {
                    degrees: vec![1; *dim],
                    labels: (0..*dim)
                        .map(|i| if i < *constants { format!("c{}", i + 1) } else { format!("e{}", i + 1) })
                        .collect(),
                    constants: (0..*constants).map(|i| unit(*dim, i)).collect(),
                    generators: (0..*dim).map(|i| unit(*dim, i)).collect(),
                    fit: FitInfo::Whole,
                    kind: KindData::Abelian,
                    spec: spec.clone(),
                    p,
                    table_degree: None,
                    products: RwLock::new(HashMap::new()),
                }
            }
        };
        Ok(FiniteAlgebra { t: Arc::new(tables), trunc: None })
    }

    /// Same tables, with products above `d` silently dropped.
    pub fn with_truncation(&self, d: Option<usize>) -> FiniteAlgebra {
        FiniteAlgebra { t: self.t.clone(), trunc: d }
    }

    pub fn spec(&self) -> &CarrierSpec {
        &self.t.spec
    }

    pub fn modulus(&self) -> u64 {
        self.t.p
    }

    pub fn field(&self) -> FieldSpec {
        FieldSpec::Prime(self.t.p)
    }

    pub fn dim(&self) -> usize {
        self.t.degrees.len()
    }

    pub fn table_degree(&self) -> Option<usize> {
        self.t.table_degree
    }

    pub fn basis_degree(&self, i: usize) -> usize {
        self.t.degrees[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.t.labels
    }

    pub fn generators(&self) -> &[FElem] {
        &self.t.generators
    }

    pub fn fit_info(&self) -> &FitInfo {
        &self.t.fit
    }

    pub fn unit(&self, i: usize) -> FElem {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    /// Degree of an element: the largest degree in its support (0 for zero).
    pub fn degree(&self, a: &FElem) -> usize {
        a.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, _)| self.t.degrees[i]).max().unwrap_or(0)
    }

    /// Scales an element by a residue.
    pub fn scale_u(&self, c: u64, a: &FElem) -> FElem {
        let p = self.t.p;
        a.iter().map(|&x| (x as u64 * c % p) as u32).collect()
    }

    pub fn add_scaled(&self, acc: &mut FElem, c: u64, a: &FElem) {
        let p = self.t.p;
        for (x, &y) in acc.iter_mut().zip(a) {
            *x = ((*x as u64 + c * y as u64) % p) as u32;
        }
    }

    fn product(&self, i: u32, j: u32) -> Arc<[(u32, u32)]> {
        if let Some(v) = self.t.products.read().unwrap().get(&(i, j)) {
            return v.clone();
        }
        let v: Arc<[(u32, u32)]> = self.compute_product(i as usize, j as usize).into();
        self.t.products.write().unwrap().insert((i, j), v.clone());
        v
    }

    fn compute_product(&self, i: usize, j: usize) -> Vec<(u32, u32)> {
        let p = self.t.p;
        let red = |n: i64| n.rem_euclid(p as i64) as u32;
        let mut out: Vec<(u32, u32)> = match &self.t.kind {
            KindData::Abelian => Vec::new(),
            KindData::NonQwComp { pairs } => {
                let n = *pairs;
                if i < n && j >= n && j < 2 * n && j - n == i {
                    vec![(2 * n as u32 + i as u32, 1)]
                } else if j < n && i >= n && i < 2 * n && i - n == j {
                    vec![(2 * n as u32 + j as u32, red(-1))]
                } else {
                    Vec::new()
                }
            }
            KindData::Free { words, index } => bracket_words(&words[i], &words[j])
                .iter()
                .map(|(w, c)| (index[w], red(*c)))
                .collect(),
            KindData::Metabelian { alg, basis, index, module } => {
                let field = alg.field();
                let to_elem = |b: &MbBasis| -> Option<MetabelianElement> {
                    match b {
                        MbBasis::Lin(k) => Some(alg.generator(*k)),
                        MbBasis::Fit(a, c, m) => Some(alg.fit_element(*a, *c, &Poly::monomial(alg.ring(), m.clone(), field.one()))),
                        MbBasis::Mod(..) => None,
                    }
                };
                match (&basis[i], &basis[j]) {
                    (MbBasis::Mod(g, m), MbBasis::Lin(k)) => {
                        module_times_var(module.as_ref().unwrap(), index, *g, m, *k, 1, p)
                    }
                    (MbBasis::Lin(k), MbBasis::Mod(g, m)) => {
                        module_times_var(module.as_ref().unwrap(), index, *g, m, *k, p - 1, p)
                    }
                    (MbBasis::Mod(..), _) | (_, MbBasis::Mod(..)) => Vec::new(),
                    (a, b) => {
                        let prod = to_elem(a).unwrap().bracket_unchecked(&to_elem(b).unwrap());
                        let mut out = Vec::new();
                        for (&(jj, ii), poly) in prod.fitting_part() {
                            for (m, c) in poly.terms() {
                                out.push((index[&MbBasis::Fit(jj, ii, m.clone())], c.residue().unwrap() as u32));
                            }
                        }
                        out
                    }
                }
            }
        };
        out.retain(|(_, c)| *c != 0);
        out
    }

    fn overflows(&self, i: usize, j: usize) -> bool {
        match self.t.table_degree {
            Some(d) if !self.t.spec.is_bounded() => self.t.degrees[i] + self.t.degrees[j] > d,
            _ => false,
        }
    }

    /// Exact product; errors when a product leaves the table and no truncation is set.
    pub fn bracket_elems(&self, a: &FElem, b: &FElem) -> Result<FElem> {
        let p = self.t.p;
        let mut acc = vec![0u64; self.dim()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 || i == j {
                    continue;
                }
                let d = self.t.degrees[i] + self.t.degrees[j];
                if let Some(t) = self.trunc {
                    if d > t {
                        continue;
                    }
                }
                if self.overflows(i, j) {
                    return Err(Error::TruncationRequired);
                }
                let xy = x as u64 * y as u64 % p;
                for &(k, c) in self.product(i as u32, j as u32).iter() {
                    acc[k as usize] = (acc[k as usize] + xy * c as u64) % p;
                }
            }
        }
        Ok(acc.into_iter().map(|v| v as u32).collect())
    }

    /// Basis indices of degree ≤ d.
    pub fn window_basis(&self, d: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.t.degrees[i] <= d).collect()
    }

    pub fn window_size(&self, d: usize) -> u128 {
        (self.t.p as u128).saturating_pow(self.window_basis(d).len() as u32)
    }

    /// All elements of degree ≤ d in window order.
    pub fn window_elements(&self, d: usize, budget: u64) -> Result<Vec<FElem>> {
        let basis = self.window_basis(d);
        let size = self.window_size(d);
        if size > budget as u128 {
            return Err(Error::capacity(format!("window of degree {d}"), size, budget as u128));
        }
        let p = self.t.p as u32;
        let mut out = Vec::with_capacity(size as usize);
        let mut cur = vec![0u32; self.dim()];
        loop {
            out.push(cur.clone());
            let mut k = 0;
            loop {
                if k == basis.len() {
                    out.sort_by(|a, b| self.elem_cmp(a, b));
                    return Ok(out);
                }
                let idx = basis[k];
                cur[idx] += 1;
                if cur[idx] == p {
                    cur[idx] = 0;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    /// Window order: by degree, then by the base-p code with the first basis
    /// element least significant.
    pub fn elem_cmp(&self, a: &FElem, b: &FElem) -> Ordering {
        self.degree(a).cmp(&self.degree(b)).then_with(|| a.iter().rev().cmp(b.iter().rev()))
    }

    pub fn point_cmp(&self, a: &[FElem], b: &[FElem]) -> Ordering {
        for (x, y) in a.iter().zip(b) {
            match self.elem_cmp(x, y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    }

    /// Membership in Fit when it has a closed form here.
    pub fn in_fitting(&self, a: &FElem) -> Option<bool> {
        match &self.t.fit {
            FitInfo::Kernel(idx) => Some(idx.iter().all(|&i| a[i] == 0)),
            FitInfo::Whole => Some(true),
            FitInfo::Zero => Some(a.iter().all(|&c| c == 0)),
        }
    }

    /// Linear-part coordinates (empty unless Fit is a kernel).
    pub fn linear_part(&self, a: &FElem) -> Vec<u32> {
        match &self.t.fit {
            FitInfo::Kernel(idx) => idx.iter().map(|&i| a[i]).collect(),
            _ => Vec::new(),
        }
    }

    /// Builds an element from (basis index, residue) pairs.
    pub fn from_coords(&self, coords: &[(usize, u64)]) -> FElem {
        let mut v = vec![0u32; self.dim()];
        for &(i, c) in coords {
            v[i] = ((v[i] as u64 + c) % self.t.p) as u32;
        }
        v
    }

    /// Index of the basis element with this label.
    pub fn basis_index(&self, label: &str) -> Option<usize> {
        self.t.labels.iter().position(|l| l == label)
    }

    /// Coordinates of an exact free Lie element, when the carrier is free of the same rank.
    pub fn from_free(&self, e: &FreeLieElement) -> Result<FElem> {
        let KindData::Free { index, .. } = &self.t.kind else {
            return Err(Error::CarrierMismatch("not a free carrier".into()));
        };
        let mut v = vec![0u32; self.dim()];
        for (w, c) in e.terms() {
            let Some(&i) = index.get(w) else {
                return Err(Error::capacity("element degree", w.len() as u128, self.t.table_degree.unwrap_or(0) as u128));
            };
            v[i as usize] = c.as_base().and_then(BaseElem::residue).ok_or_else(|| {
                Error::FieldMismatch(c.spec().to_string(), self.field().to_string())
            })? as u32;
        }
        Ok(v)
    }

    /// Exact free Lie element with these coordinates.
    pub fn to_free(&self, a: &FElem, alg: &FreeLie) -> Result<FreeLieElement> {
        let KindData::Free { words, .. } = &self.t.kind else {
            return Err(Error::CarrierMismatch("not a free carrier".into()));
        };
        Ok(alg.from_terms(
            a.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (words[i].clone(), alg.field().from_i64(*c as i64))),
        ))
    }
}

fn module_data(m: &ModulePresentation, r: usize, degree: usize, p: u64) -> Result<ModuleData> {
    let field = BaseField::Prime(p);
    let mut coords = Vec::new();
    let mut relations = Vec::new();
    let rel_cols: Vec<Vec<Poly>> = (0..m.relations.cols()).map(|j| m.relations.column(j)).collect();
    let mut rel_degrees = Vec::new();
    for col in &rel_cols {
        let mut degs = col.iter().flat_map(|q| q.terms().map(|(mm, _)| mm.degree())).collect::<Vec<_>>();
        degs.sort();
        degs.dedup();
        if degs.len() > 1 {
            return Err(Error::Unsupported("module windows need homogeneous relations".into()));
        }
        for q in col {
            for (_, c) in q.terms() {
                if c.field() != field {
                    return Err(Error::FieldMismatch(c.field().to_string(), field.to_string()));
                }
            }
        }
        rel_degrees.push(degs.first().copied());
    }
    // Module element g_k·m has degree 1 + deg m.
    for t in 1..=degree {
        let monos = monomials_from(r, 0, (t - 1) as u32);
        let cs: Vec<(usize, Mono)> = (0..m.generators).flat_map(|g| monos.iter().map(move |mm| (g, mm.clone()))).collect();
        let pos: HashMap<(usize, Mono), usize> = cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut ech = Echelon::new(p, cs.len());
        for (col, rd) in rel_cols.iter().zip(&rel_degrees) {
            let Some(rd) = rd else { continue };
            if (*rd as usize) > t - 1 {
                continue;
            }
            for shift in monomials_from(r, 0, (t - 1) as u32 - rd) {
                let mut v = vec![0u64; cs.len()];
                for (g, q) in col.iter().enumerate() {
                    for (mm, c) in q.terms() {
                        let i = pos[&(g, mm.mul(&shift))];
                        v[i] = (v[i] + c.residue().unwrap()) % p;
                    }
                }
                ech.insert(v);
            }
        }
        coords.push(cs);
        relations.push(ech);
    }
    Ok(ModuleData { coords, relations })
}

/// Coordinates of c·(g·m·x_k) reduced modulo the relations.
fn module_times_var(
    data: &ModuleData,
    index: &HashMap<MbBasis, u32>,
    g: usize,
    m: &Mono,
    k: usize,
    c: u64,
    p: u64,
) -> Vec<(u32, u32)> {
    let mm = m.mul(&Mono::var(m.0.len(), k));
    let t = mm.degree() as usize; // module degree of the product is t + 1
    if t >= data.coords.len() {
        return Vec::new();
    }
    let cs = &data.coords[t];
    let mut v = vec![0u64; cs.len()];
    let i = cs.iter().position(|x| x == &(g, mm.clone())).unwrap();
    v[i] = c % p;
    let red = data.relations[t].reduce(v);
    red.iter()
        .enumerate()
        .filter(|(_, x)| **x != 0)
        .map(|(i, x)| {
            let (gg, m2) = &cs[i];
            (index[&MbBasis::Mod(*gg, m2.clone())], *x as u32)
        })
        .collect()
}

impl LieCarrier for FiniteAlgebra {
    type Elem = FElem;
    fn zero(&self) -> FElem {
        vec![0; self.dim()]
    }
    fn add(&self, a: &FElem, b: &FElem) -> FElem {
        let p = self.t.p;
        a.iter().zip(b).map(|(&x, &y)| ((x as u64 + y as u64) % p) as u32).collect()
    }
    fn neg(&self, a: &FElem) -> FElem {
        let p = self.t.p;
        a.iter().map(|&x| ((p - x as u64) % p) as u32).collect()
    }
    fn scale(&self, c: &Scalar, a: &FElem) -> Result<FElem> {
        let b = base_scalar(BaseField::Prime(self.t.p), c)?;
        Ok(self.scale_u(b.residue().unwrap(), a))
    }
    fn bracket(&self, a: &FElem, b: &FElem) -> Result<FElem> {
        self.bracket_elems(a, b)
    }
    fn constant(&self, i: usize) -> Result<FElem> {
        self.t.constants.get(i).cloned().ok_or_else(|| constant_out_of_range(i, self.t.constants.len()))
    }
    fn constant_count(&self) -> usize {
        self.t.constants.len()
    }
    fn is_zero(&self, a: &FElem) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn render(&self, a: &FElem) -> String {
        let parts: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, &c)| if c == 1 { self.t.labels[i].clone() } else { format!("{c}*{}", self.t.labels[i]) })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}
