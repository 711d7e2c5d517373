//! The free metabelian Lie algebra 𝔉_r, its Fitting radical as a module over
//! R = k[x_1..x_r], and direct module extensions 𝔉_r ⊕ M.
//!
//! Fitting elements are stored as sums e_{ji}·m with j > i, where e_{ji} is
//! the bracket a_j∘a_i and the monomial m only involves x_i, ..., x_r.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{BaseElem, BaseField};
use crate::linalg::{module_rank, rank, ModulePresentation};
use crate::poly::{Mono, Poly, PolyRing};

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    rank: usize,
    field: BaseField,
    ring: PolyRing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Metabelian(Arc<Inner>);

impl Metabelian {
    pub fn new(rank: usize, field: BaseField) -> Metabelian {
        let ring = PolyRing::numbered("x", rank, field);
        Metabelian(Arc::new(Inner { rank, field, ring }))
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn field(&self) -> BaseField {
        self.0.field
    }

    /// The ring R acting on the Fitting radical.
    pub fn ring(&self) -> &PolyRing {
        &self.0.ring
    }

    pub fn zero(&self) -> MetabelianElement {
        MetabelianElement { alg: self.clone(), linear: vec![self.field().zero(); self.rank()], fit: BTreeMap::new() }
    }

    pub fn generator(&self, i: usize) -> MetabelianElement {
        let mut e = self.zero();
        e.linear[i] = self.field().one();
        e
    }

    pub fn from_linear(&self, coeffs: &[BaseElem]) -> MetabelianElement {
        assert_eq!(coeffs.len(), self.rank());
        let mut e = self.zero();
        e.linear = coeffs.to_vec();
        e
    }

    /// The Fitting element e_{ji}·f, normalized.
    pub fn fit_element(&self, j: usize, i: usize, f: &Poly) -> MetabelianElement {
        let mut e = self.zero();
        let sign = match j.cmp(&i) {
            std::cmp::Ordering::Equal => return e,
            std::cmp::Ordering::Greater => self.field().one(),
            std::cmp::Ordering::Less => self.field().one().neg(),
        };
        let (j, i) = if j > i { (j, i) } else { (i, j) };
        for (m, c) in f.terms() {
            e.push_fit(j, i, m.clone(), c.mul(&sign));
        }
        e
    }

    /// Basis of the Fitting part in module degree `d`: pairs (j, i) with a
    /// monomial of degree `d` in x_i..x_r, in a fixed order.
    pub fn fit_basis(&self, d: u32) -> Vec<(usize, usize, Mono)> {
        let r = self.rank();
        let mut out = Vec::new();
        for j in 0..r {
            for i in 0..j {
                for m in monomials_from(r, i, d) {
                    out.push((j, i, m));
                }
            }
        }
        out
    }

    pub fn bracket(&self, u: &MetabelianElement, v: &MetabelianElement) -> Result<MetabelianElement> {
        if &u.alg != self || &v.alg != self {
            return Err(Error::AlgebraMismatch("operands from different metabelian algebras".into()));
        }
        Ok(u.bracket_unchecked(v))
    }
}

/// Monomials of degree `d` in r variables using only indices ≥ `from`.
pub fn monomials_from(r: usize, from: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; r];
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(Mono(cur.clone()));
            cur[k] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[k] = e;
            rec(k + 1, left - e, cur, out);
        }
        cur[k] = 0;
    }
    if from >= r {
        if d == 0 {
            out.push(Mono::one(r));
        }
        return out;
    }
    rec(from, d, &mut cur, &mut out);
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MetabelianElement {
    alg: Metabelian,
    linear: Vec<BaseElem>,
    fit: BTreeMap<(usize, usize), Poly>,
}

impl MetabelianElement {
    pub fn algebra(&self) -> &Metabelian {
        &self.alg
    }

    pub fn linear_part(&self) -> &[BaseElem] {
        &self.linear
    }

    /// Fitting part as a map (j, i) ↦ coefficient polynomial, j > i.
    pub fn fitting_part(&self) -> &BTreeMap<(usize, usize), Poly> {
        &self.fit
    }

    pub fn is_zero(&self) -> bool {
        self.fit.is_empty() && self.linear.iter().all(BaseElem::is_zero)
    }

    fn push_fit(&mut self, j: usize, i: usize, m: Mono, c: BaseElem) {
        if c.is_zero() {
            return;
        }
        match m.min_var() {
            Some(l) if l < i => {
                let rest = m.div(&Mono::var(m.0.len(), l)).unwrap();
                let r = m.0.len();
                self.push_raw(i, l, rest.mul(&Mono::var(r, j)), c.neg());
                self.push_raw(j, l, rest.mul(&Mono::var(r, i)), c);
            }
            _ => self.push_raw(j, i, m, c),
        }
    }

    fn push_raw(&mut self, j: usize, i: usize, m: Mono, c: BaseElem) {
        let ring = self.alg.ring().clone();
        let p = self.fit.entry((j, i)).or_insert_with(|| Poly::zero(&ring));
        p.add_term(m, c);
        if p.is_zero() {
            self.fit.remove(&(j, i));
        }
    }

    pub fn add(&self, o: &MetabelianElement) -> MetabelianElement {
        let mut r = self.clone();
        for (a, b) in r.linear.iter_mut().zip(&o.linear) {
            *a = a.add(b);
        }
        for (&(j, i), p) in &o.fit {
            for (m, c) in p.terms() {
                r.push_raw(j, i, m.clone(), c.clone());
            }
        }
        r
    }

    pub fn neg(&self) -> MetabelianElement {
        MetabelianElement {
            alg: self.alg.clone(),
            linear: self.linear.iter().map(BaseElem::neg).collect(),
            fit: self.fit.iter().map(|(k, p)| (*k, p.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &MetabelianElement) -> MetabelianElement {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BaseElem) -> MetabelianElement {
        if c.is_zero() {
            return self.alg.zero();
        }
        MetabelianElement {
            alg: self.alg.clone(),
            linear: self.linear.iter().map(|a| a.mul(c)).collect(),
            fit: self.fit.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    /// λ(v) = Σ v_k x_k, the polynomial by which the linear part acts.
    pub fn lambda(&self) -> Poly {
        let ring = self.alg.ring();
        Poly::from_terms(ring, self.linear.iter().enumerate().map(|(k, c)| (Mono::var(ring.arity(), k), c.clone())))
    }

    /// Fitting part multiplied by a polynomial (the module action).
    pub fn act(&self, f: &Poly) -> MetabelianElement {
        let mut r = self.alg.zero();
        for (&(j, i), p) in &self.fit {
            for (m, c) in p.terms() {
                for (n, d) in f.terms() {
                    r.push_fit(j, i, m.mul(n), c.mul(d));
                }
            }
        }
        r
    }

    pub fn bracket_unchecked(&self, o: &MetabelianElement) -> MetabelianElement {
        let ring = self.alg.ring().clone();
        let mut r = self.alg.zero();
        for (j, a) in self.linear.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (i, b) in o.linear.iter().enumerate() {
                if i == j || b.is_zero() {
                    continue;
                }
                let c = a.mul(b);
                if j > i {
                    r.push_raw(j, i, Mono::one(ring.arity()), c);
                } else {
                    r.push_raw(i, j, Mono::one(ring.arity()), c.neg());
                }
            }
        }
        if !self.fit.is_empty() {
            r = r.add(&self.act(&o.lambda()));
        }
        if !o.fit.is_empty() {
            r = r.sub(&o.act(&self.lambda()));
        }
        r
    }

    pub fn bracket(&self, o: &MetabelianElement) -> Result<MetabelianElement> {
        self.alg.bracket(self, o)
    }

    /// Degree: 1 for a nonzero linear part, 2 + module degree for Fitting terms.
    pub fn degree(&self) -> usize {
        let lin = if self.linear.iter().any(|c| !c.is_zero()) { 1 } else { 0 };
        let fit = self.fit.values().filter_map(|p| p.total_degree()).map(|d| d as usize + 2).max().unwrap_or(0);
        lin.max(fit)
    }

    /// Membership in the Fitting radical, cross-checked against Fit′:
    /// u ∈ Fit iff (u∘a_i)∘u = 0 for every generator a_i.
    pub fn is_in_fitting(&self) -> Result<bool> {
        let by_linear = self.linear.iter().all(BaseElem::is_zero);
        let by_formula = (0..self.alg.rank())
            .all(|i| self.bracket_unchecked(&self.alg.generator(i)).bracket_unchecked(self).is_zero());
        if by_linear != by_formula {
            return Err(Error::InvariantViolation(format!("Fit and Fit′ disagree on {self}")));
        }
        Ok(by_linear)
    }

    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.linear.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(if c.is_one() { names(k) } else { format!("{c}*{}", names(k)) });
        }
        let xs: Vec<String> = (0..self.alg.rank()).map(|k| format!("x{}", k + 1)).collect();
        for (&(j, i), p) in &self.fit {
            let br = format!("[{},{}]", names(j), names(i));
            if p.is_one() {
                parts.push(br);
            } else {
                parts.push(format!("{br}*({})", p.render_with(&xs)));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for MetabelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|k| format!("a{}", k + 1)))
    }
}

impl fmt::Debug for MetabelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Linear independence modulo Fit: the finite conjunction over all nonzero
/// coefficient tuples, checked against the rank of the linear parts.
pub fn phi_independent(elems: &[MetabelianElement]) -> Result<bool> {
    let Some(first) = elems.first() else {
        return Ok(true);
    };
    let field = first.alg.field();
    let Some(values) = field.elements() else {
        return Err(Error::InfiniteFieldUnsupported(field.to_string()));
    };
    let p = field.order().unwrap();
    let n = elems.len();
    let total = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > 10_000_000 {
        return Err(Error::capacity("coefficient tuples", total, 10_000_000));
    }
    let mut formula = true;
    let mut digits = vec![0usize; n];
    'outer: loop {
        let mut k = 0;
        loop {
            if k == n {
                break 'outer;
            }
            digits[k] += 1;
            if digits[k] == values.len() {
                digits[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
        let mut comb = first.alg.zero();
        for (e, &d) in elems.iter().zip(&digits) {
            comb = comb.add(&e.scale(&values[d]));
        }
        if comb.is_in_fitting()? {
            formula = false;
            break;
        }
    }
    let fp = crate::linalg::Fp(p);
    let rows: Vec<Vec<u64>> =
        elems.iter().map(|e| e.linear.iter().map(|c| c.residue().unwrap()).collect()).collect();
    let by_rank = rank(&fp, &rows) == n;
    if formula != by_rank {
        return Err(Error::InvariantViolation("φ formula and linear-part rank disagree".into()));
    }
    Ok(formula)
}

/// Default search degree for the torsion check.
pub const TORSION_SEARCH_DEGREE: u32 = 4;

/// 𝔉_r ⊕ M for a finitely presented module M over R.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    base: Metabelian,
    module: ModulePresentation,
    module_rank: usize,
}

impl Extension {
    pub fn module(&self) -> &ModulePresentation {
        &self.module
    }

    pub fn base(&self) -> &Metabelian {
        &self.base
    }

    pub fn module_rank(&self) -> usize {
        self.module_rank
    }

    pub fn generators(&self) -> usize {
        self.module.generators
    }

    pub fn zero(&self) -> ExtensionElement {
        ExtensionElement {
            base: self.base.zero(),
            ext: vec![Poly::zero(self.base.ring()); self.module.generators],
        }
    }

    pub fn lift(&self, u: &MetabelianElement) -> ExtensionElement {
        let mut z = self.zero();
        z.base = u.clone();
        z
    }

    /// The k-th module generator g_k.
    pub fn module_generator(&self, k: usize) -> ExtensionElement {
        let mut z = self.zero();
        z.ext[k] = Poly::one(self.base.ring());
        z
    }

    pub fn bracket(&self, u: &ExtensionElement, v: &ExtensionElement) -> ExtensionElement {
        let (lu, lv) = (u.base.lambda(), v.base.lambda());
        ExtensionElement {
            base: u.base.bracket_unchecked(&v.base),
            ext: u.ext.iter().zip(&v.ext).map(|(m, n)| m.mul(&lv).sub(&n.mul(&lu))).collect(),
        }
    }
}

/// Element (u, m) with u ∈ 𝔉_r and m a coordinate vector over the module generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionElement {
    pub base: MetabelianElement,
    pub ext: Vec<Poly>,
}

impl ExtensionElement {
    pub fn add(&self, o: &ExtensionElement) -> ExtensionElement {
        ExtensionElement { base: self.base.add(&o.base), ext: self.ext.iter().zip(&o.ext).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn neg(&self) -> ExtensionElement {
        ExtensionElement { base: self.base.neg(), ext: self.ext.iter().map(Poly::neg).collect() }
    }

    pub fn scale(&self, c: &BaseElem) -> ExtensionElement {
        ExtensionElement { base: self.base.scale(c), ext: self.ext.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.ext.iter().all(Poly::is_zero)
    }

    /// Fit(𝔉_r ⊕ M) = Fit(𝔉_r) ⊕ M.
    pub fn is_in_fitting(&self) -> Result<bool> {
        self.base.is_in_fitting()
    }
}

/// Builds 𝔉_r ⊕ M after a bounded torsion search on M.
pub fn build_extension(r: usize, field: BaseField, m: ModulePresentation) -> Result<Extension> {
    let base = Metabelian::new(r, field);
    if m.ring != *base.ring() {
        return Err(Error::RingMismatch(format!("module over {} but 𝔉_{r} acts through {}", m.ring, base.ring())));
    }
    if let Some(g) = find_torsion(&m, TORSION_SEARCH_DEGREE)? {
        return Err(Error::TorsionDetected(format!("generator g{} is annihilated", g + 1)));
    }
    let module_rank = module_rank(&m)?;
    Ok(Extension { base, module: m, module_rank })
}

/// Looks for a nonzero polynomial f of degree ≤ `deg` and a generator g_k
/// with f·g_k in the relation submodule while g_k itself is not.
pub fn find_torsion(m: &ModulePresentation, deg: u32) -> Result<Option<usize>> {
    let ring = &m.ring;
    let field = ring.base();
    if field.order().is_none() && field != BaseField::Rationals {
        return Err(Error::Unsupported("torsion search field".into()));
    }
    let rels = m.relations.cols();
    if rels == 0 {
        return Ok(None);
    }
    let n = ring.arity();
    let rel_deg = (0..rels)
        .flat_map(|j| m.relations.column(j))
        .filter_map(|p| p.total_degree())
        .max()
        .unwrap_or(0);
    let multipliers: Vec<Mono> = (0..=deg).flat_map(|d| monomials_from(n, 0, d)).collect();
    for k in 0..m.generators {
        // Unknowns: f (coefficients on multipliers) and c_j (polynomial
        // combination coefficients on relation columns, degree ≤ deg + rel_deg).
        let mut unknown_terms: Vec<Vec<(usize, Mono, BaseElem)>> = Vec::new();
        for mono in &multipliers {
            unknown_terms.push(vec![(k, mono.clone(), field.one())]);
        }
        let f_count = unknown_terms.len();
        let comb: Vec<Mono> = (0..=deg + rel_deg).flat_map(|d| monomials_from(n, 0, d)).collect();
        for j in 0..rels {
            let col = m.relations.column(j);
            for mono in &comb {
                let mut ts = Vec::new();
                for (g, p) in col.iter().enumerate() {
                    for (pm, pc) in p.terms() {
                        ts.push((g, pm.mul(mono), pc.neg()));
                    }
                }
                unknown_terms.push(ts);
            }
        }
        // Equations: every (generator, monomial) coordinate of f·g_k − Σ c·rel vanishes.
        let mut index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
        for ts in &unknown_terms {
            for (g, mono, _) in ts {
                let len = index.len();
                index.entry((*g, mono.clone())).or_insert(len);
            }
        }
        let spec = field_spec(field);
        let mut rows = vec![vec![spec.zero(); unknown_terms.len()]; index.len()];
        for (u, ts) in unknown_terms.iter().enumerate() {
            for (g, mono, c) in ts {
                let row = index[&(*g, mono.clone())];
                rows[row][u] = rows[row][u].add(&spec.from_base(c.clone()));
            }
        }
        let null = crate::linalg::nullspace(&spec, &rows, unknown_terms.len());
        if null.iter().any(|v| v[..f_count].iter().any(|c| !c.is_zero())) {
            // The generator itself must not lie in the submodule.
            let target: Vec<_> = index.keys().map(|(g, mono)| {
                if *g == k && mono.degree() == 0 { spec.one() } else { spec.zero() }
            }).collect();
            let cols: Vec<Vec<_>> = (f_count..unknown_terms.len())
                .map(|u| (0..index.len()).map(|r| rows[r][u].neg()).collect())
                .collect();
            if crate::linalg::solve_combination(&spec, &cols, &target).is_none() {
                return Ok(Some(k));
            }
        }
    }
    Ok(None)
}

fn field_spec(b: BaseField) -> crate::field::FieldSpec {
    match b {
        BaseField::Rationals => crate::field::FieldSpec::Rationals,
        BaseField::Prime(p) => crate::field::FieldSpec::Prime(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Magnus-type embedding: a_i ↦ e_i in R^r and [a_j, a_i] ↦ x_i e_j − x_j e_i.
    /// The bracket of images is W_u·λ(v) − W_v·λ(u), and Fit(𝔉_r) maps injectively.
    fn magnus(u: &MetabelianElement) -> Vec<Poly> {
        let alg = u.algebra();
        let ring = alg.ring();
        let mut vec: Vec<Poly> = u.linear_part().iter().map(|c| Poly::constant(ring, c.clone())).collect();
        for (&(j, i), p) in u.fitting_part() {
            vec[j] = vec[j].add(&p.mul(&Poly::var(ring, i)));
            vec[i] = vec[i].sub(&p.mul(&Poly::var(ring, j)));
        }
        vec
    }

    fn gf(p: u64) -> BaseField {
        BaseField::Prime(p)
    }

    #[test]
    fn small_brackets() {
        let f = Metabelian::new(2, gf(3));
        let (a1, a2) = (f.generator(0), f.generator(1));
        assert!(a1.bracket(&a1).unwrap().is_zero());
        let e = a2.bracket(&a1).unwrap();
        let expect = f.fit_element(1, 0, &Poly::var(f.ring(), 0));
        assert_eq!(e.bracket(&a1).unwrap(), expect);
        assert_eq!(e.to_string(), "[a2,a1]");
    }

    #[test]
    fn jacobi_on_generators() {
        let f = Metabelian::new(3, BaseField::Rationals);
        let (a, b, c) = (f.generator(0), f.generator(1), f.generator(2));
        let j = a.bracket(&b.bracket(&c).unwrap()).unwrap()
            .add(&b.bracket(&c.bracket(&a).unwrap()).unwrap())
            .add(&c.bracket(&a.bracket(&b).unwrap()).unwrap());
        assert!(j.is_zero());
    }

    #[test]
    fn normal_form_basis_dimensions() {
        // dim of degree n ≥ 2 in 𝔉_r is (n−1)·C(r+n−2, n)
        fn binom(n: u64, k: u64) -> u64 {
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        for r in 2..=4u64 {
            let f = Metabelian::new(r as usize, gf(2));
            for n in 2..=6u64 {
                assert_eq!(f.fit_basis((n - 2) as u32).len() as u64, (n - 1) * binom(r + n - 2, n), "r={r} n={n}");
            }
        }
    }

    #[test]
    fn fitting_examples() {
        let f = Metabelian::new(2, gf(2));
        let (a1, a2) = (f.generator(0), f.generator(1));
        let e = a2.bracket(&a1).unwrap();
        assert!(!a1.is_in_fitting().unwrap());
        assert!(e.is_in_fitting().unwrap());
        assert!(!a1.add(&e).is_in_fitting().unwrap());
    }

    #[test]
    fn phi_examples() {
        let f = Metabelian::new(2, gf(2));
        let (a1, a2) = (f.generator(0), f.generator(1));
        let e = a2.bracket(&a1).unwrap();
        assert!(phi_independent(&[a1.clone(), a2.clone()]).unwrap());
        assert!(!phi_independent(&[a1.clone(), a1.clone()]).unwrap());
        assert!(phi_independent(&[a1.add(&e), a2]).unwrap());
        let q = Metabelian::new(2, BaseField::Rationals);
        assert!(matches!(phi_independent(&[q.generator(0)]), Err(Error::InfiniteFieldUnsupported(_))));
    }

    #[test]
    fn extension_examples() {
        let base = Metabelian::new(2, gf(3));
        let ring = base.ring().clone();
        let free = build_extension(2, gf(3), ModulePresentation::free(&ring, 1)).unwrap();
        assert_eq!(free.module_rank(), 1);
        let g = free.module_generator(0);
        let a1 = free.lift(&base.generator(0));
        // [g, a_1] = g·x_1 and module elements commute
        let ga = free.bracket(&g, &a1);
        assert_eq!(ga.ext[0], Poly::var(&ring, 0));
        assert!(free.bracket(&g, &ga).is_zero());
        let fit = free.lift(&base.generator(1).bracket(&base.generator(0)).unwrap());
        assert!(free.bracket(&g, &fit).is_zero());
        assert!(g.is_in_fitting().unwrap());

        let zero = build_extension(2, gf(3), ModulePresentation::free(&ring, 0)).unwrap();
        assert_eq!(zero.zero().base, base.zero());

        let ideal = ModulePresentation::parse(&ring, 2, &[vec!["x2", "-x1"]]).unwrap();
        assert_eq!(build_extension(2, gf(3), ideal).unwrap().module_rank(), 1);

        let torsion = ModulePresentation::parse(&ring, 1, &[vec!["x1"]]).unwrap();
        assert!(matches!(build_extension(2, gf(3), torsion), Err(Error::TorsionDetected(_))));
    }

    fn element(f: &Metabelian, lin: &[i64], fit: &[(usize, usize, u32, u32, i64)]) -> MetabelianElement {
        let field = f.field();
        let mut e = f.from_linear(&lin.iter().map(|&c| field.from_i64(c)).collect::<Vec<_>>());
        for &(j, i, e1, e2, c) in fit {
            let m = Poly::monomial(f.ring(), Mono(vec![e1, e2, 0][..f.rank()].to_vec()), field.from_i64(c));
            e = e.add(&f.fit_element(j, i, &m));
        }
        e
    }

    fn arb_element() -> impl Strategy<Value = (Vec<i64>, Vec<(usize, usize, u32, u32, i64)>)> {
        (
            proptest::collection::vec(-2i64..=2, 3),
            proptest::collection::vec((0usize..3, 0usize..3, 0u32..3, 0u32..3, -2i64..=2), 0..3),
        )
    }

    proptest! {
        #[test]
        fn magnus_embedding_is_a_homomorphism(a in arb_element(), b in arb_element()) {
            let f = Metabelian::new(3, BaseField::Rationals);
            let u = element(&f, &a.0, &a.1);
            let v = element(&f, &b.0, &b.1);
            let w = u.bracket(&v).unwrap();
            let (mu, mv) = (magnus(&u), magnus(&v));
            let (lu, lv) = (u.lambda(), v.lambda());
            let expect: Vec<Poly> = mu.iter().zip(&mv).map(|(x, y)| x.mul(&lv).sub(&y.mul(&lu))).collect();
            prop_assert_eq!(magnus(&w), expect);
            let s = magnus(&w).iter().enumerate().fold(Poly::zero(f.ring()), |acc, (k, p)| acc.add(&p.mul(&Poly::var(f.ring(), k))));
            prop_assert!(s.is_zero());
        }

        #[test]
        fn metabelian_identity_and_jacobi(a in arb_element(), b in arb_element(), c in arb_element(), d in arb_element()) {
            let f = Metabelian::new(3, gf(5));
            let (u, v, w, z) = (element(&f, &a.0, &a.1), element(&f, &b.0, &b.1), element(&f, &c.0, &c.1), element(&f, &d.0, &d.1));
            prop_assert!(u.bracket(&v).unwrap().bracket(&w.bracket(&z).unwrap()).unwrap().is_zero());
            let j = u.bracket(&v.bracket(&w).unwrap()).unwrap()
                .add(&v.bracket(&w.bracket(&u).unwrap()).unwrap())
                .add(&w.bracket(&u.bracket(&v).unwrap()).unwrap());
            prop_assert!(j.is_zero());
            prop_assert_eq!(u.bracket(&v).unwrap(), v.bracket(&u).unwrap().neg());
            prop_assert_eq!(u.is_in_fitting().unwrap(), u.linear_part().iter().all(|c| c.is_zero()));
        }
    }
}
