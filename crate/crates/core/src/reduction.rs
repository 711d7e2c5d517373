//! Bounded geometry over a free Lie algebra reduced to diophantine geometry
//! over the ground field: parallelepipedons, the s_m equations, the maps
//! f ↦ S_f and g ↦ f_g, and the one-variable classifier.

use std::collections::HashMap;
use std::fmt;

use crate::carrier::{CarrierSpec, FElem, FreeCarrier, LieCarrier};
use crate::error::{Error, Result};
use crate::field::{BaseElem, BaseField, FieldSpec, Scalar};
use crate::freelie::{span_rank, subspace_membership, BracketTree, FreeLie, FreeLieElement, Membership};
use crate::geometry::{solve, Setting};
use crate::linalg::Echelon;
use crate::poly::{Poly, PolyRing};
use crate::terms::{evaluate, parse_term, AlgebraKind, CoeffAlgebra, Document, EquationSystem, LieTerm};

/// The Lie term of an element, one bracketed Lyndon word per term.
pub fn element_term(e: &FreeLieElement) -> LieTerm {
    fn tree(t: &BracketTree) -> LieTerm {
        match t {
            BracketTree::Letter(l) => LieTerm::Const(*l as usize),
            BracketTree::Node(a, b) => LieTerm::bracket(tree(a), tree(b)),
        }
    }
    let mut items: Vec<LieTerm> = e
        .terms()
        .map(|(w, c)| {
            let t = tree(&BracketTree::of(w.letters()));
            if c.is_one() {
                t
            } else {
                LieTerm::scaled(c.clone(), t)
            }
        })
        .collect();
    match items.len() {
        0 => LieTerm::Zero,
        1 => items.pop().unwrap(),
        _ => LieTerm::Sum(items),
    }
}

/// s_m(x; v_1, …, v_m) without checks; s_0(x) = x.
fn s_rec(x: LieTerm, vs: &[LieTerm]) -> LieTerm {
    match vs.split_last() {
        None => x,
        Some((last, init)) => LieTerm::bracket(s_rec(x, init), s_rec(last.clone(), init)),
    }
}

fn s_elem(x: &FreeLieElement, vs: &[FreeLieElement]) -> FreeLieElement {
    match vs.split_last() {
        None => x.clone(),
        Some((last, init)) => s_elem(x, init).bracket_unchecked(&s_elem(last, init), None),
    }
}

fn check_basis(basis: &[FreeLieElement]) -> Result<()> {
    if span_rank(basis) != basis.len() || basis.iter().any(FreeLieElement::is_zero) {
        return Err(Error::DependentBasis);
    }
    Ok(())
}

/// The recursive term s_m(x) = s_{m-1}(x) ∘ s_{m-1}(v_m).
pub fn s_m(basis: &[FreeLieElement], x: &LieTerm) -> Result<LieTerm> {
    if basis.is_empty() {
        return Err(Error::Unsupported("s_m needs at least one basis vector".into()));
    }
    check_basis(basis)?;
    let vs: Vec<LieTerm> = basis.iter().map(element_term).collect();
    Ok(s_rec(x.clone(), &vs))
}

/// s_m(x − c); with an empty basis this is x − c.
pub fn s_m_affine(basis: &[FreeLieElement], shift: &FreeLieElement, x: &LieTerm) -> Result<LieTerm> {
    check_basis(basis)?;
    let field = shift.algebra().field().clone();
    let y = if shift.is_zero() { x.clone() } else { LieTerm::minus(&field, x.clone(), element_term(shift)) };
    let vs: Vec<LieTerm> = basis.iter().map(element_term).collect();
    Ok(s_rec(y, &vs))
}

/// V_i + c_i: a basis of V_i and a shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub basis: Vec<FreeLieElement>,
    pub shift: FreeLieElement,
}

/// (V_1 + c_1) × ⋯ × (V_n + c_n) ⊂ Fⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parallelepipedon {
    algebra: CoeffAlgebra,
    variables: Vec<String>,
    ambient: FreeLie,
    factors: Vec<Factor>,
}

impl Parallelepipedon {
    pub fn new(algebra: CoeffAlgebra, variables: Vec<String>, factors: Vec<Factor>) -> Result<Parallelepipedon> {
        if algebra.kind != AlgebraKind::Free || algebra.rank == 0 {
            return Err(Error::UnsupportedCoefficientAlgebra(format!("parallelepipedons live in a free Lie algebra, not {algebra}")));
        }
        if let FieldSpec::RationalFunctions { .. } = algebra.field {
            return Err(Error::UnsupportedCoefficientAlgebra("parallelepipedons need k = GF(p) or Q".into()));
        }
        if variables.len() != factors.len() {
            return Err(Error::CarrierMismatch(format!("{} variables but {} factors", variables.len(), factors.len())));
        }
        let ambient = FreeLie::new(algebra.rank, algebra.field.clone());
        for f in &factors {
            if f.basis.iter().chain([&f.shift]).any(|e| e.algebra() != &ambient) {
                return Err(Error::AlgebraMismatch("factor element outside the ambient free Lie algebra".into()));
            }
            check_basis(&f.basis)?;
        }
        Ok(Parallelepipedon { algebra, variables, ambient, factors })
    }

    /// Reads `polytope factor basis=.. shift=..` lines; names resolve through `let`.
    pub fn from_document(doc: &Document) -> Result<Parallelepipedon> {
        let sys = &doc.system;
        let ambient = FreeLie::new(sys.algebra.rank, sys.algebra.field.clone());
        let carrier = FreeCarrier { alg: ambient.clone(), constants: sys.algebra.rank, trunc: None };
        let resolve = |name: &str, line: usize| -> Result<FreeLieElement> {
            let t = match doc.lookup_let(name) {
                Some(t) => t.clone(),
                None => parse_term(sys, name)?,
            };
            if !t.variables().is_empty() {
                return Err(Error::SyntaxError { line, col: 1, expected: format!("a constant element for `{name}`") });
            }
            evaluate(&t, &[], &carrier)
        };
        let mut factors = Vec::new();
        for d in &doc.polytope {
            let basis = d.basis.iter().map(|n| resolve(n, d.line)).collect::<Result<Vec<_>>>()?;
            let shift = match &d.shift {
                Some(n) => resolve(n, d.line)?,
                None => ambient.zero(),
            };
            factors.push(Factor { basis, shift });
        }
        Parallelepipedon::new(sys.algebra.clone(), sys.variables.clone(), factors)
    }

    pub fn algebra(&self) -> &CoeffAlgebra {
        &self.algebra
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn ambient(&self) -> &FreeLie {
        &self.ambient
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.basis.len()).collect()
    }

    /// M = m_1 + ⋯ + m_n.
    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.basis.len()).sum()
    }

    fn base(&self) -> BaseField {
        self.algebra.field.base()
    }

    /// k[y_1, …, y_M], blocks in factor order.
    pub fn poly_ring(&self) -> PolyRing {
        PolyRing::numbered("y", self.total_dim(), self.base())
    }

    /// (factor, index in factor) of each k-variable.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        self.factors.iter().enumerate().flat_map(|(j, f)| (0..f.basis.len()).map(move |i| (j, i))).collect()
    }

    /// The point Σ α_t v_t + c of 𝕍.
    pub fn point(&self, alphas: &[BaseElem]) -> Result<Vec<FreeLieElement>> {
        if alphas.len() != self.total_dim() {
            return Err(Error::CarrierMismatch(format!("{} coordinates for M = {}", alphas.len(), self.total_dim())));
        }
        let field = &self.algebra.field;
        let mut t = 0;
        Ok(self
            .factors
            .iter()
            .map(|f| {
                let mut e = f.shift.clone();
                for v in &f.basis {
                    e = e.add(&v.scale(&field.from_base(alphas[t].clone())));
                    t += 1;
                }
                e
            })
            .collect())
    }

    /// Coordinates of a point of 𝕍.
    pub fn coordinates(&self, point: &[FreeLieElement]) -> Result<Vec<BaseElem>> {
        if point.len() != self.arity() {
            return Err(Error::PointOutsidePolytope(format!("{} components for {} factors", point.len(), self.arity())));
        }
        let mut out = Vec::new();
        for (j, (x, f)) in point.iter().zip(&self.factors).enumerate() {
            let d = x.sub(&f.shift);
            if f.basis.is_empty() {
                if !d.is_zero() {
                    return Err(Error::PointOutsidePolytope(format!("component {} is not the point {}", j + 1, f.shift)));
                }
                continue;
            }
            match subspace_membership(&d, &f.basis)? {
                Membership::Coordinates(cs) => {
                    out.extend(cs.into_iter().map(|c| c.as_base().cloned().expect("base field coordinates")))
                }
                Membership::NotInSpan => {
                    return Err(Error::PointOutsidePolytope(format!(
                        "component {} = {} is not in V_{} + c_{}",
                        j + 1,
                        render(x),
                        j + 1,
                        j + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    /// All of k^M in odometer order (finite k only).
    pub fn tuples(&self, budget: u64) -> Result<Vec<Vec<BaseElem>>> {
        let elems = self.base().elements().ok_or_else(|| Error::InfiniteFieldUnsupported(self.algebra.field.to_string()))?;
        let m = self.total_dim();
        let count = (elems.len() as u128).saturating_pow(m as u32);
        if count > budget as u128 {
            return Err(Error::capacity("points of the parallelepipedon", count, budget as u128));
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut idx = vec![0usize; m];
        loop {
            out.push(idx.iter().map(|&i| elems[i].clone()).collect());
            let mut k = m;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < elems.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Every point of 𝕍 with its coordinates.
    pub fn points(&self, budget: u64) -> Result<Vec<(Vec<BaseElem>, Vec<FreeLieElement>)>> {
        self.tuples(budget)?.into_iter().map(|a| Ok((a.clone(), self.point(&a)?))).collect()
    }

    /// s_{m_j}(x_j − c_j) = 0 for each factor; V of this system is 𝕍.
    pub fn defining_equations(&self) -> Result<Vec<LieTerm>> {
        self.factors.iter().enumerate().map(|(j, f)| s_m_affine(&f.basis, &f.shift, &LieTerm::Var(j))).collect()
    }

    pub fn defining_system(&self) -> Result<EquationSystem> {
        Ok(EquationSystem::new(self.algebra.clone(), self.variables.clone(), self.defining_equations()?))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (j, f) in self.factors.iter().enumerate() {
            let basis: Vec<String> = f.basis.iter().map(render).collect();
            s.push_str(&format!("factor {}: lin{{{}}} + {}\n", self.variables[j], basis.join(", "), render(&f.shift)));
        }
        s
    }
}

pub fn render(e: &FreeLieElement) -> String {
    if e.is_zero() {
        "0".into()
    } else {
        e.render(&|l| format!("a{}", l + 1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceReport {
    /// The affine span c + lin{v_i}, sorted.
    pub expected: Vec<FElem>,
    /// V(s_m(x − c)) in the window, sorted.
    pub found: Vec<FElem>,
    pub missing: Vec<FElem>,
    pub extra: Vec<FElem>,
}

impl SubspaceReport {
    pub fn equal(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Compares the zero set of s_m(x − c) in a free window with the affine span.
pub fn subspace_as_algebraic_set(basis: &[FreeLieElement], shift: &FreeLieElement, setting: &Setting) -> Result<SubspaceReport> {
    let alg = setting.algebra();
    if alg.kind != AlgebraKind::Free {
        return Err(Error::UnsupportedCoefficientAlgebra(format!("subspaces of a free Lie algebra, not {alg}")));
    }
    let c = setting.carrier();
    let term = s_m_affine(basis, shift, &LieTerm::Var(0))?;
    let sys = EquationSystem::new(alg.clone(), vec!["x".into()], vec![term]);
    let pp = Parallelepipedon::new(alg.clone(), vec!["x".into()], vec![Factor { basis: basis.to_vec(), shift: shift.clone() }])?;
    let mut expected = Vec::new();
    for (_, p) in pp.points(setting.budget())? {
        if p[0].degree() > setting.window() {
            return Err(Error::WindowTooSmall(format!("{} has degree above {}", render(&p[0]), setting.window())));
        }
        expected.push(c.from_free(&p[0])?);
    }
    expected.sort_by(|a, b| c.elem_cmp(a, b));
    let found: Vec<FElem> = solve(&sys, setting)?.points.into_iter().map(|mut p| p.pop().unwrap()).collect();
    let missing = expected.iter().filter(|e| !found.contains(e)).cloned().collect();
    let extra = found.iter().filter(|e| !expected.contains(e)).cloned().collect();
    Ok(SubspaceReport { expected, found, missing, extra })
}

/// Evaluation at a fixed point, remembering bracket subterms.
pub struct CachedEvaluator<'a, C: LieCarrier> {
    carrier: &'a C,
    point: Vec<C::Elem>,
    cache: HashMap<LieTerm, C::Elem>,
}

impl<'a, C: LieCarrier> CachedEvaluator<'a, C> {
    pub fn new(carrier: &'a C, point: Vec<C::Elem>) -> Self {
        CachedEvaluator { carrier, point, cache: HashMap::new() }
    }

    pub fn eval(&mut self, t: &LieTerm) -> Result<C::Elem> {
        let c = self.carrier;
        match t {
            LieTerm::Var(i) => self
                .point
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::CarrierMismatch(format!("variable {} has no value", i + 1))),
            LieTerm::Const(i) => c.constant(*i),
            LieTerm::Zero => Ok(c.zero()),
            LieTerm::Sum(items) => {
                let mut acc = c.zero();
                for s in items {
                    acc = c.add(&acc, &self.eval(s)?);
                }
                Ok(acc)
            }
            LieTerm::ScalarMul(k, s) => {
                let v = self.eval(s)?;
                c.scale(k, &v)
            }
            LieTerm::Bracket(a, b) => {
                if let Some(v) = self.cache.get(t) {
                    return Ok(v.clone());
                }
                let x = self.eval(a)?;
                let v = if c.is_zero(&x) { c.zero() } else { c.bracket(&x, &self.eval(b)?)? };
                self.cache.insert(t.clone(), v.clone());
                Ok(v)
            }
        }
    }
}

/// The free carrier over k(y_1, …, y_M), lifting k-scalars on the fly.
struct GenericCarrier {
    inner: FreeCarrier,
    field: FieldSpec,
}

impl GenericCarrier {
    fn lift(&self, e: &FreeLieElement) -> FreeLieElement {
        self.inner.alg.from_terms(e.terms().map(|(w, c)| (w.clone(), self.lift_scalar(c))))
    }

    fn lift_scalar(&self, c: &Scalar) -> Scalar {
        match c {
            Scalar::Base(b) => self.field.from_base(b.clone()),
            r => r.clone(),
        }
    }
}

impl LieCarrier for GenericCarrier {
    type Elem = FreeLieElement;
    fn zero(&self) -> FreeLieElement {
        self.inner.zero()
    }
    fn add(&self, a: &FreeLieElement, b: &FreeLieElement) -> FreeLieElement {
        self.inner.add(a, b)
    }
    fn neg(&self, a: &FreeLieElement) -> FreeLieElement {
        self.inner.neg(a)
    }
    fn scale(&self, c: &Scalar, a: &FreeLieElement) -> Result<FreeLieElement> {
        self.inner.scale(&self.lift_scalar(c), a)
    }
    fn bracket(&self, a: &FreeLieElement, b: &FreeLieElement) -> Result<FreeLieElement> {
        self.inner.bracket(a, b)
    }
    fn constant(&self, i: usize) -> Result<FreeLieElement> {
        self.inner.constant(i)
    }
    fn constant_count(&self) -> usize {
        self.inner.constant_count()
    }
    fn is_zero(&self, a: &FreeLieElement) -> bool {
        a.is_zero()
    }
    fn render(&self, a: &FreeLieElement) -> String {
        self.inner.render(a)
    }
}

/// S_f: the coefficients g_1, …, g_s of f(p) at the generic point
/// p = Σ y_t v_t + c, one per Lyndon word u_s.
pub fn lie_to_poly(f: &LieTerm, pp: &Parallelepipedon) -> Result<Vec<Poly>> {
    if let Some(&j) = f.variables().iter().find(|&&j| j >= pp.arity()) {
        return Err(Error::CarrierMismatch(format!("variable {} has no factor", j + 1)));
    }
    let ring = pp.poly_ring();
    let m = pp.total_dim();
    let names: Vec<String> = ring.vars().to_vec();
    let field = if m == 0 {
        pp.algebra.field.clone()
    } else {
        FieldSpec::RationalFunctions { base: pp.base(), vars: names.clone() }
    };
    let alg = FreeLie::new(pp.algebra.rank, field.clone());
    let gc = GenericCarrier { inner: FreeCarrier { alg: alg.clone(), constants: pp.algebra.rank, trunc: None }, field: field.clone() };
    let mut t = 0;
    let mut point = Vec::new();
    for f in &pp.factors {
        let mut e = gc.lift(&f.shift);
        for v in &f.basis {
            let y = field.variable(&names[t]).expect("generic coordinate");
            e = e.add(&gc.lift(v).scale(&y));
            t += 1;
        }
        point.push(e);
    }
    let value = CachedEvaluator::new(&gc, point).eval(f)?;
    let mut out = Vec::new();
    for (_, c) in value.terms() {
        let g = match c {
            Scalar::Base(b) => Poly::constant(&ring, b.clone()),
            Scalar::Rat(r) => {
                let p = r.as_poly().ok_or_else(|| Error::InvariantViolation(format!("coefficient {r} is not a polynomial")))?;
                Poly::from_terms(&ring, p.terms().map(|(m, c)| (m.clone(), c.clone())))
            }
        };
        if !g.is_zero() {
            out.push(g);
        }
    }
    Ok(out)
}

/// f_g with the data that makes f_g(p) = g(α)·(anchor product).
#[derive(Clone, Debug)]
pub struct LiftedPoly {
    pub term: LieTerm,
    /// b_t = s_{m-1}(v_t; basis without v_t), per k-variable.
    pub b: Vec<FreeLieElement>,
    pub anchor: FreeLieElement,
    /// a ∘ b_1^{M_1} ∘ ⋯ ∘ b_M^{M_M}, left-normed.
    pub anchor_product: FreeLieElement,
    pub max_exponents: Vec<u32>,
}

/// f_t(x) and b_t for every k-variable t.
fn f_table(pp: &Parallelepipedon) -> Result<(Vec<LieTerm>, Vec<FreeLieElement>)> {
    let mut fs = Vec::new();
    let mut bs = Vec::new();
    let field = &pp.algebra.field;
    for (j, f) in pp.factors.iter().enumerate() {
        let x = if f.shift.is_zero() {
            LieTerm::Var(j)
        } else {
            LieTerm::minus(field, LieTerm::Var(j), element_term(&f.shift))
        };
        for i in 0..f.basis.len() {
            let others: Vec<FreeLieElement> =
                f.basis.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| v.clone()).collect();
            let terms: Vec<LieTerm> = others.iter().map(element_term).collect();
            fs.push(s_rec(x.clone(), &terms));
            let b = s_elem(&f.basis[i], &others);
            if b.is_zero() {
                return Err(Error::DependentBasis);
            }
            bs.push(b);
        }
    }
    Ok((fs, bs))
}

fn left_normed_elem(items: impl IntoIterator<Item = FreeLieElement>) -> Option<FreeLieElement> {
    let mut it = items.into_iter();
    let mut acc = it.next()?;
    for x in it {
        if acc.is_zero() {
            break;
        }
        acc = acc.bracket_unchecked(&x, None);
    }
    Some(acc)
}

/// Least anchor a (by degree, then word) with a nonzero anchored product.
fn choose_anchor(pp: &Parallelepipedon, bs: &[FreeLieElement], exps: &[u32], cap: Option<usize>) -> Result<(FreeLieElement, FreeLieElement)> {
    let r = pp.algebra.rank;
    let start = 1 + bs.iter().map(FreeLieElement::degree).max().unwrap_or(0);
    let cap = cap.unwrap_or(start + 2).max(start);
    for d in start..=cap {
        let mut word = vec![0usize; d];
        loop {
            let a = pp.ambient.left_normed(&word);
            if !a.is_zero() {
                let factors = bs.iter().zip(exps).flat_map(|(b, &e)| std::iter::repeat_n(b.clone(), e as usize));
                let prod = left_normed_elem(std::iter::once(a.clone()).chain(factors)).unwrap();
                if !prod.is_zero() {
                    return Ok((a, prod));
                }
            }
            let mut k = d;
            let mut done = true;
            while k > 0 {
                k -= 1;
                word[k] += 1;
                if word[k] < r {
                    done = false;
                    break;
                }
                word[k] = 0;
            }
            if done {
                break;
            }
        }
    }
    Err(Error::AnchorDegenerate { cap })
}

/// f_g(x) = Σ α_ī a ∘ f_1^{i_1} ∘ b_1^{M_1 − i_1} ∘ ⋯ ∘ f_M^{i_M} ∘ b_M^{M_M − i_M}.
pub fn poly_to_lie(g: &Poly, pp: &Parallelepipedon, anchor_cap: Option<usize>) -> Result<LiftedPoly> {
    if g.ring().arity() != pp.total_dim() || g.ring().base() != pp.base() {
        return Err(Error::RingMismatch(format!("{} is not k[y_1..y_{}] over {}", g.ring(), pp.total_dim(), pp.algebra.field)));
    }
    let (fs, bs) = f_table(pp)?;
    let exps = g.max_exponents();
    let (anchor, anchor_product) = choose_anchor(pp, &bs, &exps, anchor_cap)?;
    let a_term = element_term(&anchor);
    let b_terms: Vec<LieTerm> = bs.iter().map(element_term).collect();
    let mut items = Vec::new();
    for (m, c) in g.terms() {
        let mut parts = vec![a_term.clone()];
        for t in 0..exps.len() {
            let i = m.0[t];
            parts.extend(std::iter::repeat_n(fs[t].clone(), i as usize));
            parts.extend(std::iter::repeat_n(b_terms[t].clone(), (exps[t] - i) as usize));
        }
        let prod = LieTerm::left_normed(parts);
        items.push(if c.is_one() { prod } else { LieTerm::scaled(Scalar::Base(c.clone()), prod) });
    }
    let term = match items.len() {
        0 => LieTerm::Zero,
        1 => items.pop().unwrap(),
        _ => LieTerm::Sum(items),
    };
    Ok(LiftedPoly { term, b: bs, anchor, anchor_product, max_exponents: exps })
}

/// A point set on one side of the correspondence 𝕍 ↔ k^M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSet {
    Lie(Vec<Vec<FreeLieElement>>),
    Ground(Vec<Vec<BaseElem>>),
}

/// Y_F ↦ Y_k and Y_k ↦ Y_F.
pub fn correspond(pp: &Parallelepipedon, set: &PointSet) -> Result<PointSet> {
    match set {
        PointSet::Lie(ps) => Ok(PointSet::Ground(ps.iter().map(|p| pp.coordinates(p)).collect::<Result<_>>()?)),
        PointSet::Ground(ts) => Ok(PointSet::Lie(ts.iter().map(|t| pp.point(t)).collect::<Result<_>>()?)),
    }
}

/// Polynomials over k in blocks of variables, one block per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    pub ring: PolyRing,
    /// Variable ranges [start, end) per factor.
    pub blocks: Vec<(usize, usize)>,
    pub polys: Vec<Poly>,
}

impl PolySystem {
    pub fn empty(pp: &Parallelepipedon) -> PolySystem {
        let mut blocks = Vec::new();
        let mut t = 0;
        for m in pp.dims() {
            blocks.push((t, t + m));
            t += m;
        }
        PolySystem { ring: pp.poly_ring(), blocks, polys: vec![] }
    }

    pub fn push(&mut self, g: Poly) {
        if !g.is_zero() && !self.polys.contains(&g) {
            self.polys.push(g);
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("field {}\n", self.ring.base());
        for (i, &(a, b)) in self.blocks.iter().enumerate() {
            if a == b {
                s.push_str(&format!("block {}: empty\n", i + 1));
            } else {
                s.push_str(&format!("block {}: y{}..y{}\n", i + 1, a + 1, b));
            }
        }
        for g in &self.polys {
            s.push_str(&format!("{g}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<PolySystem> {
        let mut field: Option<FieldSpec> = None;
        let mut blocks = Vec::new();
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let l = raw.split('#').next().unwrap().trim();
            if l.is_empty() {
                continue;
            }
            if let Some(rest) = l.strip_prefix("field ") {
                field = Some(rest.trim().parse()?);
            } else if let Some(rest) = l.strip_prefix("block ") {
                let bad = || Error::SyntaxError { line, col: 1, expected: "block i: yA..yB or block i: empty".into() };
                let (idx, range) = rest.split_once(':').ok_or_else(bad)?;
                let idx: usize = idx.trim().parse().map_err(|_| bad())?;
                if idx != blocks.len() + 1 {
                    return Err(bad());
                }
                let range = range.trim();
                let start = blocks.last().map(|&(_, e)| e).unwrap_or(0);
                if range == "empty" {
                    blocks.push((start, start));
                    continue;
                }
                let (a, b) = range.split_once("..").ok_or_else(bad)?;
                let num = |s: &str| s.trim().strip_prefix('y').and_then(|d| d.parse::<usize>().ok());
                let (a, b) = (num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?);
                if a != start + 1 || b < a {
                    return Err(bad());
                }
                blocks.push((start, b));
            } else {
                lines.push((line, l.to_string()));
            }
        }
        let field = field.ok_or(Error::SyntaxError { line: 1, col: 1, expected: "field line".into() })?;
        if let FieldSpec::RationalFunctions { .. } = field {
            return Err(Error::UnsupportedCoefficientAlgebra("polynomial systems over k = GF(p) or Q".into()));
        }
        let m = blocks.last().map(|&(_, e)| e).unwrap_or(0);
        let ring = PolyRing::numbered("y", m, field.base());
        let mut out = PolySystem { ring: ring.clone(), blocks, polys: vec![] };
        for (line, l) in lines {
            let g = Poly::parse(&ring, &l).map_err(|e| match e {
                Error::SyntaxError { col, expected, .. } => Error::SyntaxError { line, col, expected },
                e => e,
            })?;
            out.push(g);
        }
        Ok(out)
    }

    /// V_k over all of k^M (finite k).
    pub fn solve(&self, pp: &Parallelepipedon, budget: u64) -> Result<Vec<Vec<BaseElem>>> {
        Ok(pp.tuples(budget)?.into_iter().filter(|a| self.polys.iter().all(|g| g.eval(a).is_zero())).collect())
    }
}

/// S_k = ⋃ S_f over the equations of the system.
pub fn reduce_system(sys: &EquationSystem, pp: &Parallelepipedon) -> Result<PolySystem> {
    if sys.algebra != pp.algebra || sys.arity() != pp.arity() {
        return Err(Error::AlgebraMismatch("system and parallelepipedon disagree on algebra or arity".into()));
    }
    let mut out = PolySystem::empty(pp);
    for f in &sys.equations {
        for g in lie_to_poly(f, pp)? {
            out.push(g.monic());
        }
    }
    Ok(out)
}

/// S_F = {f_g | g ∈ S_k} ∪ {s_{m_j}(x_j − c_j)}.
pub fn lift_system(sk: &PolySystem, pp: &Parallelepipedon, anchor_cap: Option<usize>) -> Result<EquationSystem> {
    if sk.ring.arity() != pp.total_dim() || sk.blocks.len() != pp.arity() || sk.blocks != PolySystem::empty(pp).blocks {
        return Err(Error::RingMismatch("block structure does not match the parallelepipedon".into()));
    }
    let mut eqs = Vec::new();
    for g in &sk.polys {
        let g = Poly::from_terms(&pp.poly_ring(), g.terms().map(|(m, c)| (m.clone(), c.clone())));
        eqs.push(poly_to_lie(&g, pp, anchor_cap)?.term);
    }
    eqs.extend(pp.defining_equations()?);
    Ok(EquationSystem::new(pp.algebra.clone(), pp.variables.clone(), eqs))
}

/// V_F(sys) ∩ 𝕍 by exact evaluation at every point (finite k).
pub fn solve_in_polytope(sys: &EquationSystem, pp: &Parallelepipedon, budget: u64) -> Result<Vec<Vec<FreeLieElement>>> {
    let carrier = FreeCarrier { alg: pp.ambient.clone(), constants: pp.algebra.rank, trunc: None };
    let mut out = Vec::new();
    for (_, p) in pp.points(budget)? {
        let mut ev = CachedEvaluator::new(&carrier, p.clone());
        let mut ok = true;
        for f in &sys.equations {
            if !ev.eval(f)?.is_zero() {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCheck {
    pub points: usize,
    pub solutions: usize,
    /// Coordinates of the first point where the two sides disagree.
    pub first_mismatch: Option<Vec<BaseElem>>,
}

/// Compares V_F(sys) ∩ 𝕍 with V_k(S_k) point by point (finite k).
pub fn verify_reduction(sys: &EquationSystem, sk: &PolySystem, pp: &Parallelepipedon, budget: u64) -> Result<ReductionCheck> {
    let carrier = FreeCarrier { alg: pp.ambient.clone(), constants: pp.algebra.rank, trunc: None };
    let pts = pp.points(budget)?;
    let mut solutions = 0;
    for (a, p) in &pts {
        let mut ev = CachedEvaluator::new(&carrier, p.clone());
        let mut lie = true;
        for f in &sys.equations {
            if !ev.eval(f)?.is_zero() {
                lie = false;
                break;
            }
        }
        let ground = sk.polys.iter().all(|g| g.eval(a).is_zero());
        if lie != ground {
            return Ok(ReductionCheck { points: pts.len(), solutions, first_mismatch: Some(a.clone()) });
        }
        solutions += lie as usize;
    }
    Ok(ReductionCheck { points: pts.len(), solutions, first_mismatch: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    WholeAlgebra,
    BoundedWithin(Parallelepipedon),
    EmptyWithin { degree: usize },
    Unknown { degree: usize, reason: String },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::WholeAlgebra => write!(f, "WholeAlgebra"),
            Classification::BoundedWithin(p) => {
                let fac = &p.factors()[0];
                let basis: Vec<String> = fac.basis.iter().map(render).collect();
                write!(f, "BoundedWithin(lin{{{}}} + {})", basis.join(", "), render(&fac.shift))
            }
            Classification::EmptyWithin { degree } => write!(f, "EmptyWithin(degree {degree})"),
            Classification::Unknown { degree, reason } => write!(f, "Unknown(degree {degree}: {reason})"),
        }
    }
}

/// Whole / bounded / empty for a one-variable system over a free algebra.
/// Solutions are searched among elements of degree ≤ `search_degree`; the
/// set is reported bounded only when every solution found stays strictly
/// below that degree, otherwise the verdict is Unknown.
pub fn classify_one_variable(sys: &EquationSystem, search_degree: usize, budget: u64) -> Result<Classification> {
    if sys.arity() != 1 {
        return Err(Error::Unsupported(format!("one-variable classifier given {} variables", sys.arity())));
    }
    if sys.algebra.kind != AlgebraKind::Free {
        return Err(Error::UnsupportedCoefficientAlgebra(format!("classifier needs a free coefficient algebra, not {}", sys.algebra)));
    }
    let lowered = crate::terms::lower_to_carrier(sys)?;
    let mut all_zero = true;
    for f in &sys.equations {
        if !lowered.normal_form(f)?.is_zero() {
            all_zero = false;
            break;
        }
    }
    if all_zero {
        return Ok(Classification::WholeAlgebra);
    }
    if !sys.algebra.field.is_finite() {
        return Ok(Classification::Unknown { degree: search_degree, reason: "solution search needs a finite field".into() });
    }
    let r = sys.algebra.rank;
    let setting = Setting::new(sys.algebra.clone(), CarrierSpec::Free { rank: r }, search_degree, sys.max_degree().max(1), budget)?;
    let y = solve(sys, &setting)?;
    if y.is_empty() {
        return Ok(Classification::EmptyWithin { degree: search_degree });
    }
    let c = setting.carrier();
    if y.points.iter().any(|p| c.degree(&p[0]) >= search_degree) {
        return Ok(Classification::Unknown { degree: search_degree, reason: "solutions reach the search degree".into() });
    }
    let ambient = FreeLie::new(r, sys.algebra.field.clone());
    let p = c.modulus();
    let base = &y.points[0][0];
    let mut span = Echelon::new(p, c.dim());
    for pt in &y.points[1..] {
        let d: Vec<u64> = pt[0].iter().zip(base).map(|(&a, &b)| (a as u64 + p - b as u64) % p).collect();
        span.insert(d);
    }
    let to_elem = |v: &[u64]| -> Result<FreeLieElement> {
        let fe: Vec<u32> = v.iter().map(|&x| x as u32).collect();
        c.to_free(&fe, &ambient)
    };
    let basis = span.basis().iter().map(|v| to_elem(v)).collect::<Result<Vec<_>>>()?;
    let shift = c.to_free(base, &ambient)?;
    let pp = Parallelepipedon::new(sys.algebra.clone(), sys.variables.clone(), vec![Factor { basis, shift }])?;
    Ok(Classification::BoundedWithin(pp))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealisationReport {
    /// Coefficients t^j_i of each ξ_j in the factor basis.
    pub coefficients: Vec<Vec<Scalar>>,
    /// Distinct specializations, sorted (finite k).
    pub specializations: Vec<Vec<FreeLieElement>>,
    /// Whether the specializations fill the claimed set (all of 𝕍 by default).
    pub matches_claim: bool,
}

/// Checks ξ_j − c_j ∈ V_j ⊗ k(t…) for generators over a rational-function
/// extension, and over finite k compares the specializations with the claim.
pub fn bounded_realisation(
    pp: &Parallelepipedon,
    xi: &[FreeLieElement],
    claimed: Option<&[Vec<FreeLieElement>]>,
    budget: u64,
) -> Result<RealisationReport> {
    if xi.len() != pp.arity() {
        return Err(Error::ShapeViolation(format!("{} generators for {} factors", xi.len(), pp.arity())));
    }
    let field = xi[0].algebra().field().clone();
    let (rf_ring, base) = match &field {
        FieldSpec::RationalFunctions { base, .. } => (field.ratfunc_ring(), *base),
        f => (None, f.base()),
    };
    if base != pp.base() || xi.iter().any(|x| x.algebra().field() != &field) {
        return Err(Error::FieldMismatch(field.to_string(), pp.algebra.field.to_string()));
    }
    let alg = xi[0].algebra().clone();
    let gc = GenericCarrier { inner: FreeCarrier { alg: alg.clone(), constants: pp.algebra.rank, trunc: None }, field: field.clone() };
    let mut coefficients = Vec::new();
    for (j, (x, f)) in xi.iter().zip(&pp.factors).enumerate() {
        let d = x.sub(&gc.lift(&f.shift));
        let basis: Vec<FreeLieElement> = f.basis.iter().map(|v| gc.lift(v)).collect();
        if basis.is_empty() {
            if !d.is_zero() {
                return Err(Error::ShapeViolation(format!("generator {} is not the point c_{}", j + 1, j + 1)));
            }
            coefficients.push(vec![]);
            continue;
        }
        match subspace_membership(&d, &basis)? {
            Membership::Coordinates(cs) => coefficients.push(cs),
            Membership::NotInSpan => {
                return Err(Error::ShapeViolation(format!("generator {} = {x} leaves lin(V_{}) + c_{}", j + 1, j + 1, j + 1)))
            }
        }
    }
    let elems = base.elements().ok_or_else(|| Error::InfiniteFieldUnsupported(field.to_string()))?;
    let nt = rf_ring.as_ref().map(|r| r.arity()).unwrap_or(0);
    let count = (elems.len() as u128).saturating_pow(nt as u32);
    if count > budget as u128 {
        return Err(Error::capacity("specializations", count, budget as u128));
    }
    let mut specs = std::collections::BTreeSet::new();
    let mut idx = vec![0usize; nt];
    loop {
        let at: Vec<BaseElem> = idx.iter().map(|&i| elems[i].clone()).collect();
        let mut alphas = Vec::new();
        let mut defined = true;
        for c in coefficients.iter().flatten() {
            match c {
                Scalar::Base(b) => alphas.push(b.clone()),
                Scalar::Rat(r) => match r.eval(&at) {
                    Some(v) => alphas.push(v),
                    None => defined = false,
                },
            }
        }
        if defined {
            specs.insert(pp.point(&alphas)?);
        }
        let mut k = nt;
        let mut done = true;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < elems.len() {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if done {
            break;
        }
    }
    let specializations: Vec<Vec<FreeLieElement>> = specs.into_iter().collect();
    let claim: Vec<Vec<FreeLieElement>> = match claimed {
        Some(c) => {
            let mut c = c.to_vec();
            c.sort();
            c.dedup();
            c
        }
        None => pp.points(budget)?.into_iter().map(|(_, p)| p).collect::<std::collections::BTreeSet<_>>().into_iter().collect(),
    };
    Ok(RealisationReport { coefficients, matches_claim: specializations == claim, specializations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::DEFAULT_BUDGET;
    use crate::terms::{parse_document, parse_system};
    use proptest::prelude::*;
    use std::time::Instant;

    fn alg(p: u64) -> CoeffAlgebra {
        CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(p))
    }

    fn f(p: u64) -> FreeLie {
        FreeLie::new(2, FieldSpec::Prime(p))
    }

    fn gen(p: u64, i: usize) -> FreeLieElement {
        f(p).generator(i)
    }

    fn comm(p: u64) -> FreeLieElement {
        gen(p, 0).bracket(&gen(p, 1)).unwrap()
    }

    fn nf(t: &LieTerm, p: u64) -> FreeLieElement {
        let c = FreeCarrier { alg: FreeLie::new(3, FieldSpec::Prime(p)), constants: 2, trunc: None };
        evaluate(t, &[c.alg.generator(2)], &c).unwrap()
    }

    fn line(p: u64, basis: Vec<FreeLieElement>, shift: FreeLieElement) -> Parallelepipedon {
        Parallelepipedon::new(alg(p), vec!["x".into()], vec![Factor { basis, shift }]).unwrap()
    }

    #[test]
    fn s_m_examples() {
        let x = LieTerm::Var(0);
        let (a1, a2) = (gen(3, 0), gen(3, 1));
        let b = |l: LieTerm, r: LieTerm| LieTerm::bracket(l, r);
        assert_eq!(nf(&s_m(&[a1.clone()], &x).unwrap(), 3), nf(&b(x.clone(), LieTerm::Const(0)), 3));
        let want = b(b(x.clone(), LieTerm::Const(0)), b(LieTerm::Const(1), LieTerm::Const(0)));
        assert_eq!(nf(&s_m(&[a1.clone(), a2.clone()], &x).unwrap(), 3), nf(&want, 3));
        let basis = vec![a1.clone(), a2.clone(), comm(3)];
        let carrier = FreeCarrier { alg: f(3), constants: 2, trunc: None };
        for m in 1..=3 {
            let t = s_m(&basis[..m], &x).unwrap();
            for v in &basis[..m] {
                assert!(evaluate(&t, &[v.clone()], &carrier).unwrap().is_zero());
            }
            assert!(!evaluate(&t, &[basis[m % 3].clone().add(&comm(3).bracket(&a1).unwrap())], &carrier).unwrap().is_zero());
        }
        assert_eq!(s_m(&[a1.clone(), a1.scale(&FieldSpec::Prime(3).from_i64(2))], &x), Err(Error::DependentBasis));
    }

    #[test]
    fn subspaces_are_algebraic_in_windows() {
        let setting = Setting::new(alg(2), CarrierSpec::Free { rank: 2 }, 3, 2, DEFAULT_BUDGET).unwrap();
        let zero = f(2).zero();
        let r = subspace_as_algebraic_set(&[gen(2, 0)], &zero, &setting).unwrap();
        assert!(r.equal());
        assert_eq!(r.found.len(), 2);
        let shallow = Setting::new(alg(2), CarrierSpec::Free { rank: 2 }, 2, 4, DEFAULT_BUDGET).unwrap();
        let r = subspace_as_algebraic_set(&[gen(2, 0), gen(2, 1)], &zero, &shallow).unwrap();
        assert!(r.equal());
        assert_eq!(r.found.len(), 4);
        let setting = Setting::new(alg(2), CarrierSpec::Free { rank: 2 }, 3, 3, DEFAULT_BUDGET).unwrap();
        let r = subspace_as_algebraic_set(&[gen(2, 0)], &comm(2), &setting).unwrap();
        assert!(r.equal());
        let c = setting.carrier();
        assert!(r.found.contains(&c.from_free(&comm(2)).unwrap()));
        let deep = comm(2).bracket(&gen(2, 0)).unwrap().bracket(&gen(2, 1)).unwrap();
        assert!(matches!(subspace_as_algebraic_set(&[deep], &zero, &setting), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn lie_to_poly_examples() {
        let p = line(3, vec![gen(3, 0)], f(3).zero());
        let sys = parse_system("algebra free rank=2 field=GF(3)\nvars x\neq [x,a1] = 0\neq [x,a2] = 0\n").unwrap();
        assert!(lie_to_poly(&sys.equations[0], &p).unwrap().is_empty());
        let s = lie_to_poly(&sys.equations[1], &p).unwrap();
        assert_eq!(s, vec![Poly::var(&p.poly_ring(), 0)]);
        let pt = Parallelepipedon::new(alg(3), vec!["x".into()], vec![Factor { basis: vec![], shift: comm(3) }]).unwrap();
        let t = parse_system("algebra free rank=2 field=GF(3)\nvars x\neq x - [a1,a2] = 0\neq x = 0\n").unwrap();
        assert!(lie_to_poly(&t.equations[0], &pt).unwrap().is_empty());
        assert_eq!(lie_to_poly(&t.equations[1], &pt).unwrap().len(), 1);
    }

    #[test]
    fn poly_to_lie_examples() {
        let p = line(3, vec![gen(3, 0)], f(3).zero());
        let ring = p.poly_ring();
        let zeros = |g: &str| {
            let sk = PolySystem { ring: ring.clone(), blocks: vec![(0, 1)], polys: vec![Poly::parse(&ring, g).unwrap()] };
            let lifted = lift_system(&sk, &p, None).unwrap();
            solve_in_polytope(&lifted, &p, 100).unwrap()
        };
        assert_eq!(zeros("y1"), vec![vec![f(3).zero()]]);
        assert_eq!(zeros("y1 - 1"), vec![vec![gen(3, 0)]]);
        let lifted = poly_to_lie(&Poly::zero(&ring), &p, None).unwrap();
        assert_eq!(lifted.term, LieTerm::Zero);
        let g = Poly::parse(&ring, "y1").unwrap();
        let l = poly_to_lie(&g, &p, None).unwrap();
        assert_eq!(l.b, vec![gen(3, 0)]);
        assert!(l.anchor.degree() >= 2);
    }

    #[test]
    fn anchor_degenerates_in_rank_one() {
        let a = CoeffAlgebra::new(AlgebraKind::Free, 1, FieldSpec::Prime(2));
        let g1 = FreeLie::new(1, FieldSpec::Prime(2)).generator(0);
        let p = Parallelepipedon::new(a, vec!["x".into()], vec![Factor { basis: vec![g1.clone()], shift: g1.scale(&FieldSpec::Prime(2).zero()) }]).unwrap();
        let g = Poly::var(&p.poly_ring(), 0);
        assert!(matches!(poly_to_lie(&g, &p, Some(4)), Err(Error::AnchorDegenerate { cap: 4 })));
    }

    #[test]
    fn correspondence_examples() {
        let k = BaseField::Prime(2);
        let p = line(2, vec![gen(2, 0), gen(2, 1)], f(2).zero());
        let ground = PointSet::Ground(vec![vec![k.one(), k.zero()], vec![k.zero(), k.one()]]);
        assert_eq!(correspond(&p, &ground).unwrap(), PointSet::Lie(vec![vec![gen(2, 0)], vec![gen(2, 1)]]));
        let q = line(2, vec![gen(2, 0)], comm(2));
        assert_eq!(correspond(&q, &PointSet::Lie(vec![vec![comm(2)]])).unwrap(), PointSet::Ground(vec![vec![k.zero()]]));
        assert!(matches!(
            correspond(&q, &PointSet::Lie(vec![vec![gen(2, 1)]])),
            Err(Error::PointOutsidePolytope(_))
        ));
    }

    #[test]
    fn reduce_and_lift_examples() {
        let text = "algebra free rank=2 field=GF(3)\nvars x\nlet v1 = a1\nlet c = [a1,a2]\npolytope factor basis=v1 shift=c\n";
        let doc = parse_document(&format!("{text}eq [x - c, v1] = 0\n")).unwrap();
        let p = Parallelepipedon::from_document(&doc).unwrap();
        assert!(reduce_system(&doc.system, &p).unwrap().polys.is_empty());
        let doc = parse_document(&format!("{text}eq x - (v1 + c) = 0\n")).unwrap();
        let sk = reduce_system(&doc.system, &p).unwrap();
        assert_eq!(sk.polys, vec![Poly::parse(&p.poly_ring(), "y1 - 1").unwrap()]);
        assert!(verify_reduction(&doc.system, &sk, &p, 100).unwrap().first_mismatch.is_none());
        // y1·y2 over GF(3)² lifts to the coordinate axes
        let plane = line(3, vec![gen(3, 0), gen(3, 1)], f(3).zero());
        let sk = PolySystem::parse("field GF(3)\nblock 1: y1..y2\ny1*y2\n").unwrap();
        let sf = lift_system(&sk, &plane, None).unwrap();
        let yf = solve_in_polytope(&sf, &plane, 100).unwrap();
        let PointSet::Ground(yk) = correspond(&plane, &PointSet::Lie(yf)).unwrap() else { panic!() };
        assert_eq!(yk, sk.solve(&plane, 100).unwrap());
        assert_eq!(yk.len(), 5);
        // reduce ∘ lift leaves V_k unchanged
        let again = reduce_system(&sf, &plane).unwrap();
        assert_eq!(again.solve(&plane, 100).unwrap(), yk);
    }

    #[test]
    fn poly_system_round_trip() {
        let text = "field GF(3)\nblock 1: y1..y2\nblock 2: empty\nblock 3: y3..y3\ny1*y2 + 2*y3\ny1^2 - 1\n";
        let s = PolySystem::parse(text).unwrap();
        assert_eq!(s.blocks, vec![(0, 2), (2, 2), (2, 3)]);
        assert_eq!(PolySystem::parse(&s.render()).unwrap(), s);
        assert!(PolySystem::parse("field GF(3)\nblock 2: y1..y2\n").is_err());
    }

    fn classify(text: &str) -> Classification {
        let sys = parse_system(&format!("algebra free rank=2 field=GF(2)\nvars x\n{text}")).unwrap();
        classify_one_variable(&sys, 4, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(classify("eq 0 = 0\n"), Classification::WholeAlgebra);
        assert_eq!(classify("eq [x,a1] + [a1,x] = 0\n"), Classification::WholeAlgebra);
        let Classification::BoundedWithin(p) = classify("eq x - a1 = 0\n") else { panic!() };
        assert!(p.factors()[0].basis.is_empty());
        assert_eq!(p.factors()[0].shift, gen(2, 0));
        let Classification::BoundedWithin(p) = classify("eq [x,a1] = 0\n") else { panic!() };
        assert_eq!(p.factors()[0].basis, vec![gen(2, 0)]);
        assert!(p.factors()[0].shift.is_zero());
        assert_eq!(classify("eq a1 = 0\n"), Classification::EmptyWithin { degree: 4 });
        let Classification::BoundedWithin(p) = classify("eq [[x,a1],a1] = 0\n") else { panic!() };
        assert_eq!(p.factors()[0].basis, vec![gen(2, 0)]);
        assert!(matches!(classify("eq x - [[[a1,a2],a2],a2] = 0\n"), Classification::Unknown { .. }));
    }

    #[test]
    fn realisation_examples() {
        let p = line(2, vec![gen(2, 0)], f(2).zero());
        let rf = FieldSpec::rational_functions(FieldSpec::Prime(2), &["t"]).unwrap();
        let big = FreeLie::new(2, rf.clone());
        let xi = big.generator(0).scale(&rf.variable("t").unwrap());
        let r = bounded_realisation(&p, &[xi], None, 100).unwrap();
        assert!(r.matches_claim);
        assert_eq!(r.specializations.len(), 2);
        let plane = line(2, vec![gen(2, 0), gen(2, 1)], f(2).zero());
        let xi = gen(2, 0).add(&gen(2, 1));
        let r = bounded_realisation(&plane, &[xi.clone()], Some(&[vec![xi]]), 100).unwrap();
        assert!(r.matches_claim);
        assert_eq!(r.specializations.len(), 1);
        assert!(matches!(bounded_realisation(&plane, &[comm(2)], None, 100), Err(Error::ShapeViolation(_))));
    }

    /// Every g of degree ≤ 2 over GF(2) in y1, y2: f_g(p) = 0 iff g(α) = 0.
    #[test]
    fn iff_property_gf2() {
        let start = Instant::now();
        let p = line(2, vec![gen(2, 0), comm(2)], f(2).zero());
        let ring = p.poly_ring();
        let monos = ["1", "y1", "y2", "y1^2", "y1*y2", "y2^2"];
        let carrier = FreeCarrier { alg: f(2), constants: 2, trunc: None };
        let pts = p.points(100).unwrap();
        let mut evs: Vec<CachedEvaluator<FreeCarrier>> = pts.iter().map(|(_, x)| CachedEvaluator::new(&carrier, x.clone())).collect();
        for mask in 0u32..64 {
            let text: Vec<&str> = (0..6).filter(|i| mask >> i & 1 == 1).map(|i| monos[i]).collect();
            let g = if text.is_empty() { Poly::zero(&ring) } else { Poly::parse(&ring, &text.join(" + ")).unwrap() };
            let fg = poly_to_lie(&g, &p, None).unwrap();
            for ((a, _), ev) in pts.iter().zip(evs.iter_mut()) {
                assert_eq!(ev.eval(&fg.term).unwrap().is_zero(), g.eval(a).is_zero(), "g = {g} at {a:?}");
            }
        }
        eprintln!("gf2 iff: {:?}", start.elapsed());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip_is_identity(mask in 0u32..512) {
            let p = line(3, vec![gen(3, 0), comm(3)], f(3).zero());
            let all = p.points(100).unwrap();
            let yf: Vec<Vec<FreeLieElement>> = all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, (_, x))| x.clone()).collect();
            let yk = correspond(&p, &PointSet::Lie(yf.clone())).unwrap();
            prop_assert_eq!(correspond(&p, &yk).unwrap(), PointSet::Lie(yf));
        }
    }
}
