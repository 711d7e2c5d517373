//! Algebraic sets over finite windows of a carrier: enumeration, radicals,
//! closure, unions, products, irreducible components, dimension, the
//! functors between algebraic sets and co-presentations, and probes.
//!
//! A window of degree d is the set of carrier elements of degree ≤ d. Points
//! are tuples of window elements, and all products are computed exactly (the
//! carrier tables must reach the degrees involved, otherwise operations fail
//! with a capacity error). In quotient mode the carrier is instead the
//! nilpotent quotient that drops everything above degree d.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::carrier::{CarrierSpec, FElem, FiniteAlgebra, LieCarrier};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::freelie::{lyndon_words, standard_split, Word};
use crate::linalg::{module_rank, Echelon, ModulePresentation};
use crate::metabelian::Metabelian;
use crate::poly::Mono;
use crate::terms::{evaluate, lower_to_carrier, AlgebraKind, CoeffAlgebra, EquationSystem, LieTerm, LoweredElem};

pub type Point = Vec<FElem>;

/// Largest set `decompose` accepts by default.
pub const DEFAULT_DECOMPOSE_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowMode {
    /// Elements of degree ≤ d with exact products.
    Exact,
    /// The quotient by everything of degree > d.
    Quotient,
}

/// A coefficient algebra A, a finite carrier B containing its image, and a window.
#[derive(Clone, Debug)]
pub struct Setting {
    algebra: CoeffAlgebra,
    carrier: FiniteAlgebra,
    window: usize,
    mode: WindowMode,
    budget: u64,
    elements: Arc<Vec<FElem>>,
}

fn prime_of(field: &FieldSpec) -> Result<u64> {
    match field {
        FieldSpec::Prime(p) => Ok(*p),
        f => Err(Error::InfiniteCarrier(format!("coefficients over {f} give no finite carrier"))),
    }
}

impl Setting {
    /// Exact window of degree `window`; products of terms up to `term_degree`
    /// evaluated at window points stay exact.
    pub fn new(algebra: CoeffAlgebra, spec: CarrierSpec, window: usize, term_degree: usize, budget: u64) -> Result<Setting> {
        let p = prime_of(&algebra.field)?;
        if window == 0 {
            return Err(Error::WindowTooSmall("window degree must be positive".into()));
        }
        let carrier = FiniteAlgebra::build(spec, p, window * term_degree.max(1))?;
        Setting::finish(algebra, carrier, window, WindowMode::Exact, budget)
    }

    pub fn quotient(algebra: CoeffAlgebra, spec: CarrierSpec, degree: usize, budget: u64) -> Result<Setting> {
        let p = prime_of(&algebra.field)?;
        if degree == 0 {
            return Err(Error::WindowTooSmall("truncation degree must be positive".into()));
        }
        let carrier = FiniteAlgebra::build(spec, p, degree)?.with_truncation(Some(degree));
        Setting::finish(algebra, carrier, degree, WindowMode::Quotient, budget)
    }

    fn finish(algebra: CoeffAlgebra, carrier: FiniteAlgebra, window: usize, mode: WindowMode, budget: u64) -> Result<Setting> {
        if carrier.constant_count() < algebra.rank {
            return Err(Error::CarrierMismatch(format!(
                "{} designates {} constants but A has rank {}",
                carrier.spec().describe(),
                carrier.constant_count(),
                algebra.rank
            )));
        }
        if algebra.kind == AlgebraKind::Metabelian {
            if let CarrierSpec::Free { rank } = carrier.spec() {
                if *rank > 1 {
                    return Err(Error::CarrierMismatch("a free carrier of rank > 1 is not metabelian".into()));
                }
            }
        }
        let elements = Arc::new(carrier.window_elements(window, budget)?);
        Ok(Setting { algebra, carrier, window, mode, budget, elements })
    }

    pub fn algebra(&self) -> &CoeffAlgebra {
        &self.algebra
    }

    pub fn carrier(&self) -> &FiniteAlgebra {
        &self.carrier
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Window elements in window order.
    pub fn elements(&self) -> &[FElem] {
        &self.elements
    }

    pub fn same_as(&self, o: &Setting) -> bool {
        self.algebra == o.algebra && self.carrier == o.carrier && self.window == o.window && self.mode == o.mode
    }

    /// Checks that terms of this degree evaluate exactly on window points.
    pub fn require_degree(&self, term_degree: usize) -> Result<()> {
        if self.mode == WindowMode::Quotient {
            return Ok(());
        }
        match self.carrier.table_degree() {
            Some(t) if self.window * term_degree > t => {
                Err(Error::capacity("carrier table degree", (self.window * term_degree) as u128, t as u128))
            }
            _ => Ok(()),
        }
    }

    pub fn point_count(&self, n: usize) -> u128 {
        (self.elements.len() as u128).saturating_pow(n as u32)
    }

    /// All points of W^n in lexicographic window order.
    pub fn points(&self, n: usize) -> Result<PointIter<'_>> {
        let count = self.point_count(n);
        if count > self.budget as u128 {
            return Err(Error::capacity(format!("points in W^{n}"), count, self.budget as u128));
        }
        Ok(PointIter { elements: &self.elements, idx: vec![0; n], done: self.elements.is_empty() && n > 0 })
    }

    pub fn render_elem(&self, e: &FElem) -> String {
        self.carrier.render(e)
    }

    pub fn render_point(&self, p: &[FElem]) -> String {
        format!("({})", p.iter().map(|e| self.carrier.render(e)).collect::<Vec<_>>().join(", "))
    }

    pub fn regime(&self) -> String {
        match self.mode {
            WindowMode::Exact => format!(
                "enumerated: elements of degree <= {} with exact products up to degree {}",
                self.window,
                self.carrier.table_degree().map_or("unbounded".to_string(), |t| t.to_string())
            ),
            WindowMode::Quotient => format!("enumerated: quotient truncated above degree {}", self.window),
        }
    }

    pub fn describe(&self) -> String {
        format!("{} over GF({}), {} window elements", self.carrier.spec().describe(), self.carrier.modulus(), self.elements.len())
    }

    pub fn point_cmp(&self, a: &[FElem], b: &[FElem]) -> Ordering {
        self.carrier.point_cmp(a, b)
    }

    fn prime(&self) -> u64 {
        self.carrier.modulus()
    }
}

/// Odometer over W^n; the last coordinate varies fastest.
pub struct PointIter<'a> {
    elements: &'a [FElem],
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for PointIter<'_> {
    type Item = Point;
    fn next(&mut self) -> Option<Point> {
        if self.done {
            return None;
        }
        let p = self.idx.iter().map(|&i| self.elements[i].clone()).collect();
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.elements.len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(p)
    }
}

/// V_B(S) enumerated in a window.
#[derive(Clone, Debug)]
pub struct AlgebraicSet {
    pub system: EquationSystem,
    pub setting: Setting,
    /// Sorted in window order, without repetition.
    pub points: Vec<Point>,
}

impl AlgebraicSet {
    pub fn arity(&self) -> usize {
        self.system.arity()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[FElem]) -> bool {
        self.points.binary_search_by(|q| self.setting.point_cmp(q, p)).is_ok()
    }

    pub fn regime(&self) -> String {
        self.setting.regime()
    }

    pub fn radical(&self, bound: usize) -> Result<Radical> {
        radical_of_points(&self.setting, self.arity(), &self.points, bound)
    }
}

fn check_system(sys: &EquationSystem, setting: &Setting) -> Result<()> {
    if &sys.algebra != setting.algebra() {
        return Err(Error::AlgebraMismatch(format!("system over `{}`, setting over `{}`", sys.algebra, setting.algebra())));
    }
    Ok(())
}

fn satisfies(eqs: &[&LieTerm], p: &[FElem], carrier: &FiniteAlgebra) -> Result<bool> {
    for e in eqs {
        if !carrier.is_zero(&evaluate(e, p, carrier)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every point of the window satisfying all equations.
pub fn solve(sys: &EquationSystem, setting: &Setting) -> Result<AlgebraicSet> {
    check_system(sys, setting)?;
    setting.require_degree(sys.max_degree())?;
    let eqs: Vec<&LieTerm> = sys.equations.iter().filter(|e| **e != LieTerm::Zero).collect();
    let mut points = Vec::new();
    for p in setting.points(sys.arity())? {
        if satisfies(&eqs, &p, setting.carrier())? {
            points.push(p);
        }
    }
    Ok(AlgebraicSet { system: sys.clone(), setting: setting.clone(), points })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    Const(usize),
    Var(usize),
    Bracket(usize, usize),
}

#[derive(Clone, Debug)]
enum WindowIndex {
    Free(HashMap<Word, usize>),
    Metabelian(HashMap<(usize, usize, Mono), usize>),
}

/// A basis of the elements of A[X] of degree ≤ bound: Lyndon basis elements
/// when A is free or zero, the normal-form basis of 𝔉_{r+n} when A is metabelian.
#[derive(Clone, Debug)]
pub struct PolyWindow {
    algebra: CoeffAlgebra,
    vars: usize,
    bound: usize,
    shapes: Vec<Shape>,
    degrees: Vec<usize>,
    index: WindowIndex,
}

impl PolyWindow {
    pub fn new(algebra: &CoeffAlgebra, vars: usize, bound: usize) -> Result<PolyWindow> {
        let r = algebra.rank;
        let letters = r + vars;
        if bound == 0 || letters == 0 {
            return Err(Error::EmptyWindow(bound));
        }
        let letter = |k: usize| if k < r { Shape::Const(k) } else { Shape::Var(k - r) };
        let mut shapes = Vec::new();
        let mut degrees = Vec::new();
        let index = match algebra.kind {
            AlgebraKind::Zero | AlgebraKind::Free => {
                let mut index = HashMap::new();
                for w in lyndon_words(letters, bound)? {
                    let l = w.letters();
                    let shape = if l.len() == 1 {
                        letter(l[0] as usize)
                    } else {
                        let s = standard_split(l).expect("Lyndon words of length > 1 split");
                        Shape::Bracket(index[&Word::new(&l[..s])], index[&Word::new(&l[s..])])
                    };
                    index.insert(w.clone(), shapes.len());
                    shapes.push(shape);
                    degrees.push(l.len());
                }
                WindowIndex::Free(index)
            }
            AlgebraKind::Metabelian => {
                for k in 0..letters {
                    shapes.push(letter(k));
                    degrees.push(1);
                }
                let alg = Metabelian::new(letters, algebra.field.base());
                let mut index = HashMap::new();
                for deg in 2..=bound {
                    for (j, i, m) in alg.fit_basis((deg - 2) as u32) {
                        let shape = match (0..letters).rev().find(|&k| m.0[k] > 0) {
                            None => Shape::Bracket(j, i),
                            Some(k) => {
                                let prev = m.div(&Mono::var(letters, k)).expect("variable divides");
                                Shape::Bracket(index[&(j, i, prev)], k)
                            }
                        };
                        index.insert((j, i, m), shapes.len());
                        shapes.push(shape);
                        degrees.push(deg);
                    }
                }
                WindowIndex::Metabelian(index)
            }
        };
        Ok(PolyWindow { algebra: algebra.clone(), vars, bound, shapes, degrees, index })
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn term(&self, i: usize) -> LieTerm {
        match self.shapes[i] {
            Shape::Const(k) => LieTerm::Const(k),
            Shape::Var(k) => LieTerm::Var(k),
            Shape::Bracket(a, b) => LieTerm::bracket(self.term(a), self.term(b)),
        }
    }

    /// Values of every basis element at a point.
    pub fn evaluate<C: LieCarrier>(&self, carrier: &C, point: &[C::Elem]) -> Result<Vec<C::Elem>> {
        let mut vals: Vec<C::Elem> = Vec::with_capacity(self.len());
        for s in &self.shapes {
            let v = match s {
                Shape::Const(k) => carrier.constant(*k)?,
                Shape::Var(k) => point
                    .get(*k)
                    .cloned()
                    .ok_or_else(|| Error::CarrierMismatch(format!("point has {} coordinates", point.len())))?,
                Shape::Bracket(a, b) => {
                    if carrier.is_zero(&vals[*a]) || carrier.is_zero(&vals[*b]) {
                        carrier.zero()
                    } else {
                        carrier.bracket(&vals[*a], &vals[*b])?
                    }
                }
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Coordinates of a term in this basis, or None when its normal form
    /// leaves the window.
    pub fn coords(&self, t: &LieTerm) -> Result<Option<Vec<u64>>> {
        let sys = EquationSystem::new(self.algebra.clone(), (0..self.vars).map(|i| format!("x{}", i + 1)).collect(), vec![]);
        let lowered = lower_to_carrier(&sys)?;
        let residue = |c: Option<u64>| {
            c.ok_or_else(|| Error::InfiniteFieldUnsupported("window coordinates need a prime field".into()))
        };
        let mut v = vec![0u64; self.len()];
        match (lowered.normal_form(t)?, &self.index) {
            (LoweredElem::Free(e), WindowIndex::Free(index)) => {
                for (w, c) in e.terms() {
                    let Some(&i) = index.get(w) else { return Ok(None) };
                    v[i] = residue(c.as_base().and_then(|b| b.residue()))?;
                }
            }
            (LoweredElem::Metabelian(e), WindowIndex::Metabelian(index)) => {
                for (k, c) in e.linear_part().iter().enumerate() {
                    v[k] = residue(c.residue())?;
                }
                for (&(j, i), poly) in e.fitting_part() {
                    for (m, c) in poly.terms() {
                        let Some(&idx) = index.get(&(j, i, m.clone())) else { return Ok(None) };
                        v[idx] = residue(c.residue())?;
                    }
                }
            }
            _ => return Err(Error::InvariantViolation("window and lowering disagree on the algebra kind".into())),
        }
        Ok(Some(v))
    }

    /// The term Σ c_i·u_i.
    pub fn combination(&self, c: &[u64]) -> LieTerm {
        let field = &self.algebra.field;
        let mut items: Vec<LieTerm> = c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| if x == 1 { self.term(i) } else { LieTerm::scaled(field.from_i64(x as i64), self.term(i)) })
            .collect();
        match items.len() {
            0 => LieTerm::Zero,
            1 => items.pop().unwrap(),
            _ => LieTerm::Sum(items),
        }
    }

    pub fn algebra(&self) -> &CoeffAlgebra {
        &self.algebra
    }

    /// The generators of A[X] as window indices: constants, then variables.
    pub fn letters(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == 1).collect()
    }

    pub fn same_shape(&self, o: &PolyWindow) -> bool {
        self.algebra == o.algebra && self.vars == o.vars && self.bound == o.bound
    }
}

/// Evaluation rows of a point: for each carrier coordinate t, the vector
/// (u_i(p)_t)_i. A combination vanishes at p iff it annihilates every row.
fn point_rows(window: &PolyWindow, setting: &Setting, p: &[FElem]) -> Result<Echelon> {
    let vals = window.evaluate(setting.carrier(), p)?;
    let dim = setting.carrier().dim();
    let mut e = Echelon::new(setting.prime(), window.len());
    for t in 0..dim {
        if vals.iter().any(|v| v[t] != 0) {
            e.insert(vals.iter().map(|v| v[t] as u64).collect());
        }
    }
    Ok(e)
}

/// The part of Rad_B(Y) inside a polynomial window.
#[derive(Clone, Debug)]
pub struct Radical {
    window: Arc<PolyWindow>,
    kernel: Echelon,
}

impl Radical {
    pub fn from_parts(window: Arc<PolyWindow>, kernel: Echelon) -> Result<Radical> {
        if kernel.ambient() != window.len() {
            return Err(Error::InvariantViolation("radical kernel does not match its window".into()));
        }
        Ok(Radical { window, kernel })
    }

    pub fn window(&self) -> &PolyWindow {
        &self.window
    }

    pub fn kernel(&self) -> &Echelon {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// Basis terms in canonical (reduced echelon) form.
    pub fn terms(&self) -> Vec<LieTerm> {
        self.kernel.basis().iter().map(|c| self.window.combination(c)).collect()
    }

    pub fn render(&self, vars: &[String]) -> Vec<String> {
        self.terms().iter().map(|t| t.render(vars)).collect()
    }

    pub fn same_as(&self, o: &Radical) -> bool {
        self.window.same_shape(&o.window) && self.kernel.same_space(&o.kernel)
    }

    /// Whether `o` ⊆ self.
    pub fn contains(&self, o: &Radical) -> bool {
        self.window.same_shape(&o.window) && o.kernel.is_subspace_of(&self.kernel)
    }

    pub fn intersect(&self, o: &Radical) -> Radical {
        Radical { window: self.window.clone(), kernel: self.kernel.intersect(&o.kernel) }
    }

    /// Membership of a term; None when it leaves the window.
    pub fn contains_term(&self, t: &LieTerm) -> Result<Option<bool>> {
        Ok(self.window.coords(t)?.map(|v| self.kernel.contains(&v)))
    }
}

/// Rad_B(Y) ∩ A[X]_{≤bound} as the kernel of the evaluation map.
pub fn radical_of_points(setting: &Setting, arity: usize, points: &[Point], bound: usize) -> Result<Radical> {
    let window = Arc::new(PolyWindow::new(setting.algebra(), arity, bound)?);
    setting.require_degree(bound)?;
    let mut rows = Echelon::new(setting.prime(), window.len());
    for p in points {
        for r in point_rows(&window, setting, p)?.basis() {
            rows.insert(r);
            if rows.dim() == window.len() {
                break;
            }
        }
    }
    Ok(Radical { kernel: rows.annihilator(), window })
}

fn vanishes(rad: &Radical, setting: &Setting, p: &[FElem]) -> Result<bool> {
    let vals = rad.window.evaluate(setting.carrier(), p)?;
    let c = setting.carrier();
    for k in rad.kernel.basis() {
        let mut acc = c.zero();
        for (x, v) in k.iter().zip(&vals) {
            if *x != 0 {
                c.add_scaled(&mut acc, *x, v);
            }
        }
        if !c.is_zero(&acc) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// V_B(Rad) inside the window.
pub fn zero_set(rad: &Radical, setting: &Setting) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for p in setting.points(rad.window.vars)? {
        if vanishes(rad, setting, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// V_B(Rad_B(Y)) inside the window.
pub fn closure(setting: &Setting, arity: usize, y: &[Point], bound: usize) -> Result<Vec<Point>> {
    zero_set(&radical_of_points(setting, arity, y, bound)?, setting)
}

fn sorted_points(setting: &Setting, y: &[Point]) -> Vec<Point> {
    let mut v = y.to_vec();
    v.sort_by(|a, b| setting.point_cmp(a, b));
    v.dedup();
    v
}

/// Whether Y = V_B(Rad_B(Y)) within the window, with the closure.
pub fn is_algebraic(setting: &Setting, arity: usize, y: &[Point], bound: usize) -> Result<(bool, Vec<Point>)> {
    let cl = closure(setting, arity, y, bound)?;
    Ok((cl == sorted_points(setting, y), cl))
}

/// Generators of ⟨s⟩^A up to `depth` bracketings by the constants and s.
pub fn relative_ideal(s: &LieTerm, constants: usize, depth: usize) -> Vec<LieTerm> {
    let mut all = vec![s.clone()];
    let mut level = vec![s.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for u in &level {
            for i in 0..constants {
                next.push(LieTerm::bracket(u.clone(), LieTerm::Const(i)));
            }
            if u != s {
                next.push(LieTerm::bracket(u.clone(), s.clone()));
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnionOptions {
    pub depth: usize,
    /// Skip the zero-divisor probe.
    pub assume_domain: bool,
}

impl Default for UnionOptions {
    fn default() -> Self {
        UnionOptions { depth: 1, assume_domain: false }
    }
}

/// S = { f1∘f2 : f_i ∈ ⟨s_i⟩^A, s_i ∈ S_i } with relative ideals cut at a depth.
pub fn union(z1: &AlgebraicSet, z2: &AlgebraicSet, opts: UnionOptions) -> Result<EquationSystem> {
    if !z1.setting.same_as(&z2.setting) || z1.arity() != z2.arity() {
        return Err(Error::CarrierMismatch("union of sets in different spaces".into()));
    }
    if !opts.assume_domain {
        if let Some((x, y)) = zero_divisor_probe(&z1.setting, opts.depth)? {
            return Err(Error::NotADomain(z1.setting.render_elem(&x), z1.setting.render_elem(&y)));
        }
    }
    let r = z1.setting.algebra().rank;
    let mut eqs = Vec::new();
    for s1 in z1.system.equations.iter().filter(|s| **s != LieTerm::Zero) {
        let i1 = relative_ideal(s1, r, opts.depth);
        for s2 in z2.system.equations.iter().filter(|s| **s != LieTerm::Zero) {
            for f2 in relative_ideal(s2, r, opts.depth) {
                for f1 in &i1 {
                    eqs.push(LieTerm::bracket(f1.clone(), f2.clone()));
                }
            }
        }
    }
    Ok(EquationSystem::new(z1.system.algebra.clone(), z1.system.variables.clone(), eqs))
}

/// Z1 × Z2 ⊆ B^{n+m}; clashing variable names of Z2 get a suffix.
pub fn product(z1: &AlgebraicSet, z2: &AlgebraicSet) -> Result<AlgebraicSet> {
    if !z1.setting.same_as(&z2.setting) {
        return Err(Error::CarrierMismatch("product of sets over different settings".into()));
    }
    let n = z1.arity();
    let mut vars = z1.system.variables.clone();
    for v in &z2.system.variables {
        let mut name = v.clone();
        while vars.contains(&name) {
            name.push_str("_2");
        }
        vars.push(name);
    }
    let mut eqs = z1.system.equations.clone();
    eqs.extend(z2.system.equations.iter().map(|e| e.reindex(&|i| i + n)));
    let mut points = Vec::with_capacity(z1.len() * z2.len());
    for p in &z1.points {
        for q in &z2.points {
            points.push(p.iter().chain(q).cloned().collect());
        }
    }
    Ok(AlgebraicSet { system: EquationSystem::new(z1.system.algebra.clone(), vars, eqs), setting: z1.setting.clone(), points })
}

/// Algebraic subsets of a finite set Y as bitmasks over Y's points.
struct SubsetLattice {
    closed: Vec<u64>,
    irreducible: Vec<bool>,
}

fn lattice(setting: &Setting, arity: usize, y: &[Point], bound: usize, cap: usize) -> Result<SubsetLattice> {
    let m = y.len();
    if m > cap.min(63) {
        return Err(Error::capacity("points to decompose", m as u128, cap.min(63) as u128));
    }
    let window = PolyWindow::new(setting.algebra(), arity, bound)?;
    setting.require_degree(bound)?;
    let rows: Vec<Echelon> = y.iter().map(|p| point_rows(&window, setting, p)).collect::<Result<_>>()?;
    let close = |span: &Echelon| -> u64 {
        (0..m).filter(|&q| rows[q].is_subspace_of(span)).fold(0u64, |acc, q| acc | 1 << q)
    };
    let empty_span = Echelon::new(setting.prime(), window.len());
    let start = close(&empty_span);
    let mut seen: HashMap<u64, Echelon> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start, empty_span);
    queue.push_back(start);
    while let Some(c) = queue.pop_front() {
        let span = seen[&c].clone();
        for q in (0..m).filter(|q| c & (1 << q) == 0) {
            let ext = span.sum(&rows[q]);
            let cl = close(&ext);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(cl) {
                e.insert(ext);
                queue.push_back(cl);
            }
        }
    }
    let mut closed: Vec<u64> = seen.into_keys().collect();
    closed.sort_unstable();
    // irreducible iff nonempty and not covered by its proper algebraic subsets
    let irreducible = closed
        .iter()
        .map(|&c| {
            c != 0 && closed.iter().filter(|&&d| d != c && d & !c == 0).fold(0u64, |acc, &d| acc | d) != c
        })
        .collect();
    Ok(SubsetLattice { closed, irreducible })
}

fn mask_points(y: &[Point], mask: u64) -> Vec<Point> {
    y.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p.clone()).collect()
}

/// Irreducible components, each sorted, listed in lexicographic order of their point lists.
pub fn decompose(y: &AlgebraicSet, bound: usize, cap: usize) -> Result<Vec<Vec<Point>>> {
    decompose_points(&y.setting, y.arity(), &y.points, bound, cap)
}

pub fn decompose_points(setting: &Setting, arity: usize, y: &[Point], bound: usize, cap: usize) -> Result<Vec<Vec<Point>>> {
    let y = sorted_points(setting, y);
    if y.is_empty() {
        return Ok(Vec::new());
    }
    let lat = lattice(setting, arity, &y, bound, cap)?;
    let irr: Vec<u64> = lat.closed.iter().zip(&lat.irreducible).filter(|(_, &i)| i).map(|(&c, _)| c).collect();
    let full = (0..y.len()).fold(0u64, |a, i| a | 1 << i);
    let mut comps: Vec<Vec<Point>> = irr
        .iter()
        .filter(|&&c| c & !full == 0 && !irr.iter().any(|&d| d != c && c & !d == 0))
        .map(|&c| mask_points(&y, c))
        .collect();
    comps.sort_by(|a, b| {
        for (p, q) in a.iter().zip(b) {
            match setting.point_cmp(p, q) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    });
    Ok(comps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dimension {
    Empty,
    Finite(usize),
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Empty => write!(f, "empty"),
            Dimension::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// Longest chain of irreducible algebraic subsets below a component.
pub fn dimension(y: &AlgebraicSet, bound: usize, cap: usize) -> Result<Dimension> {
    let pts = sorted_points(&y.setting, &y.points);
    if pts.is_empty() {
        return Ok(Dimension::Empty);
    }
    let lat = lattice(&y.setting, y.arity(), &pts, bound, cap)?;
    let irr: Vec<u64> = lat.closed.iter().zip(&lat.irreducible).filter(|(_, &i)| i).map(|(&c, _)| c).collect();
    // heights in order of increasing size
    let mut order = irr.clone();
    order.sort_by_key(|c| c.count_ones());
    let mut height: HashMap<u64, usize> = HashMap::new();
    for &c in &order {
        let h = order
            .iter()
            .filter(|&&d| d != c && d & !c == 0)
            .map(|d| height[d] + 1)
            .max()
            .unwrap_or(0);
        height.insert(c, h);
    }
    Ok(Dimension::Finite(height.values().copied().max().unwrap_or(0)))
}

/// dim Y = rank of M when Γ(Y) = 𝔉_r ⊕ M.
pub fn dimension_from_module(m: &ModulePresentation) -> Result<Dimension> {
    Ok(Dimension::Finite(module_rank(m)?))
}

/// (X, S) with S the radical inside a polynomial window.
#[derive(Clone, Debug)]
pub struct CoPresentation {
    pub algebra: CoeffAlgebra,
    pub variables: Vec<String>,
    pub radical: Radical,
}

impl CoPresentation {
    pub fn system(&self) -> EquationSystem {
        EquationSystem::new(self.algebra.clone(), self.variables.clone(), self.radical.terms())
    }
}

pub fn functor_f(y: &AlgebraicSet, bound: usize) -> Result<CoPresentation> {
    Ok(CoPresentation {
        algebra: y.system.algebra.clone(),
        variables: y.system.variables.clone(),
        radical: y.radical(bound)?,
    })
}

pub fn functor_g(cp: &CoPresentation, setting: &Setting) -> Result<AlgebraicSet> {
    solve(&cp.system(), setting)
}

/// A polynomial map B^n → B^m given by m terms in n variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialMap {
    pub source_arity: usize,
    pub components: Vec<LieTerm>,
}

impl PolynomialMap {
    pub fn new(source_arity: usize, components: Vec<LieTerm>) -> Result<PolynomialMap> {
        if components.iter().any(|c| c.variables().iter().any(|&v| v >= source_arity)) {
            return Err(Error::CarrierMismatch("component uses a variable outside the source".into()));
        }
        Ok(PolynomialMap { source_arity, components })
    }

    pub fn target_arity(&self) -> usize {
        self.components.len()
    }

    pub fn apply(&self, setting: &Setting, p: &[FElem]) -> Result<Point> {
        self.components.iter().map(|c| evaluate(c, p, setting.carrier())).collect()
    }

    /// Whether every point of Z1 lands in Z2.
    pub fn maps_into(&self, z1: &AlgebraicSet, z2: &AlgebraicSet) -> Result<bool> {
        for p in &z1.points {
            if !z2.contains(&self.apply(&z1.setting, p)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// F(ψ) applied to terms on the target: y_i ↦ f_i.
    pub fn pull_back(&self, terms: &[LieTerm]) -> Vec<LieTerm> {
        terms.iter().map(|t| t.substitute(&self.components)).collect()
    }

    /// Whether F(ψ) maps the radical of Z2 into the radical of Z1.
    pub fn respects_radicals(&self, z1: &AlgebraicSet, rad2: &Radical) -> Result<bool> {
        let carrier = z1.setting.carrier();
        for t in self.pull_back(&rad2.terms()) {
            for p in &z1.points {
                if !carrier.is_zero(&evaluate(&t, p, carrier)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Minimal pair (x, y) of nonzero window elements with ⟨x⟩^A ∘ ⟨y⟩^A = 0,
/// the relative ideals cut at `depth`. None is not a proof of domainhood.
pub fn zero_divisor_probe(setting: &Setting, depth: usize) -> Result<Option<(FElem, FElem)>> {
    let c = setting.carrier();
    let consts: Vec<FElem> = (0..setting.algebra().rank).map(|i| c.constant(i)).collect::<Result<_>>()?;
    let nonzero: Vec<&FElem> = setting.elements().iter().filter(|e| !c.is_zero(e)).collect();
    let ideal = |x: &FElem| -> Result<Vec<FElem>> {
        let mut all = vec![x.clone()];
        let mut level = vec![x.clone()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for u in &level {
                for a in consts.iter().chain(std::iter::once(x)) {
                    let v = c.bracket(u, a)?;
                    if !c.is_zero(&v) {
                        next.push(v);
                    }
                }
            }
            all.extend(next.iter().cloned());
            level = next;
        }
        Ok(all)
    };
    let ideals: Vec<Vec<FElem>> = nonzero.iter().map(|x| ideal(x)).collect::<Result<_>>()?;
    for (ix, x) in nonzero.iter().enumerate() {
        'y: for (iy, y) in nonzero.iter().enumerate() {
            if !c.is_zero(&c.bracket(x, y)?) {
                continue;
            }
            for u in &ideals[ix] {
                for v in &ideals[iy] {
                    if !c.is_zero(&c.bracket(u, v)?) {
                        continue 'y;
                    }
                }
            }
            return Ok(Some(((*x).clone(), (*y).clone())));
        }
    }
    Ok(None)
}

/// A finite S0 ⊆ S with V(S0) = V(S), built by the strictly descending greedy chain.
pub fn noetherian_probe(sys: &EquationSystem, setting: &Setting) -> Result<(EquationSystem, Vec<usize>)> {
    check_system(sys, setting)?;
    setting.require_degree(sys.max_degree())?;
    let carrier = setting.carrier();
    let mut current: Vec<Point> = setting.points(sys.arity())?.collect();
    let mut kept = Vec::new();
    for (i, s) in sys.equations.iter().enumerate() {
        let mut next = Vec::with_capacity(current.len());
        for p in &current {
            if carrier.is_zero(&evaluate(s, p, carrier)?) {
                next.push(p.clone());
            }
        }
        if next.len() < current.len() {
            kept.push(i);
            current = next;
        }
    }
    let sub = EquationSystem::new(
        sys.algebra.clone(),
        sys.variables.clone(),
        kept.iter().map(|&i| sys.equations[i].clone()).collect(),
    );
    Ok((sub, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::{FreeCarrier, DEFAULT_BUDGET};
    use crate::freelie::FreeLie;
    use crate::poly::PolyRing;
    use crate::terms::parse_system;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn free_setting(p: u64, window: usize, term_degree: usize) -> Setting {
        let a = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(p));
        Setting::new(a, CarrierSpec::Free { rank: 2 }, window, term_degree, DEFAULT_BUDGET).unwrap()
    }

    fn mb_setting(p: u64, window: usize, term_degree: usize) -> Setting {
        let a = CoeffAlgebra::new(AlgebraKind::Metabelian, 2, FieldSpec::Prime(p));
        Setting::new(a, CarrierSpec::Metabelian { rank: 2 }, window, term_degree, DEFAULT_BUDGET).unwrap()
    }

    fn sys(kind: &str, p: u64, vars: &str, eqs: &[&str]) -> EquationSystem {
        let mut text = format!("algebra {kind} rank=2 field=GF({p})\nvars {vars}\n");
        for e in eqs {
            text.push_str(&format!("eq {e} = 0\n"));
        }
        parse_system(&text).unwrap()
    }

    #[test]
    fn solve_examples() {
        let s = free_setting(2, 3, 3);
        let y = solve(&sys("free", 2, "x", &["x - a1"]), &s).unwrap();
        assert_eq!(y.points, vec![vec![s.carrier().unit(0)]]);
        let all = solve(&sys("free", 2, "x", &["0"]), &s).unwrap();
        assert_eq!(all.len(), s.elements().len());
        assert_eq!(all.len(), 32);
        let empty = solve(&sys("free", 2, "x", &["a1"]), &s).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn centraliser_matches_exact_evaluation() {
        // free window: points with [x,a1] = [x,a2] = 0, checked by exact bracket
        let s = free_setting(2, 3, 2);
        let y = solve(&sys("free", 2, "x", &["[x,a1]", "[x,a2]"]), &s).unwrap();
        let alg = FreeLie::new(2, FieldSpec::Prime(2));
        let exact = FreeCarrier { alg: alg.clone(), constants: 2, trunc: None };
        let mut oracle = Vec::new();
        for e in s.elements() {
            let x = s.carrier().to_free(e, &alg).unwrap();
            let ok = (0..2).all(|i| exact.bracket(&x, &exact.constant(i).unwrap()).unwrap().is_zero());
            if ok {
                oracle.push(vec![e.clone()]);
            }
        }
        assert_eq!(y.points, oracle);
        assert_eq!(y.len(), 1);
        // metabelian window
        let s = mb_setting(2, 3, 2);
        let y = solve(&sys("metabelian", 2, "x", &["[x,a1]", "[x,a2]"]), &s).unwrap();
        assert_eq!(y.points, vec![vec![s.carrier().zero()]]);
    }

    #[test]
    fn settings_reject_bad_input() {
        let a = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Rationals);
        assert!(matches!(Setting::new(a, CarrierSpec::Free { rank: 2 }, 3, 1, 100), Err(Error::InfiniteCarrier(_))));
        let a = CoeffAlgebra::new(AlgebraKind::Metabelian, 2, FieldSpec::Prime(2));
        assert!(matches!(Setting::new(a.clone(), CarrierSpec::Free { rank: 2 }, 3, 1, 100), Err(Error::CarrierMismatch(_))));
        assert!(matches!(Setting::new(a, CarrierSpec::Metabelian { rank: 2 }, 3, 1, 10), Err(Error::CapacityExceeded { .. })));
        let s = free_setting(2, 3, 1);
        let e = solve(&sys("free", 2, "x", &["[x,a1]"]), &s).unwrap_err();
        assert!(matches!(e, Error::CapacityExceeded { .. }));
        let s = free_setting(2, 3, 1);
        assert!(matches!(s.points(5), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn radical_examples() {
        let s = free_setting(2, 2, 2);
        let empty = radical_of_points(&s, 1, &[], 2).unwrap();
        assert_eq!(empty.dim(), empty.window().len());
        let a1 = vec![s.carrier().unit(0)];
        let rad = radical_of_points(&s, 1, std::slice::from_ref(&a1), 2).unwrap();
        let t = sys("free", 2, "x", &["x - a1", "[x,a1]", "[x,a2] - [a1,a2]"]);
        for e in &t.equations {
            assert_eq!(rad.contains_term(e).unwrap(), Some(true));
        }
        assert_eq!(rad.contains_term(&LieTerm::Var(0)).unwrap(), Some(false));
        // brute-force oracle: every combination vanishing at a1
        let w = rad.window();
        let n = w.len();
        let carrier = s.carrier();
        let mut count = 0;
        for code in 0u64..(1 << n) {
            let c: Vec<u64> = (0..n).map(|i| (code >> i) & 1).collect();
            let v = evaluate(&w.combination(&c), &a1, carrier).unwrap();
            if carrier.is_zero(&v) {
                count += 1;
                assert!(rad.kernel().contains(&c));
            }
        }
        assert_eq!(count, 1 << rad.dim());
        assert_eq!(rad.dim(), n - 3); // image of φ_{a1} on the window is span{a1, a2, [a1,a2]}
        assert!(rad.terms().iter().all(|t| carrier.is_zero(&evaluate(t, &a1, carrier).unwrap())));
    }

    #[test]
    fn metabelian_window_coordinates_round_trip() {
        let a = CoeffAlgebra::new(AlgebraKind::Metabelian, 2, FieldSpec::Prime(3));
        let w = PolyWindow::new(&a, 1, 4).unwrap();
        assert_eq!(w.len(), 3 + 3 + 8 + 15);
        for i in 0..w.len() {
            let mut e = vec![0u64; w.len()];
            e[i] = 1;
            assert_eq!(w.coords(&w.term(i)).unwrap(), Some(e));
        }
        let s = sys("metabelian", 3, "x", &["[[x,a1],[a2,x]]", "[a1,[x,a2]]"]);
        assert_eq!(w.coords(&s.equations[0]).unwrap(), Some(vec![0; w.len()]));
        assert!(w.coords(&s.equations[1]).unwrap().is_some());
    }

    #[test]
    fn closure_and_algebraicity() {
        let s = free_setting(2, 3, 3);
        let y = solve(&sys("free", 2, "x", &["[x,a1]"]), &s).unwrap();
        let (alg, cl) = is_algebraic(&s, 1, &y.points, 2).unwrap();
        assert!(alg);
        assert_eq!(cl, y.points);
        // a single non-solution point is contained in its closure
        let p = vec![s.carrier().unit(1)];
        let cl = closure(&s, 1, std::slice::from_ref(&p), 2).unwrap();
        assert!(cl.contains(&p));
    }

    #[test]
    fn union_examples() {
        let s = free_setting(2, 3, 4);
        assert_eq!(zero_divisor_probe(&s, 1).unwrap(), None);
        let z1 = solve(&sys("free", 2, "x", &["x - a1"]), &s).unwrap();
        let z2 = solve(&sys("free", 2, "x", &["x - a2"]), &s).unwrap();
        let u = solve(&union(&z1, &z2, UnionOptions::default()).unwrap(), &s).unwrap();
        let mut expect = z1.points.clone();
        expect.extend(z2.points.clone());
        expect.sort_by(|a, b| s.point_cmp(a, b));
        assert_eq!(u.points, expect);
        let empty = solve(&sys("free", 2, "x", &["a1"]), &s).unwrap();
        let u = solve(&union(&z1, &empty, UnionOptions::default()).unwrap(), &s).unwrap();
        assert_eq!(u.points, z1.points);
        let u = solve(&union(&z1, &z1, UnionOptions::default()).unwrap(), &s).unwrap();
        assert_eq!(u.points, z1.points);
        // metabelian windows have zero divisors
        let m = mb_setting(2, 3, 4);
        let z = solve(&sys("metabelian", 2, "x", &["x - a1"]), &m).unwrap();
        assert!(matches!(union(&z, &z, UnionOptions::default()), Err(Error::NotADomain(..))));
    }

    #[test]
    fn product_examples() {
        let s = free_setting(2, 2, 1);
        let z1 = solve(&sys("free", 2, "x", &["x - a1"]), &s).unwrap();
        let z2 = solve(&sys("free", 2, "x", &["x - a2"]), &s).unwrap();
        let p = product(&z1, &z2).unwrap();
        assert_eq!(p.points, vec![vec![s.carrier().unit(0), s.carrier().unit(1)]]);
        assert_eq!(p.system.variables, vec!["x", "x_2"]);
        assert_eq!(solve(&p.system, &s).unwrap().points, p.points);
        let whole = solve(&sys("free", 2, "y", &["0"]), &s).unwrap();
        let cyl = product(&z1, &whole).unwrap();
        assert_eq!(cyl.len(), s.elements().len());
        assert_eq!(solve(&cyl.system, &s).unwrap().points, cyl.points);
        let two = AlgebraicSet { points: s.elements()[1..3].iter().map(|e| vec![e.clone()]).collect(), ..whole.clone() };
        let three = AlgebraicSet { points: s.elements()[2..5].iter().map(|e| vec![e.clone()]).collect(), ..whole };
        assert_eq!(product(&two, &three).unwrap().len(), 6);
    }

    #[test]
    fn decomposition_examples() {
        let s = free_setting(2, 3, 4);
        let z1 = solve(&sys("free", 2, "x", &["x - a1"]), &s).unwrap();
        assert_eq!(decompose(&z1, 2, DEFAULT_DECOMPOSE_CAP).unwrap(), vec![z1.points.clone()]);
        let two = solve(&union(&z1, &solve(&sys("free", 2, "x", &["x - a2"]), &s).unwrap(), UnionOptions::default()).unwrap(), &s)
            .unwrap();
        let comps = decompose(&two, 2, DEFAULT_DECOMPOSE_CAP).unwrap();
        assert_eq!(comps, vec![vec![two.points[0].clone()], vec![two.points[1].clone()]]);
        assert_eq!(dimension(&two, 2, DEFAULT_DECOMPOSE_CAP).unwrap(), Dimension::Finite(0));
        let big = solve(&sys("free", 2, "x", &["0"]), &s).unwrap();
        assert!(matches!(decompose(&big, 2, DEFAULT_DECOMPOSE_CAP), Err(Error::CapacityExceeded { .. })));
        let none = solve(&sys("free", 2, "x", &["a1"]), &s).unwrap();
        assert_eq!(dimension(&none, 2, 12).unwrap(), Dimension::Empty);
    }

    #[test]
    fn line_decomposes_into_points() {
        // lin{a1} over GF(3): every subset is algebraic, so components are points
        let s = free_setting(3, 2, 2);
        let y = solve(&sys("free", 3, "x", &["[x,a1]"]), &s).unwrap();
        assert_eq!(y.len(), 3);
        let comps = decompose(&y, 2, 12).unwrap();
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn module_dimension() {
        let ring = PolyRing::numbered("x", 2, crate::field::BaseField::Prime(2));
        for s in 0..4 {
            assert_eq!(dimension_from_module(&ModulePresentation::free(&ring, s)).unwrap(), Dimension::Finite(s));
        }
    }

    #[test]
    fn functors_are_inverse() {
        let s = free_setting(2, 2, 3);
        for eqs in [vec!["x - a1"], vec!["[x,a1]"], vec!["0"], vec!["a1"], vec!["[x,[a1,a2]]"]] {
            let y = solve(&sys("free", 2, "x", &eqs), &s).unwrap();
            let bound = y.system.max_degree().max(2);
            let cp = functor_f(&y, bound).unwrap();
            let back = functor_g(&cp, &s).unwrap();
            assert_eq!(back.points, y.points, "{eqs:?}");
            assert!(functor_f(&back, bound).unwrap().radical.same_as(&cp.radical));
        }
    }

    #[test]
    fn morphism_transport() {
        let s = free_setting(2, 2, 2);
        let z1 = solve(&sys("free", 2, "x", &["[x,a1]"]), &s).unwrap();
        let z2 = solve(&sys("free", 2, "x", &["[x,a1]"]), &s).unwrap();
        // x ↦ [x,a2] sends the line lin{a1} into... its image {0, [a1,a2]}
        let psi = PolynomialMap::new(1, vec![LieTerm::bracket(LieTerm::Var(0), LieTerm::Const(1))]).unwrap();
        assert!(!psi.maps_into(&z1, &z2).unwrap());
        let id = PolynomialMap::new(1, vec![LieTerm::Var(0)]).unwrap();
        assert!(id.maps_into(&z1, &z2).unwrap());
        assert!(id.respects_radicals(&z1, &z2.radical(2).unwrap()).unwrap());
        let zero = PolynomialMap::new(1, vec![LieTerm::Zero]).unwrap();
        assert!(zero.maps_into(&z1, &z2).unwrap());
        assert!(zero.respects_radicals(&z1, &z2.radical(2).unwrap()).unwrap());
    }

    #[test]
    fn zero_divisor_examples() {
        let m = mb_setting(2, 2, 6);
        let (x, y) = zero_divisor_probe(&m, 1).unwrap().unwrap();
        assert_eq!(m.carrier().in_fitting(&x), Some(true));
        assert!(!m.carrier().is_zero(&y));
        // nilpotent class 2: with A = 0 the relative ideal of x is k·x
        let a = CoeffAlgebra::new(AlgebraKind::Zero, 0, FieldSpec::Prime(2));
        let n = Setting::new(a, CarrierSpec::NonQwComp { pairs: 1 }, 2, 1, 100).unwrap();
        let (x, y) = zero_divisor_probe(&n, 1).unwrap().unwrap();
        assert!(n.carrier().is_zero(&n.carrier().bracket(&x, &y).unwrap()));
    }

    #[test]
    fn free_window_of_degree_four_is_a_domain() {
        let s = free_setting(2, 4, 3);
        assert_eq!(zero_divisor_probe(&s, 1).unwrap(), None);
    }

    #[test]
    fn noetherian_examples() {
        let s = free_setting(2, 3, 4);
        let dup = sys("free", 2, "x", &["[x,a1]", "[x,a1]", "[x,a1]"]);
        assert_eq!(noetherian_probe(&dup, &s).unwrap().1, vec![0]);
        let mult = sys("free", 2, "x", &["[x,a1]", "[[x,a1],a2]", "[[x,a1],a1]", "[a2,[x,a1]]"]);
        assert_eq!(noetherian_probe(&mult, &s).unwrap().1, vec![0]);
        // a sampled family: |S0| bounded by the window dimension
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut family = Vec::new();
        let atoms = ["x", "a1", "a2", "[x,a1]", "[x,a2]", "[a1,a2]"];
        for _ in 0..100 {
            let u = atoms.choose(&mut rng).unwrap();
            let v = atoms.choose(&mut rng).unwrap();
            family.push(if rng.gen_bool(0.5) { format!("[{u},{v}]") } else { format!("{u} + {v}") });
        }
        let refs: Vec<&str> = family.iter().map(String::as_str).collect();
        let big = sys("free", 2, "x", &refs);
        let (sub, kept) = noetherian_probe(&big, &s).unwrap();
        assert!(kept.len() <= 5);
        assert_eq!(solve(&sub, &s).unwrap().points, solve(&big, &s).unwrap().points);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn radical_laws(seed in any::<u64>()) {
            let s = mb_setting(2, 3, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Point> = s.elements().iter().map(|e| vec![e.clone()]).collect();
            let pick = |rng: &mut ChaCha8Rng| -> Vec<Point> {
                pts.iter().filter(|_| rng.gen_bool(0.2)).cloned().collect()
            };
            let (y1, y2) = (pick(&mut rng), pick(&mut rng));
            let r1 = radical_of_points(&s, 1, &y1, 3).unwrap();
            let r2 = radical_of_points(&s, 1, &y2, 3).unwrap();
            let both: Vec<Point> = y1.iter().chain(&y2).cloned().collect();
            let ru = radical_of_points(&s, 1, &both, 3).unwrap();
            prop_assert!(ru.same_as(&r1.intersect(&r2)));
            prop_assert!(r1.contains(&ru));
            let v = zero_set(&r1, &s).unwrap();
            prop_assert!(radical_of_points(&s, 1, &v, 3).unwrap().same_as(&r1));
        }
    }
}
