//! Universal sentences and quasi-identities on finite windows, the Φ axiom
//! suite, radical saturation by quasi-identities, discrimination and
//! geometric-equivalence probes.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::carrier::{FElem, FiniteAlgebra, FitInfo, LieCarrier};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::geometry::{radical_of_points, solve, Point, PolyWindow, Radical, Setting};
use crate::linalg::Echelon;
use crate::poly::Poly;
use crate::terms::{evaluate, EquationSystem, LieTerm};

/// A conjunction of equations and disequations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub eqs: Vec<LieTerm>,
    pub neqs: Vec<LieTerm>,
}

/// ∀x̄ ⋁ (⋀ u = 0 ∧ ⋀ w ≠ 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalSentence {
    pub arity: usize,
    pub disjuncts: Vec<Disjunct>,
}

/// ∀x̄ (⋀ r_i = 0 → s = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIdentity {
    pub arity: usize,
    pub premises: Vec<LieTerm>,
    pub conclusion: LieTerm,
}

impl QuasiIdentity {
    pub fn new(arity: usize, premises: Vec<LieTerm>, conclusion: LieTerm) -> QuasiIdentity {
        QuasiIdentity { arity, premises, conclusion }
    }

    pub fn to_universal(&self) -> UniversalSentence {
        let mut disjuncts: Vec<Disjunct> =
            self.premises.iter().map(|r| Disjunct { eqs: vec![], neqs: vec![r.clone()] }).collect();
        disjuncts.push(Disjunct { eqs: vec![self.conclusion.clone()], neqs: vec![] });
        UniversalSentence { arity: self.arity, disjuncts }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sentence {
    Universal(UniversalSentence),
    Quasi(QuasiIdentity),
}

impl Sentence {
    pub fn arity(&self) -> usize {
        match self {
            Sentence::Universal(u) => u.arity,
            Sentence::Quasi(q) => q.arity,
        }
    }

    pub fn to_universal(&self) -> UniversalSentence {
        match self {
            Sentence::Universal(u) => u.clone(),
            Sentence::Quasi(q) => q.to_universal(),
        }
    }

    /// The identity ⋀ t = 0 if the sentence is one.
    fn identity_terms(&self) -> Option<Vec<&LieTerm>> {
        match self {
            Sentence::Universal(u) if u.disjuncts.len() == 1 && u.disjuncts[0].neqs.is_empty() => {
                Some(u.disjuncts[0].eqs.iter().collect())
            }
            Sentence::Quasi(q) if q.premises.is_empty() => Some(vec![&q.conclusion]),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let names = var_names(self.arity());
        let prefix = format!("forall {}:", names.join(","));
        let conj = |ts: &[LieTerm], op: &str| -> Vec<String> { ts.iter().map(|t| format!("{} {op} 0", t.render(&names))).collect() };
        match self {
            Sentence::Quasi(q) => {
                let prem = conj(&q.premises, "=");
                let concl = format!("{} = 0", q.conclusion.render(&names));
                if prem.is_empty() {
                    format!("{prefix} {concl}")
                } else {
                    format!("{prefix} {} -> {concl}", prem.join(" & "))
                }
            }
            Sentence::Universal(u) => {
                let ds: Vec<String> = u
                    .disjuncts
                    .iter()
                    .map(|d| {
                        let mut parts = conj(&d.eqs, "=");
                        parts.extend(conj(&d.neqs, "!="));
                        if parts.len() == 1 {
                            parts.pop().unwrap()
                        } else {
                            format!("({})", parts.join(" & "))
                        }
                    })
                    .collect();
                format!("{prefix} {}", ds.join(" | "))
            }
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// A carrier whose constants are reinterpreted.
pub struct Interpretation<'a> {
    pub carrier: &'a FiniteAlgebra,
    pub constants: Vec<FElem>,
}

impl LieCarrier for Interpretation<'_> {
    type Elem = FElem;
    fn zero(&self) -> FElem {
        self.carrier.zero()
    }
    fn add(&self, a: &FElem, b: &FElem) -> FElem {
        self.carrier.add(a, b)
    }
    fn neg(&self, a: &FElem) -> FElem {
        self.carrier.neg(a)
    }
    fn scale(&self, c: &Scalar, a: &FElem) -> Result<FElem> {
        self.carrier.scale(c, a)
    }
    fn bracket(&self, a: &FElem, b: &FElem) -> Result<FElem> {
        self.carrier.bracket(a, b)
    }
    fn constant(&self, i: usize) -> Result<FElem> {
        self.constants
            .get(i)
            .cloned()
            .ok_or_else(|| Error::CarrierMismatch(format!("constant a{} is not interpreted", i + 1)))
    }
    fn constant_count(&self) -> usize {
        self.constants.len()
    }
    fn is_zero(&self, a: &FElem) -> bool {
        self.carrier.is_zero(a)
    }
    fn render(&self, a: &FElem) -> String {
        self.carrier.render(a)
    }
}

fn interpretation<'a>(setting: &'a Setting, constants: Option<&[FElem]>) -> Result<Interpretation<'a>> {
    let c = setting.carrier();
    let constants = match constants {
        Some(cs) => cs.to_vec(),
        None => (0..c.constant_count()).map(|i| c.constant(i)).collect::<Result<_>>()?,
    };
    Ok(Interpretation { carrier: c, constants })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// The least falsifying assignment in window order.
    pub witness: Option<Point>,
    pub checked: u128,
    pub method: String,
}

fn holds_at<C: LieCarrier>(u: &UniversalSentence, p: &[C::Elem], c: &C) -> Result<bool> {
    'd: for d in &u.disjuncts {
        for e in &d.eqs {
            if !c.is_zero(&evaluate(e, p, c)?) {
                continue 'd;
            }
        }
        for e in &d.neqs {
            if c.is_zero(&evaluate(e, p, c)?) {
                continue 'd;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

fn exhaustive(u: &UniversalSentence, setting: &Setting, interp: &Interpretation) -> Result<Verdict> {
    let mut checked = 0u128;
    for p in setting.points(u.arity)? {
        checked += 1;
        if !holds_at(u, &p, interp)? {
            return Ok(Verdict { holds: false, witness: Some(p), checked, method: "exhaustive".into() });
        }
    }
    Ok(Verdict { holds: true, witness: None, checked, method: "exhaustive".into() })
}

/// Truth of a sentence on the window, quantifiers ranging over window
/// elements. `constants` overrides the carrier's designated constants.
pub fn check_sentence(s: &Sentence, setting: &Setting, constants: Option<&[FElem]>) -> Result<Verdict> {
    let interp = interpretation(setting, constants)?;
    let u = s.to_universal();
    let n = s.arity();
    // multilinear identities are decided on basis tuples of the window subspace
    if let Some(ts) = s.identity_terms() {
        let all: std::collections::BTreeSet<usize> = (0..n).collect();
        if n > 0 && ts.iter().all(|t| !t.has_constants() && t.multilinear_vars().as_ref() == Some(&all)) {
            let c = setting.carrier();
            let basis: Vec<FElem> = c.window_basis(setting.window()).into_iter().map(|i| c.unit(i)).collect();
            let count = (basis.len() as u128).saturating_pow(n as u32);
            if count <= setting.budget() as u128 {
                let mut idx = vec![0usize; n];
                let mut checked = 0u128;
                let mut failed = None;
                if !basis.is_empty() {
                    loop {
                        let p: Point = idx.iter().map(|&i| basis[i].clone()).collect();
                        checked += 1;
                        if !holds_at(&u, &p, &interp)? {
                            failed = Some(p);
                            break;
                        }
                        let mut k = n;
                        let mut done = true;
                        while k > 0 {
                            k -= 1;
                            idx[k] += 1;
                            if idx[k] < basis.len() {
                                done = false;
                                break;
                            }
                            idx[k] = 0;
                        }
                        if done {
                            break;
                        }
                    }
                }
                return match failed {
                    None => Ok(Verdict { holds: true, witness: None, checked, method: "multilinear basis check".into() }),
                    Some(p) => match exhaustive(&u, setting, &interp) {
                        Ok(v) => Ok(v),
                        Err(Error::CapacityExceeded { .. }) => Ok(Verdict {
                            holds: false,
                            witness: Some(p),
                            checked,
                            method: "multilinear basis check (basis witness, not minimal)".into(),
                        }),
                        Err(e) => Err(e),
                    },
                };
            }
        }
    }
    exhaustive(&u, setting, &interp)
}

fn bracket(l: LieTerm, r: LieTerm) -> LieTerm {
    LieTerm::bracket(l, r)
}

fn v(i: usize) -> LieTerm {
    LieTerm::Var(i)
}

/// (x1 x2)(x3 x4) = 0.
pub fn phi1() -> Sentence {
    Sentence::Quasi(QuasiIdentity::new(4, vec![], bracket(bracket(v(0), v(1)), bracket(v(2), v(3)))))
}

/// xyx = 0 ∧ xyy = 0 → xy = 0.
pub fn phi2() -> Sentence {
    let xy = bracket(v(0), v(1));
    Sentence::Quasi(QuasiIdentity::new(2, vec![bracket(xy.clone(), v(0)), bracket(xy.clone(), v(1))], xy))
}

/// x ≠ 0 ∧ xy = 0 ∧ xz = 0 → yz = 0.
pub fn phi3() -> Sentence {
    Sentence::Universal(UniversalSentence {
        arity: 3,
        disjuncts: vec![
            Disjunct { eqs: vec![v(0)], neqs: vec![] },
            Disjunct { eqs: vec![], neqs: vec![bracket(v(0), v(1))] },
            Disjunct { eqs: vec![], neqs: vec![bracket(v(0), v(2))] },
            Disjunct { eqs: vec![bracket(v(1), v(2))], neqs: vec![] },
        ],
    })
}

/// Lie transcription of z·f(a_1..a_r) for the module action on brackets.
pub fn module_action(z: &LieTerm, f: &Poly) -> LieTerm {
    let mut items = Vec::new();
    for (m, c) in f.terms() {
        let mut t = z.clone();
        for (k, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                t = bracket(t, LieTerm::Const(k));
            }
        }
        items.push(if c.is_one() { t } else { LieTerm::scaled(Scalar::Base(c.clone()), t) });
    }
    match items.len() {
        0 => LieTerm::Zero,
        1 => items.pop().unwrap(),
        _ => LieTerm::Sum(items),
    }
}

/// z1 z2 · f(a_1, …, a_r) = 0 → z1 z2 = 0.
pub fn phi5_prime(f: &Poly) -> Sentence {
    let z = bracket(v(0), v(1));
    Sentence::Quasi(QuasiIdentity::new(2, vec![module_action(&z, f)], z))
}

/// Fit(x) ≡ ∀y xyx = 0, with y ranging over the window.
pub fn fit_formula(setting: &Setting, x: &FElem) -> Result<bool> {
    let c = setting.carrier();
    for y in setting.elements() {
        if !c.is_zero(&c.bracket(&c.bracket(x, y)?, x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fit′(x) ≡ ⋀_i x a_i x = 0.
pub fn fit_prime_formula(setting: &Setting, x: &FElem) -> Result<bool> {
    let c = setting.carrier();
    for i in 0..c.constant_count() {
        let a = c.constant(i)?;
        if !c.is_zero(&c.bracket(&c.bracket(x, &a)?, x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Φ3 with centralisers: only y, z commuting with x can falsify it.
fn check_phi3(setting: &Setting) -> Result<Verdict> {
    let c = setting.carrier();
    let w = setting.elements();
    let mut checked = 0u128;
    for x in w.iter().filter(|x| !c.is_zero(x)) {
        let mut cent = Vec::new();
        for y in w {
            if c.is_zero(&c.bracket(x, y)?) {
                cent.push(y);
            }
        }
        for y in &cent {
            for z in &cent {
                checked += 1;
                if !c.is_zero(&c.bracket(y, z)?) {
                    return Ok(Verdict {
                        holds: false,
                        witness: Some(vec![x.clone(), (*y).clone(), (*z).clone()]),
                        checked,
                        method: "centraliser pruning".into(),
                    });
                }
            }
        }
    }
    Ok(Verdict { holds: true, witness: None, checked, method: "centraliser pruning".into() })
}

fn combos(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    loop {
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            cur[k] += 1;
            if cur[k] == p {
                cur[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
        out.push(cur.clone());
    }
}

/// Φ4 for r: no r+1 elements whose nonzero combinations all lie outside Fit.
pub fn check_phi4(setting: &Setting, r: usize, force_slow: bool) -> Result<Verdict> {
    let c = setting.carrier();
    let n = r + 1;
    let p = c.modulus();
    let alphas = combos(p, n);
    let combine = |xs: &[&FElem], a: &[u64]| -> FElem {
        let mut acc = c.zero();
        for (x, &k) in xs.iter().zip(a) {
            if k != 0 {
                c.add_scaled(&mut acc, k, x);
            }
        }
        acc
    };
    let search = |pool: &[FElem], is_fit: &dyn Fn(&FElem) -> bool, method: &str| -> Result<Verdict> {
        let count = (pool.len() as u128).saturating_pow(n as u32);
        if count > setting.budget() as u128 {
            return Err(Error::capacity(format!("Φ4 assignments over {n} variables"), count, setting.budget() as u128));
        }
        let mut idx = vec![0usize; n];
        let mut checked = 0u128;
        if pool.is_empty() {
            return Ok(Verdict { holds: true, witness: None, checked, method: method.into() });
        }
        loop {
            let xs: Vec<&FElem> = idx.iter().map(|&i| &pool[i]).collect();
            checked += 1;
            if alphas.iter().all(|a| !is_fit(&combine(&xs, a))) {
                return Ok(Verdict {
                    holds: false,
                    witness: Some(xs.into_iter().cloned().collect()),
                    checked,
                    method: method.into(),
                });
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(Verdict { holds: true, witness: None, checked, method: method.into() });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < pool.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    };
    match c.fit_info() {
        FitInfo::Kernel(_) if !force_slow => {
            // φ only sees linear parts; degree ≤ 1 elements represent every class
            let pool: Vec<FElem> = setting.elements().iter().filter(|e| c.degree(e) <= 1).cloned().collect();
            search(&pool, &|e: &FElem| c.in_fitting(e) == Some(true), "linear parts")
        }
        _ => {
            let w = setting.elements();
            let index: HashMap<&FElem, usize> = w.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let fit: Vec<bool> = w.iter().map(|x| fit_formula(setting, x)).collect::<Result<_>>()?;
            let lookup = |e: &FElem| -> bool { index.get(e).map(|&i| fit[i]).unwrap_or(false) };
            search(w, &lookup, "exhaustive with Fit(x) evaluated on the window")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomId {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
    Phi5Prime(String),
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomId::Phi1 => write!(f, "Phi1"),
            AxiomId::Phi2 => write!(f, "Phi2"),
            AxiomId::Phi3 => write!(f, "Phi3"),
            AxiomId::Phi4 => write!(f, "Phi4"),
            AxiomId::Phi5Prime(p) => write!(f, "Phi5'[{p}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub id: AxiomId,
    pub sentence: String,
    pub verdict: Verdict,
    pub proviso: Option<String>,
}

/// Φ1–Φ4 and Φ′5 for each polynomial.
pub fn phi_suite(setting: &Setting, r: usize, polys: &[Poly]) -> Result<Vec<AxiomVerdict>> {
    if !setting.algebra().field.is_finite() {
        return Err(Error::InfiniteFieldUnsupported("Φ4 needs a finite field".into()));
    }
    setting.require_degree(4)?;
    let mut out = Vec::new();
    for (id, s) in [(AxiomId::Phi1, phi1()), (AxiomId::Phi2, phi2())] {
        out.push(AxiomVerdict { id, sentence: s.render(), verdict: check_sentence(&s, setting, None)?, proviso: None });
    }
    out.push(AxiomVerdict { id: AxiomId::Phi3, sentence: phi3().render(), verdict: check_phi3(setting)?, proviso: None });
    let v4 = check_phi4(setting, r, false)?;
    let first_three = out.iter().all(|a| a.verdict.holds);
    let all_fit = setting.elements().iter().all(|x| fit_formula(setting, x).unwrap_or(false));
    let proviso = if all_fit {
        Some("vacuous: every window element satisfies Fit, so phi never holds".to_string())
    } else if !first_three {
        Some("Phi1-Phi3 fail here; Phi4 bounds dim B/Fit(B) only under them".to_string())
    } else {
        None
    };
    let names = var_names(r + 1).join(",");
    out.push(AxiomVerdict { id: AxiomId::Phi4, sentence: format!("forall {names}: not phi({names})"), verdict: v4, proviso });
    for f in polys {
        if f.is_zero() {
            return Err(Error::Unsupported("Phi5' needs a nonzero polynomial".into()));
        }
        if f.ring().arity() > setting.carrier().constant_count() {
            return Err(Error::CarrierMismatch(format!("Phi5' for {f} needs {} constants", f.ring().arity())));
        }
        let s = phi5_prime(f);
        setting.require_degree(2 + f.total_degree().unwrap_or(0) as usize)?;
        out.push(AxiomVerdict {
            id: AxiomId::Phi5Prime(f.to_string()),
            sentence: s.render(),
            verdict: check_sentence(&s, setting, None)?,
            proviso: None,
        });
    }
    Ok(out)
}

/// Bracket table of a polynomial window against its generators.
struct WindowAlgebra {
    window: Arc<PolyWindow>,
    letters: Vec<usize>,
    table: Vec<Vec<Option<Vec<u64>>>>,
    p: u64,
}

impl WindowAlgebra {
    fn new(window: Arc<PolyWindow>, p: u64) -> Result<WindowAlgebra> {
        let letters = window.letters();
        let mut table = Vec::with_capacity(window.len());
        for i in 0..window.len() {
            let mut row = Vec::with_capacity(letters.len());
            for &g in &letters {
                row.push(window.coords(&LieTerm::bracket(window.term(i), window.term(g)))?);
            }
            table.push(row);
        }
        Ok(WindowAlgebra { window, letters, table, p })
    }

    /// Closes a span under bracketing with generators, inside the window.
    fn ideal_closure(&self, e: &mut Echelon) {
        let mut frontier = e.basis();
        while let Some(v) = frontier.pop() {
            'g: for gi in 0..self.letters.len() {
                let mut out = vec![0u64; self.window.len()];
                for (i, &c) in v.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let Some(b) = &self.table[i][gi] else { continue 'g };
                    for (o, &x) in out.iter_mut().zip(b) {
                        *o = (*o + c * x) % self.p;
                    }
                }
                if e.insert(out.clone()) {
                    frontier.push(out);
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub ideal: Radical,
    /// Number of R_i → R_{i+1} steps that changed the ideal.
    pub steps: usize,
}

/// The chain R_0 = id⟨S⟩, R_{i+1} = id⟨R_i ∪ T_i⟩ inside a polynomial window.
/// Quasi-identities in the system's own variables are instantiated at x̄;
/// further substitutions can be supplied in `instances`.
pub fn saturate_radical(
    sys: &EquationSystem,
    corpus: &[QuasiIdentity],
    instances: &[Vec<LieTerm>],
    bound: usize,
) -> Result<Saturation> {
    let p = match &sys.algebra.field {
        crate::field::FieldSpec::Prime(p) => *p,
        f => return Err(Error::InfiniteFieldUnsupported(format!("saturation over {f}"))),
    };
    let window = Arc::new(PolyWindow::new(&sys.algebra, sys.arity(), bound)?);
    let wa = WindowAlgebra::new(window.clone(), p)?;
    let mut ideal = Echelon::new(p, window.len());
    for s in &sys.equations {
        match window.coords(s)? {
            Some(c) => {
                ideal.insert(c);
            }
            None => return Err(Error::WindowTooSmall(format!("equation of degree {} above bound {bound}", s.degree()))),
        }
    }
    wa.ideal_closure(&mut ideal);
    let identity: Vec<LieTerm> = (0..sys.arity()).map(LieTerm::Var).collect();
    let mut subs: Vec<&Vec<LieTerm>> = instances.iter().collect();
    subs.push(&identity);
    // instantiated quasi-identities in window coordinates
    let mut inst: Vec<(Vec<Vec<u64>>, Vec<u64>)> = Vec::new();
    for q in corpus {
        for sub in &subs {
            if sub.len() != q.arity {
                continue;
            }
            let prem: Option<Vec<Vec<u64>>> =
                q.premises.iter().map(|r| window.coords(&r.substitute(sub))).collect::<Result<_>>()?;
            let concl = window.coords(&q.conclusion.substitute(sub))?;
            if let (Some(prem), Some(concl)) = (prem, concl) {
                inst.push((prem, concl));
            }
        }
    }
    let mut steps = 0;
    loop {
        let before = ideal.dim();
        let fired: Vec<Vec<u64>> = inst
            .iter()
            .filter(|(prem, concl)| prem.iter().all(|r| ideal.contains(r)) && !ideal.contains(concl))
            .map(|(_, c)| c.clone())
            .collect();
        for c in fired {
            ideal.insert(c);
        }
        wa.ideal_closure(&mut ideal);
        if ideal.dim() == before {
            break;
        }
        steps += 1;
    }
    Ok(Saturation { ideal: Radical::from_parts(window, ideal)?, steps })
}

/// Quasi-identities valid on the window with up to `max_premises` premises
/// from the polynomial window of degree ≤ bound (up to scalars). Validity is
/// checked point by point; conclusions are reduced to a basis per premise set.
pub fn valid_quasi_identities(setting: &Setting, arity: usize, bound: usize, max_premises: usize) -> Result<Vec<QuasiIdentity>> {
    let window = PolyWindow::new(setting.algebra(), arity, bound)?;
    setting.require_degree(bound)?;
    let c = setting.carrier();
    let p = c.modulus();
    let n = window.len();
    let count = (p as u128).saturating_pow(n as u32);
    if count > setting.budget() as u128 {
        return Err(Error::capacity("polynomial window elements", count, setting.budget() as u128));
    }
    let values: Vec<Vec<FElem>> = setting.points(arity)?.map(|pt| window.evaluate(c, &pt)).collect::<Result<_>>()?;
    let value_at = |v: &[u64], k: usize| -> FElem {
        let mut acc = c.zero();
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                c.add_scaled(&mut acc, x, &values[k][i]);
            }
        }
        acc
    };
    // projective representatives: first nonzero coordinate 1
    let reps: Vec<Vec<u64>> = combos(p, n).into_iter().filter(|v| v.iter().find(|&&x| x != 0) == Some(&1)).collect();
    let zero_sets: Vec<Vec<bool>> =
        reps.iter().map(|v| (0..values.len()).map(|k| c.is_zero(&value_at(v, k))).collect()).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        chosen: &mut Vec<usize>,
        max: usize,
        reps: &[Vec<u64>],
        zero_sets: &[Vec<bool>],
        window: &PolyWindow,
        out: &mut Vec<QuasiIdentity>,
        arity: usize,
        p: u64,
    ) {
        if !chosen.is_empty() {
            let sat: Vec<usize> =
                (0..zero_sets[0].len()).filter(|&k| chosen.iter().all(|&i| zero_sets[i][k])).collect();
            let mut basis = Echelon::new(p, reps[0].len());
            for &i in chosen.iter() {
                basis.insert(reps[i].clone());
            }
            for (j, rep) in reps.iter().enumerate() {
                if sat.iter().all(|&k| zero_sets[j][k]) && basis.insert(rep.clone()) {
                    out.push(QuasiIdentity::new(
                        arity,
                        chosen.iter().map(|&i| window.combination(&reps[i])).collect(),
                        window.combination(rep),
                    ));
                }
            }
        }
        if chosen.len() == max {
            return;
        }
        for i in start..reps.len() {
            chosen.push(i);
            rec(i + 1, chosen, max, reps, zero_sets, window, out, arity, p);
            chosen.pop();
        }
    }
    rec(0, &mut chosen, max_premises, &reps, &zero_sets, &window, &mut out, arity, p);
    Ok(out)
}

/// First assignment in W^n killing every relation and no target.
pub fn discriminates(relations: &EquationSystem, setting: &Setting, targets: &[LieTerm]) -> Result<Option<Point>> {
    let c = setting.carrier();
    setting.require_degree(relations.max_degree().max(targets.iter().map(LieTerm::degree).max().unwrap_or(0)))?;
    'p: for pt in setting.points(relations.arity())? {
        for r in &relations.equations {
            if !c.is_zero(&evaluate(r, &pt, c)?) {
                continue 'p;
            }
        }
        for t in targets {
            if c.is_zero(&evaluate(t, &pt, c)?) {
                continue 'p;
            }
        }
        return Ok(Some(pt));
    }
    Ok(None)
}

/// A-homomorphisms from the presented algebra to B with images in the window.
pub fn count_homomorphisms(relations: &EquationSystem, setting: &Setting) -> Result<u128> {
    let c = setting.carrier();
    setting.require_degree(relations.max_degree())?;
    let mut n = 0u128;
    'p: for pt in setting.points(relations.arity())? {
        for r in &relations.equations {
            if !c.is_zero(&evaluate(r, &pt, c)?) {
                continue 'p;
            }
        }
        n += 1;
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeoEquivVerdict {
    pub equivalent: bool,
    /// Index of the first system whose radicals differ.
    pub first_divergence: Option<usize>,
    pub compared: usize,
}

/// Compares Rad_B(S) and Rad_C(S) inside a polynomial window over a corpus.
pub fn geo_equiv_probe(b: &Setting, c: &Setting, corpus: &[EquationSystem], bound: usize) -> Result<GeoEquivVerdict> {
    if b.algebra() != c.algebra() {
        return Err(Error::AlgebraMismatch("geometric equivalence needs a shared coefficient algebra".into()));
    }
    for (i, s) in corpus.iter().enumerate() {
        let yb = solve(s, b)?;
        let yc = solve(s, c)?;
        let rb = radical_of_points(b, s.arity(), &yb.points, bound)?;
        let rc = radical_of_points(c, s.arity(), &yc.points, bound)?;
        if !rb.same_as(&rc) {
            return Ok(GeoEquivVerdict { equivalent: false, first_divergence: Some(i), compared: i + 1 });
        }
    }
    Ok(GeoEquivVerdict { equivalent: true, first_divergence: None, compared: corpus.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::{CarrierSpec, DEFAULT_BUDGET};
    use crate::field::{BaseField, FieldSpec};
    use crate::geometry::{radical_of_points, solve};
    use crate::poly::PolyRing;
    use crate::terms::{parse_system, AlgebraKind, CoeffAlgebra};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mb(p: u64, d: usize) -> Setting {
        let a = CoeffAlgebra::new(AlgebraKind::Metabelian, 2, FieldSpec::Prime(p));
        Setting::new(a, CarrierSpec::Metabelian { rank: 2 }, d, 4, DEFAULT_BUDGET).unwrap()
    }

    fn zero_alg(p: u64) -> CoeffAlgebra {
        CoeffAlgebra::new(AlgebraKind::Zero, 0, FieldSpec::Prime(p))
    }

    fn nonqw(pairs: usize) -> Setting {
        Setting::new(zero_alg(2), CarrierSpec::NonQwComp { pairs }, 2, 2, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn phi_suite_on_metabelian_windows() {
        let ring = PolyRing::numbered("x", 2, BaseField::Prime(2));
        let polys = vec![Poly::parse(&ring, "x1").unwrap(), Poly::parse(&ring, "x1 + x2").unwrap()];
        let s = mb(2, 3);
        let suite = phi_suite(&s, 2, &polys).unwrap();
        assert_eq!(suite.len(), 6);
        for a in &suite {
            assert!(a.verdict.holds, "{} fails: {:?}", a.id, a.verdict.witness);
            assert!(a.proviso.is_none());
        }
        let s3 = mb(3, 3);
        for a in phi_suite(&s3, 2, &[]).unwrap() {
            assert!(a.verdict.holds, "{} fails over GF(3)", a.id);
        }
    }

    #[test]
    fn phi2_fails_on_nonqwcomp() {
        let s = nonqw(1);
        let v = check_sentence(&phi2(), &s, None).unwrap();
        assert!(!v.holds);
        let c = s.carrier();
        let a1 = c.unit(c.basis_index("a1").unwrap());
        let b1 = c.unit(c.basis_index("b1").unwrap());
        assert_eq!(v.witness, Some(vec![a1, b1]));
    }

    #[test]
    fn finite_quasi_identity_of_nonqwcomp_fails() {
        // [x,a1] = 0 ∧ [x,b1] = 0 → [x,y] = 0 with a1, b1 as parameters
        let s = nonqw(2);
        let c = s.carrier();
        let u = |l: &str| c.unit(c.basis_index(l).unwrap());
        let q = Sentence::Quasi(QuasiIdentity::new(
            2,
            vec![bracket(v(0), LieTerm::Const(0)), bracket(v(0), LieTerm::Const(1))],
            bracket(v(0), v(1)),
        ));
        let verdict = check_sentence(&q, &s, Some(&[u("a1"), u("b1")])).unwrap();
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        assert!(!c.is_zero(&c.bracket(&w[0], &w[1]).unwrap()));
        assert!(c.is_zero(&c.bracket(&w[0], &u("a1")).unwrap()));
        assert_eq!(w, vec![u("a2"), u("b2")]);
    }

    #[test]
    fn phi4_paths_agree() {
        let s = mb(2, 3);
        let fast = check_phi4(&s, 2, false).unwrap();
        let slow = check_phi4(&s, 2, true).unwrap();
        assert!(fast.holds && slow.holds);
        // with r = 1 two independent generators falsify it
        let fast = check_phi4(&s, 1, false).unwrap();
        let slow = check_phi4(&s, 1, true).unwrap();
        assert!(!fast.holds);
        assert_eq!(fast.witness, slow.witness);
    }

    #[test]
    fn phi4_on_abelian_is_vacuous() {
        let a = CoeffAlgebra::new(AlgebraKind::Free, 1, FieldSpec::Prime(2));
        let s = Setting::new(a, CarrierSpec::Abelian { dim: 3, constants: 1 }, 1, 4, DEFAULT_BUDGET).unwrap();
        let suite = phi_suite(&s, 2, &[]).unwrap();
        let phi4 = suite.iter().find(|a| a.id == AxiomId::Phi4).unwrap();
        assert!(phi4.verdict.holds);
        assert!(phi4.proviso.as_deref().unwrap().starts_with("vacuous"));
        // every bracket vanishes, so Φ1-Φ3 hold trivially
        assert!(suite.iter().all(|a| a.verdict.holds));
    }

    #[test]
    fn phi2_and_phi3_on_nonqwcomp_suite() {
        let suite = phi_suite(&nonqw(1), 2, &[]).unwrap();
        let get = |id: AxiomId| suite.iter().find(|a| a.id == id).unwrap().verdict.holds;
        assert!(get(AxiomId::Phi1));
        assert!(!get(AxiomId::Phi2));
        assert!(!get(AxiomId::Phi3));
    }

    #[test]
    fn fit_formulas_agree_with_linear_part() {
        for p in [2, 3] {
            let s = mb(p, 3);
            for x in s.elements() {
                let exact = s.carrier().in_fitting(x).unwrap();
                assert_eq!(fit_formula(&s, x).unwrap(), exact);
                assert_eq!(fit_prime_formula(&s, x).unwrap(), exact);
            }
        }
    }

    /// Independent truth-table evaluation: every assignment, every disjunct.
    fn oracle(u: &UniversalSentence, s: &Setting) -> (bool, Option<Point>) {
        let c = s.carrier();
        let w = s.elements();
        let n = u.arity;
        let total = w.len().pow(n as u32);
        for code in 0..total {
            let mut k = code;
            let mut pt = vec![Vec::new(); n];
            for j in (0..n).rev() {
                pt[j] = w[k % w.len()].clone();
                k /= w.len();
            }
            let truth = u.disjuncts.iter().any(|d| {
                d.eqs.iter().all(|e| c.is_zero(&evaluate(e, &pt, c).unwrap()))
                    && d.neqs.iter().all(|e| !c.is_zero(&evaluate(e, &pt, c).unwrap()))
            });
            if !truth {
                return (false, Some(pt));
            }
        }
        (true, None)
    }

    fn arb_sentence(seed: u64) -> Sentence {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = [v(0), v(1), LieTerm::Const(0), bracket(v(0), v(1)), bracket(v(0), LieTerm::Const(0))];
        let pick = |rng: &mut ChaCha8Rng| {
            let a = atoms[rng.gen_range(0..atoms.len())].clone();
            if rng.gen_bool(0.4) {
                bracket(a, atoms[rng.gen_range(0..atoms.len())].clone())
            } else {
                a
            }
        };
        if rng.gen_bool(0.5) {
            let prem = (0..rng.gen_range(0..3)).map(|_| pick(&mut rng)).collect();
            Sentence::Quasi(QuasiIdentity::new(2, prem, pick(&mut rng)))
        } else {
            let ds = (0..rng.gen_range(1..3))
                .map(|_| Disjunct {
                    eqs: (0..rng.gen_range(0..2)).map(|_| pick(&mut rng)).collect(),
                    neqs: (0..rng.gen_range(0..2)).map(|_| pick(&mut rng)).collect(),
                })
                .collect();
            Sentence::Universal(UniversalSentence { arity: 2, disjuncts: ds })
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn check_sentence_matches_truth_tables(seed in any::<u64>(), which in 0usize..3) {
            let s = match which {
                0 => mb(2, 3),
                1 => {
                    let a = CoeffAlgebra::new(AlgebraKind::Free, 1, FieldSpec::Prime(2));
                    Setting::new(a, CarrierSpec::Abelian { dim: 3, constants: 1 }, 1, 4, DEFAULT_BUDGET).unwrap()
                }
                _ => {
                    let a = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(2));
                    Setting::new(a, CarrierSpec::Free { rank: 2 }, 2, 4, DEFAULT_BUDGET).unwrap()
                }
            };
            let sent = arb_sentence(seed);
            let v = check_sentence(&sent, &s, None).unwrap();
            let (holds, witness) = oracle(&sent.to_universal(), &s);
            prop_assert_eq!(v.holds, holds);
            prop_assert_eq!(v.witness, witness);
        }
    }

    #[test]
    fn multilinear_fast_path_matches_exhaustive() {
        let a = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(2));
        let s = Setting::new(a, CarrierSpec::Free { rank: 2 }, 2, 4, DEFAULT_BUDGET).unwrap();
        // Φ1 fails in a free Lie algebra
        let v = check_sentence(&phi1(), &s, None).unwrap();
        let (holds, witness) = oracle(&phi1().to_universal(), &s);
        assert!(!v.holds && !holds);
        assert_eq!(v.witness, witness);
        let m = mb(2, 2);
        let v = check_sentence(&phi1(), &m, None).unwrap();
        assert!(v.holds);
        assert_eq!(v.method, "multilinear basis check");
        assert_eq!(oracle(&phi1().to_universal(), &m).0, true);
    }

    fn small_free() -> Setting {
        let a = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(2));
        Setting::new(a, CarrierSpec::Free { rank: 2 }, 2, 4, DEFAULT_BUDGET).unwrap()
    }

    fn system(text: &str) -> EquationSystem {
        parse_system(&format!("algebra free rank=2 field=GF(2)\nvars x\n{text}")).unwrap()
    }

    #[test]
    fn saturation_examples() {
        let s = small_free();
        let sys = system("eq [x,a1] = 0\n");
        let sat = saturate_radical(&sys, &[], &[], 2).unwrap();
        assert_eq!(sat.steps, 0);
        assert_eq!(sat.ideal.contains_term(&sys.equations[0]).unwrap(), Some(true));
        // an identity y = y → s = 0 puts s in the ideal
        let trivial = QuasiIdentity::new(1, vec![], LieTerm::bracket(v(0), LieTerm::Const(1)));
        let sat = saturate_radical(&sys, &[trivial], &[], 2).unwrap();
        assert_eq!(sat.ideal.contains_term(&bracket(v(0), LieTerm::Const(1))).unwrap(), Some(true));
        // the valid corpus reaches the radical
        let corpus = valid_quasi_identities(&s, 1, 2, 1).unwrap();
        let sat = saturate_radical(&sys, &corpus, &[], 2).unwrap();
        let y = solve(&sys, &s).unwrap();
        let rad = radical_of_points(&s, 1, &y.points, 2).unwrap();
        assert!(sat.ideal.same_as(&rad));
        assert!(sat.steps <= s.carrier().dim());
    }

    #[test]
    fn saturation_is_an_ideal_containing_s() {
        let sys = system("eq [x,a1] + x = 0\n");
        let sat = saturate_radical(&sys, &[], &[], 3).unwrap();
        for t in sat.ideal.terms() {
            for g in [v(0), LieTerm::Const(0), LieTerm::Const(1)] {
                let b = bracket(t.clone(), g);
                assert_ne!(sat.ideal.contains_term(&b).unwrap(), Some(false));
            }
        }
        assert_eq!(sat.ideal.contains_term(&sys.equations[0]).unwrap(), Some(true));
        assert_eq!(sat.ideal.contains_term(&bracket(sys.equations[0].clone(), LieTerm::Const(1))).unwrap(), Some(true));
    }

    #[test]
    fn valid_corpus_is_valid() {
        let s = small_free();
        for q in valid_quasi_identities(&s, 1, 2, 1).unwrap().iter().take(200) {
            assert!(check_sentence(&Sentence::Quasi(q.clone()), &s, None).unwrap().holds);
        }
    }

    #[test]
    fn discrimination_examples() {
        let s = small_free();
        let c = s.carrier();
        // C = B presented by x - a1: the only homomorphism sends x to a1
        let pres = system("eq x - a1 = 0\n");
        assert_eq!(discriminates(&pres, &s, &[v(0)]).unwrap(), Some(vec![c.unit(0)]));
        // a forced zero among the targets
        assert_eq!(discriminates(&pres, &s, &[LieTerm::minus(&FieldSpec::Prime(2), v(0), LieTerm::Const(0))]).unwrap(), None);
        // two-point set {a1, a2}: separators x - a1 and x - a2 cannot both survive
        let two = system("eq [x - a1, x - a2] = 0\neq [[x - a1,a1], x - a2] = 0\neq [x - a1, [x - a2, a2]] = 0\n");
        let y = solve(&two, &s).unwrap();
        assert_eq!(y.len(), 2);
        let rad = radical_of_points(&s, 1, &y.points, 2).unwrap();
        let pres = EquationSystem::new(two.algebra.clone(), two.variables.clone(), rad.terms());
        let f = |c: usize| LieTerm::minus(&FieldSpec::Prime(2), v(0), LieTerm::Const(c));
        assert_eq!(discriminates(&pres, &s, &[f(0), f(1)]).unwrap(), None);
        assert!(discriminates(&pres, &s, &[f(0)]).unwrap().is_some());
        assert_eq!(count_homomorphisms(&pres, &s).unwrap(), 2);
    }

    #[test]
    fn geometric_equivalence_examples() {
        let s = small_free();
        let corpus = vec![system("eq [x,a1] = 0\n"), system("eq x - a2 = 0\n")];
        assert!(geo_equiv_probe(&s, &s, &corpus, 2).unwrap().equivalent);
        // abelian of dimension 1 and 2 with one constant
        let a = CoeffAlgebra::new(AlgebraKind::Free, 1, FieldSpec::Prime(2));
        let b1 = Setting::new(a.clone(), CarrierSpec::Abelian { dim: 1, constants: 1 }, 1, 3, DEFAULT_BUDGET).unwrap();
        let b2 = Setting::new(a.clone(), CarrierSpec::Abelian { dim: 2, constants: 1 }, 1, 3, DEFAULT_BUDGET).unwrap();
        let sys = |t: &str| parse_system(&format!("algebra free rank=1 field=GF(2)\nvars x, y\n{t}")).unwrap();
        let brackets = vec![sys("eq [x,y] = 0\n")];
        assert!(geo_equiv_probe(&b1, &b2, &brackets, 2).unwrap().equivalent);
        let shifts = vec![sys("eq x - a1 = 0\n"), sys("eq x - a1 = 0\neq y = 0\n"), sys("eq x + y - a1 = 0\n")];
        assert!(geo_equiv_probe(&b1, &b2, &shifts, 2).unwrap().equivalent);
        // a metabelian window against a free window: the free one loses points of [[x,a1],[x,a2]] = 0
        let alg = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(2));
        let f = Setting::new(alg.clone(), CarrierSpec::Free { rank: 2 }, 2, 4, DEFAULT_BUDGET).unwrap();
        let m = Setting::new(alg, CarrierSpec::Metabelian { rank: 2 }, 2, 4, DEFAULT_BUDGET).unwrap();
        let corpus = vec![system("eq [x,a1] = 0\n"), system("eq [[x,a1],[x,a2]] = 0\n")];
        let v = geo_equiv_probe(&f, &m, &corpus, 4).unwrap();
        assert!(!v.equivalent);
        assert_eq!(v.first_divergence, Some(1));
    }
}
