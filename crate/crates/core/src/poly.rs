//! Sparse multivariate polynomials over a base field.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{BaseElem, BaseField};
use crate::ratfunc::RatFunc;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyRing {
    vars: Arc<[String]>,
    base: BaseField,
}

impl PolyRing {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, base: BaseField) -> PolyRing {
        PolyRing { vars: vars.into_iter().map(Into::into).collect(), base }
    }

    /// `prefix1, ..., prefixN`.
    pub fn numbered(prefix: &str, n: usize, base: BaseField) -> PolyRing {
        PolyRing::new((1..=n).map(|i| format!("{prefix}{i}")), base)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn base(&self) -> BaseField {
        self.base
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

impl fmt::Display for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.base, self.vars.join(","))
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(n: usize) -> Mono {
        Mono(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Mono {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut e = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            e.push(a.checked_sub(*b)?);
        }
        Some(Mono(e))
    }

    /// Index of the first variable with a positive exponent.
    pub fn min_var(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Mono) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Mono) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    ring: PolyRing,
    terms: BTreeMap<Mono, BaseElem>,
}

impl Poly {
    pub fn zero(ring: &PolyRing) -> Poly {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &PolyRing) -> Poly {
        Poly::constant(ring, ring.base.one())
    }

    pub fn constant(ring: &PolyRing, c: BaseElem) -> Poly {
        Poly::monomial(ring, Mono::one(ring.arity()), c)
    }

    pub fn var(ring: &PolyRing, i: usize) -> Poly {
        Poly::monomial(ring, Mono::var(ring.arity(), i), ring.base.one())
    }

    pub fn monomial(ring: &PolyRing, m: Mono, c: BaseElem) -> Poly {
        assert_eq!(m.0.len(), ring.arity(), "exponent vector arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &PolyRing, it: impl IntoIterator<Item = (Mono, BaseElem)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BaseElem)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BaseElem> {
        match self.terms.len() {
            0 => Some(self.ring.base.zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Mono) -> BaseElem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.base.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Mono::degree)
    }

    /// Leading term under grlex.
    pub fn leading(&self) -> Option<(&Mono, &BaseElem)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Mono, c: BaseElem) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.ring.arity());
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_ring(&self, o: &Poly) {
        debug_assert_eq!(self.ring, o.ring, "polynomial ring mismatch");
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.check_ring(o);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.check_ring(o);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.neg());
        }
        r
    }

    pub fn scale(&self, c: &BaseElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &BaseElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.mul(c))).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.check_ring(o);
        let mut r = Poly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[BaseElem]) -> BaseElem {
        assert_eq!(point.len(), self.ring.arity());
        let mut acc = self.ring.base.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = t.mul(&x.pow(e as u64));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Largest exponent of each variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut mx = vec![0; self.ring.arity()];
        for m in self.terms.keys() {
            for (a, &e) in mx.iter_mut().zip(&m.0) {
                *a = (*a).max(e);
            }
        }
        mx
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        self.check_ring(d);
        let (dm, dc) = d.leading()?;
        let dc_inv = dc.inv().ok()?;
        let mut q = Poly::zero(&self.ring);
        let mut r = self.clone();
        while let Some((m, c)) = r.leading() {
            let tm = m.div(dm)?;
            let tc = c.mul(&dc_inv);
            r = r.sub(&d.mul_mono(&tm, &tc));
            q.add_term(tm, tc);
        }
        Some(q)
    }

    pub fn deg_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Coefficients with respect to variable `v`, lowest power first.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.deg_in(v) as usize;
        let mut out = vec![Poly::zero(&self.ring); d + 1];
        for (m, c) in &self.terms {
            let mut mm = m.clone();
            let e = mm.0[v] as usize;
            mm.0[v] = 0;
            out[e].add_term(mm, c.clone());
        }
        out
    }

    fn main_var(&self) -> Option<usize> {
        (0..self.ring.arity()).rev().find(|&v| self.terms.keys().any(|m| m.0[v] > 0))
    }

    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(&self.ring);
        for c in self.coeffs_in(v) {
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn prem(&self, g: &Poly, v: usize) -> Poly {
        let dg = g.deg_in(v);
        let lc = g.coeffs_in(v).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() && r.deg_in(v) >= dg {
            let dr = r.deg_in(v);
            let lr = r.coeffs_in(v).pop().unwrap();
            let shift = Mono::var(self.ring.arity(), v);
            let mut sh = Mono::one(self.ring.arity());
            for _ in 0..(dr - dg) {
                sh = sh.mul(&shift);
            }
            let one = self.ring.base.one();
            r = r.mul(&lc).sub(&lr.mul(&g.mul_mono(&sh, &one)));
        }
        r
    }

    pub fn parse(ring: &PolyRing, text: &str) -> Result<Poly> {
        let mut p = ExprParser::new(text);
        let v: Poly = p.parse_all(ring)?;
        Ok(v)
    }

    /// Renders with a custom variable naming.
    pub fn render_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let c_abs = if neg { c.neg() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (j, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[j].clone()),
                    _ => factors.push(format!("{}^{}", names[j], e)),
                }
            }
            if factors.is_empty() {
                out.push_str(&c_abs.to_string());
            } else {
                if !c_abs.is_one() {
                    out.push_str(&c_abs.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with(self.ring.vars()))
    }
}

/// Monic greatest common divisor (recursive primitive remainder sequences).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one(&a.ring);
    }
    let v = a.main_var().max(b.main_var()).unwrap();
    let (da, db) = (a.deg_in(v), b.deg_in(v));
    if da == 0 {
        return gcd(a, &b.content_in(v));
    }
    if db == 0 {
        return gcd(&a.content_in(v), b);
    }
    let (ca, cb) = (a.content_in(v), b.content_in(v));
    let c = gcd(&ca, &cb);
    let mut f = a.exact_div(&ca).unwrap();
    let mut g = b.exact_div(&cb).unwrap();
    if f.deg_in(v) < g.deg_in(v) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = f.prem(&g, v);
        if r.is_zero() {
            break;
        }
        if r.deg_in(v) == 0 {
            g = Poly::one(&a.ring);
            break;
        }
        let r = r.exact_div(&r.content_in(v)).unwrap();
        f = g;
        g = r;
    }
    let gp = g.exact_div(&g.content_in(v)).unwrap();
    c.mul(&gp).monic()
}

/// Values an infix expression can evaluate to.
pub(crate) trait ExprValue: Sized + Clone {
    fn from_int(ring: &PolyRing, n: &num::BigInt) -> Self;
    fn variable(ring: &PolyRing, name: &str) -> Option<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
}

impl ExprValue for Poly {
    fn from_int(ring: &PolyRing, n: &num::BigInt) -> Poly {
        Poly::constant(ring, ring.base.from_bigint(n))
    }
    fn variable(ring: &PolyRing, name: &str) -> Option<Poly> {
        ring.var_index(name).map(|i| Poly::var(ring, i))
    }
    fn add(&self, o: &Poly) -> Poly {
        Poly::add(self, o)
    }
    fn sub(&self, o: &Poly) -> Poly {
        Poly::sub(self, o)
    }
    fn mul(&self, o: &Poly) -> Poly {
        Poly::mul(self, o)
    }
    fn neg(&self) -> Poly {
        Poly::neg(self)
    }
    fn div(&self, o: &Poly) -> Result<Poly> {
        match o.as_constant() {
            Some(c) => Ok(self.scale(&c.inv()?)),
            None => Err(Error::Unsupported("division by a non-constant polynomial".into())),
        }
    }
}

impl ExprValue for RatFunc {
    fn from_int(ring: &PolyRing, n: &num::BigInt) -> RatFunc {
        RatFunc::from_poly(Poly::from_int(ring, n))
    }
    fn variable(ring: &PolyRing, name: &str) -> Option<RatFunc> {
        <Poly as ExprValue>::variable(ring, name).map(RatFunc::from_poly)
    }
    fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc::add(self, o)
    }
    fn sub(&self, o: &RatFunc) -> RatFunc {
        RatFunc::sub(self, o)
    }
    fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::mul(self, o)
    }
    fn neg(&self) -> RatFunc {
        RatFunc::neg(self)
    }
    fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(RatFunc::mul(self, &o.inv()?))
    }
}

pub fn parse_ratfunc(ring: &PolyRing, text: &str) -> Result<RatFunc> {
    ExprParser::new(text).parse_all(ring)
}

/// Recursive-descent parser for `+ - * / ^` expressions with integer
/// literals and named variables.
pub(crate) struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        ExprParser { src: text.as_bytes(), pos: 0 }
    }

    fn err(&self, expected: &str) -> Error {
        Error::SyntaxError { line: 1, col: self.pos + 1, expected: expected.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn parse_all<V: ExprValue>(&mut self, ring: &PolyRing) -> Result<V> {
        let v = self.expr(ring)?;
        if self.peek().is_some() {
            return Err(self.err("end of expression"));
        }
        Ok(v)
    }

    fn expr<V: ExprValue>(&mut self, ring: &PolyRing) -> Result<V> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.term::<V>(ring)?.neg()
        } else {
            self.term::<V>(ring)?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term::<V>(ring)?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term::<V>(ring)?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<V: ExprValue>(&mut self, ring: &PolyRing) -> Result<V> {
        let mut acc: V = self.factor(ring)?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor::<V>(ring)?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.div(&self.factor::<V>(ring)?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor<V: ExprValue>(&mut self, ring: &PolyRing) -> Result<V> {
        let base: V = self.atom(ring)?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("exponent"))?;
            let mut acc = V::from_int(ring, &num::BigInt::from(1));
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom<V: ExprValue>(&mut self, ring: &PolyRing) -> Result<V> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v: V = self.expr(ring)?;
                if self.peek() != Some(b')') {
                    return Err(self.err("`)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.atom::<V>(ring)?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: num::BigInt =
                    std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap();
                Ok(V::from_int(ring, &n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                V::variable(ring, name).ok_or_else(|| Error::UnknownSymbol {
                    line: 1,
                    col: start + 1,
                    name: name.to_string(),
                })
            }
            _ => Err(self.err("number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize, base: BaseField) -> PolyRing {
        PolyRing::numbered("x", n, base)
    }

    #[test]
    fn grlex_order_and_display() {
        let r = ring(2, BaseField::Prime(5));
        let p = Poly::parse(&r, "x1 + x2^2 + 3*x1*x2 + 4").unwrap();
        assert_eq!(p.to_string(), "3*x1*x2 + x2^2 + x1 + 4");
        assert_eq!(p.leading().unwrap().0, &Mono(vec![1, 1]));
        let q = Poly::parse(&ring(2, BaseField::Rationals), "x1 - 1/2*x2").unwrap();
        assert_eq!(q.to_string(), "x1 - 1/2*x2");
    }

    #[test]
    fn exact_division() {
        let r = ring(2, BaseField::Rationals);
        let a = Poly::parse(&r, "x1^2 - x2^2").unwrap();
        let b = Poly::parse(&r, "x1 + x2").unwrap();
        assert_eq!(a.exact_div(&b).unwrap(), Poly::parse(&r, "x1 - x2").unwrap());
        assert!(Poly::parse(&r, "x1^2 + 1").unwrap().exact_div(&b).is_none());
    }

    #[test]
    fn gcd_examples() {
        for base in [BaseField::Rationals, BaseField::Prime(7)] {
            let r = ring(3, base);
            let g = Poly::parse(&r, "x1*x2 + x3 + 1").unwrap();
            let a = g.mul(&Poly::parse(&r, "x1 - x3^2").unwrap());
            let b = g.mul(&Poly::parse(&r, "x2 + 2*x1").unwrap());
            assert_eq!(gcd(&a, &b), g.monic());
            let c = Poly::parse(&r, "x1^2 + x2").unwrap();
            assert!(gcd(&c, &Poly::parse(&r, "x1 + 1").unwrap()).is_one());
        }
    }

    #[test]
    fn parse_errors() {
        let r = ring(1, BaseField::Rationals);
        assert!(matches!(Poly::parse(&r, "x1 + y"), Err(Error::UnknownSymbol { .. })));
        assert!(matches!(Poly::parse(&r, "x1 +"), Err(Error::SyntaxError { .. })));
    }
}
