//! Exact ground fields: GF(p), Q and rational-function fields over them.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};
use crate::ratfunc::RatFunc;

/// A field with no transcendental variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseField {
    Prime(u64),
    Rationals,
}

impl BaseField {
    pub fn zero(self) -> BaseElem {
        self.from_i64(0)
    }

    pub fn one(self) -> BaseElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> BaseElem {
        match self {
            BaseField::Prime(p) => BaseElem::Fp { v: n.rem_euclid(p as i64) as u64, p },
            BaseField::Rationals => BaseElem::Q(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> BaseElem {
        match self {
            BaseField::Prime(p) => {
                let r = (n % BigInt::from(p) + BigInt::from(p)) % BigInt::from(p);
                BaseElem::Fp { v: r.to_u64().unwrap(), p }
            }
            BaseField::Rationals => BaseElem::Q(BigRational::from_integer(n.clone())),
        }
    }

    pub fn order(self) -> Option<u64> {
        match self {
            BaseField::Prime(p) => Some(p),
            BaseField::Rationals => None,
        }
    }

    /// All elements in increasing representative order; `None` for Q.
    pub fn elements(self) -> Option<Vec<BaseElem>> {
        self.order().map(|p| (0..p).map(|v| BaseElem::Fp { v, p }).collect())
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Prime(p) => write!(f, "GF({p})"),
            BaseField::Rationals => write!(f, "Q"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseElem {
    Fp { v: u64, p: u64 },
    Q(BigRational),
}

impl BaseElem {
    pub fn field(&self) -> BaseField {
        match self {
            BaseElem::Fp { p, .. } => BaseField::Prime(*p),
            BaseElem::Q(_) => BaseField::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BaseElem::Fp { v, .. } => *v == 0,
            BaseElem::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            BaseElem::Fp { v, .. } => *v == 1,
            BaseElem::Q(q) => q.is_one(),
        }
    }

    pub fn add(&self, o: &BaseElem) -> BaseElem {
        match (self, o) {
            (BaseElem::Fp { v: a, p }, BaseElem::Fp { v: b, p: q }) => {
                debug_assert_eq!(p, q);
                BaseElem::Fp { v: (a + b) % p, p: *p }
            }
            (BaseElem::Q(a), BaseElem::Q(b)) => BaseElem::Q(a + b),
            _ => panic!("mixed base fields"),
        }
    }

    pub fn neg(&self) -> BaseElem {
        match self {
            BaseElem::Fp { v, p } => BaseElem::Fp { v: (p - v) % p, p: *p },
            BaseElem::Q(a) => BaseElem::Q(-a),
        }
    }

    pub fn sub(&self, o: &BaseElem) -> BaseElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &BaseElem) -> BaseElem {
        match (self, o) {
            (BaseElem::Fp { v: a, p }, BaseElem::Fp { v: b, p: q }) => {
                debug_assert_eq!(p, q);
                BaseElem::Fp { v: a * b % p, p: *p }
            }
            (BaseElem::Q(a), BaseElem::Q(b)) => BaseElem::Q(a * b),
            _ => panic!("mixed base fields"),
        }
    }

    pub fn mul_int(&self, n: i64) -> BaseElem {
        self.mul(&self.field().from_i64(n))
    }

    pub fn inv(&self) -> Result<BaseElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            BaseElem::Fp { v, p } => BaseElem::Fp { v: pow_mod(*v, p - 2, *p), p: *p },
            BaseElem::Q(a) => BaseElem::Q(a.recip()),
        })
    }

    pub fn div(&self, o: &BaseElem) -> Result<BaseElem> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> BaseElem {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Residue in `0..p` for prime fields.
    pub fn residue(&self) -> Option<u64> {
        match self {
            BaseElem::Fp { v, .. } => Some(*v),
            BaseElem::Q(_) => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, BaseElem::Q(q) if q.is_negative())
    }
}

impl fmt::Display for BaseElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseElem::Fp { v, .. } => write!(f, "{v}"),
            BaseElem::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The ground field of a computation.
///
/// Nested rational-function fields are flattened on construction, so
/// `GF(2)(t1)(t2)` and `GF(2)(t1,t2)` are the same value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
    RationalFunctions { base: BaseField, vars: Vec<String> },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("GF({p}): {p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("GF({p}): modulus too large")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rational_functions(base: FieldSpec, vars: &[&str]) -> Result<FieldSpec> {
        let (b, mut all) = match base {
            FieldSpec::Prime(p) => (BaseField::Prime(p), vec![]),
            FieldSpec::Rationals => (BaseField::Rationals, vec![]),
            FieldSpec::RationalFunctions { base, vars } => (base, vars),
        };
        if vars.is_empty() {
            return Err(Error::InvalidField("rational-function field with no variables".into()));
        }
        for v in vars {
            if !is_identifier(v) {
                return Err(Error::InvalidField(format!("bad variable name `{v}`")));
            }
            if all.iter().any(|w| w == v) {
                return Err(Error::InvalidField(format!("variable `{v}` shadows an existing variable")));
            }
            all.push(v.to_string());
        }
        Ok(FieldSpec::RationalFunctions { base: b, vars: all })
    }

    pub fn base(&self) -> BaseField {
        match self {
            FieldSpec::Prime(p) => BaseField::Prime(*p),
            FieldSpec::Rationals => BaseField::Rationals,
            FieldSpec::RationalFunctions { base, .. } => *base,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::Prime(_))
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Prime(p) => Some(*p),
            _ => None,
        }
    }

    /// Polynomial ring whose fraction field this is (only for rational-function fields).
    pub fn ratfunc_ring(&self) -> Option<PolyRing> {
        match self {
            FieldSpec::RationalFunctions { base, vars } => Some(PolyRing::new(vars.clone(), *base)),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::RationalFunctions { base, .. } => {
                let ring = self.ratfunc_ring().unwrap();
                Scalar::Rat(RatFunc::from_poly(Poly::constant(&ring, base.from_i64(n))))
            }
            _ => Scalar::Base(self.base().from_i64(n)),
        }
    }

    pub fn from_base(&self, b: BaseElem) -> Scalar {
        match self {
            FieldSpec::RationalFunctions { .. } => {
                let ring = self.ratfunc_ring().unwrap();
                Scalar::Rat(RatFunc::from_poly(Poly::constant(&ring, b)))
            }
            _ => Scalar::Base(b),
        }
    }

    /// The transcendental generator named `name` of a rational-function field.
    pub fn variable(&self, name: &str) -> Option<Scalar> {
        let ring = self.ratfunc_ring()?;
        let i = ring.var_index(name)?;
        Some(Scalar::Rat(RatFunc::from_poly(Poly::var(&ring, i))))
    }

    /// All elements of a finite field, in residue order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            FieldSpec::Prime(_) => {
                Some(self.base().elements()?.into_iter().map(Scalar::Base).collect())
            }
            _ => None,
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        &s.spec() == self
    }

    /// Parses a scalar literal: an integer, `a/b` over Q, or a parenthesised
    /// rational expression in the field variables.
    pub fn parse_literal(&self, text: &str) -> Result<Scalar> {
        let t = text.trim();
        let bad = || Error::InvalidField(format!("bad literal `{t}` for {self}"));
        if let FieldSpec::RationalFunctions { .. } = self {
            let ring = self.ratfunc_ring().unwrap();
            let r = crate::poly::parse_ratfunc(&ring, t)?;
            return Ok(Scalar::Rat(r));
        }
        if let Some((a, b)) = t.split_once('/') {
            if !matches!(self, FieldSpec::Rationals) {
                return Err(bad());
            }
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(Scalar::Base(BaseElem::Q(BigRational::new(a, b))));
        }
        let n: BigInt = t.parse().map_err(|_| bad())?;
        if let FieldSpec::Prime(p) = self {
            if n.is_negative() || n >= BigInt::from(*p) {
                return Err(Error::FieldLiteralOutOfRange {
                    line: 0,
                    col: 0,
                    literal: t.to_string(),
                    field: self.to_string(),
                });
            }
        }
        Ok(Scalar::Base(self.base().from_bigint(&n)))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut c = s.chars();
    match c.next() {
        Some(ch) if ch.is_ascii_alphabetic() || ch == '_' => {}
        _ => return false,
    }
    c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::RationalFunctions { base, vars } => write!(f, "{base}({})", vars.join(",")),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FieldSpec> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidField(format!("cannot parse field `{s}`"));
        let (mut spec, mut rest) = if let Some(r) = s.strip_prefix("GF(") {
            let close = r.find(')').ok_or_else(bad)?;
            let p: u64 = r[..close].parse().map_err(|_| bad())?;
            (FieldSpec::prime(p)?, &r[close + 1..])
        } else if let Some(r) = s.strip_prefix('Q') {
            (FieldSpec::Rationals, r)
        } else {
            return Err(bad());
        };
        while !rest.is_empty() {
            let r = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = r.find(')').ok_or_else(bad)?;
            let vars: Vec<&str> = r[..close].split(',').collect();
            spec = FieldSpec::rational_functions(spec, &vars)?;
            rest = &r[close + 1..];
        }
        Ok(spec)
    }
}

/// An element of some [`FieldSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Base(BaseElem),
    Rat(RatFunc),
}

impl Scalar {
    pub fn spec(&self) -> FieldSpec {
        match self {
            Scalar::Base(BaseElem::Fp { p, .. }) => FieldSpec::Prime(*p),
            Scalar::Base(BaseElem::Q(_)) => FieldSpec::Rationals,
            Scalar::Rat(r) => {
                let ring = r.ring();
                FieldSpec::RationalFunctions { base: ring.base(), vars: ring.vars().to_vec() }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Base(b) => b.is_zero(),
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Base(b) => b.is_one(),
            Scalar::Rat(r) => r.is_one(),
        }
    }

    fn lift(b: &BaseElem, like: &RatFunc) -> RatFunc {
        RatFunc::from_poly(Poly::constant(like.ring(), b.clone()))
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Base(a), Scalar::Base(b)) => Scalar::Base(a.add(b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.add(b)),
            (Scalar::Base(a), Scalar::Rat(b)) => Scalar::Rat(Self::lift(a, b).add(b)),
            (Scalar::Rat(a), Scalar::Base(b)) => Scalar::Rat(a.add(&Self::lift(b, a))),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Base(a) => Scalar::Base(a.neg()),
            Scalar::Rat(a) => Scalar::Rat(a.neg()),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Base(a), Scalar::Base(b)) => Scalar::Base(a.mul(b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.mul(b)),
            (Scalar::Base(a), Scalar::Rat(b)) => Scalar::Rat(b.scale(a)),
            (Scalar::Rat(a), Scalar::Base(b)) => Scalar::Rat(a.scale(b)),
        }
    }

    pub fn mul_int(&self, n: i64) -> Scalar {
        match self {
            Scalar::Base(a) => Scalar::Base(a.mul_int(n)),
            Scalar::Rat(a) => Scalar::Rat(a.scale(&a.ring().base().from_i64(n))),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Base(a) => Ok(Scalar::Base(a.inv()?)),
            Scalar::Rat(a) => Ok(Scalar::Rat(a.inv()?)),
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = self.spec().one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn as_base(&self) -> Option<&BaseElem> {
        match self {
            Scalar::Base(b) => Some(b),
            Scalar::Rat(_) => None,
        }
    }

    /// True when the printed form needs no parentheses as a coefficient.
    pub fn is_atomic_literal(&self) -> bool {
        matches!(self, Scalar::Base(_))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Base(b) => write!(f, "{b}"),
            Scalar::Rat(r) => write!(f, "({r})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Checked field arithmetic on a pair of elements of one field.
///
/// `inv` and `neg` ignore `b` except for the field check.
pub fn field_arith(a: &Scalar, b: &Scalar, op: FieldOp) -> Result<Scalar> {
    let (fa, fb) = (a.spec(), b.spec());
    if fa != fb {
        return Err(Error::FieldMismatch(fa.to_string(), fb.to_string()));
    }
    match op {
        FieldOp::Add => Ok(a.add(b)),
        FieldOp::Mul => Ok(a.mul(b)),
        FieldOp::Inv => a.inv(),
        FieldOp::Neg => Ok(a.neg()),
    }
}
