//! Lie polynomials with constants: ASTs, the system-file parser, rendering,
//! evaluation in carriers, and lowering into A[X].

use std::collections::BTreeSet;
use std::fmt;

use crate::carrier::{FreeCarrier, LieCarrier, MetabelianCarrier};
use crate::error::{Error, Result};
use crate::field::{is_identifier, FieldSpec, Scalar};
use crate::freelie::{FreeLie, FreeLieElement};
use crate::metabelian::{Metabelian, MetabelianElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieTerm {
    Var(usize),
    Const(usize),
    Zero,
    Sum(Vec<LieTerm>),
    ScalarMul(Scalar, Box<LieTerm>),
    Bracket(Box<LieTerm>, Box<LieTerm>),
}

impl LieTerm {
    pub fn bracket(a: LieTerm, b: LieTerm) -> LieTerm {
        LieTerm::Bracket(Box::new(a), Box::new(b))
    }

    pub fn scaled(c: Scalar, t: LieTerm) -> LieTerm {
        LieTerm::ScalarMul(c, Box::new(t))
    }

    /// `a - b` in the parser's shape.
    pub fn minus(field: &FieldSpec, a: LieTerm, b: LieTerm) -> LieTerm {
        LieTerm::Sum(vec![a, LieTerm::scaled(field.from_i64(-1), b)])
    }

    /// Left-normed bracket of a list of terms.
    pub fn left_normed(items: Vec<LieTerm>) -> LieTerm {
        let mut it = items.into_iter();
        let first = it.next().unwrap_or(LieTerm::Zero);
        it.fold(first, LieTerm::bracket)
    }

    /// Degree bound: generators count 1, brackets add, sums take the max.
    pub fn degree(&self) -> usize {
        match self {
            LieTerm::Var(_) | LieTerm::Const(_) => 1,
            LieTerm::Zero => 0,
            LieTerm::Sum(ts) => ts.iter().map(LieTerm::degree).max().unwrap_or(0),
            LieTerm::ScalarMul(_, t) => t.degree(),
            LieTerm::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    fn collect_vars(&self, s: &mut BTreeSet<usize>) {
        match self {
            LieTerm::Var(i) => {
                s.insert(*i);
            }
            LieTerm::Const(_) | LieTerm::Zero => {}
            LieTerm::Sum(ts) => ts.iter().for_each(|t| t.collect_vars(s)),
            LieTerm::ScalarMul(_, t) => t.collect_vars(s),
            LieTerm::Bracket(a, b) => {
                a.collect_vars(s);
                b.collect_vars(s);
            }
        }
    }

    pub fn has_constants(&self) -> bool {
        match self {
            LieTerm::Const(_) => true,
            LieTerm::Var(_) | LieTerm::Zero => false,
            LieTerm::Sum(ts) => ts.iter().any(LieTerm::has_constants),
            LieTerm::ScalarMul(_, t) => t.has_constants(),
            LieTerm::Bracket(a, b) => a.has_constants() || b.has_constants(),
        }
    }

    /// Replaces every variable x_i by `images[i]`.
    pub fn substitute(&self, images: &[LieTerm]) -> LieTerm {
        match self {
            LieTerm::Var(i) => images[*i].clone(),
            LieTerm::Const(_) | LieTerm::Zero => self.clone(),
            LieTerm::Sum(ts) => LieTerm::Sum(ts.iter().map(|t| t.substitute(images)).collect()),
            LieTerm::ScalarMul(c, t) => LieTerm::scaled(c.clone(), t.substitute(images)),
            LieTerm::Bracket(a, b) => LieTerm::bracket(a.substitute(images), b.substitute(images)),
        }
    }

    /// Renames variables by index.
    pub fn reindex(&self, f: &dyn Fn(usize) -> usize) -> LieTerm {
        self.substitute_with(&|i| LieTerm::Var(f(i)))
    }

    fn substitute_with(&self, f: &dyn Fn(usize) -> LieTerm) -> LieTerm {
        match self {
            LieTerm::Var(i) => f(*i),
            LieTerm::Const(_) | LieTerm::Zero => self.clone(),
            LieTerm::Sum(ts) => LieTerm::Sum(ts.iter().map(|t| t.substitute_with(f)).collect()),
            LieTerm::ScalarMul(c, t) => LieTerm::scaled(c.clone(), t.substitute_with(f)),
            LieTerm::Bracket(a, b) => LieTerm::bracket(a.substitute_with(f), b.substitute_with(f)),
        }
    }

    /// Variables each summand contains exactly once, when the term is
    /// multilinear in them and constant-free.
    pub fn multilinear_vars(&self) -> Option<BTreeSet<usize>> {
        match self {
            LieTerm::Var(i) => Some([*i].into_iter().collect()),
            LieTerm::Const(_) => None,
            LieTerm::Zero => Some(BTreeSet::new()),
            LieTerm::ScalarMul(_, t) => t.multilinear_vars(),
            LieTerm::Bracket(a, b) => {
                let (x, y) = (a.multilinear_vars()?, b.multilinear_vars()?);
                if !x.is_disjoint(&y) {
                    return None;
                }
                Some(x.union(&y).copied().collect())
            }
            LieTerm::Sum(ts) => {
                let mut out: Option<BTreeSet<usize>> = None;
                for t in ts {
                    if *t == LieTerm::Zero {
                        continue;
                    }
                    let s = t.multilinear_vars()?;
                    match &out {
                        None => out = Some(s),
                        Some(o) if *o == s => {}
                        _ => return None,
                    }
                }
                Some(out.unwrap_or_default())
            }
        }
    }

    pub fn render(&self, vars: &[String]) -> String {
        match self {
            LieTerm::Var(i) => vars.get(*i).cloned().unwrap_or_else(|| format!("x{}", i + 1)),
            LieTerm::Const(i) => format!("a{}", i + 1),
            LieTerm::Zero => "0".into(),
            LieTerm::Sum(ts) => ts
                .iter()
                .map(|t| match t {
                    LieTerm::Sum(_) => format!("({})", t.render(vars)),
                    _ => t.render(vars),
                })
                .collect::<Vec<_>>()
                .join(" + "),
            LieTerm::ScalarMul(c, t) => match **t {
                LieTerm::Sum(_) => format!("{c}*({})", t.render(vars)),
                _ => format!("{c}*{}", t.render(vars)),
            },
            LieTerm::Bracket(a, b) => format!("[{},{}]", a.render(vars), b.render(vars)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Zero,
    Free,
    Metabelian,
}

/// The coefficient algebra A: zero, free of rank r, or free metabelian of rank r.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffAlgebra {
    pub kind: AlgebraKind,
    pub rank: usize,
    pub field: FieldSpec,
}

impl CoeffAlgebra {
    pub fn new(kind: AlgebraKind, rank: usize, field: FieldSpec) -> CoeffAlgebra {
        let rank = if kind == AlgebraKind::Zero { 0 } else { rank };
        CoeffAlgebra { kind, rank, field }
    }

    pub fn constants(&self) -> usize {
        self.rank
    }
}

impl fmt::Display for CoeffAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            AlgebraKind::Zero => "zero",
            AlgebraKind::Free => "free",
            AlgebraKind::Metabelian => "metabelian",
        };
        write!(f, "algebra {k} rank={} field={}", self.rank, self.field)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquationSystem {
    pub algebra: CoeffAlgebra,
    pub variables: Vec<String>,
    pub equations: Vec<LieTerm>,
}

impl EquationSystem {
    pub fn new(algebra: CoeffAlgebra, variables: Vec<String>, equations: Vec<LieTerm>) -> EquationSystem {
        EquationSystem { algebra, variables, equations }
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.algebra.field
    }

    pub fn max_degree(&self) -> usize {
        self.equations.iter().map(LieTerm::degree).max().unwrap_or(0)
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}\n", self.algebra);
        if !self.variables.is_empty() {
            s.push_str(&format!("vars {}\n", self.variables.join(", ")));
        }
        for e in &self.equations {
            s.push_str(&format!("eq {} = 0\n", e.render(&self.variables)));
        }
        s
    }
}

/// One factor of a parallelepipedon declaration, by let-bound names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorDecl {
    pub line: usize,
    pub basis: Vec<String>,
    pub shift: Option<String>,
}

/// Everything a system file may declare.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub system: EquationSystem,
    pub lets: Vec<(String, LieTerm)>,
    pub polytope: Vec<FactorDecl>,
    /// Raw polynomial lines (`poly ...`), parsed against the parallelepipedon ring.
    pub polys: Vec<(usize, String)>,
    /// Module presentation: generator count and relation columns as text.
    pub module: Option<(usize, Vec<Vec<String>>)>,
    /// Line of each `eq`, parallel to `system.equations`.
    pub eq_lines: Vec<usize>,
}

impl Document {
    pub fn lookup_let(&self, name: &str) -> Option<&LieTerm> {
        self.lets.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

pub fn parse_system(text: &str) -> Result<EquationSystem> {
    Ok(parse_document(text)?.system)
}

fn syntax(line: usize, col: usize, expected: &str) -> Error {
    Error::SyntaxError { line, col, expected: expected.into() }
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut algebra: Option<CoeffAlgebra> = None;
    let mut variables: Option<Vec<String>> = None;
    let mut equations = Vec::new();
    let mut eq_lines = Vec::new();
    let mut lets: Vec<(String, LieTerm)> = Vec::new();
    let mut polytope = Vec::new();
    let mut polys = Vec::new();
    let mut module: Option<(usize, Vec<Vec<String>>)> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = body.len() - trimmed.len();
        let (kw, rest) = match trimmed.find(char::is_whitespace) {
            Some(i) => (&trimmed[..i], &trimmed[i..]),
            None => (trimmed, ""),
        };
        let rest_col = indent + kw.len() + 1;
        match kw {
            "algebra" => algebra = Some(parse_algebra_line(rest, line, rest_col)?),
            "vars" => {
                let mut vs = Vec::new();
                for part in rest.split(',') {
                    let name = part.trim();
                    if !is_identifier(name) || is_constant_name(name) {
                        return Err(syntax(line, rest_col, "variable name"));
                    }
                    if vs.iter().any(|v| v == name) {
                        return Err(syntax(line, rest_col, "distinct variable names"));
                    }
                    vs.push(name.to_string());
                }
                variables = Some(vs);
            }
            "eq" | "let" => {
                let alg = algebra.clone().ok_or_else(|| syntax(line, 1, "`algebra` line before terms"))?;
                let vars = variables.clone().unwrap_or_default();
                if kw == "eq" {
                    let Some(eqpos) = rest.rfind('=') else {
                        return Err(syntax(line, rest_col + rest.len(), "`= 0`"));
                    };
                    if rest[eqpos + 1..].trim() != "0" {
                        return Err(syntax(line, rest_col + eqpos + 1, "`0` after `=`"));
                    }
                    let ctx = ParseCtx { alg: &alg, vars: &vars, lets: &lets, line };
                    let t = ctx.parse_term(&rest[..eqpos], rest_col)?;
                    equations.push(t);
                    eq_lines.push(line);
                } else {
                    let Some(eqpos) = rest.find('=') else {
                        return Err(syntax(line, rest_col + rest.len(), "`=`"));
                    };
                    let name = rest[..eqpos].trim();
                    if !is_identifier(name) || is_constant_name(name) || vars.iter().any(|v| v == name) {
                        return Err(syntax(line, rest_col, "fresh name"));
                    }
                    let ctx = ParseCtx { alg: &alg, vars: &vars, lets: &lets, line };
                    let t = ctx.parse_term(&rest[eqpos + 1..], rest_col + eqpos + 1)?;
                    lets.retain(|(n, _)| n != name);
                    lets.push((name.to_string(), t));
                }
            }
            "polytope" => {
                let mut words = rest.split_whitespace();
                if words.next() != Some("factor") {
                    return Err(syntax(line, rest_col, "`factor`"));
                }
                let mut basis = Vec::new();
                let mut shift = None;
                for w in words {
                    if let Some(b) = w.strip_prefix("basis=") {
                        basis = b.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect();
                    } else if let Some(s) = w.strip_prefix("shift=") {
                        shift = Some(s.to_string());
                    } else {
                        return Err(syntax(line, rest_col, "`basis=` or `shift=`"));
                    }
                }
                for name in basis.iter().chain(shift.iter()) {
                    if !lets.iter().any(|(n, _)| n == name) && !is_constant_name(name) && name != "0" {
                        return Err(Error::UnknownSymbol { line, col: rest_col, name: name.clone() });
                    }
                }
                polytope.push(FactorDecl { line, basis, shift });
            }
            "poly" => polys.push((line, rest.trim().to_string())),
            "module" => {
                let g = rest
                    .trim()
                    .strip_prefix("gens=")
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| syntax(line, rest_col, "`gens=<n>`"))?;
                module = Some((g, Vec::new()));
            }
            "rel" => {
                let Some((g, cols)) = module.as_mut() else {
                    return Err(syntax(line, 1, "`module` line before `rel`"));
                };
                let col: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
                if col.len() != *g {
                    return Err(syntax(line, rest_col, &format!("{g} entries")));
                }
                cols.push(col);
            }
            _ => return Err(syntax(line, indent + 1, "algebra, vars, eq, let, polytope, poly, module or rel")),
        }
    }
    let algebra = algebra.ok_or_else(|| syntax(1, 1, "`algebra` line"))?;
    Ok(Document {
        system: EquationSystem { algebra, variables: variables.unwrap_or_default(), equations },
        lets,
        polytope,
        polys,
        module,
        eq_lines,
    })
}

fn is_constant_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('a') && s[1..].chars().all(|c| c.is_ascii_digit())
}

fn parse_algebra_line(rest: &str, line: usize, col: usize) -> Result<CoeffAlgebra> {
    let mut words = rest.split_whitespace();
    let kind = match words.next() {
        Some("zero") => AlgebraKind::Zero,
        Some("free") => AlgebraKind::Free,
        Some("metabelian") => AlgebraKind::Metabelian,
        _ => return Err(syntax(line, col, "zero, free or metabelian")),
    };
    let mut rank = None;
    let mut field = None;
    // field specs may contain spaces inside parentheses
    let tail: Vec<&str> = words.collect();
    let joined = tail.join(" ");
    let mut rest = joined.as_str();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("rank=") {
            let end = r.find(' ').unwrap_or(r.len());
            rank = Some(r[..end].parse::<usize>().map_err(|_| syntax(line, col, "rank=<integer>"))?);
            rest = r[end..].trim_start();
        } else if let Some(r) = rest.strip_prefix("field=") {
            // consume up to the next top-level space
            let mut depth = 0i32;
            let mut end = r.len();
            for (i, c) in r.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ' ' if depth == 0 => {
                        end = i;
                        break;
                    }
                    _ => {}
                }
            }
            field = Some(r[..end].parse::<FieldSpec>().map_err(|_| syntax(line, col, "field=<FieldSpec>"))?);
            rest = r[end..].trim_start();
        } else {
            return Err(syntax(line, col, "rank= or field="));
        }
    }
    let rank = match (kind, rank) {
        (AlgebraKind::Zero, _) => 0,
        (_, Some(r)) if r >= 1 => r,
        _ => return Err(syntax(line, col, "rank=<positive integer>")),
    };
    let field = field.ok_or_else(|| syntax(line, col, "field=<FieldSpec>"))?;
    if kind == AlgebraKind::Metabelian && matches!(field, FieldSpec::RationalFunctions { .. }) {
        return Err(Error::UnsupportedCoefficientAlgebra("metabelian coefficients need GF(p) or Q".into()));
    }
    Ok(CoeffAlgebra::new(kind, rank, field))
}

struct ParseCtx<'a> {
    alg: &'a CoeffAlgebra,
    vars: &'a [String],
    lets: &'a [(String, LieTerm)],
    line: usize,
}

struct Cursor<'s> {
    s: &'s str,
    pos: usize,
    col0: usize,
}

impl<'s> Cursor<'s> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.s[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s[self.pos..].chars().next()
    }
    fn col(&self) -> usize {
        self.col0 + self.s[..self.pos].chars().count()
    }
    fn bump(&mut self) {
        if let Some(c) = self.s[self.pos..].chars().next() {
            self.pos += c.len_utf8();
        }
    }
}

impl ParseCtx<'_> {
    fn parse_term(&self, text: &str, col0: usize) -> Result<LieTerm> {
        let mut cur = Cursor { s: text, pos: 0, col0 };
        let t = self.expr(&mut cur)?;
        if cur.peek().is_some() {
            return Err(syntax(self.line, cur.col(), "end of term"));
        }
        Ok(t)
    }

    fn expr(&self, cur: &mut Cursor) -> Result<LieTerm> {
        let mut items = vec![self.term(cur)?];
        loop {
            match cur.peek() {
                Some('+') => {
                    cur.bump();
                    items.push(self.term(cur)?);
                }
                Some('-') => {
                    cur.bump();
                    let t = self.term(cur)?;
                    items.push(LieTerm::scaled(self.alg.field.from_i64(-1), t));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { LieTerm::Sum(items) })
    }

    /// A scalar literal followed by `*`, if one starts here.
    fn scalar_prefix(&self, cur: &mut Cursor) -> Result<Option<Scalar>> {
        cur.skip_ws();
        let start = cur.pos;
        let rest = &cur.s[start..];
        let end = if rest.starts_with('(') {
            let mut depth = 0;
            let mut end = None;
            for (i, c) in rest.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(i + 1);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            match end {
                Some(e) => e,
                None => return Ok(None),
            }
        } else {
            let b = rest.as_bytes();
            let mut i = 0;
            if i < b.len() && b[i] == b'-' {
                i += 1;
            }
            let digits = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i == digits {
                return Ok(None);
            }
            if i < b.len() && b[i] == b'/' {
                let j = i + 1;
                let mut k = j;
                while k < b.len() && b[k].is_ascii_digit() {
                    k += 1;
                }
                if k > j {
                    i = k;
                }
            }
            i
        };
        let after = rest[end..].trim_start();
        if !after.starts_with('*') {
            return Ok(None);
        }
        let lit = &rest[..end];
        let lit_inner = if lit.starts_with('(') && !matches!(self.alg.field, FieldSpec::RationalFunctions { .. }) {
            // parenthesized expression followed by `*` is not a scalar outside k(t)
            let inner = &lit[1..lit.len() - 1];
            if inner.trim().chars().all(|c| c.is_ascii_digit() || c == '-' || c == '/' || c.is_whitespace()) {
                inner.trim()
            } else {
                return Ok(None);
            }
        } else {
            lit
        };
        let col = cur.col();
        let value = self.alg.field.parse_literal(lit_inner).map_err(|e| match e {
            Error::FieldLiteralOutOfRange { literal, field, .. } => {
                Error::FieldLiteralOutOfRange { line: self.line, col, literal, field }
            }
            _ => syntax(self.line, col, &format!("scalar in {}", self.alg.field)),
        })?;
        cur.pos = start + end;
        cur.skip_ws();
        cur.bump(); // '*'
        Ok(Some(value))
    }

    fn term(&self, cur: &mut Cursor) -> Result<LieTerm> {
        if let Some(c) = self.scalar_prefix(cur)? {
            let t = self.term(cur)?;
            return Ok(LieTerm::scaled(c, t));
        }
        if cur.peek() == Some('-') {
            cur.bump();
            let t = self.term(cur)?;
            return Ok(LieTerm::scaled(self.alg.field.from_i64(-1), t));
        }
        self.atom(cur)
    }

    fn atom(&self, cur: &mut Cursor) -> Result<LieTerm> {
        let col = {
            cur.skip_ws();
            cur.col()
        };
        match cur.peek() {
            Some('[') => {
                cur.bump();
                let a = self.expr(cur)?;
                if cur.peek() != Some(',') {
                    return Err(syntax(self.line, cur.col(), "`,`"));
                }
                cur.bump();
                let b = self.expr(cur)?;
                if cur.peek() != Some(']') {
                    return Err(syntax(self.line, cur.col(), "`]`"));
                }
                cur.bump();
                Ok(LieTerm::bracket(a, b))
            }
            Some('(') => {
                cur.bump();
                let a = self.expr(cur)?;
                if cur.peek() != Some(')') {
                    return Err(syntax(self.line, cur.col(), "`)`"));
                }
                cur.bump();
                Ok(a)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = cur.pos;
                while cur.s[cur.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                    cur.bump();
                }
                if &cur.s[start..cur.pos] == "0" {
                    Ok(LieTerm::Zero)
                } else {
                    Err(syntax(self.line, col, "`*` after scalar"))
                }
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = cur.pos;
                while cur.s[cur.pos..].starts_with(|c: char| c.is_alphanumeric() || c == '_') {
                    cur.bump();
                }
                let name = &cur.s[start..cur.pos];
                if let Some(i) = self.vars.iter().position(|v| v == name) {
                    return Ok(LieTerm::Var(i));
                }
                if let Some((_, t)) = self.lets.iter().rev().find(|(n, _)| n == name) {
                    return Ok(t.clone());
                }
                if is_constant_name(name) {
                    let i: usize = name[1..].parse().unwrap_or(0);
                    if i >= 1 && i <= self.alg.constants() {
                        return Ok(LieTerm::Const(i - 1));
                    }
                }
                Err(Error::UnknownSymbol { line: self.line, col, name: name.to_string() })
            }
            _ => Err(syntax(self.line, col, "term")),
        }
    }
}

/// Parses a single term against a system's algebra and variables.
pub fn parse_term(sys: &EquationSystem, text: &str) -> Result<LieTerm> {
    let ctx = ParseCtx { alg: &sys.algebra, vars: &sys.variables, lets: &[], line: 1 };
    ctx.parse_term(text, 1)
}

/// φ_p(f): the image of f at the point p.
pub fn evaluate<C: LieCarrier>(f: &LieTerm, p: &[C::Elem], carrier: &C) -> Result<C::Elem> {
    match f {
        LieTerm::Var(i) => p
            .get(*i)
            .cloned()
            .ok_or_else(|| Error::CarrierMismatch(format!("point has {} coordinates, variable {} requested", p.len(), i + 1))),
        LieTerm::Const(i) => carrier.constant(*i),
        LieTerm::Zero => Ok(carrier.zero()),
        LieTerm::Sum(ts) => {
            let mut acc = carrier.zero();
            for t in ts {
                acc = carrier.add(&acc, &evaluate(t, p, carrier)?);
            }
            Ok(acc)
        }
        LieTerm::ScalarMul(c, t) => carrier.scale(c, &evaluate(t, p, carrier)?),
        LieTerm::Bracket(a, b) => {
            let x = evaluate(a, p, carrier)?;
            if carrier.is_zero(&x) {
                return Ok(carrier.zero());
            }
            let y = evaluate(b, p, carrier)?;
            carrier.bracket(&x, &y)
        }
    }
}

/// A[X] realized as a free or free metabelian algebra on A's generators followed by X.
#[derive(Clone, Debug)]
pub enum Lowered {
    Free { alg: FreeLie, constants: usize, vars: usize },
    Metabelian { alg: Metabelian, constants: usize, vars: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LoweredElem {
    Free(FreeLieElement),
    Metabelian(MetabelianElement),
}

impl LoweredElem {
    pub fn is_zero(&self) -> bool {
        match self {
            LoweredElem::Free(e) => e.is_zero(),
            LoweredElem::Metabelian(e) => e.is_zero(),
        }
    }
}

impl Lowered {
    pub fn constants(&self) -> usize {
        match self {
            Lowered::Free { constants, .. } | Lowered::Metabelian { constants, .. } => *constants,
        }
    }

    pub fn vars(&self) -> usize {
        match self {
            Lowered::Free { vars, .. } | Lowered::Metabelian { vars, .. } => *vars,
        }
    }

    /// Normal form of a term in A[X].
    pub fn normal_form(&self, t: &LieTerm) -> Result<LoweredElem> {
        match self {
            Lowered::Free { alg, constants, vars } => {
                let c = FreeCarrier { alg: alg.clone(), constants: *constants, trunc: None };
                let point: Vec<_> = (0..*vars).map(|i| alg.generator(constants + i)).collect();
                Ok(LoweredElem::Free(evaluate(t, &point, &c)?))
            }
            Lowered::Metabelian { alg, constants, vars } => {
                let c = MetabelianCarrier { alg: alg.clone(), constants: *constants };
                let point: Vec<_> = (0..*vars).map(|i| alg.generator(constants + i)).collect();
                Ok(LoweredElem::Metabelian(evaluate(t, &point, &c)?))
            }
        }
    }

    /// Generator names in role order: a1.., then the variables.
    pub fn generator_names(&self, variables: &[String]) -> Vec<String> {
        (0..self.constants()).map(|i| format!("a{}", i + 1)).chain(variables.iter().cloned()).collect()
    }
}

pub fn lower_to_carrier(sys: &EquationSystem) -> Result<Lowered> {
    let a = &sys.algebra;
    let n = sys.arity();
    match a.kind {
        AlgebraKind::Zero => Ok(Lowered::Free { alg: FreeLie::new(n, a.field.clone()), constants: 0, vars: n }),
        AlgebraKind::Free => {
            Ok(Lowered::Free { alg: FreeLie::new(a.rank + n, a.field.clone()), constants: a.rank, vars: n })
        }
        AlgebraKind::Metabelian => match &a.field {
            FieldSpec::RationalFunctions { .. } => Err(Error::UnsupportedCoefficientAlgebra(
                "metabelian coefficient algebra over a rational-function field".into(),
            )),
            f => Ok(Lowered::Metabelian { alg: Metabelian::new(a.rank + n, f.base()), constants: a.rank, vars: n }),
        },
    }
}
