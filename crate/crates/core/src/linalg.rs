//! Linear algebra over fields, and module presentations over polynomial rings.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::poly::{Poly, PolyRing};

/// Arithmetic needed by elimination routines.
pub trait FieldOps {
    type E: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Only called on nonzero elements.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }
}

/// GF(p) on raw residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp(pub u64);

impl FieldOps for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: &u64) -> u64 {
        let (mut b, mut e, mut acc) = (*a % self.0, self.0 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % self.0;
            }
            b = b * b % self.0;
            e >>= 1;
        }
        acc
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

impl FieldOps for FieldSpec {
    type E = Scalar;
    fn zero(&self) -> Scalar {
        FieldSpec::zero(self)
    }
    fn one(&self) -> Scalar {
        FieldSpec::one(self)
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a.add(b)
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a.mul(b)
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        a.neg()
    }
    fn inv(&self, a: &Scalar) -> Scalar {
        a.inv().expect("pivot is nonzero")
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
}

/// Reduced row echelon form in place; returns pivot columns. Zero rows are dropped.
pub fn rref<F: FieldOps>(f: &F, rows: &mut Vec<Vec<F::E>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, i);
        let inv = f.inv(&rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !f.is_zero(p) {
                    *x = f.sub(x, &f.mul(&factor, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: FieldOps>(f: &F, rows: &[Vec<F::E>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Basis of `{x : M x = 0}` for an `m × ncols` matrix.
pub fn nullspace<F: FieldOps>(f: &F, rows: &[Vec<F::E>], ncols: usize) -> Vec<Vec<F::E>> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![f.zero(); ncols];
        v[free] = f.one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = f.neg(&row[free]);
        }
        basis.push(v);
    }
    basis
}

/// Coefficients `x` with `Σ x_j cols[j] = target`, if any.
pub fn solve_combination<F: FieldOps>(f: &F, cols: &[Vec<F::E>], target: &[F::E]) -> Option<Vec<F::E>> {
    let n = cols.len();
    let mut rows: Vec<Vec<F::E>> = (0..target.len())
        .map(|i| {
            let mut row: Vec<F::E> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(f, &mut rows);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![f.zero(); n];
    for (row, &pc) in rows.iter().zip(&pivots) {
        x[pc] = row[n].clone();
    }
    Some(x)
}

/// Incrementally maintained echelon basis of a subspace of GF(p)^n.
///
/// Rows are kept fully reduced against each other, so two echelons of the
/// same subspace compare equal after [`Echelon::canonical`].
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    n: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(p: u64, n: usize) -> Echelon {
        Echelon { p, n, rows: Vec::new() }
    }

    pub fn from_vectors(p: u64, n: usize, vs: impl IntoIterator<Item = Vec<u64>>) -> Echelon {
        let mut e = Echelon::new(p, n);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn full(p: u64, n: usize) -> Echelon {
        Echelon::from_vectors(
            p,
            n,
            (0..n).map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            }),
        )
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after reduction by the basis.
    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let f = Fp(self.p);
        for (pc, row) in &self.rows {
            let c = v[*pc];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    if *r != 0 {
                        *x = f.sub(x, &f.mul(&c, r));
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.n);
        let f = Fp(self.p);
        let mut v = self.reduce(v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(&v[pc]);
        for x in v.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    if *r != 0 {
                        *x = f.sub(x, &f.mul(&c, r));
                    }
                }
            }
        }
        let at = self.rows.partition_point(|(c, _)| *c < pc);
        self.rows.insert(at, (pc, v));
        true
    }

    pub fn basis(&self) -> Vec<Vec<u64>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    pub fn canonical(&self) -> Vec<Vec<u64>> {
        self.basis()
    }

    /// The orthogonal complement under the standard pairing.
    pub fn annihilator(&self) -> Echelon {
        let ker = nullspace(&Fp(self.p), &self.basis(), self.n);
        Echelon::from_vectors(self.p, self.n, ker)
    }

    pub fn is_subspace_of(&self, o: &Echelon) -> bool {
        self.rows.iter().all(|(_, r)| o.contains(r))
    }

    pub fn same_space(&self, o: &Echelon) -> bool {
        self.n == o.n && self.basis() == o.basis()
    }

    pub fn sum(&self, o: &Echelon) -> Echelon {
        let mut e = self.clone();
        for (_, r) in &o.rows {
            e.insert(r.clone());
        }
        e
    }

    /// Intersection via the kernel of `[U; -W]`.
    pub fn intersect(&self, o: &Echelon) -> Echelon {
        let f = Fp(self.p);
        let u = self.basis();
        let w = o.basis();
        let k = u.len() + w.len();
        if u.is_empty() || w.is_empty() {
            return Echelon::new(self.p, self.n);
        }
        let rows: Vec<Vec<u64>> = (0..self.n)
            .map(|i| u.iter().map(|v| v[i]).chain(w.iter().map(|v| f.neg(&v[i]))).collect())
            .collect();
        let ker = nullspace(&f, &rows, k);
        let mut out = Echelon::new(self.p, self.n);
        for c in ker {
            let mut v = vec![0u64; self.n];
            for (j, uj) in u.iter().enumerate() {
                if c[j] != 0 {
                    for (x, y) in v.iter_mut().zip(uj) {
                        *x = f.add(x, &f.mul(&c[j], y));
                    }
                }
            }
            out.insert(v);
        }
        out
    }
}

impl PartialEq for Echelon {
    fn eq(&self, o: &Echelon) -> bool {
        self.p == o.p && self.same_space(o)
    }
}

impl Eq for Echelon {}

/// Rectangular matrix of polynomials over one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: PolyRing,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn new(ring: &PolyRing, entries: Vec<Vec<Poly>>) -> Result<PolyMatrix> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        for row in &entries {
            if row.len() != cols {
                return Err(Error::RingMismatch("ragged matrix".into()));
            }
            for e in row {
                if e.ring() != ring {
                    return Err(Error::RingMismatch(format!("entry over {} in matrix over {}", e.ring(), ring)));
                }
            }
        }
        Ok(PolyMatrix { ring: ring.clone(), rows, cols, entries })
    }

    pub fn zero(ring: &PolyRing, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix { ring: ring.clone(), rows, cols, entries: vec![vec![Poly::zero(ring); cols]; rows] }
    }

    /// Builds a matrix from relation columns.
    pub fn from_columns(ring: &PolyRing, rows: usize, columns: Vec<Vec<Poly>>) -> Result<PolyMatrix> {
        let mut entries = vec![Vec::with_capacity(columns.len()); rows];
        for col in &columns {
            if col.len() != rows {
                return Err(Error::RingMismatch("relation column length differs from generator count".into()));
            }
            for (i, e) in col.iter().enumerate() {
                entries[i].push(e.clone());
            }
        }
        if columns.is_empty() {
            return Ok(PolyMatrix::zero(ring, rows, 0));
        }
        PolyMatrix::new(ring, entries)
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    /// Rank over the fraction field, by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> Result<usize> {
        let mut m = self.entries.clone();
        let mut prev = Poly::one(&self.ring);
        let mut r = 0;
        for c in 0..self.cols {
            let Some(i) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, i);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let num = m[r][c].mul(&m[i][j]).sub(&m[i][c].mul(&m[r][j]));
                    m[i][j] = num.exact_div(&prev).ok_or_else(|| {
                        Error::InvariantViolation("fraction-free elimination left a remainder".into())
                    })?;
                }
                m[i][c] = Poly::zero(&self.ring);
            }
            prev = m[r][c].clone();
            r += 1;
            if r == self.rows {
                break;
            }
        }
        Ok(r)
    }
}

/// A finitely presented module over `R = k[x1..xr]`: `generators` free
/// generators modulo the columns of `relations`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub ring: PolyRing,
    pub generators: usize,
    pub relations: PolyMatrix,
}

impl ModulePresentation {
    pub fn new(ring: &PolyRing, generators: usize, relations: PolyMatrix) -> Result<ModulePresentation> {
        if relations.ring() != ring {
            return Err(Error::RingMismatch(format!(
                "relations over {} for a module over {}",
                relations.ring(),
                ring
            )));
        }
        if relations.cols() > 0 && relations.rows() != generators {
            return Err(Error::RingMismatch("relation matrix row count differs from generator count".into()));
        }
        Ok(ModulePresentation { ring: ring.clone(), generators, relations })
    }

    pub fn free(ring: &PolyRing, rank: usize) -> ModulePresentation {
        ModulePresentation { ring: ring.clone(), generators: rank, relations: PolyMatrix::zero(ring, rank, 0) }
    }

    /// Relation columns given as polynomial strings.
    pub fn parse(ring: &PolyRing, generators: usize, columns: &[Vec<&str>]) -> Result<ModulePresentation> {
        let cols = columns
            .iter()
            .map(|c| c.iter().map(|s| Poly::parse(ring, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let m = PolyMatrix::from_columns(ring, generators, cols)?;
        ModulePresentation::new(ring, generators, m)
    }
}

/// Rank of a module over the fraction field: generators minus relation rank.
pub fn module_rank(pres: &ModulePresentation) -> Result<usize> {
    if pres.relations.ring() != &pres.ring {
        return Err(Error::RingMismatch("relation matrix ring differs from module ring".into()));
    }
    for row in pres.relations.entries() {
        for e in row {
            if e.ring() != &pres.ring {
                return Err(Error::RingMismatch(format!("entry over {} in module over {}", e.ring(), pres.ring)));
            }
        }
    }
    if pres.relations.cols() == 0 {
        return Ok(pres.generators);
    }
    Ok(pres.generators - pres.relations.rank()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;

    fn ring2() -> PolyRing {
        PolyRing::numbered("x", 2, BaseField::Rationals)
    }

    #[test]
    fn module_rank_examples() {
        let r = ring2();
        assert_eq!(module_rank(&ModulePresentation::free(&r, 2)).unwrap(), 2);
        let torsion = ModulePresentation::parse(&r, 1, &[vec!["x1"]]).unwrap();
        assert_eq!(module_rank(&torsion).unwrap(), 0);
        let m = ModulePresentation::parse(&r, 3, &[vec!["x1", "x2", "0"], vec!["0", "x1", "x2"]]).unwrap();
        assert_eq!(module_rank(&m).unwrap(), 1);
        for g in 0..=5 {
            assert_eq!(module_rank(&ModulePresentation::free(&r, g)).unwrap(), g);
        }
    }

    #[test]
    fn ring_mismatch() {
        let r = ring2();
        let other = PolyRing::numbered("y", 2, BaseField::Rationals);
        let bad = PolyMatrix::new(&r, vec![vec![Poly::var(&other, 0)]]);
        assert!(matches!(bad, Err(Error::RingMismatch(_))));
    }

    #[test]
    fn nullspace_and_solve() {
        let f = Fp(3);
        let rows = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let ns = nullspace(&f, &rows, 3);
        assert_eq!(ns, vec![vec![1, 2, 1]]);
        let cols = vec![vec![1, 1], vec![1, 2]];
        let x = solve_combination(&f, &cols, &[2, 1]).unwrap();
        assert_eq!(x, vec![0, 2]);
    }

    #[test]
    fn echelon_intersection() {
        let a = Echelon::from_vectors(2, 3, [vec![1, 0, 0], vec![0, 1, 0]]);
        let b = Echelon::from_vectors(2, 3, [vec![0, 1, 0], vec![0, 0, 1]]);
        let i = a.intersect(&b);
        assert_eq!(i, Echelon::from_vectors(2, 3, [vec![0, 1, 0]]));
        assert_eq!(a.sum(&b).dim(), 3);
    }
}
