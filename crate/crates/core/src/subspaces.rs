//! Subspaces in canonical RREF form, Grassmannian enumeration, and the
//! F_q-expansion of F_(q^m)^k.
//!
//! A [`Subspace`] is a row space over whatever field the caller passes in.
//! Subspaces of F_(q^m)^k are stored over F_q in expanded coordinates: block
//! `i` of an expanded vector occupies columns `i*m..(i+1)*m` and holds the
//! Γ-coordinates of the `i`-th entry.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Elt, FieldTower, GaloisField};
use crate::linalg::{self, Mat};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    n: usize,
    basis: Mat,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u64>> = (0..self.basis.rows())
            .map(|r| self.basis.row(r).iter().map(|e| e.0).collect())
            .collect();
        write!(f, "Subspace(n={}, {:?})", self.n, rows)
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            basis: Mat::zeros(0, n),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: Mat::identity(n),
        }
    }

    /// Row space of `m`.
    pub fn span(field: &GaloisField, m: &Mat) -> Self {
        let r = linalg::rref(field, m);
        Subspace {
            n: m.cols(),
            basis: r.basis(),
        }
    }

    pub fn span_rows(field: &GaloisField, n: usize, rows: &[Vec<Elt>]) -> Self {
        Self::span(field, &Mat::from_rows(n, rows))
    }

    /// Wraps a matrix already in RREF with independent rows.
    pub(crate) fn from_rref(basis: Mat) -> Self {
        Subspace {
            n: basis.cols(),
            basis,
        }
    }

    /// Unit vector `e_i` of F^n spans.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut b = Mat::zeros(1, n);
        b.set(0, i, Elt::ONE);
        Subspace { n, basis: b }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn contains_vec(&self, field: &GaloisField, v: &[Elt]) -> bool {
        linalg::solve_left(field, &self.basis, v).is_some()
    }

    pub fn contains(&self, field: &GaloisField, other: &Subspace) -> Result<bool> {
        self.same_ambient(other)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        Ok((0..other.dim()).all(|r| self.contains_vec(field, other.basis.row(r))))
    }

    pub fn sum(&self, field: &GaloisField, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        Ok(Self::span(field, &self.basis.vstack(&other.basis)))
    }

    pub fn intersect(&self, field: &GaloisField, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.n));
        }
        let b = linalg::intersect_rowspaces(field, &self.basis, &other.basis)?;
        Ok(Subspace::from_rref(b))
    }

    /// Image under `x -> x·map`.
    pub fn image(&self, field: &GaloisField, map: &Mat) -> Result<Subspace> {
        if map.rows() != self.n {
            return Err(Error::Shape(format!(
                "map has {} rows, ambient is {}",
                map.rows(),
                self.n
            )));
        }
        Ok(Self::span(field, &self.basis.mul(field, map)?))
    }

    /// Coordinate projection onto `cols`.
    pub fn project(&self, field: &GaloisField, cols: std::ops::Range<usize>) -> Subspace {
        Self::span(field, &self.basis.select_cols(cols))
    }

    /// Places the subspace in coordinates `offset..offset+n` of F^total.
    pub fn embed(&self, total: usize, offset: usize) -> Subspace {
        assert!(offset + self.n <= total);
        let mut b = Mat::zeros(self.dim(), total);
        for r in 0..self.dim() {
            for c in 0..self.n {
                b.set(r, offset + c, self.basis.get(r, c));
            }
        }
        Subspace { n: total, basis: b }
    }

    /// `coords · basis`.
    pub fn combine(&self, field: &GaloisField, coords: &[Elt]) -> Vec<Elt> {
        self.basis.apply_row(field, coords)
    }

    /// Every vector of the subspace, in base-|F| counting order of coordinates.
    pub fn vectors(&self, field: &GaloisField) -> Vec<Vec<Elt>> {
        let q = field.order();
        let count = q.pow(self.dim() as u32);
        let mut out = Vec::with_capacity(count as usize);
        let mut coords = vec![Elt::ZERO; self.dim()];
        for mut idx in 0..count {
            for c in coords.iter_mut().rev() {
                *c = Elt(idx % q);
                idx /= q;
            }
            out.push(self.combine(field, &coords));
        }
        out
    }

    /// All `d`-dimensional subspaces of this one, in Grassmannian order of
    /// their coordinates with respect to the canonical basis.
    pub fn subspaces_of_dim(&self, field: &GaloisField, d: usize) -> Result<Vec<Subspace>> {
        let g = Grassmannian::new(field, self.dim(), d)?;
        Ok(g.iter()
            .map(|c| Subspace::span(field, &c.mul(field, &self.basis).expect("shapes agree")))
            .collect())
    }

    /// Every subspace of this one, by increasing dimension.
    pub fn all_subspaces(&self, field: &GaloisField) -> Result<Vec<Subspace>> {
        let mut out = Vec::new();
        for d in 0..=self.dim() {
            out.extend(self.subspaces_of_dim(field, d)?);
        }
        Ok(out)
    }
}

/// Number of `d`-dimensional subspaces of F_q^n.
pub fn gaussian_binomial(n: usize, d: usize, q: u64) -> BigUint {
    if d > n {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(q);
    let one = BigUint::from(1u32);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..d {
        num *= q.pow((n - i) as u32) - &one;
        den *= q.pow((d - i) as u32) - &one;
    }
    num / den
}

/// Total number of subspaces of F_q^n.
pub fn subspace_count(n: usize, q: u64) -> BigUint {
    (0..=n).map(|d| gaussian_binomial(n, d, q)).sum()
}

#[derive(Clone, Debug)]
struct Cell {
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    start: u64,
}

/// The `d`-dimensional subspaces of F^n, enumerated by Schubert cell.
///
/// Cells are ordered by pivot set (lexicographic); inside a cell the free
/// entries, read row by row, are the base-|F| digits of the index with the
/// first free entry most significant. Members are yielded as RREF matrices.
#[derive(Clone, Debug)]
pub struct Grassmannian {
    field: GaloisField,
    n: usize,
    d: usize,
    cells: Vec<Cell>,
    total: u64,
}

impl Grassmannian {
    pub fn new(field: &GaloisField, n: usize, d: usize) -> Result<Self> {
        if d > n {
            return Err(Error::invalid(format!("subspace dimension {d} exceeds {n}")));
        }
        let q = field.order();
        let mut cells = Vec::new();
        let mut total: u64 = 0;
        let mut pivots: Vec<usize> = (0..d).collect();
        loop {
            let mut free = Vec::new();
            for (i, &pi) in pivots.iter().enumerate() {
                for c in pi + 1..n {
                    if !pivots[i + 1..].contains(&c) {
                        free.push((i, c));
                    }
                }
            }
            let size = q
                .checked_pow(free.len() as u32)
                .ok_or_else(|| overflow(n, d, q))?;
            cells.push(Cell {
                pivots: pivots.clone(),
                free,
                start: total,
            });
            total = total.checked_add(size).ok_or_else(|| overflow(n, d, q))?;
            if !next_combination(&mut pivots, n) {
                break;
            }
        }
        Ok(Grassmannian {
            field: field.clone(),
            n,
            d,
            cells,
            total,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn cell_of(&self, idx: u64) -> usize {
        self.cells.partition_point(|c| c.start <= idx) - 1
    }

    fn build(&self, cell: &Cell, digits: &[u64]) -> Mat {
        let mut m = Mat::zeros(self.d, self.n);
        for (i, &p) in cell.pivots.iter().enumerate() {
            m.set(i, p, Elt::ONE);
        }
        for (&(r, c), &v) in cell.free.iter().zip(digits) {
            m.set(r, c, Elt(v));
        }
        m
    }

    fn digits_of(&self, cell: &Cell, mut off: u64) -> Vec<u64> {
        let q = self.field.order();
        let mut digits = vec![0u64; cell.free.len()];
        for dgt in digits.iter_mut().rev() {
            *dgt = off % q;
            off /= q;
        }
        digits
    }

    /// The member with canonical index `idx`.
    pub fn unrank(&self, idx: u64) -> Result<Mat> {
        if idx >= self.total {
            return Err(Error::invalid(format!(
                "index {idx} out of range 0..{}",
                self.total
            )));
        }
        let cell = &self.cells[self.cell_of(idx)];
        Ok(self.build(cell, &self.digits_of(cell, idx - cell.start)))
    }

    /// Canonical index of an RREF matrix with `d` independent rows.
    pub fn rank_of(&self, m: &Mat) -> Option<u64> {
        if m.rows() != self.d || m.cols() != self.n {
            return None;
        }
        let pivots: Vec<usize> = (0..self.d)
            .map(|r| m.row(r).iter().position(|e| !e.is_zero()))
            .collect::<Option<_>>()?;
        let cell = self.cells.iter().find(|c| c.pivots == pivots)?;
        let q = self.field.order();
        let mut off = 0u64;
        for &(r, c) in &cell.free {
            off = off * q + m.get(r, c).0;
        }
        Some(cell.start + off)
    }

    pub fn iter(&self) -> GrassIter<'_> {
        self.range(0, self.total)
    }

    /// Members with indices in `start..end`.
    pub fn range(&self, start: u64, end: u64) -> GrassIter<'_> {
        let end = end.min(self.total);
        let (cell, digits) = if start < end {
            let c = self.cell_of(start);
            (c, self.digits_of(&self.cells[c], start - self.cells[c].start))
        } else {
            (0, Vec::new())
        };
        GrassIter {
            g: self,
            cell,
            digits,
            index: start,
            end,
        }
    }
}

fn overflow(n: usize, d: usize, q: u64) -> Error {
    Error::BudgetExceeded {
        what: format!("enumeration of {d}-subspaces of F_{q}^{n}"),
        workload: gaussian_binomial(n, d, q).to_string(),
        budget: u64::MAX,
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let d = c.len();
    for i in (0..d).rev() {
        if c[i] < n - d + i {
            c[i] += 1;
            for j in i + 1..d {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub struct GrassIter<'a> {
    g: &'a Grassmannian,
    cell: usize,
    digits: Vec<u64>,
    index: u64,
    end: u64,
}

impl GrassIter<'_> {
    /// Canonical index of the next member.
    pub fn index(&self) -> u64 {
        self.index
    }
}

impl Iterator for GrassIter<'_> {
    type Item = Mat;

    fn next(&mut self) -> Option<Mat> {
        if self.index >= self.end {
            return None;
        }
        let cell = &self.g.cells[self.cell];
        let out = self.g.build(cell, &self.digits);
        self.index += 1;
        let q = self.g.field.order();
        let mut carry = true;
        for dgt in self.digits.iter_mut().rev() {
            *dgt += 1;
            if *dgt < q {
                carry = false;
                break;
            }
            *dgt = 0;
        }
        if carry && self.index < self.end {
            self.cell += 1;
            self.digits = vec![0; self.g.cells[self.cell].free.len()];
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = (self.end - self.index) as usize;
        (r, Some(r))
    }
}

impl<'a> IntoIterator for &'a Grassmannian {
    type Item = Mat;
    type IntoIter = GrassIter<'a>;

    fn into_iter(self) -> GrassIter<'a> {
        self.iter()
    }
}

/// Every subspace of F^n, all dimensions, canonical order.
pub fn all_subspaces(field: &GaloisField, n: usize) -> Result<Vec<Subspace>> {
    Subspace::full(n).all_subspaces(field)
}

/// Uniformly random `d`-dimensional subspace of F^n.
pub fn random_subspace<R: Rng + ?Sized>(field: &GaloisField, n: usize, d: usize, rng: &mut R) -> Subspace {
    assert!(d <= n);
    loop {
        let data = (0..d * n).map(|_| Elt(rng.random_range(0..field.order()))).collect();
        let s = Subspace::span(field, &Mat::from_vec(d, n, data));
        if s.dim() == d {
            return s;
        }
    }
}

/// Γ-coordinates of a vector of F_(q^m)^k, concatenated block by block.
pub fn expand_vec(t: &FieldTower, v: &[Elt]) -> Vec<Elt> {
    v.iter().flat_map(|&x| t.expand_elt(x)).collect()
}

pub fn contract_vec(t: &FieldTower, w: &[Elt]) -> Vec<Elt> {
    assert_eq!(w.len() % t.m(), 0);
    w.chunks(t.m()).map(|c| t.contract_elt(c)).collect()
}

/// F_q-span of vectors in F_(q^m)^k.
pub fn ext_span(t: &FieldTower, k: usize, vecs: &[Vec<Elt>]) -> Subspace {
    let rows: Vec<Vec<Elt>> = vecs.iter().map(|v| expand_vec(t, v)).collect();
    Subspace::span_rows(t.fq(), k * t.m(), &rows)
}

/// F_(q^m)-span of vectors, as an F_q-subspace of F_(q^m)^k.
pub fn ext_linear_span(t: &FieldTower, k: usize, vecs: &[Vec<Elt>]) -> Subspace {
    let f = t.ext();
    let rows: Vec<Vec<Elt>> = vecs
        .iter()
        .flat_map(|v| {
            t.gamma_basis()
                .iter()
                .map(move |&g| v.iter().map(|&x| f.mul(g, x)).collect::<Vec<_>>())
        })
        .collect();
    ext_span(t, k, &rows)
}

/// Canonical basis rows contracted back to F_(q^m)^k.
pub fn ext_basis(t: &FieldTower, s: &Subspace) -> Vec<Vec<Elt>> {
    (0..s.dim()).map(|r| contract_vec(t, s.basis().row(r))).collect()
}

/// wt_S(V) = dim(S ∩ V).
pub fn weight(field: &GaloisField, s: &Subspace, v: &Subspace) -> Result<usize> {
    Ok(s.intersect(field, v)?.dim())
}

/// Dimension over F_(q^m) of the F_(q^m)-span of an expanded subspace.
pub fn rho(t: &FieldTower, v: &Subspace) -> usize {
    if v.is_zero() {
        return 0;
    }
    let k = v.n() / t.m();
    let rows = ext_basis(t, v);
    linalg::rank(t.ext(), &Mat::from_rows(k, &rows))
}

/// Column space in F_q^n of the n×m matrix of Γ-coordinates of `v`.
pub fn support(t: &FieldTower, v: &[Elt]) -> Subspace {
    let n = v.len();
    let cols: Vec<Vec<Elt>> = (0..t.m())
        .map(|j| v.iter().map(|&x| t.expand_elt(x)[j]).collect())
        .collect();
    Subspace::span_rows(t.fq(), n, &cols)
}

pub fn rank_weight(t: &FieldTower, v: &[Elt]) -> usize {
    support(t, v).dim()
}

/// F_q-subspace of F_(q^m) (k = 1) given by F_q-generators.
pub fn scalar_span(t: &FieldTower, elts: &[Elt]) -> Subspace {
    let rows: Vec<Vec<Elt>> = elts.iter().map(|&e| vec![e]).collect();
    ext_span(t, 1, &rows)
}

/// Elements spanning a subspace of F_(q^m) (k = 1).
pub fn scalar_basis(t: &FieldTower, s: &Subspace) -> Vec<Elt> {
    ext_basis(t, s).into_iter().map(|v| v[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn f(q: u64) -> GaloisField {
        match q {
            4 => GaloisField::with_default_modulus(2, 2).unwrap(),
            _ => GaloisField::prime(q).unwrap(),
        }
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_binomial(3, 2, 2), BigUint::from(7u32));
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(5, 0, 2), BigUint::from(1u32));
        assert_eq!(gaussian_binomial(6, 2, 2), BigUint::from(651u32));
        assert_eq!(subspace_count(5, 2), BigUint::from(374u32));
        assert_eq!(subspace_count(4, 2), BigUint::from(67u32));
    }

    // Independent oracle: canonicalize every d-tuple of vectors of rank d.
    fn brute_force(field: &GaloisField, n: usize, d: usize) -> BTreeSet<Subspace> {
        let q = field.order();
        let nvec = q.pow(n as u32);
        let vec_of = |mut i: u64| {
            (0..n)
                .map(|_| {
                    let e = Elt(i % q);
                    i /= q;
                    e
                })
                .collect::<Vec<_>>()
        };
        let mut out = BTreeSet::new();
        let total = nvec.pow(d as u32);
        for mut idx in 0..total {
            let mut rows = Vec::new();
            for _ in 0..d {
                rows.push(vec_of(idx % nvec));
                idx /= nvec;
            }
            let s = Subspace::span_rows(field, n, &rows);
            if s.dim() == d {
                out.insert(s);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (q, n, d) in [(2u64, 3usize, 2usize), (2, 4, 2), (3, 3, 1), (2, 4, 3), (3, 3, 2), (4, 3, 2)] {
            let field = f(q);
            let g = Grassmannian::new(&field, n, d).unwrap();
            let listed: BTreeSet<Subspace> = g.iter().map(|m| Subspace::span(&field, &m)).collect();
            assert_eq!(listed.len() as u64, g.len());
            assert_eq!(listed, brute_force(&field, n, d), "q={q} n={n} d={d}");
        }
    }

    #[test]
    fn counts_match_product_formula() {
        for q in [2u64, 3] {
            let field = f(q);
            for n in 0..=6 {
                for d in 0..=n {
                    let g = Grassmannian::new(&field, n, d).unwrap();
                    assert_eq!(BigUint::from(g.iter().count()), gaussian_binomial(n, d, q));
                }
            }
        }
    }

    #[test]
    fn members_are_canonical_and_rank_roundtrips() {
        let field = f(3);
        let g = Grassmannian::new(&field, 5, 2).unwrap();
        for (i, m) in g.iter().enumerate() {
            assert_eq!(linalg::rref(&field, &m).matrix, m);
            assert_eq!(g.rank_of(&m), Some(i as u64));
            assert_eq!(g.unrank(i as u64).unwrap(), m);
        }
        // ranges stitch together
        let a: Vec<Mat> = g.range(0, 500).chain(g.range(500, 10_000)).collect();
        assert_eq!(a, g.iter().collect::<Vec<_>>());
        assert_eq!(Grassmannian::new(&field, 3, 0).unwrap().len(), 1);
        assert!(Grassmannian::new(&field, 2, 3).is_err());
    }

    #[test]
    fn lattice_examples() {
        let field = f(2);
        let subs = all_subspaces(&field, 4).unwrap();
        assert_eq!(subs.len(), 67);
        let z = Subspace::zero(4);
        for s in &subs {
            assert_eq!(&s.sum(&field, &z).unwrap(), s);
            assert_eq!(&s.intersect(&field, s).unwrap(), s);
            for t in &subs {
                let sum = s.sum(&field, t).unwrap();
                let int = s.intersect(&field, t).unwrap();
                assert_eq!(s.dim() + t.dim(), sum.dim() + int.dim());
                assert!(sum.contains(&field, s).unwrap() && s.contains(&field, &int).unwrap());
            }
        }
        assert_eq!(
            z.sum(&field, &Subspace::zero(3)),
            Err(Error::AmbientMismatch { left: 4, right: 3 })
        );
    }

    #[test]
    fn expansion_examples() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(expand_vec(&t, &[Elt(2)]), vec![Elt(0), Elt(1)]);
        assert_eq!(expand_vec(&t, &[Elt(0), Elt(0)]), vec![Elt(0); 4]);
        assert_eq!(expand_vec(&t, &[Elt(0), Elt(1)]), vec![Elt(0), Elt(0), Elt(1), Elt(0)]);
        // weight of F_2·1 against F_2·ω is 0; rho of F_2·1 + F_2·ω is 1
        let one = scalar_span(&t, &[Elt(1)]);
        let w = scalar_span(&t, &[Elt(2)]);
        assert_eq!(weight(t.fq(), &one, &w).unwrap(), 0);
        let both = one.sum(t.fq(), &w).unwrap();
        assert_eq!(both.dim(), 2);
        assert_eq!(rho(&t, &both), 1);
        assert_eq!(rho(&t, &Subspace::zero(2)), 0);
        assert_eq!(weight(t.fq(), &one, &Subspace::full(2)).unwrap(), 1);
    }

    #[test]
    fn expansion_is_fq_isomorphism() {
        for (p, h, m, k) in [(2u64, 1usize, 3usize, 2usize), (2, 2, 2, 2), (3, 1, 2, 2)] {
            let t = FieldTower::new(p, h, m).unwrap();
            let qm = t.ext().order();
            let mut seen = BTreeSet::new();
            for i in 0..qm * qm {
                let v: Vec<Elt> = vec![Elt(i % qm), Elt(i / qm)];
                let w = expand_vec(&t, &v[..k]);
                assert_eq!(contract_vec(&t, &w), v[..k].to_vec());
                seen.insert(w.clone());
                for c in t.fq().elements() {
                    let scaled: Vec<Elt> = v.iter().map(|&x| t.ext().mul(t.embed(c), x)).collect();
                    let ws: Vec<Elt> = w.iter().map(|&x| t.fq().mul(c, x)).collect();
                    assert_eq!(expand_vec(&t, &scaled), ws);
                }
                let u: Vec<Elt> = vec![Elt((i * 7 + 3) % qm), Elt((i * 5 + 1) % qm)];
                let s: Vec<Elt> = v.iter().zip(&u).map(|(&a, &b)| t.ext().add(a, b)).collect();
                let sum: Vec<Elt> = expand_vec(&t, &v)
                    .iter()
                    .zip(expand_vec(&t, &u))
                    .map(|(&a, b)| t.fq().add(a, b))
                    .collect();
                assert_eq!(expand_vec(&t, &s), sum);
            }
            assert_eq!(seen.len() as u64, qm * qm);
        }
    }

    #[test]
    fn support_examples() {
        let t = FieldTower::new(2, 1, 3).unwrap();
        let g = t.primitive_generator();
        assert!(support(&t, &[Elt(0), Elt(0), Elt(0)]).is_zero());
        assert_eq!(rank_weight(&t, &[Elt(1), Elt(0), Elt(1)]), 1);
        assert_eq!(rank_weight(&t, &[Elt(1), g, Elt(0)]), 2);
        // rank weight equals the F_q-dimension of the span of the entries
        for a in t.ext().elements() {
            for b in t.ext().elements() {
                let v = [a, b, t.ext().add(a, b)];
                assert_eq!(rank_weight(&t, &v), scalar_span(&t, &v).dim());
            }
        }
    }

    #[test]
    fn weight_and_rho_bounds() {
        let t = FieldTower::new(2, 1, 3).unwrap();
        let fq = t.fq();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d1 = rng.random_range(0..=6);
            let d2 = rng.random_range(0..=6);
            let s = random_subspace(fq, 6, d1, &mut rng);
            let v = random_subspace(fq, 6, d2, &mut rng);
            let w = weight(fq, &s, &v).unwrap();
            assert!(w <= s.dim().min(v.dim()));
            let vv = v.sum(fq, &random_subspace(fq, 6, 1, &mut rng)).unwrap();
            assert!(weight(fq, &s, &vv).unwrap() >= w);
            assert!(rho(&t, &v) <= v.dim().min(2));
            assert!(rho(&t, &vv) >= rho(&t, &v));
            if v.dim() == 1 {
                assert_eq!(rho(&t, &v), 1);
            }
        }
    }

    #[test]
    fn subspaces_of_subspace() {
        let field = f(2);
        let v = Subspace::span_rows(&field, 4, &[vec![Elt(1), Elt(1), Elt(0), Elt(0)], vec![Elt(0), Elt(0), Elt(1), Elt(1)]]);
        let subs = v.all_subspaces(&field).unwrap();
        assert_eq!(subs.len(), 5);
        for s in &subs {
            assert!(v.contains(&field, s).unwrap());
        }
    }
}
