//! Dense exact linear algebra over a [`GaloisField`].
//!
//! Every field level of the tower shares this one elimination kernel: F_p
//! matrices for F_q-linear maps on F_(q^m), F_q matrices for expanded
//! subspaces, and F_(q^m) matrices for generator matrices and annihilators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Elt, GaloisField};

/// Row-major matrix of field elements. The field is passed to each operation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Elt>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r).iter().map(|e| e.0).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Elt::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elt::ONE);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elt>) -> Self {
        assert_eq!(rows * cols, data.len());
        Mat { rows, cols, data }
    }

    /// Builds from row vectors; `cols` is needed when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vec<Elt>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elt {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elt) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Elt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Elt]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, range: std::ops::Range<usize>) -> Mat {
        let cols = range.len();
        let mut out = Mat::zeros(self.rows, cols);
        for r in 0..self.rows {
            for (j, c) in range.clone().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn take_rows(&self, n: usize) -> Mat {
        Mat {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    pub fn map(&self, mut f: impl FnMut(Elt) -> Elt) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn mul(&self, field: &GaloisField, rhs: &Mat) -> Result<Mat> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = field.add(out.get(i, j), field.mul(a, rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, field: &GaloisField, v: &[Elt]) -> Vec<Elt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Elt::ZERO; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let row = self.row(k);
            for (o, &b) in out.iter_mut().zip(row) {
                *o = field.add(*o, field.mul(a, b));
            }
        }
        out
    }
}

/// Reduced row echelon form with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input; zero rows at the bottom.
    pub matrix: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Rref {
    /// The nonzero rows only.
    pub fn basis(&self) -> Mat {
        self.matrix.take_rows(self.rank)
    }
}

pub fn rref(field: &GaloisField, m: &Mat) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = field.inv(a.get(r, c)).expect("pivot is nonzero");
        if inv != Elt::ONE {
            for j in c..cols {
                let v = field.mul(a.get(r, j), inv);
                a.set(r, j, v);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c);
            if f.is_zero() {
                continue;
            }
            let nf = field.neg(f);
            for j in c..cols {
                let v = field.add(a.get(i, j), field.mul(nf, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref {
        matrix: a,
        rank: r,
        pivots,
    }
}

pub fn rank(field: &GaloisField, m: &Mat) -> usize {
    rref(field, m).rank
}

/// Basis of the right null space `{v : M v^T = 0}`, one vector per row.
pub fn kernel_basis(field: &GaloisField, m: &Mat) -> Mat {
    let red = rref(field, m);
    let cols = m.cols;
    let is_pivot = {
        let mut v = vec![false; cols];
        for &p in &red.pivots {
            v[p] = true;
        }
        v
    };
    let mut out = Mat::zeros(0, cols);
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Elt::ZERO; cols];
        v[free] = Elt::ONE;
        for (i, &pc) in red.pivots.iter().enumerate() {
            v[pc] = field.neg(red.matrix.get(i, free));
        }
        out.push_row(&v);
    }
    out
}

/// Canonical (RREF) basis of `rowspace(a) ∩ rowspace(b)`, Zassenhaus style:
/// reduce `[[a, a], [b, 0]]`; rows with a zero left half carry the intersection.
pub fn intersect_rowspaces(field: &GaloisField, a: &Mat, b: &Mat) -> Result<Mat> {
    if a.cols != b.cols {
        return Err(Error::AmbientMismatch {
            left: a.cols,
            right: b.cols,
        });
    }
    let n = a.cols;
    let mut big = Mat::zeros(0, 2 * n);
    for r in 0..a.rows {
        let mut row = a.row(r).to_vec();
        row.extend_from_slice(a.row(r));
        big.push_row(&row);
    }
    for r in 0..b.rows {
        let mut row = b.row(r).to_vec();
        row.extend(std::iter::repeat_n(Elt::ZERO, n));
        big.push_row(&row);
    }
    let red = rref(field, &big);
    let mut inter = Mat::zeros(0, n);
    for r in 0..red.rank {
        let row = red.matrix.row(r);
        if row[..n].iter().all(|e| e.is_zero()) {
            inter.push_row(&row[n..]);
        }
    }
    Ok(rref(field, &inter).basis())
}

/// Coordinates `x` with `x · basis = v`, if `v` lies in the row space.
pub fn solve_left(field: &GaloisField, basis: &Mat, v: &[Elt]) -> Option<Vec<Elt>> {
    // Solve basis^T x^T = v^T through the augmented system.
    let k = basis.rows;
    let n = basis.cols;
    let mut aug = Mat::zeros(n, k + 1);
    for i in 0..n {
        for j in 0..k {
            aug.set(i, j, basis.get(j, i));
        }
        aug.set(i, k, v[i]);
    }
    let red = rref(field, &aug);
    if red.pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Elt::ZERO; k];
    for (i, &pc) in red.pivots.iter().enumerate() {
        x[pc] = red.matrix.get(i, k);
    }
    // Free variables set to zero; verify (basis may be dependent).
    let check = basis.apply_row(field, &x);
    (check == v).then_some(x)
}

pub fn inverse(field: &GaloisField, m: &Mat) -> Option<Mat> {
    if m.rows != m.cols {
        return None;
    }
    let n = m.rows;
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, Elt::ONE);
    }
    let red = rref(field, &aug);
    if red.pivots.iter().take(n).copied().ne(0..n) || red.rank < n {
        return None;
    }
    Some(red.matrix.select_cols(n..2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(f: &GaloisField, rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
        let data = (0..r * c).map(|_| Elt(rng.random_range(0..f.order()))).collect();
        Mat::from_vec(r, c, data)
    }

    #[test]
    fn identity_and_zero() {
        let f = GaloisField::prime(2).unwrap();
        let id = Mat::identity(4);
        let r = rref(&f, &id);
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 4);
        assert_eq!(kernel_basis(&f, &id).rows(), 0);
        let z = Mat::zeros(3, 5);
        let r = rref(&f, &z);
        assert_eq!(r.rank, 0);
        assert_eq!(r.matrix, z);
        assert_eq!(kernel_basis(&f, &z).rows(), 5);
    }

    #[test]
    fn hand_elimination_f2() {
        let f = GaloisField::prime(2).unwrap();
        let m = Mat::from_rows(2, &[vec![Elt(1), Elt(1)], vec![Elt(1), Elt(1)]]);
        let r = rref(&f, &m);
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.matrix.row(0), &[Elt(1), Elt(1)]);
        assert!(r.matrix.row(1).iter().all(|e| e.is_zero()));
    }

    #[test]
    fn rank_nullity_random() {
        for p in [2u64, 3] {
            let f = GaloisField::prime(p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..1000 {
                let (r, c) = (rng.random_range(0..6), rng.random_range(1..7));
                let m = random_mat(&f, &mut rng, r, c);
                let k = kernel_basis(&f, &m);
                let red = rref(&f, &m);
                assert_eq!(red.rank + k.rows(), c);
                for i in 0..k.rows() {
                    let img = m.mul(&f, &Mat::from_rows(c, &[k.row(i).to_vec()]).transpose()).unwrap();
                    assert!(img.is_zero());
                }
                // idempotence
                assert_eq!(rref(&f, &red.matrix), red);
            }
        }
    }

    #[test]
    fn rref_invariant_under_row_operations() {
        let f = GaloisField::with_default_modulus(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_mat(&f, &mut rng, 4, 5);
            let mut n = m.clone();
            // random invertible row mixing
            for _ in 0..10 {
                let (i, j) = (rng.random_range(0..4), rng.random_range(0..4));
                if i == j {
                    continue;
                }
                let c = Elt(rng.random_range(0..f.order()));
                for col in 0..5 {
                    let v = f.add(n.get(i, col), f.mul(c, n.get(j, col)));
                    n.set(i, col, v);
                }
            }
            assert_eq!(rref(&f, &m).matrix, rref(&f, &n).matrix);
        }
    }

    #[test]
    fn intersection_modular_identity() {
        let f = GaloisField::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a = random_mat(&f, &mut rng, 3, 4);
            let b = random_mat(&f, &mut rng, 2, 4);
            let i = intersect_rowspaces(&f, &a, &b).unwrap();
            let s = rank(&f, &a.vstack(&b));
            assert_eq!(rank(&f, &a) + rank(&f, &b), s + i.rows());
            // intersection rows lie in both spaces
            for r in 0..i.rows() {
                assert!(solve_left(&f, &a, i.row(r)).is_some());
                assert!(solve_left(&f, &b, i.row(r)).is_some());
            }
        }
        let v = Mat::from_rows(4, &[vec![Elt(1), Elt(0), Elt(1), Elt(0)]]);
        assert_eq!(intersect_rowspaces(&f, &v, &v).unwrap(), v);
        assert_eq!(intersect_rowspaces(&f, &v, &Mat::zeros(0, 4)).unwrap().rows(), 0);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = GaloisField::prime(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = 0;
        for _ in 0..50 {
            let m = random_mat(&f, &mut rng, 3, 3);
            if let Some(inv) = inverse(&f, &m) {
                assert_eq!(m.mul(&f, &inv).unwrap(), Mat::identity(3));
                found += 1;
            } else {
                assert!(rank(&f, &m) < 3);
            }
        }
        assert!(found > 0);
    }
}
