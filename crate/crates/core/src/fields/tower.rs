use serde::{Deserialize, Serialize};

use super::gf::{Elt, GaloisField};
use super::poly;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Parameters of the tower F_p ⊆ F_q = F_(p^h) ⊆ F_(q^m).
///
/// `modulus` is the monic irreducible of degree `h*m` over F_p (low degree
/// first) defining the single carrier F_p[x]/(modulus) of F_(q^m).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub h: usize,
    pub m: usize,
    pub modulus: Vec<u64>,
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        self.p.pow(self.h as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Arithmetic in F_(q^m) together with its F_q-structure.
///
/// F_q scalars live in their own small field (default modulus of degree `h`)
/// and are embedded into F_(q^m) through a fixed root of that modulus. F_q
/// coordinates of F_(q^m) elements are taken with respect to
/// Γ = (1, γ, ..., γ^(m-1)) where γ is [`FieldTower::primitive_generator`].
#[derive(Clone, Debug)]
pub struct FieldTower {
    spec: FieldSpec,
    fp: GaloisField,
    fq: GaloisField,
    ext: GaloisField,
    beta_powers: Vec<Elt>,
    gamma: Elt,
    gamma_powers: Vec<Elt>,
    // fp_basis[j*h + a] = beta^a * gamma^j
    fp_basis: Vec<Elt>,
    coord_inv: Mat,
    embed_table: Vec<Elt>,
}

impl FieldTower {
    /// Tower with the deterministic default modulus.
    pub fn new(p: u64, h: usize, m: usize) -> Result<Self> {
        Self::check_params(p, h, m)?;
        let ext = GaloisField::with_default_modulus(p, h * m)?;
        Self::build(p, h, m, ext)
    }

    /// Tower for `q = p^h`.
    pub fn for_q(q: u64, m: usize) -> Result<Self> {
        let (p, h) = poly::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, h, m)
    }

    /// Tower over a user-supplied modulus, checked for irreducibility.
    pub fn with_modulus(p: u64, h: usize, m: usize, modulus: Vec<u64>) -> Result<Self> {
        Self::check_params(p, h, m)?;
        if modulus.len() != h * m + 1 {
            return Err(Error::BadModulus { p, degree: h * m });
        }
        let ext = GaloisField::new(p, modulus)?;
        Self::build(p, h, m, ext)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::with_modulus(spec.p, spec.h, spec.m, spec.modulus.clone())
    }

    fn check_params(p: u64, h: usize, m: usize) -> Result<()> {
        if !poly::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if h == 0 || m == 0 {
            return Err(Error::invalid("h and m must be at least 1"));
        }
        Ok(())
    }

    fn build(p: u64, h: usize, m: usize, ext: GaloisField) -> Result<Self> {
        let fp = GaloisField::prime(p)?;
        let fq = GaloisField::with_default_modulus(p, h)?;
        let d = h * m;

        // Root of the F_q modulus inside the fixed field of x -> x^(p^h).
        let beta = if h == 1 {
            Elt::ZERO
        } else {
            let fixed = fixed_field_fp_basis(&fp, &ext, h);
            let g = fq.modulus().to_vec();
            all_combinations(&fp, &ext, &fixed)
                .into_iter()
                .filter(|&b| eval_poly(&ext, &g, b).is_zero())
                .min()
                .ok_or_else(|| Error::LemmaViolation("no root of the F_q modulus".into()))?
        };
        let mut beta_powers = vec![Elt::ONE];
        for _ in 1..h {
            let last = *beta_powers.last().unwrap();
            beta_powers.push(ext.mul(last, beta));
        }

        let fp_basis_for = |g: Elt| -> Vec<Elt> {
            let mut out = Vec::with_capacity(d);
            let mut gj = Elt::ONE;
            for _ in 0..m {
                for &b in &beta_powers {
                    out.push(ext.mul(b, gj));
                }
                gj = ext.mul(gj, g);
            }
            out
        };
        let digit_matrix = |elts: &[Elt]| -> Mat {
            let rows: Vec<Vec<Elt>> = elts
                .iter()
                .map(|&e| ext.digits(e).into_iter().map(Elt).collect())
                .collect();
            Mat::from_rows(d, &rows)
        };

        let gamma = (1..ext.order())
            .map(Elt)
            .find(|&g| linalg::rank(&fp, &digit_matrix(&fp_basis_for(g))) == d)
            .expect("a field generator always exists");
        let fp_basis = fp_basis_for(gamma);
        let coord_inv = linalg::inverse(&fp, &digit_matrix(&fp_basis)).expect("basis is invertible");
        let mut gamma_powers = vec![Elt::ONE];
        for _ in 1..m {
            let last = *gamma_powers.last().unwrap();
            gamma_powers.push(ext.mul(last, gamma));
        }

        let spec = FieldSpec {
            p,
            h,
            m,
            modulus: ext.modulus().to_vec(),
        };
        let mut tower = FieldTower {
            spec,
            fp,
            fq,
            ext,
            beta_powers,
            gamma,
            gamma_powers,
            fp_basis,
            coord_inv,
            embed_table: Vec::new(),
        };
        if tower.fq.order() <= 1 << 16 {
            tower.embed_table = tower.fq.elements().map(|c| tower.embed_slow(c)).collect();
        }
        Ok(tower)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn h(&self) -> usize {
        self.spec.h
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn q(&self) -> u64 {
        self.fq.order()
    }

    /// F_p.
    pub fn fp(&self) -> &GaloisField {
        &self.fp
    }

    /// F_q, the scalar field of every expanded subspace.
    pub fn fq(&self) -> &GaloisField {
        &self.fq
    }

    /// F_(q^m).
    pub fn ext(&self) -> &GaloisField {
        &self.ext
    }

    /// Checked field arithmetic on F_(q^m).
    pub fn arith(&self, a: Elt, b: Elt, op: ArithOp) -> Result<Elt> {
        let (a, b) = (self.ext.check(a)?, self.ext.check(b)?);
        Ok(match op {
            ArithOp::Add => self.ext.add(a, b),
            ArithOp::Sub => self.ext.sub(a, b),
            ArithOp::Mul => self.ext.mul(a, b),
            ArithOp::Div => self.ext.div(a, b)?,
        })
    }

    /// x^(q^e).
    pub fn frobenius_q(&self, x: Elt, e: usize) -> Elt {
        let q = self.q() as u128;
        let mut y = x;
        for _ in 0..e % self.m() {
            y = self.ext.pow(y, q);
        }
        y
    }

    fn check_divisor(&self, r: usize) -> Result<()> {
        if r == 0 || self.m() % r != 0 {
            return Err(Error::NotADivisor { r, m: self.m() });
        }
        Ok(())
    }

    /// Membership in F_(q^r) ⊆ F_(q^m).
    pub fn is_in_subfield(&self, x: Elt, r: usize) -> Result<bool> {
        self.check_divisor(r)?;
        Ok(self.frobenius_q(x, r) == x)
    }

    /// F_p-basis (h·r elements) of F_(q^r), the kernel of x -> x^(q^r) - x.
    pub fn subfield_basis(&self, r: usize) -> Result<Vec<Elt>> {
        self.check_divisor(r)?;
        let map = self.fp_linear_map(|x| self.ext.sub(self.frobenius_q(x, r), x));
        let ker = self.fp_kernel(&map);
        debug_assert_eq!(ker.len(), self.h() * r);
        Ok(ker)
    }

    /// The generator γ of F_(q^m) over F_q defining Γ.
    pub fn primitive_generator(&self) -> Elt {
        self.gamma
    }

    /// Γ = (1, γ, ..., γ^(m-1)).
    pub fn gamma_basis(&self) -> &[Elt] {
        &self.gamma_powers
    }

    /// Materializes an F_p-linear map on F_(q^m) as the matrix M with
    /// `digits(f(x)) = digits(x) · M`.
    pub fn fp_linear_map(&self, f: impl Fn(Elt) -> Elt) -> Mat {
        let d = self.ext.degree();
        let rows: Vec<Vec<Elt>> = (0..d)
            .map(|i| {
                let x = self.ext.from_digits(&unit(d, i));
                self.ext.digits(f(x)).into_iter().map(Elt).collect()
            })
            .collect();
        Mat::from_rows(d, &rows)
    }

    /// Elements spanning `{x : digits(x) · M = 0}`.
    pub fn fp_kernel(&self, map: &Mat) -> Vec<Elt> {
        let ker = linalg::kernel_basis(&self.fp, &map.transpose());
        (0..ker.rows()).map(|r| self.elt_from_fp_row(ker.row(r))).collect()
    }

    pub fn elt_from_fp_row(&self, row: &[Elt]) -> Elt {
        let digits: Vec<u64> = row.iter().map(|e| e.0).collect();
        self.ext.from_digits(&digits)
    }

    /// Embeds an F_q scalar into F_(q^m).
    #[inline]
    pub fn embed(&self, c: Elt) -> Elt {
        if let Some(&e) = self.embed_table.get(c.0 as usize) {
            return e;
        }
        self.embed_slow(c)
    }

    fn embed_slow(&self, c: Elt) -> Elt {
        let digits = self.fq.digits(c);
        digits
            .iter()
            .zip(&self.beta_powers)
            .fold(Elt::ZERO, |acc, (&d, &b)| self.ext.add(acc, self.ext.scale(d, b)))
    }

    /// F_q-coordinates of `x` with respect to Γ.
    pub fn expand_elt(&self, x: Elt) -> Vec<Elt> {
        let h = self.h();
        let digits = self.ext.digits(x);
        let mut c = vec![0u64; digits.len()];
        let p = self.p();
        for (i, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            for (j, cj) in c.iter_mut().enumerate() {
                *cj = (*cj + d * self.coord_inv.get(i, j).0) % p;
            }
        }
        (0..self.m())
            .map(|j| self.fq.from_digits(&c[j * h..(j + 1) * h]))
            .collect()
    }

    /// Inverse of [`expand_elt`](Self::expand_elt).
    pub fn contract_elt(&self, coords: &[Elt]) -> Elt {
        debug_assert_eq!(coords.len(), self.m());
        let h = self.h();
        let mut acc = Elt::ZERO;
        for (j, &c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (a, d) in self.fq.digits(c).into_iter().enumerate() {
                if d != 0 {
                    acc = self.ext.add(acc, self.ext.scale(d, self.fp_basis[j * h + a]));
                }
            }
        }
        acc
    }

    /// Recovers an F_q scalar from an element of the fixed field of Frobenius.
    pub fn restrict_to_fq(&self, x: Elt) -> Option<Elt> {
        let c = self.expand_elt(x);
        c[1..].iter().all(|e| e.is_zero()).then_some(c[0])
    }
}

fn unit(d: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0u64; d];
    v[i] = 1;
    v
}

fn eval_poly(f: &GaloisField, coeffs: &[u64], x: Elt) -> Elt {
    coeffs
        .iter()
        .rev()
        .fold(Elt::ZERO, |acc, &c| f.add(f.mul(acc, x), f.from_prime(c)))
}

/// F_p-basis of the fixed field of x -> x^(p^e) inside `ext`.
fn fixed_field_fp_basis(fp: &GaloisField, ext: &GaloisField, e: usize) -> Vec<Elt> {
    let d = ext.degree();
    let rows: Vec<Vec<Elt>> = (0..d)
        .map(|i| {
            let x = ext.from_digits(&unit(d, i));
            let mut y = x;
            for _ in 0..e {
                y = ext.pow(y, ext.p() as u128);
            }
            ext.digits(ext.sub(y, x)).into_iter().map(Elt).collect()
        })
        .collect();
    let ker = linalg::kernel_basis(fp, &Mat::from_rows(d, &rows).transpose());
    (0..ker.rows())
        .map(|r| ext.from_digits(&ker.row(r).iter().map(|e| e.0).collect::<Vec<_>>()))
        .collect()
}

/// Every F_p-combination of `basis`.
fn all_combinations(fp: &GaloisField, ext: &GaloisField, basis: &[Elt]) -> Vec<Elt> {
    let mut out = vec![Elt::ZERO];
    for &b in basis {
        let mut next = Vec::with_capacity(out.len() * fp.order() as usize);
        for &x in &out {
            for c in 0..fp.order() {
                next.push(ext.add(x, ext.scale(c, b)));
            }
        }
        out = next;
    }
    out
}
