use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

/// Element of a [`GaloisField`], packed as `sum c_i p^i` over its power-basis
/// coefficients (constant term least significant).
///
/// The packed value doubles as the canonical element order, so `Elt(0)` is
/// zero, `Elt(1)` is one and for degree > 1, `Elt(p)` is the modulus root.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elt(pub u64);

impl fmt::Debug for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl Elt {
    pub const ZERO: Elt = Elt(0);
    pub const ONE: Elt = Elt(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug)]
struct Tables {
    // log[0] unused
    log: Vec<u32>,
    // exp over two periods so log sums need no reduction
    exp: Vec<u64>,
    // zech[i] = log(1 + g^i), u32::MAX when 1 + g^i = 0; only for odd p
    zech: Vec<u32>,
}

/// The field F_p[x]/(modulus) of order p^degree.
///
/// Cheap to clone; the optional log/antilog tables for small orders are shared.
#[derive(Clone)]
pub struct GaloisField {
    p: u64,
    degree: usize,
    modulus: Vec<u64>,
    order: u64,
    pow_p: Vec<u64>,
    // binary fields: modulus bits including the leading one
    modulus_bits: u128,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.degree, self.modulus)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    /// Builds F_p[x]/(modulus); `modulus` is monic, low degree first.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !poly::is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        let degree = modulus.len().saturating_sub(1);
        if degree == 0 || modulus.iter().any(|&c| c >= p) || !poly::is_irreducible(&modulus, p) {
            return Err(Error::BadModulus { p, degree });
        }
        let mut order: u64 = 1;
        let mut pow_p = Vec::with_capacity(degree);
        for _ in 0..degree {
            pow_p.push(order);
            order = order
                .checked_mul(p)
                .filter(|&o| o < 1 << 63)
                .ok_or(Error::FieldTooLarge { p, degree })?;
        }
        let modulus_bits = if p == 2 {
            modulus
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i))
        } else {
            0
        };
        let mut field = GaloisField {
            p,
            degree,
            modulus,
            order,
            pow_p,
            modulus_bits,
            tables: None,
        };
        if order <= TABLE_LIMIT {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        Ok(field)
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, vec![0, 1])
    }

    /// GF(p^degree) with the lexicographically smallest irreducible modulus.
    pub fn with_default_modulus(p: u64, degree: usize) -> Result<Self> {
        if !poly::is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::BadModulus { p, degree });
        }
        if (p as f64).powi(degree as i32) >= 2f64.powi(63) {
            return Err(Error::FieldTooLarge { p, degree });
        }
        Self::new(p, poly::smallest_irreducible(p, degree))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> Elt {
        Elt::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elt {
        Elt::ONE
    }

    pub fn contains(&self, a: Elt) -> bool {
        a.0 < self.order
    }

    pub fn check(&self, a: Elt) -> Result<Elt> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::ForeignElement(a.0))
        }
    }

    /// Iterates all elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Elt> + Clone {
        (0..self.order).map(Elt)
    }

    pub fn digits(&self, a: Elt) -> Vec<u64> {
        let mut out = vec![0u64; self.degree];
        self.digits_into(a, &mut out);
        out
    }

    #[inline]
    fn digits_into(&self, a: Elt, out: &mut [u64]) {
        let mut r = a.0;
        if self.p == 2 {
            for (i, d) in out.iter_mut().enumerate().take(self.degree) {
                *d = (r >> i) & 1;
            }
            return;
        }
        for d in out.iter_mut().take(self.degree) {
            *d = r % self.p;
            r /= self.p;
        }
    }

    pub fn from_digits(&self, digits: &[u64]) -> Elt {
        debug_assert!(digits.len() <= self.degree);
        let mut v = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            v += (d % self.p) * self.pow_p[i];
        }
        Elt(v)
    }

    /// Embeds an F_p scalar.
    pub fn from_prime(&self, c: u64) -> Elt {
        Elt(c % self.p)
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        if self.p == 2 {
            return Elt(a.0 ^ b.0);
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if self.degree == 1 {
            return Elt((a.0 + b.0) % self.p);
        }
        if let Some(t) = &self.tables {
            let n1 = self.order - 1;
            let la = t.log[a.0 as usize] as u64;
            let lb = t.log[b.0 as usize] as u64;
            let d = (lb + n1 - la) % n1;
            let z = t.zech[d as usize];
            if z == u32::MAX {
                return Elt::ZERO;
            }
            return Elt(t.exp[(la + z as u64) as usize]);
        }
        let mut out = 0u64;
        let (mut x, mut y) = (a.0, b.0);
        for i in 0..self.degree {
            let s = (x % self.p + y % self.p) % self.p;
            out += s * self.pow_p[i];
            x /= self.p;
            y /= self.p;
        }
        Elt(out)
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        if self.p == 2 || a.is_zero() {
            return a;
        }
        if self.degree == 1 {
            return Elt(self.p - a.0);
        }
        if let Some(t) = &self.tables {
            let n1 = self.order - 1;
            let la = t.log[a.0 as usize] as u64;
            return Elt(t.exp[(la + n1 / 2) as usize]);
        }
        let mut out = 0u64;
        let mut x = a.0;
        for i in 0..self.degree {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * self.pow_p[i];
            x /= self.p;
        }
        Elt(out)
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a.is_zero() || b.is_zero() {
            return Elt::ZERO;
        }
        if let Some(t) = &self.tables {
            let s = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return Elt(t.exp[s]);
        }
        self.mul_raw(a, b)
    }

    fn mul_raw(&self, a: Elt, b: Elt) -> Elt {
        if self.degree == 1 {
            return Elt(((a.0 as u128 * b.0 as u128) % self.p as u128) as u64);
        }
        if self.p == 2 {
            let mut acc: u128 = 0;
            let x = a.0 as u128;
            let mut y = b.0;
            let mut i = 0;
            while y != 0 {
                if y & 1 == 1 {
                    acc ^= x << i;
                }
                y >>= 1;
                i += 1;
            }
            let d = self.degree;
            for bit in (d..2 * d).rev() {
                if (acc >> bit) & 1 == 1 {
                    acc ^= self.modulus_bits << (bit - d);
                }
            }
            return Elt(acc as u64);
        }
        let d = self.degree;
        let p = self.p;
        let mut xa = [0u64; 64];
        let mut xb = [0u64; 64];
        self.digits_into(a, &mut xa);
        self.digits_into(b, &mut xb);
        let mut prod = [0u64; 128];
        for i in 0..d {
            if xa[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + xa[i] * xb[j]) % p;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..d {
                let t = prod[i - d + j] + p - (c * self.modulus[j]) % p;
                prod[i - d + j] = t % p;
            }
            prod[i] = 0;
        }
        self.from_digits(&prod[..d])
    }

    pub fn pow(&self, a: Elt, mut e: u128) -> Elt {
        let mut acc = Elt::ONE;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elt) -> Result<Elt> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let n1 = self.order - 1;
            let la = t.log[a.0 as usize] as u64;
            return Ok(Elt(t.exp[((n1 - la) % n1) as usize]));
        }
        Ok(self.pow(a, self.order as u128 - 2))
    }

    pub fn div(&self, a: Elt, b: Elt) -> Result<Elt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Multiplies by an F_p scalar.
    pub fn scale(&self, c: u64, a: Elt) -> Elt {
        self.mul(self.from_prime(c), a)
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Elt) -> u64 {
        assert!(!a.is_zero());
        let n1 = self.order - 1;
        let mut ord = n1;
        for l in poly::prime_factors(n1) {
            while ord % l == 0 && self.pow(a, (ord / l) as u128) == Elt::ONE {
                ord /= l;
            }
        }
        ord
    }

    fn build_tables(&self) -> Tables {
        let n1 = self.order - 1;
        let g = (1..self.order)
            .map(Elt)
            .find(|&g| self.multiplicative_order(g) == n1)
            .expect("finite fields have primitive elements");
        let mut exp = vec![0u64; 2 * n1 as usize + 1];
        let mut log = vec![0u32; self.order as usize];
        let mut cur = Elt::ONE;
        for i in 0..n1 as usize {
            exp[i] = cur.0;
            exp[i + n1 as usize] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_raw(cur, g);
        }
        exp[2 * n1 as usize] = 1;
        let mut zech = Vec::new();
        if self.p != 2 {
            zech = (0..n1 as usize)
                .map(|i| {
                    // 1 + g^i computed digit-wise
                    let mut digits = self.digits(Elt(exp[i]));
                    digits[0] = (digits[0] + 1) % self.p;
                    let s = self.from_digits(&digits);
                    if s.is_zero() {
                        u32::MAX
                    } else {
                        log[s.0 as usize]
                    }
                })
                .collect();
        }
        Tables { log, exp, zech }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mul(f: &GaloisField, a: Elt, b: Elt) -> Elt {
        f.mul_raw(a, b)
    }

    #[test]
    fn gf4_omega_squared() {
        let f = GaloisField::new(2, vec![1, 1, 1]).unwrap();
        let w = Elt(2);
        assert_eq!(f.mul(w, w), Elt(3)); // omega + 1
    }

    #[test]
    fn tables_agree_with_schoolbook() {
        for (p, d) in [(2u64, 4usize), (3, 3), (5, 2), (7, 1), (3, 1)] {
            let f = GaloisField::with_default_modulus(p, d).unwrap();
            assert!(f.tables.is_some());
            for a in f.elements() {
                for b in f.elements().step_by(3) {
                    assert_eq!(f.mul(a, b), naive_mul(&f, a, b));
                    // digit-wise addition reference
                    let da = f.digits(a);
                    let db = f.digits(b);
                    let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    assert_eq!(f.add(a, b), f.from_digits(&s));
                }
                assert_eq!(f.add(a, f.neg(a)), Elt::ZERO);
            }
        }
    }

    #[test]
    fn large_binary_field_inverse() {
        let f = GaloisField::with_default_modulus(2, 30).unwrap();
        assert!(f.tables.is_none());
        for a in [1u64, 2, 12345, (1 << 30) - 1, 987654321] {
            let x = Elt(a);
            assert_eq!(f.mul(x, f.inv(x).unwrap()), Elt::ONE);
        }
    }

    #[test]
    fn large_odd_field_arith() {
        let f = GaloisField::with_default_modulus(5, 12).unwrap();
        assert!(f.tables.is_none());
        let a = Elt(123_456);
        let b = Elt(7_654_321);
        assert_eq!(f.sub(f.add(a, b), b), a);
        assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(GaloisField::new(4, vec![0, 1]).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(
            GaloisField::new(2, vec![1, 0, 1]),
            Err(Error::BadModulus { .. })
        ));
        assert!(matches!(
            GaloisField::with_default_modulus(2, 64),
            Err(Error::FieldTooLarge { .. })
        ));
        let f = GaloisField::prime(3).unwrap();
        assert_eq!(f.inv(Elt::ZERO), Err(Error::DivisionByZero));
    }
}
