//! Dense polynomials over a prime field, coefficients low degree first.
//!
//! Only what modulus selection needs: reduction, gcd, modular powering and
//! the Rabin irreducibility test.

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q` as `p^h`.
pub(crate) fn prime_power(q: u64) -> Option<(u64, usize)> {
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut h = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        h += 1;
    }
    Some((p, h))
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = match degree(m) {
        Some(d) => d,
        None => panic!("polynomial remainder by zero"),
    };
    let lead_inv = inv_mod(m[dm], p);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = r[dr] * lead_inv % p;
        let shift = dr - dm;
        for (j, &mj) in m.iter().enumerate().take(dm + 1) {
            r[shift + j] = (r[shift + j] + p - c * mj % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect::<Vec<_>>();
    trim(&mut out);
    out
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn pow_poly_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// `x^(p^k) mod f` by `k` successive p-th powers.
fn frobenius_x(f: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut cur = rem(&[0, 1], f, p);
    for _ in 0..k {
        cur = pow_poly_mod(&cur, p, f, p);
    }
    cur
}

/// Rabin's test: `f` monic of degree `d` is irreducible iff
/// `x^(p^d) = x mod f` and `gcd(x^(p^(d/l)) - x, f) = 1` for every prime `l | d`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = match degree(f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if f[d] != 1 || f.len() != d + 1 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    if sub(&frobenius_x(f, d, p), &x, p) != Vec::<u64>::new() {
        return false;
    }
    for l in prime_factors(d as u64) {
        let g = gcd(&sub(&frobenius_x(f, d / l as usize, p), &x, p), f, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

fn has_prime_field_root(f: &[u64], p: u64) -> bool {
    (0..p.min(64)).any(|x| f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0)
}

/// Lexicographically smallest monic irreducible of degree `d`, comparing
/// coefficient tuples with the constant term first.
pub(crate) fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    // Tuples (c_0, ..., c_{d-1}) in lex order: c_0 is the most significant digit.
    let total = (p as u128).pow(d as u32);
    // For d > 1 a zero constant term means x divides f: skip that whole block.
    let mut idx: u128 = if d > 1 { total / p as u128 } else { 0 };
    while idx < total {
        let mut f = vec![0u64; d + 1];
        let mut r = idx;
        for i in (0..d).rev() {
            f[i] = (r % p as u128) as u64;
            r /= p as u128;
        }
        f[d] = 1;
        if (d == 1 || !has_prime_field_root(&f, p)) && is_irreducible(&f, p) {
            return f;
        }
        idx += 1;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_powers() {
        assert!(is_prime(2) && is_prime(3) && is_prime(31));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(0));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_factors(60), vec![2, 3, 5]);
    }

    #[test]
    fn irreducibility_small_binary() {
        // x^2+x+1 irreducible, x^2+1 = (x+1)^2 not.
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 0, 1, 1], 2));
        // (x+1)(x^2+x+1)(x^3+x+1) = x^6+x^4+x+1: x^(2^6) = x and x^(2^(6/l)) != x
        // for l = 2, 3, yet it is reducible. Only the gcd form rejects it.
        assert!(!is_irreducible(&[1, 1, 0, 0, 1, 0, 1], 2));
    }

    #[test]
    fn irreducible_count_matches_necklace_formula() {
        // Number of monic irreducibles of degree d over F_p: (1/d) sum_{e|d} mu(e) p^(d/e).
        fn mobius(n: u64) -> i64 {
            let f = prime_factors(n);
            let sq = f.iter().any(|&q| n % (q * q) == 0);
            if sq {
                0
            } else if f.len() % 2 == 0 {
                1
            } else {
                -1
            }
        }
        for (p, d) in [(2u64, 4usize), (2, 6), (3, 3), (5, 2)] {
            let expected: i64 = (1..=d as u64)
                .filter(|e| d as u64 % e == 0)
                .map(|e| mobius(e) * (p as i64).pow((d as u64 / e) as u32))
                .sum::<i64>()
                / d as i64;
            let mut count = 0;
            let total = p.pow(d as u32);
            for idx in 0..total {
                let mut f = vec![0u64; d + 1];
                let mut r = idx;
                for c in f.iter_mut().take(d) {
                    *c = r % p;
                    r /= p;
                }
                f[d] = 1;
                if is_irreducible(&f, p) {
                    count += 1;
                }
            }
            assert_eq!(count, expected, "p={p} d={d}");
        }
    }

    #[test]
    fn smallest_irreducible_is_lex_first() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        // constant-first lex order prefers x^3+x^2+1 over x^3+x+1
        assert_eq!(smallest_irreducible(2, 3), vec![1, 0, 1, 1]);
        assert_eq!(smallest_irreducible(3, 1), vec![0, 1]);
        assert_eq!(smallest_irreducible(2, 1), vec![0, 1]);
    }
}
