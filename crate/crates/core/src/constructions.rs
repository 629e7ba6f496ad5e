//! Explicit q-systems: pseudoregulus blocks, their direct sums over coprime
//! subfields, and rank-one pairs A, B ⊆ F_(q^m) with dim(A ∩ λB) ≤ 1.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::QSystem;
use crate::error::{Error, Result};
use crate::fields::{Elt, FieldTower};
use crate::linalg::Mat;
use crate::subspaces::{scalar_basis, scalar_span, Subspace};

/// One block of a pseudoregulus sum: an `[n, k]` system over F_(q^m_sub).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl BlockSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k >= self.n || self.n > self.m {
            return Err(Error::invalid(format!(
                "block {self}: need 1 ≤ k < n ≤ m"
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.n, self.k, self.m)
    }
}

impl FromStr for BlockSpec {
    type Err = Error;

    /// Parses `n:k:m`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let nums: Option<Vec<usize>> = parts.iter().map(|x| x.parse().ok()).collect();
        match nums.as_deref() {
            Some(&[n, k, m]) => Ok(BlockSpec { n, k, m }),
            _ => Err(Error::invalid(format!("block `{s}` is not of the form n:k:m"))),
        }
    }
}

/// Parses `n1:k1:m1,n2:k2:m2,...`.
pub fn parse_blocks(s: &str) -> Result<Vec<BlockSpec>> {
    s.split(',').map(BlockSpec::from_str).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Checks the coprime-sum invariants and returns m = ∏ m_i.
pub fn validate_coprime_blocks(blocks: &[BlockSpec]) -> Result<usize> {
    if blocks.is_empty() {
        return Err(Error::invalid("at least one block is required"));
    }
    for b in blocks {
        b.validate()?;
    }
    for (i, a) in blocks.iter().enumerate() {
        for (j, b) in blocks.iter().enumerate().skip(i + 1) {
            if gcd(a.m, b.m) != 1 {
                return Err(Error::invalid(format!(
                    "gcd(m_{},m_{}) ≠ 1 (m_{} = {}, m_{} = {})",
                    i + 1,
                    j + 1,
                    i + 1,
                    a.m,
                    j + 1,
                    b.m
                )));
            }
        }
    }
    blocks
        .iter()
        .try_fold(1usize, |acc, b| acc.checked_mul(b.m))
        .ok_or_else(|| Error::invalid("product of subfield degrees overflows"))
}

/// {(x, x^q, ..., x^(q^(k-1))) : x ∈ V} for V inside F_(q^sub).
pub fn pseudoregulus_block(t: &Arc<FieldTower>, v: &Subspace, k: usize, sub: usize) -> Result<QSystem> {
    if v.n() != t.m() {
        return Err(Error::AmbientMismatch { left: v.n(), right: t.m() });
    }
    if v.dim() <= k {
        return Err(Error::invalid(format!(
            "a pseudoregulus block needs dim V > k, got dim V = {}, k = {k}",
            v.dim()
        )));
    }
    let basis = scalar_basis(t, v);
    for &x in &basis {
        if !t.is_in_subfield(x, sub)? {
            return Err(Error::invalid(format!("V is not contained in the subfield of degree {sub}")));
        }
    }
    let gens = basis
        .iter()
        .map(|&x| (0..k).map(|e| t.frobenius_q(x, e)).collect())
        .collect();
    QSystem::new(t.clone(), k, gens)
}

/// ι_1(S_1) + ... + ι_t(S_t).
pub fn direct_sum_system(blocks: &[QSystem]) -> Result<QSystem> {
    let first = blocks.first().ok_or_else(|| Error::invalid("no blocks"))?;
    let t = first.tower().clone();
    if blocks.iter().any(|b| b.tower().spec() != t.spec()) {
        return Err(Error::invalid("blocks live over different fields"));
    }
    let k: usize = blocks.iter().map(|b| b.k()).sum();
    let mut gens = Vec::new();
    let mut off = 0;
    for b in blocks {
        for g in b.generators() {
            let mut row = vec![Elt::ZERO; k];
            row[off..off + b.k()].copy_from_slice(g);
            gens.push(row);
        }
        off += b.k();
    }
    QSystem::new(t, k, gens)
}

/// Expanded projection of a block-structured system onto block `i`.
pub fn project_block(s: &QSystem, ks: &[usize], i: usize) -> Subspace {
    let m = s.tower().m();
    let off: usize = ks[..i].iter().sum();
    s.space().project(s.tower().fq(), off * m..(off + ks[i]) * m)
}

/// The first `n` canonical basis elements of F_(q^r) ⊆ F_(q^m).
pub fn canonical_subfield_subspace(t: &FieldTower, r: usize, n: usize) -> Result<Subspace> {
    let field = scalar_span(t, &t.subfield_basis(r)?);
    let basis = scalar_basis(t, &field);
    if n > basis.len() {
        return Err(Error::invalid(format!("F_(q^{r}) has dimension {r} < {n}")));
    }
    Ok(scalar_span(t, &basis[..n]))
}

/// Pseudoregulus blocks with caller-chosen V_i, before summing.
pub fn pseudoregulus_blocks_with(t: &Arc<FieldTower>, blocks: &[BlockSpec], vs: &[Subspace]) -> Result<Vec<QSystem>> {
    let m = validate_coprime_blocks(blocks)?;
    if m != t.m() {
        return Err(Error::invalid(format!("m = {} but the blocks need m = {m}", t.m())));
    }
    if vs.len() != blocks.len() {
        return Err(Error::invalid("one subspace per block is required"));
    }
    blocks
        .iter()
        .zip(vs)
        .map(|(b, v)| {
            if v.dim() != b.n {
                return Err(Error::invalid(format!("block {b}: V has dimension {}", v.dim())));
            }
            pseudoregulus_block(t, v, b.k, b.m)
        })
        .collect()
}

/// Direct sum of pseudoregulus blocks with caller-chosen V_i.
pub fn pseudoregulus_sum_with(t: &Arc<FieldTower>, blocks: &[BlockSpec], vs: &[Subspace]) -> Result<QSystem> {
    direct_sum_system(&pseudoregulus_blocks_with(t, blocks, vs)?)
}

/// The blocks of [`coprime_pseudoregulus_sum`], unsummed.
pub fn coprime_pseudoregulus_blocks(q: u64, blocks: &[BlockSpec]) -> Result<Vec<QSystem>> {
    let m = validate_coprime_blocks(blocks)?;
    let t = Arc::new(FieldTower::for_q(q, m)?);
    let vs = blocks
        .iter()
        .map(|b| canonical_subfield_subspace(&t, b.m, b.n))
        .collect::<Result<Vec<_>>>()?;
    pseudoregulus_blocks_with(&t, blocks, &vs)
}

/// Pseudoregulus sum with V_i the first n_i canonical elements of F_(q^m_i).
pub fn coprime_pseudoregulus_sum(q: u64, blocks: &[BlockSpec]) -> Result<QSystem> {
    direct_sum_system(&coprime_pseudoregulus_blocks(q, blocks)?)
}

/// U·V = ⟨ab : a ∈ U, b ∈ V⟩ over F_q.
pub fn mul_span(t: &FieldTower, u: &Subspace, v: &Subspace) -> Subspace {
    let (ub, vb) = (scalar_basis(t, u), scalar_basis(t, v));
    let prods: Vec<Elt> = ub
        .iter()
        .flat_map(|&a| vb.iter().map(move |&b| t.ext().mul(a, b)))
        .collect();
    scalar_span(t, &prods)
}

/// (span(1, γ, ..., γ^(n1−1)), span(1, γ^n1, ..., γ^(n1(n2−1)))).
pub fn polynomial_pair(t: &FieldTower, n1: usize, n2: usize) -> Result<(Subspace, Subspace)> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid("dimensions must be positive"));
    }
    if t.m() < n1 * n2 {
        return Err(Error::invalid(format!("need m ≥ n1·n2 = {}, got m = {}", n1 * n2, t.m())));
    }
    let f = t.ext();
    let g = t.primitive_generator();
    let a: Vec<Elt> = (0..n1).map(|i| f.pow(g, i as u128)).collect();
    let b: Vec<Elt> = (0..n2).map(|j| f.pow(g, (n1 * j) as u128)).collect();
    Ok((scalar_span(t, &a), scalar_span(t, &b)))
}

/// {a + ξ a^q : a ∈ W}.
pub fn twisted_image(t: &FieldTower, w: &Subspace, xi: Elt) -> Subspace {
    let f = t.ext();
    let imgs: Vec<Elt> = scalar_basis(t, w)
        .into_iter()
        .map(|a| f.add(a, f.mul(xi, t.frobenius_q(a, 1))))
        .collect();
    scalar_span(t, &imgs)
}

/// (F_(q^r), {a + ξ a^q : a ∈ F_(q^r)}) for ξ outside F_(q^r).
pub fn subfield_xi_pair(t: &FieldTower, r: usize, xi: Elt) -> Result<(Subspace, Subspace)> {
    if r >= t.m() || t.m() % r != 0 {
        return Err(Error::NotADivisor { r, m: t.m() });
    }
    t.ext().check(xi)?;
    if t.is_in_subfield(xi, r)? {
        return Err(Error::invalid(format!("ξ lies in the subfield of degree {r}")));
    }
    let s1 = scalar_span(t, &t.subfield_basis(r)?);
    let s2 = twisted_image(t, &s1, xi);
    if s2.dim() != r {
        return Err(Error::LemmaViolation(format!(
            "a ↦ a + ξa^q is not injective on the subfield: image has dimension {}",
            s2.dim()
        )));
    }
    Ok((s1, s2))
}

/// First ξ ∈ F_(q^m)^* in canonical order with W ∩ ξW = {0}.
pub fn find_separating_xi(t: &FieldTower, w: &Subspace) -> Result<Elt> {
    let basis = scalar_basis(t, w);
    let fq = t.fq();
    (1..t.ext().order())
        .map(Elt)
        .find(|&xi| {
            let scaled: Vec<Elt> = basis.iter().map(|&b| t.ext().mul(xi, b)).collect();
            w.intersect(fq, &scalar_span(t, &scaled)).expect("same ambient").is_zero()
        })
        .ok_or_else(|| Error::LemmaViolation(format!("no ξ separates a subspace of dimension {}", w.dim())))
}

/// Matrix of the F_p-linear map x ↦ x^q − x composed `i` times.
pub fn iterated_artin_schreier(t: &FieldTower, i: usize) -> Mat {
    let step = t.fp_linear_map(|x| t.ext().sub(t.frobenius_q(x, 1), x));
    let mut acc = Mat::identity(step.rows());
    for _ in 0..i {
        acc = acc.mul(t.fp(), &step).expect("square");
    }
    acc
}

/// ker of the i-fold composition of x ↦ x^q − x, as an F_q-subspace.
pub fn artin_schreier_kernel(t: &FieldTower, i: usize) -> Subspace {
    scalar_span(t, &t.fp_kernel(&iterated_artin_schreier(t, i)))
}

#[derive(Clone, Debug)]
pub struct ModularPair {
    pub tower: Arc<FieldTower>,
    pub first: Subspace,
    pub second: Subspace,
    pub xi: Elt,
    /// dim F_n1, dim F_n2, dim F_(n1+n2−1).
    pub kernel_dims: [usize; 3],
}

/// (F_n1, {a + ξa^q : a ∈ F_n2}) in characteristic p with m = p^r, where
/// F_i is the kernel of the i-fold x ↦ x^q − x and ξ separates F_(n1+n2−1).
pub fn modular_pair(p: u64, h: usize, r: u32, n1: usize, n2: usize) -> Result<ModularPair> {
    let m = p
        .checked_pow(r)
        .and_then(|m| usize::try_from(m).ok())
        .ok_or_else(|| Error::invalid("p^r is too large"))?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid("dimensions must be positive"));
    }
    if 2 * (n1 + n2 - 1) > m {
        return Err(Error::invalid(format!("need n1 + n2 − 1 ≤ m/2 with m = {m}")));
    }
    let t = Arc::new(FieldTower::new(p, h, m)?);
    let f1 = artin_schreier_kernel(&t, n1);
    let f2 = artin_schreier_kernel(&t, n2);
    let big = artin_schreier_kernel(&t, n1 + n2 - 1);
    let kernel_dims = [f1.dim(), f2.dim(), big.dim()];
    if kernel_dims != [n1, n2, n1 + n2 - 1] {
        return Err(Error::LemmaViolation(format!("kernel dimensions {kernel_dims:?}")));
    }
    let xi = find_separating_xi(&t, &big)?;
    let second = twisted_image(&t, &f2, xi);
    if second.dim() != n2 {
        return Err(Error::LemmaViolation("a ↦ a + ξa^q is not injective on F_n2".into()));
    }
    Ok(ModularPair {
        tower: t,
        first: f1,
        second,
        xi,
        kernel_dims,
    })
}

/// Serializable construction recipes; building one is deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Construction {
    PseudoregulusSum { q: u64, blocks: Vec<BlockSpec> },
    PolynomialPair { q: u64, m: usize, n1: usize, n2: usize },
    SubfieldXiPair { q: u64, m: usize, r: usize, xi: Elt },
    ModularPair { p: u64, h: usize, r: u32, n1: usize, n2: usize },
}

/// A built construction: the system, and the pair for rank-one recipes.
#[derive(Clone, Debug)]
pub struct Built {
    pub system: QSystem,
    pub pair: Option<(Subspace, Subspace)>,
    pub xi: Option<Elt>,
}

/// A ⊕ B ⊆ F_(q^m)^2 as a q-system.
pub fn pair_system(t: &Arc<FieldTower>, a: &Subspace, b: &Subspace) -> Result<QSystem> {
    let mut gens: Vec<Vec<Elt>> = scalar_basis(t, a).into_iter().map(|x| vec![x, Elt::ZERO]).collect();
    gens.extend(scalar_basis(t, b).into_iter().map(|x| vec![Elt::ZERO, x]));
    QSystem::new(t.clone(), 2, gens)
}

impl Construction {
    pub fn build(&self) -> Result<Built> {
        let pair = |t: Arc<FieldTower>, a: Subspace, b: Subspace, xi: Option<Elt>| -> Result<Built> {
            Ok(Built {
                system: pair_system(&t, &a, &b)?,
                pair: Some((a, b)),
                xi,
            })
        };
        match self {
            Construction::PseudoregulusSum { q, blocks } => Ok(Built {
                system: coprime_pseudoregulus_sum(*q, blocks)?,
                pair: None,
                xi: None,
            }),
            Construction::PolynomialPair { q, m, n1, n2 } => {
                if m < &(n1 * n2) {
                    return Err(Error::invalid(format!("need m ≥ n1·n2 = {}, got m = {m}", n1 * n2)));
                }
                let t = Arc::new(FieldTower::for_q(*q, *m)?);
                let (a, b) = polynomial_pair(&t, *n1, *n2)?;
                pair(t, a, b, None)
            }
            Construction::SubfieldXiPair { q, m, r, xi } => {
                let t = Arc::new(FieldTower::for_q(*q, *m)?);
                let (a, b) = subfield_xi_pair(&t, *r, *xi)?;
                pair(t, a, b, Some(*xi))
            }
            Construction::ModularPair { p, h, r, n1, n2 } => {
                let mp = modular_pair(*p, *h, *r, *n1, *n2)?;
                pair(mp.tower, mp.first, mp.second, Some(mp.xi))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evasive::{is_evasive, is_h_scattered, sidon_pair_check, Family, ScanOptions};
    use crate::subspaces::{rho, Grassmannian};

    fn tower(m: usize) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(2, 1, m).unwrap())
    }

    #[test]
    fn block_parsing() {
        assert_eq!(parse_blocks("2:1:2,3:1:3").unwrap(), vec![
            BlockSpec { n: 2, k: 1, m: 2 },
            BlockSpec { n: 3, k: 1, m: 3 }
        ]);
        assert!(parse_blocks("2:1").is_err());
        let e = validate_coprime_blocks(&parse_blocks("2:1:2,3:1:4").unwrap()).unwrap_err();
        assert!(e.to_string().contains("gcd(m_1,m_2) ≠ 1"));
        assert!(validate_coprime_blocks(&parse_blocks("2:2:2").unwrap()).is_err());
        assert!(validate_coprime_blocks(&parse_blocks("3:1:2").unwrap()).is_err());
    }

    #[test]
    fn k1_block_is_v() {
        let t = tower(6);
        let v = canonical_subfield_subspace(&t, 3, 2).unwrap();
        let s = pseudoregulus_block(&t, &v, 1, 3).unwrap();
        assert_eq!(s.space(), &v);
    }

    #[test]
    fn classical_pseudoregulus_is_scattered() {
        let t = tower(4);
        let s = pseudoregulus_block(&t, &Subspace::full(4), 2, 4).unwrap();
        let r = is_h_scattered(&s, 1, &ScanOptions::default()).unwrap();
        assert!(r.verdict);
        assert_eq!(r.scanned, 17);
    }

    #[test]
    fn block_dimensions_and_span() {
        for m in 2..=6 {
            let t = tower(m);
            for sub in (1..=m).filter(|d| m % d == 0) {
                for n in 2..=sub {
                    let v = canonical_subfield_subspace(&t, sub, n).unwrap();
                    for k in 1..n {
                        let s = pseudoregulus_block(&t, &v, k, sub).unwrap();
                        assert_eq!(s.space().dim(), n);
                        assert_eq!(rho(&t, s.space()), k);
                    }
                }
            }
        }
    }

    #[test]
    fn block_rejections() {
        let t = tower(6);
        let v = canonical_subfield_subspace(&t, 3, 2).unwrap();
        assert!(pseudoregulus_block(&t, &v, 2, 3).is_err());
        let outside = scalar_span(&t, &[Elt(1), t.primitive_generator()]);
        assert!(pseudoregulus_block(&t, &outside, 1, 3).is_err());
    }

    #[test]
    fn direct_sum_shape() {
        let t = tower(6);
        let a = pseudoregulus_block(&t, &canonical_subfield_subspace(&t, 3, 3).unwrap(), 2, 3).unwrap();
        let b = pseudoregulus_block(&t, &canonical_subfield_subspace(&t, 2, 2).unwrap(), 1, 2).unwrap();
        assert_eq!(direct_sum_system(std::slice::from_ref(&a)).unwrap().space(), a.space());
        let s = direct_sum_system(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.space().dim(), 5);
        assert_eq!(s.k(), 3);
        assert_eq!(project_block(&s, &[2, 1], 0), *a.space());
        assert_eq!(project_block(&s, &[2, 1], 1), *b.space());
        let g = crate::codes::system_to_code(&s).unwrap();
        let gm = g.generator();
        for c in 0..5 {
            for r in 0..3 {
                let block_of_col = usize::from(c >= 3);
                let block_of_row = usize::from(r >= 2);
                if block_of_col != block_of_row {
                    assert!(gm.get(r, c).is_zero());
                }
            }
        }
        let other = Arc::new(FieldTower::new(3, 1, 2).unwrap());
        let c = pseudoregulus_block(&other, &Subspace::full(2), 1, 2).unwrap();
        assert!(direct_sum_system(&[a, c]).is_err());
    }

    #[test]
    fn coprime_sums_are_evasive() {
        let s = coprime_pseudoregulus_sum(2, &parse_blocks("2:1:2,3:1:3").unwrap()).unwrap();
        let r = is_evasive(&s, &Family::lambda_blocks(&[1, 1], 1).unwrap(), 1, &ScanOptions::default()).unwrap();
        assert!(r.verdict);
        assert_eq!(r.scanned, 63);
        let s = coprime_pseudoregulus_sum(2, &parse_blocks("3:2:3,2:1:2").unwrap()).unwrap();
        let r = is_evasive(&s, &Family::lambda_blocks(&[2, 1], 2).unwrap(), 2, &ScanOptions::default()).unwrap();
        assert!(r.verdict);
    }

    #[test]
    fn pair_constructions_pass() {
        let opts = ScanOptions::default();
        let t = tower(6);
        let (a, b) = polynomial_pair(&t, 2, 3).unwrap();
        let r = sidon_pair_check(&t, &a, &b, &opts).unwrap();
        assert!(r.verdict && r.scanned == 63);
        assert_eq!(mul_span(&t, &a, &b).dim(), 6);
        let (a, b) = polynomial_pair(&t, 3, 1).unwrap();
        assert_eq!(b, scalar_span(&t, &[Elt::ONE]));
        assert!(sidon_pair_check(&t, &a, &b, &opts).unwrap().verdict);
        assert!(polynomial_pair(&t, 3, 3).is_err());

        let t4 = tower(4);
        let (a, b) = polynomial_pair(&t4, 2, 2).unwrap();
        assert!(sidon_pair_check(&t4, &a, &b, &opts).unwrap().verdict);

        let (a, b) = subfield_xi_pair(&t, 3, t.primitive_generator()).unwrap();
        assert_eq!((a.dim(), b.dim()), (3, 3));
        assert!(sidon_pair_check(&t, &a, &b, &opts).unwrap().verdict);
        let xi4 = t4.primitive_generator();
        let (a, b) = subfield_xi_pair(&t4, 2, xi4).unwrap();
        assert!(sidon_pair_check(&t4, &a, &b, &opts).unwrap().verdict);
        assert!(subfield_xi_pair(&t, 3, Elt::ONE).is_err());
        assert!(subfield_xi_pair(&t, 4, xi4).is_err());
    }

    #[test]
    fn subfield_twist_is_injective_for_every_xi() {
        let t = tower(6);
        for xi in (1..64).map(Elt) {
            match subfield_xi_pair(&t, 3, xi) {
                Ok((_, b)) => assert_eq!(b.dim(), 3),
                Err(e) => assert!(t.is_in_subfield(xi, 3).unwrap(), "{e}"),
            }
        }
    }

    #[test]
    fn modular_pair_m8() {
        let mp = modular_pair(2, 1, 3, 3, 2).unwrap();
        assert_eq!(mp.kernel_dims, [3, 2, 4]);
        let t = &mp.tower;
        assert!(sidon_pair_check(t, &mp.first, &mp.second, &ScanOptions::default()).unwrap().verdict);
        assert_eq!(artin_schreier_kernel(t, 1), scalar_span(t, &[Elt::ONE]));
        for i in 1..=8 {
            let fi = artin_schreier_kernel(t, i);
            assert_eq!(fi.dim(), i);
            let frob: Vec<Elt> = scalar_basis(t, &fi).iter().map(|&x| t.frobenius_q(x, 1)).collect();
            assert_eq!(scalar_span(t, &frob), fi);
        }
        for i in 1..=8 {
            for j in 1..=(9 - i) {
                let prod = mul_span(t, &artin_schreier_kernel(t, i), &artin_schreier_kernel(t, j));
                let target = artin_schreier_kernel(t, i + j - 1);
                assert!(target.contains(t.fq(), &prod).unwrap(), "i = {i}, j = {j}");
            }
        }
        assert!(modular_pair(2, 1, 3, 3, 3).is_err());
    }

    #[test]
    fn mul_span_identities() {
        let t = tower(6);
        let one = scalar_span(&t, &[Elt::ONE]);
        let u = scalar_span(&t, &[t.primitive_generator(), Elt(5)]);
        assert_eq!(mul_span(&t, &u, &one), u);
        let f8 = canonical_subfield_subspace(&t, 3, 3).unwrap();
        assert_eq!(mul_span(&t, &f8, &f8), f8);
    }

    #[test]
    fn separating_xi_exists_for_small_subspaces() {
        for m in 2..=6 {
            let t = tower(m);
            for d in 1..=m / 2 {
                for basis in Grassmannian::new(t.fq(), m, d).unwrap().iter() {
                    let v = Subspace::span(t.fq(), &basis);
                    let xi = find_separating_xi(&t, &v).unwrap();
                    let moved = crate::evasive::scale_subspace(&t, xi, &v);
                    assert!(v.intersect(t.fq(), &moved).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn construction_json_round_trip() {
        let c = Construction::PseudoregulusSum {
            q: 2,
            blocks: parse_blocks("2:1:2,3:1:3").unwrap(),
        };
        let s = serde_json::to_string(&c).unwrap();
        let back: Construction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.build().unwrap().system.space(), c.build().unwrap().system.space());
    }
}
