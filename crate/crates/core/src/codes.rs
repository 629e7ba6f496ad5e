//! Rank-metric codes and their q-systems.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::fields::{Elt, FieldSpec, FieldTower};
use crate::linalg::{self, Mat};
use crate::subspaces::{self, ext_basis, ext_linear_span, ext_span, Grassmannian, Subspace};

/// An [n,k] code over F_(q^m)/F_q given by a full-rank generator matrix.
#[derive(Clone, Debug)]
pub struct RankMetricCode {
    tower: Arc<FieldTower>,
    g: Mat,
}

impl RankMetricCode {
    pub fn new(tower: Arc<FieldTower>, g: Mat) -> Result<Self> {
        for e in g.row_vecs().into_iter().flatten() {
            tower.ext().check(e)?;
        }
        let r = linalg::rank(tower.ext(), &g);
        if r != g.rows() {
            return Err(Error::RankDeficient {
                rank: r,
                expected: g.rows(),
            });
        }
        Ok(RankMetricCode { tower, g })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn generator(&self) -> &Mat {
        &self.g
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    pub fn columns(&self) -> Vec<Vec<Elt>> {
        (0..self.n())
            .map(|j| (0..self.k()).map(|i| self.g.get(i, j)).collect())
            .collect()
    }

    /// F_q-rank of the columns of G.
    pub fn column_rank(&self) -> usize {
        ext_span(&self.tower, self.k(), &self.columns()).dim()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.column_rank() == self.n()
    }

    /// u·G.
    pub fn encode(&self, u: &[Elt]) -> Vec<Elt> {
        self.g.apply_row(self.tower.ext(), u)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            k: self.k(),
            n: self.n(),
            field: self.tower.spec().clone(),
            g: self.g.row_vecs(),
        }
    }

    pub fn from_json(c: &CodeJson) -> Result<Self> {
        let tower = Arc::new(FieldTower::from_spec(&c.field)?);
        if c.g.len() != c.k || c.g.iter().any(|r| r.len() != c.n) {
            return Err(Error::Shape("generator matrix does not match k, n".into()));
        }
        Self::new(tower, Mat::from_rows(c.n, &c.g))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub k: usize,
    pub n: usize,
    pub field: FieldSpec,
    #[serde(rename = "G")]
    pub g: Vec<Vec<Elt>>,
}

/// An [n,k] q-system: an n-dimensional F_q-subspace of F_(q^m)^k spanning it
/// over F_(q^m), with an ordered F_q-basis.
#[derive(Clone, Debug)]
pub struct QSystem {
    tower: Arc<FieldTower>,
    k: usize,
    gens: Vec<Vec<Elt>>,
    space: Subspace,
}

impl QSystem {
    /// From an ordered F_q-basis; rejects dependent or non-spanning input.
    pub fn new(tower: Arc<FieldTower>, k: usize, gens: Vec<Vec<Elt>>) -> Result<Self> {
        if gens.iter().any(|g| g.len() != k) {
            return Err(Error::Shape("generator length differs from k".into()));
        }
        let space = ext_span(&tower, k, &gens);
        if space.dim() != gens.len() {
            return Err(Error::Degenerate {
                rank: space.dim(),
                n: gens.len(),
            });
        }
        let r = subspaces::rho(&tower, &space);
        if r != k {
            return Err(Error::NotSpanning { rank: r, k });
        }
        Ok(QSystem {
            tower,
            k,
            gens,
            space,
        })
    }

    /// From an expanded subspace; the basis is the canonical one.
    pub fn from_subspace(tower: Arc<FieldTower>, k: usize, space: &Subspace) -> Result<Self> {
        if space.n() != k * tower.m() {
            return Err(Error::AmbientMismatch {
                left: space.n(),
                right: k * tower.m(),
            });
        }
        let gens = ext_basis(&tower, space);
        Self::new(tower, k, gens)
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Vec<Elt>] {
        &self.gens
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    /// n × mk matrix of expanded generators: row j is ψ(e_j).
    pub fn expanded_generators(&self) -> Mat {
        let rows: Vec<Vec<Elt>> = self
            .gens
            .iter()
            .map(|g| subspaces::expand_vec(&self.tower, g))
            .collect();
        Mat::from_rows(self.k * self.tower.m(), &rows)
    }
}

pub fn code_to_system(c: &RankMetricCode) -> Result<QSystem> {
    let r = c.column_rank();
    if r != c.n() {
        return Err(Error::Degenerate { rank: r, n: c.n() });
    }
    QSystem::new(c.tower.clone(), c.k(), c.columns())
}

/// The code whose generator columns are the system's ordered basis.
pub fn system_to_code(s: &QSystem) -> Result<RankMetricCode> {
    let k = s.k();
    let n = s.n();
    let mut g = Mat::zeros(k, n);
    for (j, col) in s.gens.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            g.set(i, j, x);
        }
    }
    RankMetricCode::new(s.tower.clone(), g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Codewords,
    Hyperplanes,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistanceWitness {
    /// A codeword u·G of minimum rank weight.
    Codeword { u: Vec<Elt>, codeword: Vec<Elt> },
    /// A hyperplane ⟨u⟩^⊥ meeting the system in maximum dimension.
    Hyperplane { u: Vec<Elt>, weight: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub d: usize,
    pub method: DistanceMethod,
    pub scanned: u64,
    pub witness: DistanceWitness,
}

fn vector_of(idx: u64, base: u64, len: usize) -> Vec<Elt> {
    let mut v = vec![Elt::ZERO; len];
    let mut r = idx;
    for x in v.iter_mut().rev() {
        *x = Elt(r % base);
        r /= base;
    }
    v
}

/// Minimum rank weight over all nonzero codewords.
pub fn min_distance_codewords(c: &RankMetricCode, budget_units: u64) -> Result<DistanceReport> {
    let qm = c.tower.ext().order();
    let total = BigUint::from(qm).pow(c.k() as u32) - 1u32;
    let total = budget::ensure("codeword scan", &total, budget_units)?;
    let mut best: Option<(usize, Vec<Elt>, Vec<Elt>)> = None;
    for idx in 1..=total {
        let u = vector_of(idx, qm, c.k());
        let cw = c.encode(&u);
        let w = subspaces::rank_weight(&c.tower, &cw);
        if best.as_ref().is_none_or(|b| w < b.0) {
            best = Some((w, u, cw));
        }
    }
    let (d, u, codeword) = best.ok_or_else(|| Error::invalid("code has no nonzero codeword"))?;
    Ok(DistanceReport {
        d,
        method: DistanceMethod::Codewords,
        scanned: total,
        witness: DistanceWitness::Codeword { u, codeword },
    })
}

/// ⟨u⟩^⊥ = {x : Σ u_i x_i = 0} as an expanded F_q-subspace of F_(q^m)^k.
pub fn hyperplane_of(t: &FieldTower, u: &[Elt]) -> Subspace {
    let k = u.len();
    let umat = Mat::from_rows(k, &[u.to_vec()]);
    let ker = linalg::kernel_basis(t.ext(), &umat);
    ext_linear_span(t, k, &ker.row_vecs())
}

/// d = n − max over hyperplanes H of dim(S ∩ H).
pub fn min_distance_hyperplanes(c: &RankMetricCode, budget_units: u64) -> Result<DistanceReport> {
    let s = code_to_system(c)?;
    let t = &c.tower;
    let g = Grassmannian::new(t.ext(), c.k(), 1)?;
    budget::ensure("hyperplane scan", &BigUint::from(g.len()), budget_units)?;
    let mut best: Option<(usize, Vec<Elt>)> = None;
    for u in g.iter() {
        let u = u.row(0).to_vec();
        let w = s.space().intersect(t.fq(), &hyperplane_of(t, &u))?.dim();
        if best.as_ref().is_none_or(|b| w > b.0) {
            best = Some((w, u));
        }
    }
    let (weight, u) = best.expect("k >= 1");
    Ok(DistanceReport {
        d: c.n() - weight,
        method: DistanceMethod::Hyperplanes,
        scanned: g.len(),
        witness: DistanceWitness::Hyperplane { u, weight },
    })
}

/// Minimum rank distance: by hyperplanes when k > 1 and the code is
/// nondegenerate, otherwise by codewords.
pub fn min_rank_distance(c: &RankMetricCode, budget_units: u64) -> Result<DistanceReport> {
    if c.k() > 1 && c.is_nondegenerate() {
        min_distance_hyperplanes(c, budget_units)
    } else {
        min_distance_codewords(c, budget_units)
    }
}

/// d = n − k + 1.
pub fn is_mrd(c: &RankMetricCode, budget_units: u64) -> Result<bool> {
    let d = min_rank_distance(c, budget_units)?.d;
    Ok(d + c.k() == c.n() + 1)
}

/// Number of codewords of each rank weight 0..=n.
pub fn rank_weight_distribution(c: &RankMetricCode, budget_units: u64) -> Result<Vec<u64>> {
    let qm = c.tower.ext().order();
    let total = budget::ensure(
        "codeword scan",
        &BigUint::from(qm).pow(c.k() as u32),
        budget_units,
    )?;
    let mut dist = vec![0u64; c.n() + 1];
    for idx in 0..total {
        let cw = c.encode(&vector_of(idx, qm, c.k()));
        dist[subspaces::rank_weight(&c.tower, &cw)] += 1;
    }
    Ok(dist)
}

/// ψ_G(v) = v·G^T = Σ v_j g_j for v ∈ F_q^n.
pub fn psi_g(c: &RankMetricCode, v: &[Elt]) -> Result<Vec<Elt>> {
    if !c.is_nondegenerate() {
        return Err(Error::Degenerate {
            rank: c.column_rank(),
            n: c.n(),
        });
    }
    if v.len() != c.n() {
        return Err(Error::Shape(format!("vector of length {} for n = {}", v.len(), c.n())));
    }
    let f = c.tower.ext();
    let mut out = vec![Elt::ZERO; c.k()];
    for (j, &vj) in v.iter().enumerate() {
        let s = c.tower.embed(c.tower.fq().check(vj)?);
        for (i, o) in out.iter_mut().enumerate() {
            *o = f.add(*o, f.mul(s, c.g.get(i, j)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityCheck {
    pub holds: bool,
    /// ψ_G^{-1}(S ∩ ⟨u⟩^⊥).
    pub preimage: Subspace,
    /// supp(uG)^⊥.
    pub support_perp: Subspace,
}

/// Checks ψ_G^{-1}(S ∩ ⟨u⟩^⊥) = supp(uG)^⊥ by computing both sides.
pub fn verify_support_duality(c: &RankMetricCode, u: &[Elt]) -> Result<DualityCheck> {
    let s = code_to_system(c)?;
    let t = &c.tower;
    let fq = t.fq();
    let psi = s.expanded_generators();
    let meet = s.space().intersect(fq, &hyperplane_of(t, u))?;
    let pre_rows: Vec<Vec<Elt>> = meet
        .basis()
        .row_vecs()
        .iter()
        .map(|w| linalg::solve_left(fq, &psi, w).expect("S ∩ H lies in the image of ψ"))
        .collect();
    let preimage = Subspace::span_rows(fq, c.n(), &pre_rows);

    let supp = subspaces::support(t, &c.encode(u));
    let support_perp = Subspace::span(fq, &linalg::kernel_basis(fq, supp.basis()));
    Ok(DualityCheck {
        holds: preimage == support_perp,
        preimage,
        support_perp,
    })
}

/// Gabidulin generator matrix with rows α_j^(q^i), i < k.
pub fn gabidulin(tower: Arc<FieldTower>, k: usize, alphas: &[Elt]) -> Result<RankMetricCode> {
    if k == 0 || k > alphas.len() {
        return Err(Error::invalid(format!("Gabidulin dimension {k} for length {}", alphas.len())));
    }
    if ext_span(&tower, 1, &alphas.iter().map(|&a| vec![a]).collect::<Vec<_>>()).dim() != alphas.len() {
        return Err(Error::invalid("evaluation points are F_q-dependent"));
    }
    let rows: Vec<Vec<Elt>> = (0..k)
        .map(|i| alphas.iter().map(|&a| tower.frobenius_q(a, i)).collect())
        .collect();
    RankMetricCode::new(tower, Mat::from_rows(alphas.len(), &rows))
}

/// Gabidulin code on the points 1, γ, ..., γ^(n-1).
pub fn gabidulin_standard(tower: Arc<FieldTower>, k: usize, n: usize) -> Result<RankMetricCode> {
    if n > tower.m() {
        return Err(Error::invalid(format!("Gabidulin length {n} exceeds m = {}", tower.m())));
    }
    let alphas = tower.gamma_basis()[..n].to_vec();
    gabidulin(tower, k, &alphas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::DEFAULT_BUDGET;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tower(p: u64, h: usize, m: usize) -> Arc<FieldTower> {
        Arc::new(FieldTower::new(p, h, m).unwrap())
    }

    fn random_code(t: &Arc<FieldTower>, k: usize, n: usize, rng: &mut ChaCha8Rng) -> RankMetricCode {
        loop {
            let qm = t.ext().order();
            let data = (0..k * n).map(|_| Elt(rng.random_range(0..qm))).collect();
            if let Ok(c) = RankMetricCode::new(t.clone(), Mat::from_vec(k, n, data)) {
                if c.is_nondegenerate() {
                    return c;
                }
            }
        }
    }

    #[test]
    fn identity_code() {
        let t = tower(2, 1, 3);
        let c = RankMetricCode::new(t.clone(), Mat::identity(3)).unwrap();
        let s = code_to_system(&c).unwrap();
        assert_eq!(s.space().dim(), 3);
        let e: Vec<Vec<Elt>> = (0..3)
            .map(|i| (0..3).map(|j| Elt((i == j) as u64)).collect())
            .collect();
        assert_eq!(s.space(), &ext_span(&t, 3, &e));
        assert_eq!(min_rank_distance(&c, DEFAULT_BUDGET).unwrap().d, 1);
        assert!(is_mrd(&c, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn roundtrip_systems() {
        let t = tower(2, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut done = 0;
        while done < 50 {
            let s = subspaces::random_subspace(t.fq(), 6, 3, &mut rng);
            let Ok(sys) = QSystem::from_subspace(t.clone(), 2, &s) else { continue };
            let back = code_to_system(&system_to_code(&sys).unwrap()).unwrap();
            assert_eq!(back.space(), &s);
            done += 1;
        }
    }

    #[test]
    fn degenerate_and_nonspanning_rejected() {
        let t = tower(2, 1, 3);
        let c = RankMetricCode::new(t.clone(), Mat::from_rows(2, &[vec![Elt(1), Elt(1)]])).unwrap();
        assert!(!c.is_nondegenerate());
        assert_eq!(code_to_system(&c).err(), Some(Error::Degenerate { rank: 1, n: 2 }));
        assert!(psi_g(&c, &[Elt(1), Elt(0)]).is_err());
        let s = QSystem::new(t.clone(), 2, vec![vec![Elt(1), Elt(0)], vec![Elt(2), Elt(0)]]);
        assert_eq!(s.err(), Some(Error::NotSpanning { rank: 1, k: 2 }));
        let g = Mat::from_rows(2, &[vec![Elt(1), Elt(2)], vec![Elt(1), Elt(2)]]);
        assert!(matches!(RankMetricCode::new(t, g), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn gabidulin_is_mrd() {
        let t = tower(2, 1, 4);
        let c = gabidulin_standard(t.clone(), 2, 4).unwrap();
        let by_cw = min_distance_codewords(&c, DEFAULT_BUDGET).unwrap();
        assert_eq!(by_cw.d, 3);
        assert_eq!(by_cw.scanned, 255);
        assert_eq!(min_distance_hyperplanes(&c, DEFAULT_BUDGET).unwrap().d, 3);
        assert!(is_mrd(&c, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn gabidulin_k2_system_is_pseudoregulus() {
        let t = tower(2, 1, 4);
        let c = gabidulin_standard(t.clone(), 2, 4).unwrap();
        let s = code_to_system(&c).unwrap();
        let pts: Vec<Vec<Elt>> = t.ext().elements().map(|x| vec![x, t.frobenius_q(x, 1)]).collect();
        assert_eq!(s.space(), &ext_span(&t, 2, &pts));
    }

    #[test]
    fn non_mrd_example() {
        let t = tower(2, 1, 2);
        let c = RankMetricCode::new(t, Mat::from_rows(2, &[vec![Elt(1), Elt(1)]])).unwrap();
        assert_eq!(min_rank_distance(&c, DEFAULT_BUDGET).unwrap().d, 1);
        assert!(!is_mrd(&c, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn distance_routes_agree_on_random_codes() {
        let t = tower(2, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let c = random_code(&t, 2, 3, &mut rng);
            let a = min_distance_codewords(&c, DEFAULT_BUDGET).unwrap();
            let b = min_distance_hyperplanes(&c, DEFAULT_BUDGET).unwrap();
            assert_eq!(a.d, b.d);
            assert!(a.d >= 1 && a.d + c.k() <= c.n() + 1);
        }
    }

    #[test]
    fn psi_g_is_isomorphism() {
        let t = tower(2, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_code(&t, 2, 3, &mut rng);
        let s = code_to_system(&c).unwrap();
        assert_eq!(psi_g(&c, &[Elt(0); 3]).unwrap(), vec![Elt(0); 2]);
        let mut img = std::collections::BTreeSet::new();
        for i in 0..8u64 {
            let v: Vec<Elt> = (0..3).map(|j| Elt(i >> j & 1)).collect();
            let w = psi_g(&c, &v).unwrap();
            assert!(s.space().contains_vec(t.fq(), &subspaces::expand_vec(&t, &w)));
            img.insert(w);
        }
        assert_eq!(img.len(), 8);
    }

    #[test]
    fn support_duality_all_u() {
        let t = tower(2, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = random_code(&t, 2, 3, &mut rng);
        let s = code_to_system(&c).unwrap();
        for idx in 0..64 {
            let u = vector_of(idx, 8, 2);
            let chk = verify_support_duality(&c, &u).unwrap();
            assert!(chk.holds, "u={u:?}: {chk:?}");
            if idx > 0 {
                // weight of uG equals n − wt_S(⟨u⟩^⊥)
                let w = s.space().intersect(t.fq(), &hyperplane_of(&t, &u)).unwrap().dim();
                assert_eq!(subspaces::rank_weight(&t, &c.encode(&u)), c.n() - w);
            }
        }
    }

    #[test]
    fn equivalent_codes_share_distribution() {
        let t = tower(2, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = random_code(&t, 2, 3, &mut rng);
        let base = rank_weight_distribution(&c, DEFAULT_BUDGET).unwrap();
        assert_eq!(base.iter().sum::<u64>(), 64);
        // C·A for A ∈ GL(3, 2), embedded into F_8
        let a = Mat::from_rows(3, &[
            vec![Elt(1), Elt(1), Elt(0)],
            vec![Elt(0), Elt(1), Elt(1)],
            vec![Elt(0), Elt(0), Elt(1)],
        ]);
        let ca = RankMetricCode::new(t.clone(), c.generator().mul(t.ext(), &a).unwrap()).unwrap();
        assert_eq!(rank_weight_distribution(&ca, DEFAULT_BUDGET).unwrap(), base);
        // φ(S) for invertible φ over F_8: same code, same distribution
        let phi = Mat::from_rows(2, &[vec![Elt(3), Elt(1)], vec![Elt(5), Elt(0)]]);
        let pc = RankMetricCode::new(t.clone(), phi.mul(t.ext(), c.generator()).unwrap()).unwrap();
        assert_eq!(rank_weight_distribution(&pc, DEFAULT_BUDGET).unwrap(), base);
    }

    #[test]
    fn code_json_roundtrip() {
        let t = tower(2, 1, 4);
        let c = gabidulin_standard(t, 2, 4).unwrap();
        let j = serde_json::to_string(&c.to_json()).unwrap();
        let back: CodeJson = serde_json::from_str(&j).unwrap();
        assert!(j.contains("\"G\""));
        assert_eq!(RankMetricCode::from_json(&back).unwrap().generator(), c.generator());
    }

    #[test]
    fn budget_refusal() {
        let t = tower(2, 1, 4);
        let c = gabidulin_standard(t, 2, 4).unwrap();
        assert!(min_distance_codewords(&c, 10).unwrap_err().is_budget());
    }
}
