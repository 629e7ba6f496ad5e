//! Evasiveness of q-systems against families of F_(q^m)-subspaces.
//!
//! Members of Λ_h (h-dimensional F_(q^m)-subspaces of F_(q^m)^k) are handled
//! through their annihilators: a (k−h)×k matrix N in RREF over F_(q^m) with
//! V = {x : N x = 0}. The annihilators are enumerated by [`Grassmannian`], so
//! the canonical index of a member is the index of its annihilator. The weight
//! of V against a system with ordered basis g_1..g_n is n minus the F_q-rank
//! of the map s ↦ N s restricted to the system.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::{self, DEFAULT_BUDGET};
use crate::codes::QSystem;
use crate::error::{Error, Result};
use crate::fields::{Elt, FieldTower};
use crate::linalg::{self, Mat};
use crate::qmatroid::CheckMode;
use crate::subspaces::{self, ext_linear_span, scalar_basis, scalar_span, Grassmannian, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Family {
    /// Λ_h in F_(q^m)^k.
    Lambda { k: usize, h: usize },
    /// Λ_{h,𝐤}: members of Λ_h containing no coordinate block.
    LambdaBlocks { ks: Vec<usize>, h: usize },
    /// An explicit list of F_q-subspaces in expanded coordinates.
    Listed { members: Vec<Subspace> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FamilyDescriptor {
    Lambda { k: usize, h: usize },
    LambdaBlocks { ks: Vec<usize>, h: usize },
    Listed { count: usize },
    /// F_(q^m)^* / F_q^* classes λ, tested through dim(A ∩ λB).
    SidonClasses { m: usize },
}

impl Family {
    pub fn lambda(k: usize, h: usize) -> Result<Family> {
        if h == 0 || h > k {
            return Err(Error::invalid(format!("Λ_h needs 1 ≤ h ≤ k, got h = {h}, k = {k}")));
        }
        Ok(Family::Lambda { k, h })
    }

    pub fn lambda_blocks(ks: &[usize], h: usize) -> Result<Family> {
        let k: usize = ks.iter().sum();
        if ks.is_empty() || ks.contains(&0) {
            return Err(Error::invalid("block dimensions must be positive"));
        }
        if h == 0 || h + 1 > k {
            return Err(Error::invalid(format!("Λ_(h,k) needs 1 ≤ h ≤ k−1, got h = {h}, k = {k}")));
        }
        Ok(Family::LambdaBlocks { ks: ks.to_vec(), h })
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        match self {
            Family::Lambda { k, h } => FamilyDescriptor::Lambda { k: *k, h: *h },
            Family::LambdaBlocks { ks, h } => FamilyDescriptor::LambdaBlocks { ks: ks.clone(), h: *h },
            Family::Listed { members } => FamilyDescriptor::Listed { count: members.len() },
        }
    }

    fn ambient_k(&self) -> Option<usize> {
        match self {
            Family::Lambda { k, .. } => Some(*k),
            Family::LambdaBlocks { ks, .. } => Some(ks.iter().sum()),
            Family::Listed { .. } => None,
        }
    }

    fn annihilator_grassmannian(&self, t: &FieldTower) -> Result<Option<Grassmannian>> {
        Ok(match self {
            Family::Lambda { k, h } => Some(Grassmannian::new(t.ext(), *k, k - h)?),
            Family::LambdaBlocks { ks, h } => {
                let k: usize = ks.iter().sum();
                Some(Grassmannian::new(t.ext(), k, k - h)?)
            }
            Family::Listed { .. } => None,
        })
    }

    /// Whether the annihilator `n` describes an admissible member.
    pub fn admits(&self, n: &Mat) -> bool {
        match self {
            Family::LambdaBlocks { ks, .. } => !contains_a_block(ks, n),
            _ => true,
        }
    }
}

/// V = ker N contains block i iff the block-i columns of N vanish.
pub fn contains_a_block(ks: &[usize], n: &Mat) -> bool {
    let mut off = 0;
    for &ki in ks {
        let zero = (0..n.rows()).all(|r| (off..off + ki).all(|c| n.get(r, c).is_zero()));
        if zero {
            return true;
        }
        off += ki;
    }
    false
}

/// Expanded F_q-form of ker N ⊆ F_(q^m)^k.
pub fn member_from_annihilator(t: &FieldTower, n: &Mat) -> Subspace {
    let ker = linalg::kernel_basis(t.ext(), n);
    ext_linear_span(t, n.cols(), &ker.row_vecs())
}

/// Every member of a Λ family, in canonical order, as expanded subspaces.
pub fn family_members(t: &FieldTower, family: &Family, budget_units: u64) -> Result<Vec<Subspace>> {
    match family.annihilator_grassmannian(t)? {
        Some(g) => {
            budget::ensure("family listing", &BigUint::from(g.len()), budget_units)?;
            Ok(g.iter()
                .filter(|n| family.admits(n))
                .map(|n| member_from_annihilator(t, &n))
                .collect())
        }
        None => match family {
            Family::Listed { members } => Ok(members.clone()),
            _ => unreachable!(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvasiveWitness {
    /// Canonical index of the violating member (sample number in sampled mode).
    pub index: u64,
    pub weight: usize,
    /// Annihilator of the member, over F_(q^m).
    pub annihilator: Option<Mat>,
    /// The scaling class representative for Sidon scans.
    pub lambda: Option<Elt>,
    /// The intersection with the system, expanded; its dimension is `weight`.
    pub meet: Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvasiveReport {
    pub verdict: bool,
    pub family: FamilyDescriptor,
    pub bound: usize,
    pub mode: CheckMode,
    pub scanned: u64,
    pub max_weight_seen: usize,
    pub witness: Option<EvasiveWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub workers: usize,
    pub budget: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            workers: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl ScanOptions {
    pub fn with_workers(workers: usize) -> Self {
        ScanOptions {
            workers: workers.max(1),
            ..Self::default()
        }
    }
}

/// Splits `0..total` into contiguous ranges, one per worker, and returns the
/// per-range results in range order.
pub(crate) fn par_ranges<T: Send>(total: u64, workers: usize, f: impl Fn(u64, u64) -> T + Sync) -> Vec<T> {
    let w = (workers.max(1) as u64).min(total.max(1));
    let chunk = total.div_ceil(w);
    if w == 1 {
        return vec![f(0, total)];
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..w)
            .map(|i| {
                let f = &f;
                s.spawn(move || f(i * chunk, ((i + 1) * chunk).min(total)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Partial result of one scan range.
#[derive(Default)]
struct Partial {
    scanned: u64,
    max_weight: usize,
    first: Option<(u64, usize, Mat)>,
}

fn merge(parts: Vec<Partial>) -> Partial {
    let mut out = Partial::default();
    for p in parts {
        out.scanned += p.scanned;
        out.max_weight = out.max_weight.max(p.max_weight);
        if out.first.is_none() {
            out.first = p.first;
        }
    }
    out
}

/// Rows: for each generator g, the expanded vector (N g) ∈ F_q^(m·rows(N)).
fn annihilator_image(t: &FieldTower, gens: &[Vec<Elt>], n: &Mat) -> Mat {
    let f = t.ext();
    let r = n.rows();
    let rows: Vec<Vec<Elt>> = gens
        .iter()
        .map(|g| {
            (0..r)
                .flat_map(|i| {
                    let dot = n
                        .row(i)
                        .iter()
                        .zip(g)
                        .fold(Elt::ZERO, |acc, (&a, &x)| f.add(acc, f.mul(a, x)));
                    t.expand_elt(dot)
                })
                .collect()
        })
        .collect();
    Mat::from_rows(r * t.m(), &rows)
}

/// dim_{F_q}(S ∩ ker N).
pub fn annihilator_weight(t: &FieldTower, gens: &[Vec<Elt>], n: &Mat) -> usize {
    if n.rows() == 0 {
        return gens.len();
    }
    gens.len() - linalg::rank(t.fq(), &annihilator_image(t, gens, n))
}

/// S ∩ ker N as an expanded subspace.
pub fn annihilator_meet(s: &QSystem, n: &Mat) -> Subspace {
    let t = s.tower();
    if n.rows() == 0 {
        return s.space().clone();
    }
    let img = annihilator_image(t, s.generators(), n);
    let coeffs = linalg::kernel_basis(t.fq(), &img.transpose());
    let psi = s.expanded_generators();
    Subspace::span(t.fq(), &coeffs.mul(t.fq(), &psi).expect("shapes agree"))
}

/// Checks wt_S(A) ≤ h for every member A of `family`, scanning all of it.
pub fn is_evasive(s: &QSystem, family: &Family, h: usize, opts: &ScanOptions) -> Result<EvasiveReport> {
    let t = s.tower();
    if let Some(k) = family.ambient_k() {
        if k != s.k() {
            return Err(Error::AmbientMismatch { left: s.k(), right: k });
        }
    }
    let merged = match family.annihilator_grassmannian(t)? {
        Some(g) => {
            budget::ensure("evasiveness scan", &BigUint::from(g.len()), opts.budget)?;
            let parts = par_ranges(g.len(), opts.workers, |lo, hi| {
                let mut p = Partial::default();
                for (i, n) in (lo..hi).zip(g.range(lo, hi)) {
                    if !family.admits(&n) {
                        continue;
                    }
                    p.scanned += 1;
                    let w = annihilator_weight(t, s.generators(), &n);
                    p.max_weight = p.max_weight.max(w);
                    if w > h && p.first.is_none() {
                        p.first = Some((i, w, n));
                    }
                }
                p
            });
            merge(parts)
        }
        None => {
            let Family::Listed { members } = family else { unreachable!() };
            let mut p = Partial::default();
            let mut witness = None;
            for (i, v) in members.iter().enumerate() {
                let meet = s.space().intersect(t.fq(), v)?;
                p.scanned += 1;
                p.max_weight = p.max_weight.max(meet.dim());
                if meet.dim() > h && witness.is_none() {
                    witness = Some(EvasiveWitness {
                        index: i as u64,
                        weight: meet.dim(),
                        annihilator: None,
                        lambda: None,
                        meet,
                    });
                }
            }
            return Ok(EvasiveReport {
                verdict: witness.is_none(),
                family: family.descriptor(),
                bound: h,
                mode: CheckMode::Exhaustive,
                scanned: p.scanned,
                max_weight_seen: p.max_weight,
                witness,
            });
        }
    };
    let witness = merged.first.map(|(index, weight, n)| EvasiveWitness {
        index,
        weight,
        meet: annihilator_meet(s, &n),
        annihilator: Some(n),
        lambda: None,
    });
    Ok(EvasiveReport {
        verdict: witness.is_none(),
        family: family.descriptor(),
        bound: h,
        mode: CheckMode::Exhaustive,
        scanned: merged.scanned,
        max_weight_seen: merged.max_weight,
        witness,
    })
}

fn random_annihilator<R: Rng>(t: &FieldTower, rows: usize, k: usize, rng: &mut R) -> Mat {
    let qm = t.ext().order();
    loop {
        let data = (0..rows * k).map(|_| Elt(rng.random_range(0..qm))).collect();
        let r = linalg::rref(t.ext(), &Mat::from_vec(rows, k, data));
        if r.rank == rows {
            return r.matrix;
        }
    }
}

/// Evasiveness on `samples` uniformly random members of a Λ family.
pub fn is_evasive_sampled(
    s: &QSystem,
    family: &Family,
    h: usize,
    samples: u64,
    seed: u64,
) -> Result<EvasiveReport> {
    let t = s.tower();
    let (k, dim) = match family {
        Family::Lambda { k, h } => (*k, *h),
        Family::LambdaBlocks { ks, h } => (ks.iter().sum(), *h),
        Family::Listed { .. } => return Err(Error::invalid("sampling needs a Λ family")),
    };
    if k != s.k() {
        return Err(Error::AmbientMismatch { left: s.k(), right: k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Partial::default();
    for i in 0..samples {
        let n = random_annihilator(t, k - dim, k, &mut rng);
        if !family.admits(&n) {
            continue;
        }
        p.scanned += 1;
        let w = annihilator_weight(t, s.generators(), &n);
        p.max_weight = p.max_weight.max(w);
        if w > h && p.first.is_none() {
            p.first = Some((i, w, n));
        }
    }
    let witness = p.first.map(|(index, weight, n)| EvasiveWitness {
        index,
        weight,
        meet: annihilator_meet(s, &n),
        annihilator: Some(n),
        lambda: None,
    });
    Ok(EvasiveReport {
        verdict: witness.is_none(),
        family: family.descriptor(),
        bound: h,
        mode: CheckMode::Randomized { samples, seed },
        scanned: p.scanned,
        max_weight_seen: p.max_weight,
        witness,
    })
}

/// (Λ_h, h)-evasiveness.
pub fn is_h_scattered(s: &QSystem, h: usize, opts: &ScanOptions) -> Result<EvasiveReport> {
    is_evasive(s, &Family::lambda(s.k(), h)?, h, opts)
}

/// Re-checks a reported witness without rescanning: the meet lies in the
/// system and in the member, has the reported dimension, exceeds the bound,
/// and the member is admissible for the family.
pub fn verify_witness(s: &QSystem, family: &Family, report: &EvasiveReport) -> Result<bool> {
    let Some(w) = &report.witness else {
        return Ok(report.verdict);
    };
    let t = s.tower();
    let fq = t.fq();
    if w.meet.dim() != w.weight || w.weight <= report.bound {
        return Ok(false);
    }
    if !s.space().contains(fq, &w.meet)? {
        return Ok(false);
    }
    let Some(n) = &w.annihilator else {
        return Ok(false);
    };
    if !family.admits(n) {
        return Ok(false);
    }
    if let Some(k) = family.ambient_k() {
        let rows = match family {
            Family::Lambda { h, .. } | Family::LambdaBlocks { h, .. } => k - h,
            Family::Listed { .. } => unreachable!(),
        };
        if n.rows() != rows || linalg::rank(t.ext(), n) != rows {
            return Ok(false);
        }
    }
    let f = t.ext();
    for v in w.meet.basis().row_vecs() {
        let x = subspaces::contract_vec(t, &v);
        for r in 0..n.rows() {
            let dot = n.row(r).iter().zip(&x).fold(Elt::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
            if !dot.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Scaling class representatives λ of F_(q^m)^*/F_q^*: elements whose first
/// nonzero Γ-coordinate is 1, in canonical order.
pub fn scaling_classes(t: &FieldTower) -> Result<Grassmannian> {
    Grassmannian::new(t.fq(), t.m(), 1)
}

fn check_pair_input(t: &FieldTower, a: &Subspace, b: &Subspace) -> Result<()> {
    for s in [a, b] {
        if s.n() != t.m() {
            return Err(Error::AmbientMismatch { left: s.n(), right: t.m() });
        }
        if s.is_zero() {
            return Err(Error::invalid("Sidon check needs nonzero subspaces"));
        }
    }
    Ok(())
}

/// λ·V for V ⊆ F_(q^m).
pub fn scale_subspace(t: &FieldTower, lambda: Elt, v: &Subspace) -> Subspace {
    let b: Vec<Elt> = scalar_basis(t, v).iter().map(|&x| t.ext().mul(lambda, x)).collect();
    scalar_span(t, &b)
}

/// (Λ_{1,(1,1)}, 1)-evasiveness of A ⊕ B ⊆ F_(q^m)^2 in intersection form:
/// dim(A ∩ λB) ≤ 1 for every λ ∈ F_(q^m)^*, one λ per F_q^*-class.
pub fn sidon_pair_check(t: &FieldTower, a: &Subspace, b: &Subspace, opts: &ScanOptions) -> Result<EvasiveReport> {
    check_pair_input(t, a, b)?;
    let classes = scaling_classes(t)?;
    budget::ensure("scaling classes", &BigUint::from(classes.len()), opts.budget)?;
    let b_basis = scalar_basis(t, b);
    let parts = par_ranges(classes.len(), opts.workers, |lo, hi| {
        let mut p = Partial::default();
        let mut first: Option<(u64, Elt, Subspace)> = None;
        for (i, row) in (lo..hi).zip(classes.range(lo, hi)) {
            let lambda = t.contract_elt(row.row(0));
            let lb: Vec<Elt> = b_basis.iter().map(|&x| t.ext().mul(lambda, x)).collect();
            let meet = a.intersect(t.fq(), &scalar_span(t, &lb)).expect("same ambient");
            p.scanned += 1;
            p.max_weight = p.max_weight.max(meet.dim());
            if meet.dim() > 1 && first.is_none() {
                first = Some((i, lambda, meet));
            }
        }
        (p, first)
    });
    let mut scanned = 0;
    let mut max_weight = 0;
    let mut witness = None;
    for (p, first) in parts {
        scanned += p.scanned;
        max_weight = max_weight.max(p.max_weight);
        if witness.is_none() {
            witness = first.map(|(index, lambda, meet)| EvasiveWitness {
                index,
                weight: meet.dim(),
                annihilator: None,
                lambda: Some(lambda),
                meet,
            });
        }
    }
    Ok(EvasiveReport {
        verdict: witness.is_none(),
        family: FamilyDescriptor::SidonClasses { m: t.m() },
        bound: 1,
        mode: CheckMode::Exhaustive,
        scanned,
        max_weight_seen: max_weight,
        witness,
    })
}

/// Early-exit variant for searches: the first violating class index.
pub fn sidon_first_violation(t: &FieldTower, a: &Subspace, b_basis: &[Elt], classes: &Grassmannian) -> Option<u64> {
    for (i, row) in classes.iter().enumerate() {
        let lambda = t.contract_elt(row.row(0));
        let lb: Vec<Elt> = b_basis.iter().map(|&x| t.ext().mul(lambda, x)).collect();
        if a.intersect(t.fq(), &scalar_span(t, &lb)).expect("same ambient").dim() > 1 {
            return Some(i as u64);
        }
    }
    None
}

/// Checks a Sidon witness (λ, meet) alone: meet ⊆ A, meet ⊆ λB, dim ≥ 2.
pub fn verify_sidon_witness(t: &FieldTower, a: &Subspace, b: &Subspace, w: &EvasiveWitness) -> Result<bool> {
    let Some(lambda) = w.lambda else { return Ok(false) };
    if lambda.is_zero() || w.meet.dim() < 2 || w.meet.dim() != w.weight {
        return Ok(false);
    }
    let lb = scale_subspace(t, lambda, b);
    Ok(a.contains(t.fq(), &w.meet)? && lb.contains(t.fq(), &w.meet)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralSidonReport {
    pub holds: bool,
    pub quadruples: u64,
    /// (a1, a2, b1, b2) with a1·b2 = a2·b1 but not F_q-proportional.
    pub witness: Option<[Elt; 4]>,
}

/// The quadruple form: whenever a1·b2 = a2·b1 with all entries nonzero,
/// a1 = μ·a2 and b1 = μ·b2 for some μ ∈ F_q.
pub fn literal_sidon_check(t: &FieldTower, a: &Subspace, b: &Subspace, budget_units: u64) -> Result<LiteralSidonReport> {
    check_pair_input(t, a, b)?;
    let q = BigUint::from(t.q());
    let work = q.pow(2 * (a.dim() + b.dim()) as u32);
    budget::ensure("literal quadruple scan", &work, budget_units)?;
    let f = t.ext();
    let elems = |s: &Subspace| -> Vec<Elt> {
        s.vectors(t.fq())
            .into_iter()
            .map(|v| t.contract_elt(&v))
            .filter(|x| !x.is_zero())
            .collect()
    };
    let (av, bv) = (elems(a), elems(b));
    let mut quadruples = 0;
    for &a1 in &av {
        for &a2 in &av {
            for &b1 in &bv {
                for &b2 in &bv {
                    quadruples += 1;
                    if f.mul(a1, b2) != f.mul(a2, b1) {
                        continue;
                    }
                    let mu = f.div(a1, a2)?;
                    let ok = t.restrict_to_fq(mu).is_some() && b1 == f.mul(mu, b2);
                    if !ok {
                        return Ok(LiteralSidonReport {
                            holds: false,
                            quadruples,
                            witness: Some([a1, a2, b1, b2]),
                        });
                    }
                }
            }
        }
    }
    Ok(LiteralSidonReport {
        holds: true,
        quadruples,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeLevel {
    pub l: usize,
    pub bound: usize,
    pub report: EvasiveReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub hypothesis: EvasiveReport,
    pub levels: Vec<CascadeLevel>,
    /// Every level passed (vacuous when the hypothesis fails).
    pub holds: bool,
    pub first_failure: Option<usize>,
}

/// If S is (Λ_{k−1,𝐤}, r)-evasive, checks (Λ_{l,𝐤}, r−k+1+l)-evasiveness for
/// every l in 1..k−1.
pub fn cascade_check(s: &QSystem, ks: &[usize], r: usize, opts: &ScanOptions) -> Result<CascadeReport> {
    let k: usize = ks.iter().sum();
    if r + 2 < k {
        return Err(Error::invalid(format!("bound r = {r} too small for k = {k}")));
    }
    let hypothesis = is_evasive(s, &Family::lambda_blocks(ks, k - 1)?, r, opts)?;
    if !hypothesis.verdict {
        return Ok(CascadeReport {
            hypothesis,
            levels: Vec::new(),
            holds: true,
            first_failure: None,
        });
    }
    let mut levels = Vec::new();
    let mut first_failure = None;
    for l in 1..k {
        let bound = r + 1 + l - k;
        let report = is_evasive(s, &Family::lambda_blocks(ks, l)?, bound, opts)?;
        if !report.verdict && first_failure.is_none() {
            first_failure = Some(l);
        }
        levels.push(CascadeLevel { l, bound, report });
    }
    Ok(CascadeReport {
        hypothesis,
        holds: first_failure.is_none(),
        levels,
        first_failure,
    })
}
