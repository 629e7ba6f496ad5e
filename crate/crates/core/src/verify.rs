//! Representability verdicts for direct sums of uniform q-matroids.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::budget;
use crate::codes::{system_to_code, QSystem};
use crate::constructions::{direct_sum_system, mul_span, pair_system, Construction};
use crate::error::{Error, Result};
use crate::evasive::{
    self, cascade_check, is_evasive, literal_sidon_check, par_ranges, scale_subspace, scaling_classes,
    sidon_first_violation, sidon_pair_check, CascadeReport, EvasiveReport, Family, LiteralSidonReport, ScanOptions,
};
use crate::fields::{poly, Elt, FieldSpec, FieldTower};
use crate::qmatroid::{self, independent_by_block_sums, CheckMode};
use crate::subspaces::{
    gaussian_binomial, random_subspace, scalar_basis, scalar_span, subspace_count, Grassmannian, Subspace,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    RepresentableWithWitness,
    /// Representable by a clause whose construction is not generated here.
    RepresentableByCitation,
    RefutedExhaustively,
    NecessaryConditionViolated,
    /// The supplied candidate system is not a representation.
    CandidateRejected,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub q: u64,
    pub ks: Vec<usize>,
    pub ns: Vec<usize>,
    pub m: usize,
}

impl Target {
    pub fn rank_one_pair(q: u64, m: usize, n1: usize, n2: usize) -> Self {
        Target {
            q,
            ks: vec![1, 1],
            ns: vec![n1, n2],
            m,
        }
    }
}

/// Raw witness data, sufficient to rebuild the system from the field spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// F_q-bases of A, B ⊆ F_(q^m).
    Pair { a: Vec<Elt>, b: Vec<Elt> },
    /// Ordered F_q-basis of a system in F_(q^m)^k.
    System { k: usize, generators: Vec<Vec<Elt>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseHit {
    pub clause: u8,
    /// The clause holds with the roles of n1 and n2 exchanged.
    pub swapped: bool,
    pub detail: String,
    pub generates_witness: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PairCertificate {
    /// Every scaling class λ checked: dim(A ∩ λB) ≤ 1.
    LambdaScan { classes: u64 },
    /// dim A·B = dim A · dim B, so multiplication A ⊗ B → F_(q^m) is injective.
    InjectiveProduct { dim: usize },
    /// V^q = V and W ∩ ξW = {0} for W = U·V, with B = {v + ξv^q : v ∈ V}.
    SeparatedTwist { product_dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub mode: CheckMode,
    /// Unreduced pair-space cardinality.
    pub pair_space: u64,
    /// Pairs accounted for, orbit multiplicities included.
    pub covered: u64,
    /// Pairs actually tested.
    pub scanned: u64,
    pub orbit_representatives: u64,
    pub trials: Option<u64>,
    pub transcript_sha256: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCheck {
    /// ρ_S∘ψ_G equals the direct-sum rank on every subspace.
    pub condition1: Option<bool>,
    /// Independence in S matches the block-intersection bounds.
    pub condition2: Option<bool>,
    /// (Λ_{k−1,𝐤}, k−1)-evasiveness.
    pub condition3: bool,
    pub subspaces_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeSummary {
    pub holds: bool,
    pub levels: Vec<(usize, usize, bool)>,
}

impl From<&CascadeReport> for CascadeSummary {
    fn from(c: &CascadeReport) -> Self {
        CascadeSummary {
            holds: c.holds,
            levels: c.levels.iter().map(|l| (l.l, l.bound, l.report.verdict)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationVerdict {
    pub version: u32,
    pub target: Target,
    pub field: Option<FieldSpec>,
    pub status: Status,
    pub clauses: Vec<ClauseHit>,
    pub construction: Option<Construction>,
    pub witness: Option<Witness>,
    pub evidence: Vec<EvasiveReport>,
    pub pair_certificate: Option<PairCertificate>,
    pub literal: Option<LiteralSidonReport>,
    pub search: Option<SearchStats>,
    pub triple: Option<TripleCheck>,
    pub cascade: Option<CascadeSummary>,
    pub notes: Vec<String>,
}

impl RepresentationVerdict {
    fn new(target: Target, status: Status) -> Self {
        RepresentationVerdict {
            version: FORMAT_VERSION,
            target,
            field: None,
            status,
            clauses: Vec::new(),
            construction: None,
            witness: None,
            evidence: Vec::new(),
            pair_certificate: None,
            literal: None,
            search: None,
            triple: None,
            cascade: None,
            notes: Vec::new(),
        }
    }
}

/// Largest lattice on which the triple cross-check runs.
pub const TRIPLE_LATTICE_LIMIT: u64 = 200_000;

/// Decides whether ⊕ S_i represents ⊕ U_{k_i,n_i} through (Λ_{k−1,𝐤}, k−1)-
/// evasiveness, and on small ground spaces cross-checks the rank-function
/// and independent-space characterizations on every subspace.
pub fn verify_uniform_sum_representation(blocks: &[QSystem], opts: &ScanOptions) -> Result<RepresentationVerdict> {
    let first = blocks.first().ok_or_else(|| Error::invalid("no blocks"))?;
    let t = first.tower().clone();
    let ks: Vec<usize> = blocks.iter().map(|b| b.k()).collect();
    let ns: Vec<usize> = blocks.iter().map(|b| b.n()).collect();
    for (i, b) in blocks.iter().enumerate() {
        if b.n() <= b.k() {
            return Err(Error::invalid(format!("block {}: need n > k", i + 1)));
        }
        if blocks.len() > 1 && b.k() > 1 {
            let rep = is_evasive(b, &Family::lambda(b.k(), b.k() - 1)?, b.k() - 1, opts)?;
            if !rep.verdict {
                return Err(Error::invalid(format!(
                    "block {} is not a representation of U_({},{})",
                    i + 1,
                    b.k(),
                    b.n()
                )));
            }
        }
    }
    let s = direct_sum_system(blocks)?;
    let k = s.k();
    let target = Target {
        q: t.q(),
        ks: ks.clone(),
        ns: ns.clone(),
        m: t.m(),
    };

    let family = if k == 1 {
        Family::Listed {
            members: vec![Subspace::zero(t.m())],
        }
    } else {
        Family::lambda_blocks(&ks, k - 1)?
    };
    let evidence = is_evasive(&s, &family, k - 1, opts)?;
    let cond3 = evidence.verdict;

    let n = s.n();
    let lattice = subspace_count(n, t.q());
    let triple = if lattice <= BigUint::from(TRIPLE_LATTICE_LIMIT.min(opts.budget)) {
        let (c1, c2, checked) = cross_check(&s, &ks, &ns, opts)?;
        if c1 != cond3 || c2 != cond3 {
            return Err(Error::LemmaViolation(format!(
                "characterizations disagree: rank functions {c1}, independent spaces {c2}, evasiveness {cond3}"
            )));
        }
        TripleCheck {
            condition1: Some(c1),
            condition2: Some(c2),
            condition3: cond3,
            subspaces_checked: checked,
        }
    } else {
        TripleCheck {
            condition1: None,
            condition2: None,
            condition3: cond3,
            subspaces_checked: 0,
        }
    };

    let mut v = RepresentationVerdict::new(
        target,
        if cond3 {
            Status::RepresentableWithWitness
        } else {
            Status::CandidateRejected
        },
    );
    v.field = Some(t.spec().clone());
    v.witness = Some(Witness::System {
        k,
        generators: s.generators().to_vec(),
    });
    if cond3 && k >= 2 {
        let c = cascade_check(&s, &ks, k - 1, opts)?;
        if !c.holds {
            return Err(Error::LemmaViolation(format!("cascade fails at l = {:?}", c.first_failure)));
        }
        v.cascade = Some(CascadeSummary::from(&c));
    }
    if triple.condition1.is_none() {
        v.notes.push(format!("lattice of F_{}^{n} too large for the cross-check", t.q()));
    }
    v.evidence.push(evidence);
    v.triple = Some(triple);
    Ok(v)
}

/// Conditions (rank functions agree, independent spaces agree) on all of F_q^n.
fn cross_check(s: &QSystem, ks: &[usize], ns: &[usize], opts: &ScanOptions) -> Result<(bool, bool, u64)> {
    let t = s.tower();
    let code = system_to_code(s)?;
    let rep = qmatroid::representable(t.clone(), code.generator().clone())?;
    let parts = ks
        .iter()
        .zip(ns)
        .map(|(&k, &n)| qmatroid::uniform(k, n, t.q()))
        .collect::<Result<Vec<_>>>()?;
    let sum = qmatroid::direct_sum_all(&parts)?;
    let sys = qmatroid::system_rank(t.clone(), s.k(), s.generators())?;
    let blocks: Vec<(usize, usize)> = ks.iter().copied().zip(ns.iter().copied()).collect();
    let n: usize = ns.iter().sum();
    let fq = t.fq();
    let gs: Vec<Grassmannian> = (0..=n).map(|d| Grassmannian::new(fq, n, d)).collect::<Result<_>>()?;
    let subs: Vec<Subspace> = gs
        .iter()
        .flat_map(|g| g.iter().map(|m| Subspace::span(fq, &m)))
        .collect();
    let results = par_ranges(subs.len() as u64, opts.workers, |lo, hi| {
        let mut c1 = true;
        let mut c2 = true;
        for u in &subs[lo as usize..hi as usize] {
            c1 &= rep.eval(u) == sum.eval(u);
            let independent = sys.eval(u) == u.dim();
            c2 &= independent == independent_by_block_sums(fq, &blocks, u).expect("same ambient");
        }
        (c1, c2)
    });
    let c1 = results.iter().all(|r| r.0);
    let c2 = results.iter().all(|r| r.1);
    Ok((c1, c2, subs.len() as u64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum NecessaryCheck {
    Pass,
    Violation { required_m: usize },
    NotApplicable { note: String },
}

/// m ≥ 2·max n_i, necessary when every n_i ≥ 2.
pub fn necessary_condition_rank1(ns: &[usize], m: usize) -> NecessaryCheck {
    if ns.is_empty() || ns.iter().any(|&n| n < 2) {
        return NecessaryCheck::NotApplicable {
            note: "the bound needs every n_i ≥ 2".into(),
        };
    }
    let required_m = 2 * ns.iter().max().unwrap();
    if m < required_m {
        NecessaryCheck::Violation { required_m }
    } else {
        NecessaryCheck::Pass
    }
}

fn divisor_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=m).filter(move |t1| m % t1 == 0).map(move |t1| (t1, m / t1))
}

/// m = p^r with r ≥ 1.
fn log_exact(p: u64, m: usize) -> Option<u32> {
    let mut x = 1u64;
    for r in 1..64 {
        x = x.checked_mul(p)?;
        if x == m as u64 {
            return Some(r);
        }
        if x > m as u64 {
            return None;
        }
    }
    None
}

/// Clauses of the rank-one representability summary that hold at (q, n1, n2, m).
pub fn matching_clauses(q: u64, n1: usize, n2: usize, m: usize) -> Vec<ClauseHit> {
    let mut hits = Vec::new();
    let mx = n1.max(n2);
    if m % 2 == 0 && m >= 2 * mx {
        hits.push(ClauseHit {
            clause: 1,
            swapped: false,
            detail: format!("m = {m} even, m ≥ {}", 2 * mx),
            generates_witness: false,
        });
    }
    if m >= n1 * n2 {
        hits.push(ClauseHit {
            clause: 2,
            swapped: false,
            detail: format!("m ≥ n1·n2 = {}", n1 * n2),
            generates_witness: true,
        });
    }
    for (swapped, a, b) in [(false, n1, n2), (true, n2, n1)] {
        if let Some((t1, t2)) = divisor_pairs(m).find(|&(t1, t2)| t1 >= a && 2 * (b - 1) <= t1 * (t2 - 1)) {
            hits.push(ClauseHit {
                clause: 3,
                swapped,
                detail: format!("t1 = {t1}, t2 = {t2}"),
                generates_witness: false,
            });
            break;
        }
    }
    if let Some((t1, t2)) = divisor_pairs(m).find(|&(t1, t2)| t1 >= mx && t2 >= 2) {
        hits.push(ClauseHit {
            clause: 4,
            swapped: false,
            detail: format!("t1 = {t1}, t2 = {t2}"),
            generates_witness: false,
        });
    }
    if let Some((p, _)) = poly::prime_power(q) {
        if let Some(r) = log_exact(p, m) {
            if 2 * (n1 + n2 - 1) <= m {
                hits.push(ClauseHit {
                    clause: 5,
                    swapped: false,
                    detail: format!("m = {p}^{r}, n1 + n2 − 1 ≤ {}", m / 2),
                    generates_witness: true,
                });
            }
        }
    }
    hits
}

fn lambda_scan_fits(t: &FieldTower, budget_units: u64) -> bool {
    let classes = (BigUint::from(t.q()).pow(t.m() as u32) - 1u32) / (t.q() - 1);
    classes * (t.m() * t.m()) <= BigUint::from(budget_units)
}

/// Certifies dim(A ∩ λB) ≤ 1 for all λ: by full scan when affordable,
/// otherwise through injectivity of multiplication A ⊗ B → F_(q^m).
pub fn certify_pair(t: &FieldTower, a: &Subspace, b: &Subspace, opts: &ScanOptions) -> Result<(bool, PairCertificate, Option<EvasiveReport>)> {
    if lambda_scan_fits(t, opts.budget) {
        let r = sidon_pair_check(t, a, b, opts)?;
        let classes = r.scanned;
        return Ok((r.verdict, PairCertificate::LambdaScan { classes }, Some(r)));
    }
    let dim = mul_span(t, a, b).dim();
    if dim == a.dim() * b.dim() {
        return Ok((true, PairCertificate::InjectiveProduct { dim }, None));
    }
    Err(Error::BudgetExceeded {
        what: "scaling-class scan (product map not injective)".into(),
        workload: format!("{}^{}", t.q(), t.m()),
        budget: opts.budget,
    })
}

/// Checks V^q = V and U·V ∩ ξ(U·V) = {0}.
pub fn certify_twist(t: &FieldTower, u: &Subspace, v: &Subspace, xi: Elt) -> Result<Option<PairCertificate>> {
    let frob: Vec<Elt> = scalar_basis(t, v).iter().map(|&x| t.frobenius_q(x, 1)).collect();
    if scalar_span(t, &frob) != *v {
        return Ok(None);
    }
    let w = mul_span(t, u, v);
    if !w.intersect(t.fq(), &scale_subspace(t, xi, &w))?.is_zero() {
        return Ok(None);
    }
    Ok(Some(PairCertificate::SeparatedTwist { product_dim: w.dim() }))
}

/// Every clause that applies, the generated witness for the constructive
/// ones, and the verdict status.
pub fn dispatch_theorem_summary(q: u64, n1: usize, n2: usize, m: usize, opts: &ScanOptions) -> Result<RepresentationVerdict> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::invalid("dispatch needs n1, n2 ≥ 2"));
    }
    let (p, h) = poly::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let target = Target::rank_one_pair(q, m, n1, n2);
    if let NecessaryCheck::Violation { required_m } = necessary_condition_rank1(&[n1, n2], m) {
        let mut v = RepresentationVerdict::new(target, Status::NecessaryConditionViolated);
        v.notes.push(format!("m = {m} < 2·max(n1, n2) = {required_m}"));
        return Ok(v);
    }
    let clauses = matching_clauses(q, n1, n2, m);
    let mut v = RepresentationVerdict::new(target, Status::Unknown);
    v.clauses = clauses.clone();
    if clauses.is_empty() {
        v.notes.push("no clause applies: open case, search target".into());
        return Ok(v);
    }
    let construction = if clauses.iter().any(|c| c.clause == 2) {
        Some(Construction::PolynomialPair { q, m, n1, n2 })
    } else if clauses.iter().any(|c| c.clause == 5) {
        let r = log_exact(p, m).expect("clause 5 matched");
        Some(Construction::ModularPair { p, h, r, n1, n2 })
    } else {
        None
    };
    let Some(c) = construction else {
        v.status = Status::RepresentableByCitation;
        v.notes.push("construction cited, certify by search".into());
        return Ok(v);
    };
    let built = match c.build() {
        Ok(b) => b,
        Err(e @ (Error::FieldTooLarge { .. } | Error::BudgetExceeded { .. })) => {
            v.status = Status::RepresentableByCitation;
            v.notes.push(format!("witness not built: {e}"));
            return Ok(v);
        }
        Err(e) => return Err(e),
    };
    let t = built.system.tower().clone();
    let (a, b) = built.pair.clone().expect("rank-one constructions are pairs");
    let (ok, cert, report) = match certify_pair(&t, &a, &b, opts) {
        Ok(x) => x,
        Err(e) if e.is_budget() => {
            let Construction::ModularPair { n1, n2, .. } = c else { return Err(e) };
            let u = a.clone();
            let vv = crate::constructions::artin_schreier_kernel(&t, n2);
            debug_assert_eq!(u.dim(), n1);
            let xi = built.xi.expect("modular pairs carry ξ");
            match certify_twist(&t, &u, &vv, xi)? {
                Some(cert) => (true, cert, None),
                None => return Err(Error::LemmaViolation("generated twist fails its hypotheses".into())),
            }
        }
        Err(e) => return Err(e),
    };
    if !ok {
        return Err(Error::LemmaViolation(format!("generated witness {c:?} fails the pair check")));
    }
    v.status = Status::RepresentableWithWitness;
    v.field = Some(t.spec().clone());
    v.witness = Some(Witness::Pair {
        a: scalar_basis(&t, &a),
        b: scalar_basis(&t, &b),
    });
    v.construction = Some(c);
    v.pair_certificate = Some(cert);
    v.evidence.extend(report);
    Ok(v)
}

/// Canonical representative test for the scaling orbit of A, and the orbit size.
fn orbit_info(t: &FieldTower, a: &Subspace, classes: &Grassmannian) -> (bool, u64) {
    let mut orbit = std::collections::BTreeSet::new();
    let mut minimal = true;
    for row in classes.iter() {
        let lambda = t.contract_elt(row.row(0));
        let la = scale_subspace(t, lambda, a);
        if la < *a {
            minimal = false;
        }
        orbit.insert(la);
    }
    (minimal, orbit.len() as u64)
}

fn pair_verdict_base(t: &Arc<FieldTower>, target: Target) -> RepresentationVerdict {
    let mut v = RepresentationVerdict::new(target, Status::Unknown);
    v.field = Some(t.spec().clone());
    v
}

/// Attaches the λ-scan, the direct Λ_{1,(1,1)} scan and (when affordable) the
/// literal quadruple check to a witness pair.
fn attach_pair_evidence(
    v: &mut RepresentationVerdict,
    t: &Arc<FieldTower>,
    a: &Subspace,
    b: &Subspace,
    opts: &ScanOptions,
) -> Result<()> {
    let lam = sidon_pair_check(t, a, b, opts)?;
    let sys = pair_system(t, a, b)?;
    let direct = is_evasive(&sys, &Family::lambda_blocks(&[1, 1], 1)?, 1, opts)?;
    if !(lam.verdict && direct.verdict) {
        return Err(Error::LemmaViolation("pair formulations disagree on a witness".into()));
    }
    v.pair_certificate = Some(PairCertificate::LambdaScan { classes: lam.scanned });
    v.evidence = vec![lam, direct];
    match literal_sidon_check(t, a, b, opts.budget) {
        Ok(l) if !l.holds => return Err(Error::LemmaViolation("literal quadruple check rejects a witness".into())),
        Ok(l) => v.literal = Some(l),
        Err(e) if e.is_budget() => v.notes.push("literal quadruple check skipped: over budget".into()),
        Err(e) => return Err(e),
    }
    v.witness = Some(Witness::Pair {
        a: scalar_basis(t, a),
        b: scalar_basis(t, b),
    });
    v.status = Status::RepresentableWithWitness;
    Ok(())
}

fn check_pair_dims(m: usize, n1: usize, n2: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || n1 > m || n2 > m {
        return Err(Error::invalid(format!("need 1 ≤ n1, n2 ≤ m = {m}")));
    }
    Ok(())
}

/// Scans every pair (A, B) of subspaces of F_(q^m) with dim A = n1,
/// dim B = n2, A up to F_(q^m)^*-scaling, for dim(A ∩ λB) ≤ 1 for all λ.
pub fn exhaustive_pair_search(q: u64, m: usize, n1: usize, n2: usize, opts: &ScanOptions) -> Result<RepresentationVerdict> {
    check_pair_dims(m, n1, n2)?;
    let t = Arc::new(FieldTower::for_q(q, m)?);
    let fq = t.fq();
    let classes = scaling_classes(&t)?;
    let ga = Grassmannian::new(fq, m, n1)?;
    let gb = Grassmannian::new(fq, m, n2)?;
    let pair_space = gaussian_binomial(m, n1, q) * gaussian_binomial(m, n2, q);
    budget::ensure(
        "pair search",
        &(pair_space.clone() * classes.len() + gaussian_binomial(m, n1, q) * classes.len()),
        opts.budget,
    )?;
    let pair_space = u64::try_from(pair_space).expect("within budget");
    let bs: Vec<(Subspace, Vec<Elt>)> = gb
        .iter()
        .map(|x| {
            let s = Subspace::span(fq, &x);
            let basis = scalar_basis(&t, &s);
            (s, basis)
        })
        .collect();
    let nb = bs.len() as u64;

    struct Part {
        covered: u64,
        scanned: u64,
        reps: u64,
        found: Option<(u64, u64)>,
    }
    let parts = par_ranges(ga.len(), opts.workers, |lo, hi| {
        let mut p = Part {
            covered: 0,
            scanned: 0,
            reps: 0,
            found: None,
        };
        for (ia, x) in (lo..hi).zip(ga.range(lo, hi)) {
            let a = Subspace::span(fq, &x);
            let (minimal, orbit) = orbit_info(&t, &a, &classes);
            if !minimal {
                continue;
            }
            p.reps += 1;
            for (ib, (_, bb)) in bs.iter().enumerate() {
                p.scanned += 1;
                if sidon_first_violation(&t, &a, bb, &classes).is_none() {
                    p.found = Some((ia, ib as u64));
                    return p;
                }
            }
            p.covered += orbit * nb;
        }
        p
    });

    let target = Target::rank_one_pair(q, m, n1, n2);
    let mut v = pair_verdict_base(&t, target);
    let (mut covered, mut scanned, mut reps) = (0, 0, 0);
    let mut found = None;
    for p in parts {
        covered += p.covered;
        scanned += p.scanned;
        reps += p.reps;
        if p.found.is_some() {
            found = p.found;
            break;
        }
    }
    v.search = Some(SearchStats {
        mode: CheckMode::Exhaustive,
        pair_space,
        covered,
        scanned,
        orbit_representatives: reps,
        trials: None,
        transcript_sha256: None,
    });
    match found {
        Some((ia, ib)) => {
            let a = Subspace::span(fq, &ga.unrank(ia)?);
            let b = bs[ib as usize].0.clone();
            attach_pair_evidence(&mut v, &t, &a, &b, opts)?;
        }
        None => {
            if covered != pair_space {
                return Err(Error::LemmaViolation(format!(
                    "orbit reduction covered {covered} of {pair_space} pairs"
                )));
            }
            v.status = Status::RefutedExhaustively;
        }
    }
    Ok(v)
}

pub const DEFAULT_TRIALS: u64 = 100_000;

/// Uniform random pairs from a seeded stream; the first passing trial wins.
/// The transcript digest covers the bases of every trial drawn.
pub fn randomized_pair_search(
    q: u64,
    m: usize,
    n1: usize,
    n2: usize,
    seed: u64,
    max_trials: u64,
    opts: &ScanOptions,
) -> Result<RepresentationVerdict> {
    check_pair_dims(m, n1, n2)?;
    let t = Arc::new(FieldTower::for_q(q, m)?);
    let fq = t.fq();
    let classes = scaling_classes(&t)?;
    budget::ensure(
        "randomized pair search",
        &(BigUint::from(max_trials) * classes.len()),
        opts.budget,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hasher = Sha256::new();
    let mut found = None;
    let mut trials = 0;
    while trials < max_trials {
        trials += 1;
        let a = random_subspace(fq, m, n1, &mut rng);
        let b = random_subspace(fq, m, n2, &mut rng);
        let bb = scalar_basis(&t, &b);
        for x in scalar_basis(&t, &a).iter().chain(&bb) {
            hasher.update(x.0.to_le_bytes());
        }
        if sidon_first_violation(&t, &a, &bb, &classes).is_none() {
            found = Some((a, b));
            break;
        }
    }
    let digest: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let mut v = pair_verdict_base(&t, Target::rank_one_pair(q, m, n1, n2));
    v.search = Some(SearchStats {
        mode: CheckMode::Randomized {
            samples: max_trials,
            seed,
        },
        pair_space: u64::try_from(gaussian_binomial(m, n1, q) * gaussian_binomial(m, n2, q)).unwrap_or(u64::MAX),
        covered: trials,
        scanned: trials,
        orbit_representatives: 0,
        trials: Some(trials),
        transcript_sha256: Some(digest),
    });
    match found {
        Some((a, b)) => attach_pair_evidence(&mut v, &t, &a, &b, opts)?,
        None => v.notes.push(format!("no witness in {trials} trials")),
    }
    Ok(v)
}

/// Necessary-condition fast reject, then exhaustive search.
pub fn decide_pair(q: u64, m: usize, n1: usize, n2: usize, opts: &ScanOptions) -> Result<RepresentationVerdict> {
    if let NecessaryCheck::Violation { required_m } = necessary_condition_rank1(&[n1, n2], m) {
        let mut v = RepresentationVerdict::new(Target::rank_one_pair(q, m, n1, n2), Status::NecessaryConditionViolated);
        v.notes.push(format!("m = {m} < {required_m}"));
        return Ok(v);
    }
    exhaustive_pair_search(q, m, n1, n2, opts)
}

/// Re-checks a pair witness from its raw data alone: the field is rebuilt
/// from its spec and the literal quadruple criterion is applied.
pub fn reverify_pair_witness(spec: &FieldSpec, a: &[Elt], b: &[Elt], budget_units: u64) -> Result<LiteralSidonReport> {
    let t = FieldTower::from_spec(spec)?;
    for &x in a.iter().chain(b) {
        t.ext().check(x)?;
    }
    let sa = scalar_span(&t, a);
    let sb = scalar_span(&t, b);
    if sa.dim() != a.len() || sb.dim() != b.len() {
        return Err(Error::Certificate("witness bases are not independent".into()));
    }
    literal_sidon_check(&t, &sa, &sb, budget_units)
}

/// Rebuilds a system witness and re-runs the evasiveness scan.
pub fn reverify_system_witness(
    spec: &FieldSpec,
    ks: &[usize],
    k: usize,
    generators: &[Vec<Elt>],
    opts: &ScanOptions,
) -> Result<bool> {
    let t = Arc::new(FieldTower::from_spec(spec)?);
    let s = QSystem::new(t, k, generators.to_vec())?;
    if ks.iter().sum::<usize>() != k {
        return Err(Error::Certificate("block dimensions do not sum to k".into()));
    }
    if k == 1 {
        return Ok(true);
    }
    Ok(evasive::is_evasive(&s, &Family::lambda_blocks(ks, k - 1)?, k - 1, opts)?.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::DEFAULT_BUDGET;
    use crate::codes::{code_to_system, gabidulin_standard, RankMetricCode};
    use crate::constructions::{canonical_subfield_subspace, coprime_pseudoregulus_sum, parse_blocks, pseudoregulus_block};
    use crate::linalg::Mat;

    fn opts() -> ScanOptions {
        ScanOptions::default()
    }

    #[test]
    fn necessary_condition_examples() {
        assert_eq!(necessary_condition_rank1(&[2, 2], 4), NecessaryCheck::Pass);
        assert_eq!(necessary_condition_rank1(&[2, 2], 3), NecessaryCheck::Violation { required_m: 4 });
        assert_eq!(necessary_condition_rank1(&[7, 6], 13), NecessaryCheck::Violation { required_m: 14 });
        assert!(matches!(necessary_condition_rank1(&[1, 3], 2), NecessaryCheck::NotApplicable { .. }));
    }

    #[test]
    fn clause_matching() {
        let ids = |m| matching_clauses(2, 7, 6, m).iter().map(|c| c.clause).collect::<Vec<_>>();
        assert_eq!(ids(42), vec![1, 2, 3, 4]);
        assert!(ids(21).contains(&4) && ids(21).contains(&3));
        assert!(ids(17).is_empty());
        for m in [19, 23] {
            assert!(ids(m).is_empty());
        }
        for m in [27, 33, 35, 39] {
            assert!(!ids(m).is_empty());
        }
        assert!(matching_clauses(2, 3, 2, 8).iter().any(|c| c.clause == 5));
        assert!(!matching_clauses(3, 3, 2, 8).iter().any(|c| c.clause == 5));
    }

    #[test]
    fn dispatch_examples() {
        let v = dispatch_theorem_summary(2, 7, 6, 17, &opts()).unwrap();
        assert_eq!(v.status, Status::Unknown);
        let v = dispatch_theorem_summary(2, 7, 6, 21, &opts()).unwrap();
        assert_eq!(v.status, Status::RepresentableByCitation);
        let v = dispatch_theorem_summary(2, 7, 6, 13, &opts()).unwrap();
        assert_eq!(v.status, Status::NecessaryConditionViolated);
        let v = dispatch_theorem_summary(2, 2, 3, 6, &opts()).unwrap();
        assert_eq!(v.status, Status::RepresentableWithWitness);
        assert_eq!(v.pair_certificate, Some(PairCertificate::LambdaScan { classes: 63 }));
        let v = dispatch_theorem_summary(2, 3, 2, 8, &opts()).unwrap();
        assert_eq!(v.status, Status::RepresentableWithWitness);
        assert!(v.clauses.iter().any(|c| c.clause == 5));
    }

    #[test]
    fn dispatch_large_clause2_uses_product_certificate() {
        let v = dispatch_theorem_summary(2, 7, 6, 42, &opts()).unwrap();
        assert_eq!(v.status, Status::RepresentableWithWitness);
        assert_eq!(v.pair_certificate, Some(PairCertificate::InjectiveProduct { dim: 42 }));
    }

    #[test]
    fn boundary_m3_m4() {
        let r3 = exhaustive_pair_search(2, 3, 2, 2, &opts()).unwrap();
        assert_eq!(r3.status, Status::RefutedExhaustively);
        let s = r3.search.as_ref().unwrap();
        assert_eq!((s.pair_space, s.covered), (49, 49));
        assert!(s.scanned < 49);
        let r4 = exhaustive_pair_search(2, 4, 2, 2, &opts()).unwrap();
        assert_eq!(r4.status, Status::RepresentableWithWitness);
        assert!(r4.literal.as_ref().unwrap().holds);
        let Some(Witness::Pair { a, b }) = &r4.witness else { panic!() };
        assert!(reverify_pair_witness(r4.field.as_ref().unwrap(), a, b, DEFAULT_BUDGET).unwrap().holds);
    }

    #[test]
    fn searches_do_not_depend_on_workers() {
        for m in [3, 4] {
            let one = exhaustive_pair_search(2, m, 2, 2, &opts()).unwrap();
            let four = exhaustive_pair_search(2, m, 2, 2, &ScanOptions::with_workers(4)).unwrap();
            assert_eq!(one, four);
        }
    }

    #[test]
    fn randomized_search() {
        let a = randomized_pair_search(2, 3, 2, 2, 5, 200, &opts()).unwrap();
        assert_eq!(a.status, Status::Unknown);
        assert_eq!(a.search.as_ref().unwrap().trials, Some(200));
        assert_eq!(a, randomized_pair_search(2, 3, 2, 2, 5, 200, &opts()).unwrap());
        let b = randomized_pair_search(2, 3, 2, 2, 6, 200, &opts()).unwrap();
        assert_ne!(a.search.unwrap().transcript_sha256, b.search.unwrap().transcript_sha256);
        let w = randomized_pair_search(2, 5, 2, 2, 1, 1000, &opts()).unwrap();
        assert_eq!(w.status, Status::RepresentableWithWitness);
    }

    #[test]
    fn triple_agreement_on_coprime_sum() {
        let s = coprime_pseudoregulus_sum(2, &parse_blocks("2:1:2,3:1:3").unwrap()).unwrap();
        let t = s.tower().clone();
        let a = pseudoregulus_block(&t, &canonical_subfield_subspace(&t, 2, 2).unwrap(), 1, 2).unwrap();
        let b = pseudoregulus_block(&t, &canonical_subfield_subspace(&t, 3, 3).unwrap(), 1, 3).unwrap();
        let v = verify_uniform_sum_representation(&[a, b], &opts()).unwrap();
        assert_eq!(v.status, Status::RepresentableWithWitness);
        let tr = v.triple.unwrap();
        assert_eq!((tr.condition1, tr.condition2, tr.condition3), (Some(true), Some(true), true));
        assert_eq!(tr.subspaces_checked, 374);
    }

    #[test]
    fn triple_agreement_on_failure() {
        let t = Arc::new(FieldTower::new(2, 1, 3).unwrap());
        let v2 = canonical_subfield_subspace(&t, 3, 2).unwrap();
        let a = pseudoregulus_block(&t, &v2, 1, 3).unwrap();
        let v = verify_uniform_sum_representation(&[a.clone(), a], &opts()).unwrap();
        assert_eq!(v.status, Status::CandidateRejected);
        let tr = v.triple.unwrap();
        assert_eq!((tr.condition1, tr.condition2), (Some(false), Some(false)));
        assert!(v.evidence[0].witness.is_some());
    }

    #[test]
    fn single_block_is_mrd_condition() {
        let t = Arc::new(FieldTower::new(2, 1, 4).unwrap());
        let g = gabidulin_standard(t.clone(), 2, 4).unwrap();
        let s = code_to_system(&g).unwrap();
        let v = verify_uniform_sum_representation(&[s], &opts()).unwrap();
        assert_eq!(v.status, Status::RepresentableWithWitness);
        let g = t.primitive_generator();
        let bad = Mat::from_rows(4, &[
            vec![Elt::ONE, g, Elt::ZERO, Elt::ZERO],
            vec![Elt::ZERO, Elt::ZERO, Elt::ONE, g],
        ]);
        let s = code_to_system(&RankMetricCode::new(t, bad).unwrap()).unwrap();
        let v = verify_uniform_sum_representation(&[s], &opts()).unwrap();
        assert_eq!(v.status, Status::CandidateRejected);
        assert_eq!(v.triple.unwrap().condition1, Some(false));
    }

    #[test]
    fn verdict_json_round_trip() {
        let v = exhaustive_pair_search(2, 4, 2, 2, &opts()).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        let back: RepresentationVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
