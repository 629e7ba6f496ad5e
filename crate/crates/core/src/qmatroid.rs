//! q-matroid rank oracles on the subspace lattice of F_q^n and the families
//! derived from them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::fields::{poly, Elt, FieldTower, GaloisField};
use crate::linalg::{self, Mat};
use crate::subspaces::{self, random_subspace, subspace_count, Grassmannian, Subspace};

/// A rank function on the subspaces of F_q^n.
pub trait RankOracle: Send + Sync {
    /// The scalar field F_q.
    fn field(&self) -> &GaloisField;
    fn ground_dim(&self) -> usize;
    fn eval(&self, v: &Subspace) -> usize;
    fn descriptor(&self) -> OracleDescriptor;

    /// Rank of the whole ground space.
    fn rank_value(&self) -> usize {
        self.eval(&Subspace::full(self.ground_dim()))
    }
}

pub type Oracle = Arc<dyn RankOracle>;

impl fmt::Debug for dyn RankOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.descriptor())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum OracleDescriptor {
    Uniform { k: usize, n: usize, q: u64 },
    Representable { k: usize, n: usize, q: u64, m: usize },
    System { k: usize, n: usize, q: u64, m: usize },
    DirectSum { parts: Vec<OracleDescriptor> },
    Pullback { inner: Box<OracleDescriptor> },
    Custom { name: String, n: usize, q: u64 },
}

/// F_q with the default modulus, matching [`FieldTower::fq`].
pub fn scalar_field(q: u64) -> Result<GaloisField> {
    let (p, h) = poly::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    GaloisField::with_default_modulus(p, h)
}

fn same_field(a: &GaloisField, b: &GaloisField) -> bool {
    a.p() == b.p() && a.modulus() == b.modulus()
}

struct Uniform {
    fq: GaloisField,
    k: usize,
    n: usize,
}

impl RankOracle for Uniform {
    fn field(&self) -> &GaloisField {
        &self.fq
    }
    fn ground_dim(&self) -> usize {
        self.n
    }
    fn eval(&self, v: &Subspace) -> usize {
        self.k.min(v.dim())
    }
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::Uniform {
            k: self.k,
            n: self.n,
            q: self.fq.order(),
        }
    }
}

/// U_{k,n}(q): rank min(k, dim V).
pub fn uniform(k: usize, n: usize, q: u64) -> Result<Oracle> {
    if k > n {
        return Err(Error::invalid(format!("uniform rank {k} exceeds ground dimension {n}")));
    }
    Ok(Arc::new(Uniform {
        fq: scalar_field(q)?,
        k,
        n,
    }))
}

struct Representable {
    tower: Arc<FieldTower>,
    g: Mat,
}

impl RankOracle for Representable {
    fn field(&self) -> &GaloisField {
        self.tower.fq()
    }
    fn ground_dim(&self) -> usize {
        self.g.cols()
    }
    fn eval(&self, u: &Subspace) -> usize {
        // Columns of G·A^U, one per basis vector of U, stored as rows.
        let f = self.tower.ext();
        let k = self.g.rows();
        let rows: Vec<Vec<Elt>> = (0..u.dim())
            .map(|r| {
                let b = u.basis().row(r);
                (0..k)
                    .map(|i| {
                        b.iter().enumerate().fold(Elt::ZERO, |acc, (j, &c)| {
                            if c.is_zero() {
                                acc
                            } else {
                                f.add(acc, f.mul(self.tower.embed(c), self.g.get(i, j)))
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        linalg::rank(f, &Mat::from_rows(k, &rows))
    }
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::Representable {
            k: self.g.rows(),
            n: self.g.cols(),
            q: self.tower.q(),
            m: self.tower.m(),
        }
    }
}

/// U ↦ rank of G·A^U over F_(q^m), for a full-rank k×n matrix G.
pub fn representable(tower: Arc<FieldTower>, g: Mat) -> Result<Oracle> {
    for &e in g.row_vecs().iter().flatten() {
        tower.ext().check(e)?;
    }
    let r = linalg::rank(tower.ext(), &g);
    if r != g.rows() {
        return Err(Error::RankDeficient {
            rank: r,
            expected: g.rows(),
        });
    }
    Ok(Arc::new(Representable { tower, g }))
}

struct SystemRank {
    tower: Arc<FieldTower>,
    k: usize,
    // Row j: expanded j-th generator.
    gens: Mat,
}

impl RankOracle for SystemRank {
    fn field(&self) -> &GaloisField {
        self.tower.fq()
    }
    fn ground_dim(&self) -> usize {
        self.gens.rows()
    }
    fn eval(&self, u: &Subspace) -> usize {
        let img = u.image(self.tower.fq(), &self.gens).expect("shapes agree");
        subspaces::rho(&self.tower, &img)
    }
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::System {
            k: self.k,
            n: self.gens.rows(),
            q: self.tower.q(),
            m: self.tower.m(),
        }
    }
}

/// U ↦ ρ(ψ(U)) where ψ sends the j-th unit vector to `gens[j]` ∈ F_(q^m)^k.
///
/// The image is formed in expanded F_q-coordinates and ranked after
/// contraction, a route independent of [`representable`].
pub fn system_rank(tower: Arc<FieldTower>, k: usize, gens: &[Vec<Elt>]) -> Result<Oracle> {
    if gens.iter().any(|g| g.len() != k) {
        return Err(Error::Shape("generator length differs from k".into()));
    }
    let rows: Vec<Vec<Elt>> = gens.iter().map(|g| subspaces::expand_vec(&tower, g)).collect();
    let gens = Mat::from_rows(k * tower.m(), &rows);
    Ok(Arc::new(SystemRank { tower, k, gens }))
}

struct DirectSum {
    left: Oracle,
    right: Oracle,
    memo: RwLock<HashMap<Subspace, usize>>,
}

impl RankOracle for DirectSum {
    fn field(&self) -> &GaloisField {
        self.left.field()
    }
    fn ground_dim(&self) -> usize {
        self.left.ground_dim() + self.right.ground_dim()
    }
    fn eval(&self, v: &Subspace) -> usize {
        if let Some(&r) = self.memo.read().unwrap().get(v) {
            return r;
        }
        let f = self.field();
        let n1 = self.left.ground_dim();
        let n = self.ground_dim();
        let mut best: i64 = 0;
        for d in 1..=v.dim() {
            for x in v.subspaces_of_dim(f, d).expect("feasible sublattice") {
                let r1 = self.left.eval(&x.project(f, 0..n1));
                let r2 = self.right.eval(&x.project(f, n1..n));
                best = best.min(r1 as i64 + r2 as i64 - d as i64);
            }
        }
        let r = (v.dim() as i64 + best) as usize;
        self.memo.write().unwrap().insert(v.clone(), r);
        r
    }
    fn descriptor(&self) -> OracleDescriptor {
        let mut parts = match self.left.descriptor() {
            OracleDescriptor::DirectSum { parts } => parts,
            d => vec![d],
        };
        parts.push(self.right.descriptor());
        OracleDescriptor::DirectSum { parts }
    }
}

/// Direct sum on F_q^(n1+n2): V ↦ dim V + min over X ≤ V of
/// ρ1(π1 X) + ρ2(π2 X) − dim X, memoized per canonical V.
pub fn direct_sum(left: Oracle, right: Oracle) -> Result<Oracle> {
    if !same_field(left.field(), right.field()) {
        return Err(Error::invalid(format!(
            "direct summands over different fields (q = {} and q = {})",
            left.field().order(),
            right.field().order()
        )));
    }
    Ok(Arc::new(DirectSum {
        left,
        right,
        memo: RwLock::new(HashMap::new()),
    }))
}

/// Left-associated iterated direct sum.
pub fn direct_sum_all(parts: &[Oracle]) -> Result<Oracle> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::invalid("direct sum of no summands"))?;
    rest.iter()
        .try_fold(first.clone(), |acc, p| direct_sum(acc, p.clone()))
}

struct Pullback {
    inner: Oracle,
    psi: Mat,
}

impl RankOracle for Pullback {
    fn field(&self) -> &GaloisField {
        self.inner.field()
    }
    fn ground_dim(&self) -> usize {
        self.psi.rows()
    }
    fn eval(&self, v: &Subspace) -> usize {
        self.inner
            .eval(&v.image(self.field(), &self.psi).expect("square map"))
    }
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::Pullback {
            inner: Box::new(self.inner.descriptor()),
        }
    }
}

/// V ↦ M(V·ψ) for an invertible n×n matrix ψ over F_q.
pub fn pullback(inner: Oracle, psi: Mat) -> Result<Oracle> {
    let n = inner.ground_dim();
    if psi.rows() != n || psi.cols() != n {
        return Err(Error::Shape(format!("map must be {n}x{n}")));
    }
    if linalg::inverse(inner.field(), &psi).is_none() {
        return Err(Error::NotInvertible);
    }
    Ok(Arc::new(Pullback { inner, psi }))
}

struct FromFn<F> {
    fq: GaloisField,
    n: usize,
    name: String,
    f: F,
}

impl<F: Fn(&Subspace) -> usize + Send + Sync> RankOracle for FromFn<F> {
    fn field(&self) -> &GaloisField {
        &self.fq
    }
    fn ground_dim(&self) -> usize {
        self.n
    }
    fn eval(&self, v: &Subspace) -> usize {
        (self.f)(v)
    }
    fn descriptor(&self) -> OracleDescriptor {
        OracleDescriptor::Custom {
            name: self.name.clone(),
            n: self.n,
            q: self.fq.order(),
        }
    }
}

/// An oracle from an arbitrary function, e.g. for mutation tests.
pub fn from_fn<F>(fq: GaloisField, n: usize, name: &str, f: F) -> Oracle
where
    F: Fn(&Subspace) -> usize + Send + Sync + 'static,
{
    Arc::new(FromFn {
        fq,
        n,
        name: name.to_string(),
        f,
    })
}

/// All subspaces of the ground space with their ranks, canonical order.
pub fn rank_table(m: &dyn RankOracle, budget_units: u64) -> Result<Vec<(Subspace, usize)>> {
    let n = m.ground_dim();
    let q = m.field().order();
    budget::ensure(
        format!("rank table of F_{q}^{n}"),
        &subspace_count(n, q),
        budget_units,
    )?;
    let all = subspaces::all_subspaces(m.field(), n)?;
    Ok(all
        .into_iter()
        .map(|s| {
            let r = m.eval(&s);
            (s, r)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Randomized { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    /// "R1", "R2" or "R3".
    pub axiom: String,
    pub a: Subspace,
    pub b: Option<Subspace>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub mode: CheckMode,
    pub subspaces: u64,
    pub pairs_checked: u64,
    pub violation: Option<AxiomViolation>,
}

fn check_r1(a: &Subspace, ra: usize) -> Option<AxiomViolation> {
    (ra > a.dim()).then(|| AxiomViolation {
        axiom: "R1".into(),
        a: a.clone(),
        b: None,
        detail: format!("rank {ra} exceeds dimension {}", a.dim()),
    })
}

fn check_pair(
    a: &Subspace,
    b: &Subspace,
    ra: usize,
    rb: usize,
    sum: &Subspace,
    rs: usize,
    ri: usize,
) -> Option<AxiomViolation> {
    if sum == b && ra > rb {
        return Some(AxiomViolation {
            axiom: "R2".into(),
            a: a.clone(),
            b: Some(b.clone()),
            detail: format!("A ≤ B but rank {ra} > {rb}"),
        });
    }
    if rs + ri > ra + rb {
        return Some(AxiomViolation {
            axiom: "R3".into(),
            a: a.clone(),
            b: Some(b.clone()),
            detail: format!("ρ(A+B)+ρ(A∩B) = {rs}+{ri} > ρ(A)+ρ(B) = {ra}+{rb}"),
        });
    }
    None
}

/// (R1)–(R3) over every subspace and every ordered pair of subspaces.
pub fn check_axioms(m: &dyn RankOracle, budget_units: u64) -> Result<AxiomReport> {
    let n = m.ground_dim();
    let q = m.field().order();
    let count = subspace_count(n, q);
    budget::ensure(format!("axiom pairs of F_{q}^{n}"), &(&count * &count), budget_units)?;
    let f = m.field();
    let table = rank_table(m, budget_units)?;
    let ranks: HashMap<&Subspace, usize> = table.iter().map(|(s, r)| (s, *r)).collect();
    let mut report = AxiomReport {
        pass: true,
        mode: CheckMode::Exhaustive,
        subspaces: table.len() as u64,
        pairs_checked: 0,
        violation: None,
    };
    for (a, ra) in &table {
        if let Some(v) = check_r1(a, *ra) {
            report.pass = false;
            report.violation = Some(v);
            return Ok(report);
        }
    }
    for (a, ra) in &table {
        for (b, rb) in &table {
            let sum = a.sum(f, b)?;
            let int = a.intersect(f, b)?;
            report.pairs_checked += 1;
            if let Some(v) = check_pair(a, b, *ra, *rb, &sum, ranks[&sum], ranks[&int]) {
                report.pass = false;
                report.violation = Some(v);
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// (R1)–(R3) on `samples` random pairs (uniform dimension, then uniform subspace).
pub fn check_axioms_sampled(m: &dyn RankOracle, samples: u64, seed: u64) -> Result<AxiomReport> {
    let n = m.ground_dim();
    let f = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        pass: true,
        mode: CheckMode::Randomized { samples, seed },
        subspaces: 0,
        pairs_checked: 0,
        violation: None,
    };
    for _ in 0..samples {
        let a = random_subspace(f, n, rng.random_range(0..=n), &mut rng);
        let b = if rng.random_bool(0.5) {
            // a superspace of `a`, so monotonicity gets exercised
            let extra = random_subspace(f, n, rng.random_range(0..=n), &mut rng);
            a.sum(f, &extra)?
        } else {
            random_subspace(f, n, rng.random_range(0..=n), &mut rng)
        };
        let (ra, rb) = (m.eval(&a), m.eval(&b));
        let sum = a.sum(f, &b)?;
        let int = a.intersect(f, &b)?;
        report.pairs_checked += 1;
        let v = check_r1(&a, ra)
            .or_else(|| check_r1(&b, rb))
            .or_else(|| check_pair(&a, &b, ra, rb, &sum, m.eval(&sum), m.eval(&int)));
        if let Some(v) = v {
            report.pass = false;
            report.violation = Some(v);
            break;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicFlat {
    pub flat: Subspace,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Families {
    pub independents: Vec<Subspace>,
    pub circuits: Vec<Subspace>,
    pub flats: Vec<Subspace>,
    pub opens: Vec<Subspace>,
    pub cyclic_flats: Vec<CyclicFlat>,
    /// Subspaces on which the cover test and the global maximality reading of
    /// "flat" disagree. Always empty for a rank function obeying (R2).
    pub flat_reading_conflicts: Vec<Subspace>,
}

/// Independents, circuits, flats, opens and cyclic flats by exhaustive scan.
pub fn derived_families(m: &dyn RankOracle, budget_units: u64) -> Result<Families> {
    let n = m.ground_dim();
    let q = m.field().order();
    let count = subspace_count(n, q);
    budget::ensure(format!("derived families on F_{q}^{n}"), &(&count * &count), budget_units)?;
    let f = m.field();
    let table = rank_table(m, budget_units)?;
    let ranks: HashMap<&Subspace, usize> = table.iter().map(|(s, r)| (s, *r)).collect();
    let indep = |s: &Subspace| ranks[s] == s.dim();

    let independents: Vec<Subspace> =
        table.iter().filter(|(s, _)| indep(s)).map(|(s, _)| s.clone()).collect();

    // Independence is hereditary, so a dependent space is a circuit iff all
    // of its hyperplanes are independent.
    let mut circuits = Vec::new();
    for (s, _) in &table {
        if indep(s) {
            continue;
        }
        if s.subspaces_of_dim(f, s.dim() - 1)?.iter().all(|h| indep(h)) {
            circuits.push(s.clone());
        }
    }

    let mut opens = Vec::new();
    for (v, _) in &table {
        let mut acc = Subspace::zero(n);
        for c in &circuits {
            if c.dim() <= v.dim() && v.contains(f, c)? {
                acc = acc.sum(f, c)?;
            }
        }
        if &acc == v {
            opens.push(v.clone());
        }
    }

    let points: Vec<&Subspace> = table.iter().filter(|(s, _)| s.dim() == 1).map(|(s, _)| s).collect();
    let mut flats = Vec::new();
    let mut conflicts = Vec::new();
    for (a, ra) in &table {
        let mut cover = true;
        for x in &points {
            if !a.contains(f, x)? && ranks[&a.sum(f, x)?] <= *ra {
                cover = false;
                break;
            }
        }
        let mut global = true;
        for (b, rb) in &table {
            if b.dim() > a.dim() && rb == ra && b.contains(f, a)? {
                global = false;
                break;
            }
        }
        if cover != global {
            conflicts.push(a.clone());
        }
        if cover {
            flats.push(a.clone());
        }
    }

    let cyclic_flats = flats
        .iter()
        .filter(|s| opens.contains(s))
        .map(|s| CyclicFlat {
            flat: s.clone(),
            rank: ranks[s],
        })
        .collect();

    Ok(Families {
        independents,
        circuits,
        flats,
        opens,
        cyclic_flats,
        flat_reading_conflicts: conflicts,
    })
}

/// I is independent iff dim(I ∩ Z) ≤ ρ(Z) for every cyclic flat Z.
pub fn independent_via_cyclic_flats(
    field: &GaloisField,
    cyclic: &[CyclicFlat],
    i: &Subspace,
) -> Result<bool> {
    for z in cyclic {
        if i.intersect(field, &z.flat)?.dim() > z.rank {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coordinate block `i` of a direct sum with block sizes `ns`, as a subspace.
pub fn block_subspace(ns: &[usize], blocks: impl IntoIterator<Item = usize>) -> Subspace {
    let n: usize = ns.iter().sum();
    let offsets: Vec<usize> = ns
        .iter()
        .scan(0, |acc, &x| {
            let o = *acc;
            *acc += x;
            Some(o)
        })
        .collect();
    let mut b = Mat::zeros(0, n);
    for i in blocks {
        for c in offsets[i]..offsets[i] + ns[i] {
            let mut row = vec![Elt::ZERO; n];
            row[c] = Elt::ONE;
            b.push_row(&row);
        }
    }
    // Unit rows in increasing column order are already in RREF once sorted.
    Subspace::from_rref(sort_unit_rows(b))
}

fn sort_unit_rows(b: Mat) -> Mat {
    let mut rows = b.row_vecs();
    rows.sort_by_key(|r| std::cmp::Reverse(r.clone()));
    Mat::from_rows(b.cols(), &rows)
}

/// Independence in a direct sum of uniform q-matroids U_{k_i,n_i}: for every
/// nonempty J, dim(I ∩ Σ_{j∈J} block_j) ≤ Σ_{j∈J} k_j.
pub fn independent_by_block_sums(
    field: &GaloisField,
    blocks: &[(usize, usize)],
    i: &Subspace,
) -> Result<bool> {
    let t = blocks.len();
    let ns: Vec<usize> = blocks.iter().map(|b| b.1).collect();
    for mask in 1u32..(1 << t) {
        let js: Vec<usize> = (0..t).filter(|j| mask >> j & 1 == 1).collect();
        let kj: usize = js.iter().map(|&j| blocks[j].0).sum();
        let sj = block_subspace(&ns, js);
        if i.intersect(field, &sj)?.dim() > kj {
            return Ok(false);
        }
    }
    Ok(true)
}

/// 1-dimensional subspaces of rank 0.
pub fn loops(m: &dyn RankOracle) -> Result<Vec<Subspace>> {
    let g = Grassmannian::new(m.field(), m.ground_dim(), 1)?;
    Ok(g.iter()
        .map(Subspace::from_rref)
        .filter(|x| m.eval(x) == 0)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Difference {
    pub subspace: Subspace,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub equal: bool,
    pub mode: CheckMode,
    pub checked: u64,
    pub witness: Option<Difference>,
}

fn compare_on(
    a: &dyn RankOracle,
    b: &dyn RankOracle,
    subs: impl Iterator<Item = Subspace>,
    mode: CheckMode,
) -> OracleComparison {
    let mut checked = 0;
    for s in subs {
        checked += 1;
        let (l, r) = (a.eval(&s), b.eval(&s));
        if l != r {
            return OracleComparison {
                equal: false,
                mode,
                checked,
                witness: Some(Difference {
                    subspace: s,
                    left: l,
                    right: r,
                }),
            };
        }
    }
    OracleComparison {
        equal: true,
        mode,
        checked,
        witness: None,
    }
}

fn check_comparable(a: &dyn RankOracle, b: &dyn RankOracle) -> Result<()> {
    if a.ground_dim() != b.ground_dim() {
        return Err(Error::AmbientMismatch {
            left: a.ground_dim(),
            right: b.ground_dim(),
        });
    }
    if !same_field(a.field(), b.field()) {
        return Err(Error::invalid("oracles over different fields"));
    }
    Ok(())
}

/// Compares two oracles on every subspace; the witness is the first
/// difference in canonical order.
pub fn equal_oracles(a: &dyn RankOracle, b: &dyn RankOracle, budget_units: u64) -> Result<OracleComparison> {
    check_comparable(a, b)?;
    let n = a.ground_dim();
    let q = a.field().order();
    budget::ensure(format!("subspaces of F_{q}^{n}"), &subspace_count(n, q), budget_units)?;
    let f = a.field();
    let gs: Vec<Grassmannian> = (0..=n).map(|d| Grassmannian::new(f, n, d)).collect::<Result<_>>()?;
    let subs = gs.iter().flat_map(|g| g.iter().map(Subspace::from_rref));
    Ok(compare_on(a, b, subs, CheckMode::Exhaustive))
}

pub fn equal_oracles_sampled(
    a: &dyn RankOracle,
    b: &dyn RankOracle,
    samples: u64,
    seed: u64,
) -> Result<OracleComparison> {
    check_comparable(a, b)?;
    let n = a.ground_dim();
    let f = a.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subs = (0..samples).map(move |_| {
        let d = rng.random_range(0..=n);
        random_subspace(&f, n, d, &mut rng)
    });
    Ok(compare_on(a, b, subs, CheckMode::Randomized { samples, seed }))
}

/// Workload of an exhaustive pass over all subspaces of F_q^n.
pub fn lattice_size(n: usize, q: u64) -> BigUint {
    subspace_count(n, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::DEFAULT_BUDGET;

    fn u(k: usize, n: usize) -> Oracle {
        uniform(k, n, 2).unwrap()
    }

    fn f2() -> GaloisField {
        GaloisField::prime(2).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let m = u(1, 2);
        assert_eq!(m.eval(&Subspace::zero(2)), 0);
        assert_eq!(m.rank_value(), 1);
        for x in Grassmannian::new(&f2(), 2, 1).unwrap().iter() {
            assert_eq!(m.eval(&Subspace::from_rref(x)), 1);
        }
        assert!(uniform(3, 2, 2).is_err());
        assert_eq!(uniform(1, 2, 6).unwrap_err(), Error::NotPrimePower(6));
    }

    #[test]
    fn uniform_passes_axioms() {
        for n in 0..=4 {
            for k in 0..=n {
                let r = check_axioms(u(k, n).as_ref(), DEFAULT_BUDGET).unwrap();
                assert!(r.pass, "k={k} n={n}: {:?}", r.violation);
            }
        }
    }

    #[test]
    fn corrupted_oracle_is_caught() {
        let base = u(2, 3);
        let target = Subspace::coordinate(3, 0);
        let t2 = target.clone();
        let bad = from_fn(f2(), 3, "bumped", move |s| base.eval(s) + usize::from(s == &t2));
        let r = check_axioms(bad.as_ref(), DEFAULT_BUDGET).unwrap();
        assert!(!r.pass);
        let v = r.violation.unwrap();
        assert!(v.a == target || v.b.as_ref() == Some(&target), "{v:?}");
        let r = check_axioms_sampled(bad.as_ref(), 20_000, 1).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn axiom_budget_refusal() {
        let e = check_axioms(u(2, 6).as_ref(), 1000).unwrap_err();
        assert!(e.is_budget());
    }

    #[test]
    fn direct_sum_examples() {
        let s = direct_sum(u(1, 2), u(1, 2)).unwrap();
        assert_eq!(s.rank_value(), 2);
        let diag = Subspace::span_rows(&f2(), 4, &[vec![Elt(1), Elt(0), Elt(1), Elt(0)]]);
        assert_eq!(s.eval(&diag), 1);
        let e1 = block_subspace(&[2, 2], [0]);
        assert_eq!(s.eval(&e1), 1);
        assert_eq!(
            s.descriptor(),
            OracleDescriptor::DirectSum {
                parts: vec![
                    OracleDescriptor::Uniform { k: 1, n: 2, q: 2 },
                    OracleDescriptor::Uniform { k: 1, n: 2, q: 2 }
                ]
            }
        );
        let u3 = uniform(1, 2, 3).unwrap();
        assert!(direct_sum(u(1, 2), u3).is_err());
    }

    #[test]
    fn direct_sum_axioms_exhaustive() {
        let s = direct_sum(u(1, 2), u(1, 2)).unwrap();
        let r = check_axioms(s.as_ref(), DEFAULT_BUDGET).unwrap();
        assert!(r.pass);
        assert_eq!(r.subspaces, 67);
        assert_eq!(r.pairs_checked, 67 * 67);
    }

    #[test]
    fn uniform_has_two_cyclic_flats() {
        for n in 1..=4 {
            for k in 1..n {
                let fam = derived_families(u(k, n).as_ref(), DEFAULT_BUDGET).unwrap();
                assert_eq!(
                    fam.cyclic_flats,
                    vec![
                        CyclicFlat { flat: Subspace::zero(n), rank: 0 },
                        CyclicFlat { flat: Subspace::full(n), rank: k }
                    ]
                );
                assert!(fam.flat_reading_conflicts.is_empty());
            }
        }
    }

    #[test]
    fn sum_cyclic_flats_are_block_sums() {
        let s = direct_sum(u(1, 2), u(1, 2)).unwrap();
        let fam = derived_families(s.as_ref(), DEFAULT_BUDGET).unwrap();
        let mut got: Vec<(Subspace, usize)> =
            fam.cyclic_flats.iter().map(|c| (c.flat.clone(), c.rank)).collect();
        got.sort();
        let mut want = vec![
            (Subspace::zero(4), 0),
            (block_subspace(&[2, 2], [0]), 1),
            (block_subspace(&[2, 2], [1]), 1),
            (Subspace::full(4), 2),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(fam.flat_reading_conflicts.is_empty());
        // agreement of the cyclic-flat independence test with the rank definition
        for (i, r) in rank_table(s.as_ref(), DEFAULT_BUDGET).unwrap() {
            assert_eq!(
                independent_via_cyclic_flats(&f2(), &fam.cyclic_flats, &i).unwrap(),
                r == i.dim()
            );
            assert_eq!(fam.independents.contains(&i), r == i.dim());
        }
        let e1 = block_subspace(&[2, 2], [0]);
        assert!(!independent_via_cyclic_flats(&f2(), &fam.cyclic_flats, &e1).unwrap());
        assert!(independent_via_cyclic_flats(&f2(), &fam.cyclic_flats, &Subspace::zero(4)).unwrap());
    }

    #[test]
    fn free_matroid_families() {
        let fam = derived_families(u(3, 3).as_ref(), DEFAULT_BUDGET).unwrap();
        let all = subspaces::all_subspaces(&f2(), 3).unwrap();
        assert_eq!(fam.independents, all);
        assert!(fam.circuits.is_empty());
        assert_eq!(fam.flats, all);
        assert_eq!(fam.opens, vec![Subspace::zero(3)]);
    }

    #[test]
    fn restriction_to_blocks() {
        for (a, b) in [((1, 2), (1, 2)), ((1, 2), (1, 3)), ((2, 3), (1, 2))] {
            let (l, r) = (u(a.0, a.1), u(b.0, b.1));
            let s = direct_sum(l.clone(), r.clone()).unwrap();
            let n = a.1 + b.1;
            for v in subspaces::all_subspaces(&f2(), a.1).unwrap() {
                assert_eq!(s.eval(&v.embed(n, 0)), l.eval(&v));
            }
            for v in subspaces::all_subspaces(&f2(), b.1).unwrap() {
                assert_eq!(s.eval(&v.embed(n, a.1)), r.eval(&v));
            }
        }
    }

    #[test]
    fn block_sum_independence_matches_rank() {
        for blocks in [[(1, 2), (1, 2)], [(1, 2), (1, 3)]] {
            let s = direct_sum(u(blocks[0].0, blocks[0].1), u(blocks[1].0, blocks[1].1)).unwrap();
            for (i, r) in rank_table(s.as_ref(), DEFAULT_BUDGET).unwrap() {
                assert_eq!(independent_by_block_sums(&f2(), &blocks, &i).unwrap(), r == i.dim());
            }
        }
    }

    #[test]
    fn loops_of_uniform() {
        assert!(loops(u(1, 3).as_ref()).unwrap().is_empty());
        assert_eq!(loops(u(0, 3).as_ref()).unwrap().len(), 7);
    }

    #[test]
    fn direct_sum_is_associative() {
        let a = direct_sum(direct_sum(u(1, 2), u(1, 2)).unwrap(), u(1, 2)).unwrap();
        let b = direct_sum(u(1, 2), direct_sum(u(1, 2), u(1, 2)).unwrap()).unwrap();
        let c = direct_sum_all(&[u(1, 2), u(1, 2), u(1, 2)]).unwrap();
        let r = equal_oracles(a.as_ref(), b.as_ref(), DEFAULT_BUDGET).unwrap();
        assert!(r.equal, "{:?}", r.witness);
        assert_eq!(r.checked, 2825);
        assert!(equal_oracles(a.as_ref(), c.as_ref(), DEFAULT_BUDGET).unwrap().equal);
    }

    #[test]
    fn representable_and_system_routes_agree() {
        let t = Arc::new(FieldTower::new(2, 1, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 10 {
            let (k, n) = if done % 2 == 0 { (2, 3) } else { (2, 4) };
            let data: Vec<Elt> = (0..k * n).map(|_| Elt(rng.random_range(0..8))).collect();
            let g = Mat::from_vec(k, n, data);
            let Ok(rep) = representable(t.clone(), g.clone()) else { continue };
            let cols: Vec<Vec<Elt>> = (0..n).map(|j| (0..k).map(|i| g.get(i, j)).collect()).collect();
            let sys = system_rank(t.clone(), k, &cols).unwrap();
            let r = equal_oracles(rep.as_ref(), sys.as_ref(), DEFAULT_BUDGET).unwrap();
            assert!(r.equal, "{:?}", r.witness);
            assert!(check_axioms(rep.as_ref(), DEFAULT_BUDGET).unwrap().pass);
            done += 1;
        }
        let rank1 = Mat::from_rows(2, &[vec![Elt(1), Elt(1)], vec![Elt(1), Elt(1)]]);
        assert_eq!(
            representable(t, rank1).err(),
            Some(Error::RankDeficient { rank: 1, expected: 2 })
        );
    }

    #[test]
    fn identity_generator_is_free() {
        let t = Arc::new(FieldTower::new(2, 1, 1).unwrap());
        let rep = representable(t, Mat::identity(3)).unwrap();
        for s in subspaces::all_subspaces(&f2(), 3).unwrap() {
            assert_eq!(rep.eval(&s), s.dim());
        }
    }

    #[test]
    fn pullback_examples() {
        let m = direct_sum(u(1, 2), u(1, 3)).unwrap();
        let id = pullback(m.clone(), Mat::identity(5)).unwrap();
        assert!(equal_oracles(id.as_ref(), m.as_ref(), DEFAULT_BUDGET).unwrap().equal);
        assert!(equal_oracles(m.as_ref(), m.as_ref(), DEFAULT_BUDGET).unwrap().equal);
        assert_eq!(pullback(m.clone(), Mat::zeros(5, 5)).err(), Some(Error::NotInvertible));
        // swapping the blocks changes the oracle; the witness is the first
        // differing subspace in canonical order
        let mut swap = Mat::zeros(5, 5);
        for (i, j) in [(0, 3), (1, 4), (2, 0), (3, 1), (4, 2)] {
            swap.set(i, j, Elt::ONE);
        }
        let moved = pullback(m.clone(), swap).unwrap();
        let r = equal_oracles(moved.as_ref(), m.as_ref(), DEFAULT_BUDGET).unwrap();
        assert!(!r.equal);
        let w = r.witness.unwrap();
        assert_ne!(moved.eval(&w.subspace), m.eval(&w.subspace));
        assert!(equal_oracles_sampled(m.as_ref(), m.as_ref(), 100, 3).unwrap().equal);
    }
}
