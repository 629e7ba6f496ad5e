//! Serializable jobs, JSON certificates and the named reproduction runs.
//!
//! A certificate stores the job, the budget and the produced output. Replaying
//! the job must reproduce the output exactly; pair and system witnesses found
//! in the output are additionally re-checked from their raw data.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::budget::DEFAULT_BUDGET;
use crate::constructions::{coprime_pseudoregulus_blocks, modular_pair, parse_blocks, BlockSpec, Construction};
use crate::error::{Error, Result};
use crate::evasive::{is_evasive, is_evasive_sampled, sidon_pair_check, Family, ScanOptions};
use crate::fields::{ArithOp, Elt, FieldSpec, FieldTower};
use crate::qmatroid::{self, Oracle};
use crate::subspaces::Subspace;
use crate::verify::{
    self, dispatch_theorem_summary, exhaustive_pair_search, necessary_condition_rank1, randomized_pair_search,
    reverify_pair_witness, reverify_system_witness, verify_uniform_sum_representation, NecessaryCheck,
    RepresentationVerdict, Status, Witness, DEFAULT_TRIALS,
};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldOp {
    pub op: ArithOp,
    pub a: Elt,
    pub b: Elt,
}

/// A rank function to evaluate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OracleSpec {
    /// U_{k_1,n_1}(q) ⊕ ... ⊕ U_{k_t,n_t}(q), parts given as (k, n).
    UniformSum { q: u64, parts: Vec<(usize, usize)> },
    /// ρ_S of a constructed system, on F_q^n via its ordered basis.
    System { construction: Construction },
}

impl OracleSpec {
    pub fn build(&self) -> Result<Oracle> {
        match self {
            OracleSpec::UniformSum { q, parts } => {
                let ms = parts
                    .iter()
                    .map(|&(k, n)| qmatroid::uniform(k, n, *q))
                    .collect::<Result<Vec<_>>>()?;
                qmatroid::direct_sum_all(&ms)
            }
            OracleSpec::System { construction } => {
                let s = construction.build()?.system;
                qmatroid::system_rank(s.tower().clone(), s.k(), s.generators())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSearch {
    pub seed: u64,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum Artifact {
    #[serde(rename = "example-1.12")]
    Example112,
    #[serde(rename = "theorem-3.1")]
    Theorem31 { q: u64, blocks: Vec<BlockSpec> },
    #[serde(rename = "corollary-4.2-reject")]
    Corollary42Reject,
    #[serde(rename = "remark-magma-q2m7")]
    RemarkMagmaQ2M7 { seed: u64, trials: u64 },
    #[serde(rename = "corollary-4.9")]
    Corollary49,
}

pub const ARTIFACT_NAMES: [&str; 5] = [
    "example-1.12",
    "theorem-3.1",
    "corollary-4.2-reject",
    "remark-magma-q2m7",
    "corollary-4.9",
];

pub const DEFAULT_SEARCH_SEED: u64 = 2024;

impl Artifact {
    /// Artifact by name, with optional overrides for the parametrized ones.
    pub fn named(name: &str, q: Option<u64>, blocks: Option<&str>, seed: Option<u64>, trials: Option<u64>) -> Result<Self> {
        Ok(match name {
            "example-1.12" => Artifact::Example112,
            "theorem-3.1" => Artifact::Theorem31 {
                q: q.unwrap_or(2),
                blocks: parse_blocks(blocks.unwrap_or("2:1:2,3:1:3"))?,
            },
            "corollary-4.2-reject" => Artifact::Corollary42Reject,
            "remark-magma-q2m7" => Artifact::RemarkMagmaQ2M7 {
                seed: seed.unwrap_or(DEFAULT_SEARCH_SEED),
                trials: trials.unwrap_or(DEFAULT_TRIALS),
            },
            "corollary-4.9" => Artifact::Corollary49,
            other => {
                return Err(Error::invalid(format!(
                    "unknown artifact `{other}`; expected one of {}",
                    ARTIFACT_NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Field {
        p: u64,
        h: usize,
        m: usize,
        modulus: Option<Vec<u64>>,
        ops: Vec<FieldOp>,
    },
    Construct {
        construction: Construction,
    },
    Rank {
        oracle: OracleSpec,
        vectors: Vec<Vec<Elt>>,
    },
    CyclicFlats {
        oracle: OracleSpec,
    },
    Axioms {
        oracle: OracleSpec,
        samples: Option<u64>,
        seed: u64,
    },
    Evasive {
        construction: Construction,
        family: Family,
        bound: usize,
        samples: Option<u64>,
        seed: u64,
    },
    Verify {
        q: u64,
        blocks: Vec<BlockSpec>,
    },
    Search {
        q: u64,
        m: usize,
        n1: usize,
        n2: usize,
        random: Option<RandomSearch>,
    },
    Dispatch {
        q: u64,
        n1: usize,
        n2: usize,
        m: usize,
    },
    Reproduce {
        artifact: Artifact,
    },
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Runs a job to its JSON output.
pub fn run(job: &Job, opts: &ScanOptions) -> Result<Value> {
    match job {
        Job::Field { p, h, m, modulus, ops } => {
            let t = match modulus {
                Some(md) => FieldTower::with_modulus(*p, *h, *m, md.clone())?,
                None => FieldTower::new(*p, *h, *m)?,
            };
            let results = ops
                .iter()
                .map(|o| t.arith(o.a, o.b, o.op))
                .collect::<Result<Vec<_>>>()?;
            let subfields: Vec<usize> = (1..=*m).filter(|r| m % r == 0).collect();
            Ok(json!({
                "field": t.spec(),
                "q": t.q(),
                "order": t.ext().order(),
                "gamma": t.primitive_generator(),
                "gamma_basis": t.gamma_basis(),
                "subfield_degrees": subfields,
                "results": results,
            }))
        }
        Job::Construct { construction } => {
            let b = construction.build()?;
            let s = &b.system;
            Ok(json!({
                "construction": construction,
                "field": s.tower().spec(),
                "k": s.k(),
                "n": s.n(),
                "generators": s.generators(),
                "pair": b.pair.as_ref().map(|(a, c)| {
                    let t = s.tower();
                    (crate::subspaces::scalar_basis(t, a), crate::subspaces::scalar_basis(t, c))
                }),
                "xi": b.xi,
            }))
        }
        Job::Rank { oracle, vectors } => {
            let o = oracle.build()?;
            let n = o.ground_dim();
            if vectors.iter().any(|v| v.len() != n) {
                return Err(Error::Shape(format!("vectors must have length {n}")));
            }
            for x in vectors.iter().flatten() {
                o.field().check(*x)?;
            }
            let u = Subspace::span_rows(o.field(), n, vectors);
            Ok(json!({
                "oracle": o.descriptor(),
                "subspace": u,
                "dim": u.dim(),
                "rank": o.eval(&u),
            }))
        }
        Job::CyclicFlats { oracle } => {
            let o = oracle.build()?;
            let fam = qmatroid::derived_families(o.as_ref(), opts.budget)?;
            Ok(json!({
                "oracle": o.descriptor(),
                "count": fam.cyclic_flats.len(),
                "cyclic_flats": fam.cyclic_flats,
                "flat_reading_conflicts": fam.flat_reading_conflicts.len(),
            }))
        }
        Job::Axioms { oracle, samples, seed } => {
            let o = oracle.build()?;
            let r = match samples {
                Some(s) => qmatroid::check_axioms_sampled(o.as_ref(), *s, *seed)?,
                None => qmatroid::check_axioms(o.as_ref(), opts.budget)?,
            };
            Ok(json!({ "oracle": o.descriptor(), "report": r }))
        }
        Job::Evasive {
            construction,
            family,
            bound,
            samples,
            seed,
        } => {
            let s = construction.build()?.system;
            let r = match samples {
                Some(n) => is_evasive_sampled(&s, family, *bound, *n, *seed)?,
                None => is_evasive(&s, family, *bound, opts)?,
            };
            Ok(json!({ "field": s.tower().spec(), "report": r }))
        }
        Job::Verify { q, blocks } => {
            let bs = coprime_pseudoregulus_blocks(*q, blocks)?;
            Ok(to_value(&verify_uniform_sum_representation(&bs, opts)?))
        }
        Job::Search { q, m, n1, n2, random } => Ok(to_value(&match random {
            Some(r) => randomized_pair_search(*q, *m, *n1, *n2, r.seed, r.trials, opts)?,
            None => exhaustive_pair_search(*q, *m, *n1, *n2, opts)?,
        })),
        Job::Dispatch { q, n1, n2, m } => Ok(to_value(&dispatch_theorem_summary(*q, *n1, *n2, *m, opts)?)),
        Job::Reproduce { artifact } => reproduce(artifact, opts),
    }
}

fn reproduce(artifact: &Artifact, opts: &ScanOptions) -> Result<Value> {
    match artifact {
        Artifact::Example112 => {
            let m3 = exhaustive_pair_search(2, 3, 2, 2, opts)?;
            let m4 = exhaustive_pair_search(2, 4, 2, 2, opts)?;
            let pass = m3.status == Status::RefutedExhaustively && m4.status == Status::RepresentableWithWitness;
            Ok(json!({ "artifact": "example-1.12", "pass": pass, "m3": m3, "m4": m4 }))
        }
        Artifact::Theorem31 { q, blocks } => {
            let bs = coprime_pseudoregulus_blocks(*q, blocks)?;
            let s = crate::constructions::direct_sum_system(&bs)?;
            let ks: Vec<usize> = blocks.iter().map(|b| b.k).collect();
            let k = s.k();
            let scan = if k >= 2 {
                Some(is_evasive(&s, &Family::lambda_blocks(&ks, k - 1)?, k - 1, opts)?)
            } else {
                None
            };
            let verdict = verify_uniform_sum_representation(&bs, opts)?;
            let pass = verdict.status == Status::RepresentableWithWitness;
            Ok(json!({ "artifact": "theorem-3.1", "pass": pass, "scan": scan, "verdict": verdict }))
        }
        Artifact::Corollary42Reject => {
            let mut rows = Vec::new();
            let mut pass = true;
            for m in 2..=4usize {
                for n1 in [2usize, 3] {
                    for n2 in [2usize, 3] {
                        if n1 > m || n2 > m {
                            continue;
                        }
                        let nec = necessary_condition_rank1(&[n1, n2], m);
                        let v = exhaustive_pair_search(2, m, n1, n2, opts)?;
                        let refuted = v.status == Status::RefutedExhaustively;
                        let violated = matches!(nec, NecessaryCheck::Violation { .. });
                        let agrees = !violated || refuted;
                        pass &= agrees;
                        rows.push(json!({
                            "m": m, "n1": n1, "n2": n2,
                            "necessary": nec, "status": v.status, "agrees": agrees,
                        }));
                    }
                }
            }
            Ok(json!({ "artifact": "corollary-4.2-reject", "pass": pass, "instances": rows }))
        }
        Artifact::RemarkMagmaQ2M7 { seed, trials } => {
            let v = randomized_pair_search(2, 7, 3, 3, *seed, *trials, opts)?;
            let pass = v.status == Status::RepresentableWithWitness;
            Ok(json!({ "artifact": "remark-magma-q2m7", "pass": pass, "verdict": v }))
        }
        Artifact::Corollary49 => {
            let mp = modular_pair(2, 1, 3, 3, 2)?;
            let r = sidon_pair_check(&mp.tower, &mp.first, &mp.second, opts)?;
            let pass = mp.kernel_dims == [3, 2, 4] && r.verdict;
            Ok(json!({
                "artifact": "corollary-4.9",
                "pass": pass,
                "field": mp.tower.spec(),
                "kernel_dims": mp.kernel_dims,
                "xi": mp.xi,
                "report": r,
            }))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub command: Vec<String>,
    pub field: Option<FieldSpec>,
    pub budget: u64,
    pub job: Job,
    pub output: Value,
    /// Informational; excluded from replay comparison.
    pub elapsed_ms: u64,
}

fn find_field(v: &Value) -> Option<FieldSpec> {
    match v {
        Value::Object(map) => {
            if let Some(f) = map.get("field").and_then(|f| serde_json::from_value(f.clone()).ok()) {
                return Some(f);
            }
            map.values().find_map(find_field)
        }
        Value::Array(xs) => xs.iter().find_map(find_field),
        _ => None,
    }
}

/// Runs a job and wraps its output in a certificate.
pub fn certify(job: Job, command: Vec<String>, opts: &ScanOptions) -> Result<Certificate> {
    let start = Instant::now();
    let output = run(&job, opts)?;
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        command,
        field: find_field(&output),
        budget: opts.budget,
        job,
        output,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub kind: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub pass: bool,
    pub replay_matches: bool,
    pub witness_checks: Vec<WitnessCheck>,
}

fn collect_verdicts(v: &Value, out: &mut Vec<RepresentationVerdict>) {
    match v {
        Value::Object(map) => {
            if map.contains_key("target") && map.contains_key("status") {
                if let Ok(r) = serde_json::from_value::<RepresentationVerdict>(v.clone()) {
                    out.push(r);
                    return;
                }
            }
            map.values().for_each(|x| collect_verdicts(x, out));
        }
        Value::Array(xs) => xs.iter().for_each(|x| collect_verdicts(x, out)),
        _ => {}
    }
}

/// Checks every witness in a verdict from raw data only.
pub fn check_verdict_witness(v: &RepresentationVerdict, opts: &ScanOptions) -> Result<Option<WitnessCheck>> {
    let (Some(w), Some(spec)) = (&v.witness, &v.field) else {
        return Ok(None);
    };
    let positive = v.status == Status::RepresentableWithWitness;
    Ok(Some(match w {
        Witness::Pair { a, b } => match reverify_pair_witness(spec, a, b, opts.budget) {
            Ok(l) => WitnessCheck {
                kind: "pair/literal".into(),
                pass: l.holds == positive,
                detail: format!("{} quadruples", l.quadruples),
            },
            Err(e) if e.is_budget() => {
                let t = FieldTower::from_spec(spec)?;
                let sa = crate::subspaces::scalar_span(&t, a);
                let sb = crate::subspaces::scalar_span(&t, b);
                let (ok, cert, _) = verify::certify_pair(&t, &sa, &sb, opts)?;
                WitnessCheck {
                    kind: "pair/certificate".into(),
                    pass: ok == positive,
                    detail: format!("{cert:?}"),
                }
            }
            Err(e) => return Err(e),
        },
        Witness::System { k, generators } => {
            let ok = reverify_system_witness(spec, &v.target.ks, *k, generators, opts)?;
            WitnessCheck {
                kind: "system/scan".into(),
                pass: ok == positive,
                detail: format!("k = {k}, n = {}", generators.len()),
            }
        }
    }))
}

/// Replays a certificate and re-checks its witnesses independently.
pub fn verify_certificate(cert: &Certificate, workers: usize) -> Result<CertificateCheck> {
    if cert.version != CERTIFICATE_VERSION {
        return Err(Error::Certificate(format!("unsupported version {}", cert.version)));
    }
    let opts = ScanOptions {
        workers: workers.max(1),
        budget: cert.budget,
    };
    let replay = run(&cert.job, &opts)?;
    let replay_matches = replay == cert.output;
    let mut verdicts = Vec::new();
    collect_verdicts(&cert.output, &mut verdicts);
    let mut witness_checks = Vec::new();
    for v in &verdicts {
        witness_checks.extend(check_verdict_witness(v, &opts)?);
    }
    Ok(CertificateCheck {
        pass: replay_matches && witness_checks.iter().all(|w| w.pass),
        replay_matches,
        witness_checks,
    })
}

/// A default scan configuration with the standard budget.
pub fn default_options(workers: usize) -> ScanOptions {
    ScanOptions {
        workers: workers.max(1),
        budget: DEFAULT_BUDGET,
    }
}
