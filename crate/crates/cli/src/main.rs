use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use qrep_core::budget::DEFAULT_BUDGET;
use qrep_core::constructions::{BlockSpec, Construction};
use qrep_core::evasive::{Family, ScanOptions};
use qrep_core::jobs::{self, Artifact, Certificate, FieldOp, Job, OracleSpec, RandomSearch, DEFAULT_SEARCH_SEED};
use qrep_core::verify::DEFAULT_TRIALS;
use qrep_core::{ArithOp, Elt, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qrep", version, about = "Representability of direct sums of uniform q-matroids")]
struct Cli {
    /// Worker threads for partitioned scans.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Refuse workloads larger than this many elementary steps.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write the certificate JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build F_(q^m) over F_q and evaluate arithmetic.
    Field {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        h: usize,
        #[arg(long)]
        m: usize,
        /// Coefficients of a monic modulus over F_q, constant term first.
        #[arg(long, value_delimiter = ',')]
        modulus: Option<Vec<u64>>,
        /// Operation as `op:a:b` with op one of add, sub, mul, div.
        #[arg(long = "op", value_parser = parse_op)]
        ops: Vec<FieldOp>,
    },
    /// Build a q-system from a named recipe.
    Construct(ConstructionArgs),
    /// Rank of the span of the given vectors.
    Rank {
        #[command(flatten)]
        oracle: OracleArgs,
        /// A vector of packed F_q elements, comma separated. Repeatable.
        #[arg(long = "vector", value_parser = parse_vector)]
        vectors: Vec<Vec<Elt>>,
    },
    /// List the cyclic flats with their ranks.
    CyclicFlats(OracleArgs),
    /// Check the rank axioms exhaustively, or on random samples.
    Axioms {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_SEED)]
        seed: u64,
    },
    /// Check that a constructed system meets every member of a family in low weight.
    Evasive {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[arg(long, value_enum, default_value_t = FamilyKind::LambdaBlocks)]
        family: FamilyKind,
        /// Codimension-complement of the family members; defaults to k - 1.
        #[arg(long = "dim")]
        dim: Option<usize>,
        /// Largest admissible weight; defaults to the member dimension.
        #[arg(long)]
        bound: Option<usize>,
        /// Block dimensions for the block-avoiding family; defaults to the recipe's.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_SEED)]
        seed: u64,
    },
    /// Verify the coprime pseudoregulus representation of a uniform sum.
    Verify {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, value_delimiter = ',', value_parser = parse_block)]
        blocks: Vec<BlockSpec>,
    },
    /// Search for a Sidon pair representing U_{1,n1} ⊕ U_{1,n2} over F_(q^m).
    Search {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, conflicts_with = "random")]
        exhaustive: bool,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = DEFAULT_SEARCH_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Decide a rank-one pair from the sufficient and necessary conditions.
    Dispatch {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        m: usize,
    },
    /// Replay a certificate and re-check its witnesses.
    VerifyCert { file: PathBuf },
    /// Run a named fixed parameter set.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(jobs::ARTIFACT_NAMES))]
        name: String,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Recipe {
    Pseudoregulus,
    Polynomial,
    SubfieldXi,
    Modular,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Lambda,
    LambdaBlocks,
}

#[derive(Args, Debug, Clone)]
struct ConstructionArgs {
    #[arg(long, value_enum, default_value_t = Recipe::Pseudoregulus)]
    recipe: Recipe,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    xi: Option<u64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_block)]
    blocks: Option<Vec<BlockSpec>>,
}

#[derive(Args, Debug, Clone)]
struct OracleArgs {
    /// Uniform parts as `k:n`, comma separated; selects the uniform sum oracle.
    #[arg(long, value_delimiter = ',', value_parser = parse_part)]
    parts: Option<Vec<(usize, usize)>>,
    #[command(flatten)]
    construction: ConstructionArgs,
}

fn parse_op(s: &str) -> Result<FieldOp, String> {
    let f: Vec<&str> = s.split(':').collect();
    let [op, a, b] = f[..] else {
        return Err(format!("expected op:a:b, got `{s}`"));
    };
    let op = match op {
        "add" => ArithOp::Add,
        "sub" => ArithOp::Sub,
        "mul" => ArithOp::Mul,
        "div" => ArithOp::Div,
        _ => return Err(format!("unknown operation `{op}`")),
    };
    let elt = |x: &str| x.parse::<u64>().map(Elt).map_err(|e| e.to_string());
    Ok(FieldOp { op, a: elt(a)?, b: elt(b)? })
}

fn parse_vector(s: &str) -> Result<Vec<Elt>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map(Elt).map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

fn parse_part(s: &str) -> Result<(usize, usize), String> {
    let (k, n) = s.split_once(':').ok_or_else(|| format!("expected k:n, got `{s}`"))?;
    let num = |x: &str| x.parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(k)?, num(n)?))
}

fn parse_block(s: &str) -> Result<BlockSpec, String> {
    s.trim().parse::<BlockSpec>().map_err(|e| e.to_string())
}

fn need<T>(v: Option<T>, flag: &str, recipe: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::invalid(format!("recipe `{recipe}` requires --{flag}")))
}

impl ConstructionArgs {
    fn build(&self) -> Result<Construction, Error> {
        Ok(match self.recipe {
            Recipe::Pseudoregulus => Construction::PseudoregulusSum {
                q: self.q,
                blocks: need(self.blocks.clone(), "blocks", "pseudoregulus")?,
            },
            Recipe::Polynomial => Construction::PolynomialPair {
                q: self.q,
                m: need(self.m, "m", "polynomial")?,
                n1: need(self.n1, "n1", "polynomial")?,
                n2: need(self.n2, "n2", "polynomial")?,
            },
            Recipe::SubfieldXi => Construction::SubfieldXiPair {
                q: self.q,
                m: need(self.m, "m", "subfield-xi")?,
                r: need(self.r, "r", "subfield-xi")?,
                xi: Elt(need(self.xi, "xi", "subfield-xi")?),
            },
            Recipe::Modular => Construction::ModularPair {
                p: need(self.p, "p", "modular")?,
                h: self.h.unwrap_or(1),
                r: need(self.r, "r", "modular")? as u32,
                n1: need(self.n1, "n1", "modular")?,
                n2: need(self.n2, "n2", "modular")?,
            },
        })
    }

    fn block_dims(&self) -> Option<Vec<usize>> {
        match self.recipe {
            Recipe::Pseudoregulus => self.blocks.as_ref().map(|bs| bs.iter().map(|b| b.k).collect()),
            _ => Some(vec![1, 1]),
        }
    }
}

impl OracleArgs {
    fn build(&self) -> Result<OracleSpec, Error> {
        match &self.parts {
            Some(parts) => Ok(OracleSpec::UniformSum {
                q: self.construction.q,
                parts: parts.clone(),
            }),
            None => Ok(OracleSpec::System {
                construction: self.construction.build()?,
            }),
        }
    }
}

fn job_for(cmd: &Command) -> Result<Job, Error> {
    Ok(match cmd {
        Command::Field { p, h, m, modulus, ops } => Job::Field {
            p: *p,
            h: *h,
            m: *m,
            modulus: modulus.clone(),
            ops: ops.clone(),
        },
        Command::Construct(c) => Job::Construct { construction: c.build()? },
        Command::Rank { oracle, vectors } => Job::Rank {
            oracle: oracle.build()?,
            vectors: vectors.clone(),
        },
        Command::CyclicFlats(o) => Job::CyclicFlats { oracle: o.build()? },
        Command::Axioms { oracle, samples, seed } => Job::Axioms {
            oracle: oracle.build()?,
            samples: *samples,
            seed: *seed,
        },
        Command::Evasive {
            construction,
            family,
            dim,
            bound,
            ks,
            samples,
            seed,
        } => {
            let c = construction.build()?;
            let k = c.build()?.system.k();
            let h = match dim {
                Some(h) => *h,
                None => k.checked_sub(1).ok_or_else(|| Error::invalid("k must be positive"))?,
            };
            let family = match family {
                FamilyKind::Lambda => Family::lambda(k, h)?,
                FamilyKind::LambdaBlocks => {
                    let ks = ks
                        .clone()
                        .or_else(|| construction.block_dims())
                        .ok_or_else(|| Error::invalid("--ks is required for this recipe"))?;
                    Family::lambda_blocks(&ks, h)?
                }
            };
            Job::Evasive {
                construction: c,
                family,
                bound: bound.unwrap_or(h),
                samples: *samples,
                seed: *seed,
            }
        }
        Command::Verify { q, blocks } => {
            if blocks.is_empty() {
                return Err(Error::invalid("--blocks is required"));
            }
            Job::Verify { q: *q, blocks: blocks.clone() }
        }
        Command::Search {
            q,
            m,
            n1,
            n2,
            random,
            seed,
            trials,
            ..
        } => Job::Search {
            q: *q,
            m: *m,
            n1: *n1,
            n2: *n2,
            random: random.then_some(RandomSearch {
                seed: *seed,
                trials: *trials,
            }),
        },
        Command::Dispatch { q, n1, n2, m } => Job::Dispatch {
            q: *q,
            n1: *n1,
            n2: *n2,
            m: *m,
        },
        Command::Reproduce {
            name,
            q,
            blocks,
            seed,
            trials,
        } => Job::Reproduce {
            artifact: Artifact::named(name, *q, blocks.as_deref(), *seed, *trials)?,
        },
        Command::VerifyCert { .. } => unreachable!("handled before job construction"),
    })
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) if xs.len() <= 8 && xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", xs.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn table(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k:<width$}  {s}\n")),
                    None => match x {
                        Value::Array(xs) if xs.len() > 8 => {
                            out.push_str(&format!("{pad}{k:<width$}  [{} entries]\n", xs.len()))
                        }
                        _ => {
                            out.push_str(&format!("{pad}{k}\n"));
                            table(x, indent + 1, out);
                        }
                    },
                }
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{i:>3}  {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{i:>3}\n"));
                        table(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

fn render(v: &Value) -> String {
    let mut s = String::new();
    table(v, 0, &mut s);
    s
}

/// The top-level outcome, when the output carries one.
fn headline(v: &Value) -> Option<String> {
    if let Some(p) = v.get("pass").and_then(Value::as_bool) {
        let name = v.get("artifact").and_then(Value::as_str).unwrap_or("artifact");
        return Some(format!("{name}: {}", if p { "PASS" } else { "FAIL" }));
    }
    if let Some(s) = v.get("status").and_then(Value::as_str) {
        return Some(format!("status: {s}"));
    }
    let r = v.get("report")?;
    let verdict = r.get("verdict").or_else(|| r.get("holds"))?.as_bool()?;
    Some(format!("verdict: {verdict}"))
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn write_json(path: &Path, x: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(x).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

fn exit_for(e: &Error) -> u8 {
    match e {
        _ if e.is_budget() => EXIT_BUDGET,
        Error::LemmaViolation(_) | Error::Certificate(_) => EXIT_FAILURE,
        _ => EXIT_BAD_INPUT,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_for(e))
}

fn verify_cert(file: &Path, workers: usize, json: Option<&Path>) -> ExitCode {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let cert: Certificate = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: malformed certificate: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let check = match jobs::verify_certificate(&cert, workers) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let mut text = format!("certificate     {}\n", file.display());
    text.push_str(&format!("command         {}\n", cert.command.join(" ")));
    text.push_str(&format!("replay matches  {}\n", check.replay_matches));
    for w in &check.witness_checks {
        text.push_str(&format!("witness         {:<18} {:<5} {}\n", w.kind, w.pass, w.detail));
    }
    text.push_str(&format!("result          {}\n", if check.pass { "PASS" } else { "FAIL" }));
    emit(&text);
    if let Some(path) = json {
        if let Err(e) = write_json(path, &serde_json::json!(check)) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    if check.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::VerifyCert { file } = &cli.command {
        return verify_cert(file, cli.workers, cli.json.as_deref());
    }
    let job = match job_for(&cli.command) {
        Ok(j) => j,
        Err(e) => return fail(&e),
    };
    let opts = ScanOptions {
        workers: cli.workers.max(1),
        budget: cli.budget,
    };
    let command: Vec<String> = std::env::args().skip(1).collect();
    let cert = match jobs::certify(job, command, &opts) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let mut text = String::new();
    if let Some(h) = headline(&cert.output) {
        text.push_str(&format!("== {h} ==\n"));
    }
    text.push_str(&render(&cert.output));
    text.push_str(&format!("elapsed_ms  {}\n", cert.elapsed_ms));
    emit(&text);
    if let Some(path) = &cli.json {
        if let Err(e) = write_json(path, &serde_json::json!(cert)) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
        emit(&format!("certificate written to {}\n", path.display()));
    }
    ExitCode::SUCCESS
}
