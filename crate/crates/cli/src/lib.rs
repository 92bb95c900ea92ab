//! Batch front end for `pbundle`.
//!
//! Every command writes one header line of run metadata to standard output,
//! then a single JSON document (or, for `prove` without `--output`, the
//! certificate in JSON lines). Exit codes: 0 pass, 1 fail, 2 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use pbundle::bundles::{atiyah_tensor, sym_decompose, BundleDescriptor};
use pbundle::dynamics::{annihilator_from_indices, check_degree_bound, root_modulus_range, spectral_radius, BoundVerdict, DynReport, PicLattice};
use pbundle::endo::{check_compatibility_with, CommonZeroOptions, EndoCandidate, Strictness};
use pbundle::nonexist::{
    conclude_common_zero_with, nonexistence_verdict_in, replay, run_cascade_with, CascadeOptions, RuleSet, Schedule, VanishingCertificate, Verdict,
};
use pbundle::poly_sym::{atiyah_expansion, format_expansion, sym_action, ExponentVector, TransitionMatrix};
use pbundle::text::parse_homog;
use pbundle::{BaseField, CurveConfig};

pub const SEED_VAR: &str = "PBUNDLE_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pbundle::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(pbundle::Error::Replay { .. } | pbundle::Error::Unverified(_)) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "pbundle", version, about = "Endomorphisms of projective bundles over elliptic curves")]
pub struct Cli {
    /// Worker threads for batch inputs.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check candidate endomorphisms given as JSON files.
    Verify(VerifyArgs),
    /// Run the vanishing cascade and write a certificate.
    Prove(ProveArgs),
    /// Decompose tensor or symmetric powers of Atiyah bundles.
    Decompose(DecomposeArgs),
    /// Expand coefficients of Sym^d of the Atiyah matrix.
    Sym(SymArgs),
    /// Spectral radius and degree bookkeeping.
    Dyn(DynArgs),
    /// Replay certificates from the empty state.
    VerifyCertificate(CertArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Require a proof that the F_i have no common zero.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RulesArg {
    Strict,
    Linear,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    /// r, so the cascade runs in t_0..t_r for the Atiyah bundle F_(r+1).
    #[arg(long, conflicts_with = "descriptor")]
    pub rank: Option<usize>,
    #[arg(long)]
    pub degree: u32,
    /// Bundle descriptor JSON.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    #[arg(long)]
    pub frontier: bool,
    #[arg(long, value_enum, default_value_t = RulesArg::Linear)]
    pub rules: RulesArg,
    /// `Q`, `F_p` or `p`.
    #[arg(long, default_value = "Q")]
    pub field: String,
    /// Only the single-polynomial cascade, without the common-zero chain.
    #[arg(long)]
    pub cascade_only: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DecomposeArgs {
    #[arg(long, num_args = 2, value_names = ["R", "S"])]
    pub tensor: Option<Vec<i64>>,
    #[arg(long, num_args = 2, value_names = ["R", "D"])]
    pub sym: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct SymArgs {
    /// Exponent vector u, e.g. `0,0,0,1,1,5`: prints [t^u](Sym^d M)(F).
    #[arg(long, value_delimiter = ',', conflicts_with = "poly")]
    pub monomial: Option<Vec<u32>>,
    /// Polynomial to push through the Atiyah matrix.
    #[arg(long, requires = "vars")]
    pub poly: Option<String>,
    /// Number of variables of `--poly`.
    #[arg(long, requires = "degree")]
    pub vars: Option<usize>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long, default_value = "Q")]
    pub field: String,
    #[arg(long, default_value = "2")]
    pub lambda: String,
}

#[derive(Debug, Args)]
pub struct DynArgs {
    /// Lattice JSON with generators, action, torsion and lambda1_g.
    #[arg(long, requires = "degree")]
    pub lattice: Option<PathBuf>,
    #[arg(long)]
    pub degree: Option<u32>,
    /// Integer matrix as JSON, e.g. `[[0,1],[1,1]]`.
    #[arg(long, conflicts_with = "lattice")]
    pub matrix: Option<String>,
    /// `j,ell,d` for d^(j+1) (x^ell - d^ell) / (x - d).
    #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with_all = ["lattice", "matrix"])]
    pub annihilator: Option<Vec<u32>>,
}

#[derive(Debug, Args)]
pub struct CertArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
}

/// Result of one command: the exit code and what goes to standard output.
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

impl Outcome {
    fn json(passed: bool, v: &Value) -> Outcome {
        Outcome {
            code: if passed { 0 } else { 1 },
            body: serde_json::to_string_pretty(v).expect("serializable") + "\n",
        }
    }
}

pub fn seed_from_env() -> CliResult<u64> {
    match std::env::var(SEED_VAR) {
        Err(_) => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_VAR} must be a non-negative integer, got `{s}`"))),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify(_) => "verify",
        Command::Prove(_) => "prove",
        Command::Decompose(_) => "decompose",
        Command::Sym(_) => "sym",
        Command::Dyn(_) => "dyn",
        Command::VerifyCertificate(_) => "verify-certificate",
    }
}

pub fn header_line(cli: &Cli, seed: u64) -> String {
    json!({
        "pbundle": env!("CARGO_PKG_VERSION"),
        "command": command_name(&cli.command),
        "seed": seed.to_string(),
        "jobs": cli.jobs.to_string(),
    })
    .to_string()
}

/// Runs a parsed command line, writing header and body to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let result = seed_from_env().and_then(|seed| {
        let body = dispatch(cli, seed)?;
        Ok((seed, body))
    });
    match result {
        Ok((seed, o)) => {
            let _ = writeln!(out, "{}", header_line(cli, seed));
            let _ = out.write_all(o.body.as_bytes());
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, seed: u64) -> CliResult<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Verify(a) => pool.install(|| cmd_verify(a, seed)),
        Command::Prove(a) => cmd_prove(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Sym(a) => cmd_sym(a),
        Command::Dyn(a) => cmd_dyn(a),
        Command::VerifyCertificate(a) => pool.install(|| cmd_verify_certificate(a)),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_field(s: &str) -> CliResult<BaseField> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(BaseField::Rationals);
    }
    let p = t.strip_prefix("F_").unwrap_or(t);
    let p: u32 = p.parse().map_err(|_| CliError::Usage(format!("unknown field `{s}`")))?;
    Ok(BaseField::prime(p)?)
}

fn verify_one(path: &Path, opts: CommonZeroOptions, strictness: Strictness) -> CliResult<(bool, Value)> {
    let c = EndoCandidate::from_json(&read(path)?)?;
    let report = check_compatibility_with(&c, opts)?;
    let mut v = report.to_json(strictness);
    v["path"] = Value::from(path.display().to_string());
    v["field"] = Value::from(c.curve.field().to_string());
    v["rank"] = Value::from(c.bundle.total_rank().to_string());
    Ok((report.passes(strictness), v))
}

fn cmd_verify(a: &VerifyArgs, seed: u64) -> CliResult<Outcome> {
    let opts = CommonZeroOptions {
        seed,
        samples: a.samples,
        ..CommonZeroOptions::default()
    };
    let strictness = if a.strict { Strictness::Strict } else { Strictness::Lenient };
    let results: Vec<CliResult<(bool, Value)>> = a.paths.par_iter().map(|p| verify_one(p, opts, strictness)).collect();
    let mut reports = Vec::new();
    let mut passed = true;
    for r in results {
        let (ok, v) = r?;
        passed &= ok;
        reports.push(v);
    }
    Ok(Outcome::json(passed, &json!({ "passed": passed, "candidates": reports })))
}

fn cmd_prove(a: &ProveArgs) -> CliResult<Outcome> {
    let field = parse_field(&a.field)?;
    let opts = CascadeOptions {
        field,
        schedule: if a.frontier { Schedule::Frontier } else { Schedule::Induction },
        rules: match a.rules {
            RulesArg::Strict => RuleSet::Strict,
            RulesArg::Linear => RuleSet::Linear,
        },
    };
    if a.degree < 2 {
        return Err(pbundle::Error::InvalidParameter(format!("the cascade needs degree d >= 2, got {}", a.degree)).into());
    }
    let (verdict, certificates) = match (&a.descriptor, a.rank) {
        (Some(path), None) => {
            if a.frontier || a.cascade_only || matches!(a.rules, RulesArg::Strict) {
                return Err(CliError::Usage("--frontier, --rules and --cascade-only need --rank".into()));
            }
            let desc: BundleDescriptor =
                serde_json::from_str(&read(path)?).map_err(|e| pbundle::Error::Parse(e.to_string()))?;
            match nonexistence_verdict_in(&desc, a.degree, field)? {
                Verdict::Nonexistent { certificates, .. } => ("nonexistent", certificates),
                Verdict::Inconclusive { certificates, .. } => ("inconclusive", certificates),
                Verdict::NotExcluded { reason } => {
                    let v = json!({ "verdict": "not-excluded", "reason": reason });
                    return Ok(Outcome::json(false, &v));
                }
            }
        }
        (None, Some(r)) if a.cascade_only => {
            let c = run_cascade_with(r, a.degree, opts)?;
            (if c.header.complete { "cascade-complete" } else { "cascade-incomplete" }, vec![c])
        }
        // F_(r+1): r + 1 coupled polynomials
        (None, Some(r)) => {
            let proof = conclude_common_zero_with(r, a.degree, r + 1, opts)?;
            (if proof.concluded { "nonexistent" } else { "inconclusive" }, vec![proof.certificate])
        }
        _ => return Err(CliError::Usage("prove needs exactly one of --rank and --descriptor".into())),
    };
    let passed = verdict == "nonexistent" || verdict == "cascade-complete";
    let jsonl: String = certificates.iter().map(VanishingCertificate::to_jsonl).collect();
    match &a.output {
        None => Ok(Outcome {
            code: if passed { 0 } else { 1 },
            body: jsonl,
        }),
        Some(path) => {
            std::fs::write(path, &jsonl).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let summary: Vec<Value> = certificates
                .iter()
                .map(|c| {
                    json!({
                        "rank": c.header.rank.to_string(),
                        "degree": c.header.degree.to_string(),
                        "slots": c.header.slots.to_string(),
                        "steps": c.steps.len().to_string(),
                        "zeros": c.zero_list(0).len().to_string(),
                        "complete": c.header.complete,
                    })
                })
                .collect();
            let v = json!({
                "verdict": verdict,
                "field": field.to_string(),
                "certificate": path.display().to_string(),
                "certificates": summary,
            });
            Ok(Outcome::json(passed, &v))
        }
    }
}

fn positive(x: i64, name: &str) -> CliResult<u32> {
    if x <= 0 {
        return Err(pbundle::Error::InvalidParameter(format!("{name} must be positive, got {x}")).into());
    }
    u32::try_from(x).map_err(|_| CliError::Usage(format!("{name} is too large")))
}

fn cmd_decompose(a: &DecomposeArgs) -> CliResult<Outcome> {
    let (kind, x, y, dec) = match (&a.tensor, &a.sym) {
        (Some(t), _) => {
            let (r, s) = (positive(t[0], "r")?, positive(t[1], "s")?);
            ("tensor", r, s, atiyah_tensor(r, s)?)
        }
        (None, Some(t)) => {
            let (r, d) = (positive(t[0], "r")?, positive(t[1], "d")?);
            ("sym", r, d, sym_decompose(r, d)?)
        }
        (None, None) => return Err(CliError::Usage("decompose needs --tensor or --sym".into())),
    };
    let v = json!({
        "kind": kind,
        "args": [x.to_string(), y.to_string()],
        "parts": dec.parts.iter().map(u32::to_string).collect::<Vec<_>>(),
        "rank": dec.total().to_string(),
    });
    Ok(Outcome::json(true, &v))
}

fn cmd_sym(a: &SymArgs) -> CliResult<Outcome> {
    if let Some(u) = &a.monomial {
        if u.len() < 2 {
            return Err(CliError::Usage("the monomial needs at least two exponents".into()));
        }
        let u = ExponentVector::new(u.clone());
        let terms = atiyah_expansion(&u);
        let v = json!({
            "monomial": u.to_string(),
            "expansion": format_expansion(&terms),
            "terms": terms
                .iter()
                .map(|t| json!({
                    "v": t.v.to_string(),
                    "omega_power": t.term.omega_power.to_string(),
                    "multiplier": t.term.multiplier.to_string(),
                }))
                .collect::<Vec<_>>(),
        });
        return Ok(Outcome::json(true, &v));
    }
    let (Some(poly), Some(n), Some(degree)) = (&a.poly, a.vars, a.degree) else {
        return Err(CliError::Usage("sym needs --monomial, or --poly with --vars and --degree".into()));
    };
    let field = parse_field(&a.field)?;
    let curve = CurveConfig::new(field, field.parse(&a.lambda)?)?;
    let f = parse_homog(&curve, n, degree, poly)?;
    let m = TransitionMatrix::atiyah(&curve, n);
    let image = sym_action(&m, &f)?;
    let v = json!({
        "field": field.to_string(),
        "lambda": a.lambda,
        "input": f.to_string(),
        "image": image.to_string(),
    });
    Ok(Outcome::json(true, &v))
}

fn cmd_dyn(a: &DynArgs) -> CliResult<Outcome> {
    if let Some(idx) = &a.annihilator {
        let [j, ell, d] = idx[..] else {
            return Err(CliError::Usage("--annihilator takes j,ell,d".into()));
        };
        let ann = annihilator_from_indices(j, ell, d)?;
        let mut v = json!({
            "polynomial": ann.to_string(),
            "degenerate": ann.degenerate,
        });
        if ell >= 2 {
            let (inner, outer) = root_modulus_range(&ann.expanded())?;
            v["root_modulus_min"] = inner.to_json();
            v["root_modulus_max"] = outer.to_json();
        }
        return Ok(Outcome::json(true, &v));
    }
    if let Some(m) = &a.matrix {
        let rows: Vec<Vec<Value>> = serde_json::from_str(m).map_err(|e| pbundle::Error::Parse(e.to_string()))?;
        let lattice = PicLattice::from_json(&json!({
            "generators": (0..rows.len()).map(|i| format!("g{i}")).collect::<Vec<_>>(),
            "action": rows,
        }).to_string())?;
        let rho = spectral_radius(&lattice.rational_action())?;
        return Ok(Outcome::json(true, &json!({ "spectral_radius": rho.to_json() })));
    }
    let (Some(path), Some(d)) = (&a.lattice, a.degree) else {
        return Err(CliError::Usage("dyn needs --lattice with --degree, --matrix or --annihilator".into()));
    };
    let lattice = PicLattice::from_json(&read(path)?)?;
    let report = check_degree_bound(&lattice, d)?;
    let mut v = report.to_json();
    if report.verdict == BoundVerdict::Inconsistent {
        return Err(pbundle::Error::Lattice(report.notes.join("; ")).into());
    }
    if lattice.lambda1_g.is_some() {
        v["degrees"] = DynReport::new(&lattice, d)?.to_json();
    }
    Ok(Outcome::json(report.verdict == BoundVerdict::Confirmed, &v))
}

/// Splits a JSON-lines file holding several certificates at header lines,
/// skipping the run header that `prove` prints first.
pub fn split_certificates(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let kind = serde_json::from_str::<Value>(line)
            .ok()
            .map(|v| v.get("type").and_then(Value::as_str).map(str::to_owned));
        // the run header line carries no `type`
        if kind == Some(None) {
            continue;
        }
        let is_header = kind.flatten().as_deref() == Some("header");
        if is_header || out.is_empty() {
            out.push(String::new());
        }
        let cur = out.last_mut().unwrap();
        cur.push_str(line);
        cur.push('\n');
    }
    out
}

fn cmd_verify_certificate(a: &CertArgs) -> CliResult<Outcome> {
    let texts = a.paths.iter().map(|p| read(p)).collect::<CliResult<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for (p, t) in a.paths.iter().zip(&texts) {
        let parts = split_certificates(t);
        if parts.is_empty() {
            return Err(pbundle::Error::Parse(format!("{}: no certificate", p.display())).into());
        }
        for (i, part) in parts.into_iter().enumerate() {
            jobs.push((p.display().to_string(), i, part));
        }
    }
    let results: Vec<CliResult<Value>> = jobs
        .par_iter()
        .map(|(p, i, text)| {
            let cert = VanishingCertificate::from_jsonl(text)?;
            let (ok, reason) = match replay(&cert) {
                Ok(()) => (true, Value::Null),
                Err(e @ pbundle::Error::Replay { .. }) => (false, Value::from(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            Ok(json!({
                "path": p,
                "index": i.to_string(),
                "steps": cert.steps.len().to_string(),
                "complete": cert.header.complete,
                "replayed": ok,
                "reason": reason,
            }))
        })
        .collect();
    let mut reports = Vec::new();
    let mut passed = true;
    for r in results {
        let v = r?;
        passed &= v["replayed"].as_bool() == Some(true);
        reports.push(v);
    }
    Ok(Outcome::json(passed, &json!({ "passed": passed, "certificates": reports })))
}
