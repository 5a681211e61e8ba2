//! Batch entry point: configure an instance, run suites, write JSON-lines reports and dumps.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bmwrep::{self, IdemKind, Representation};
use crate::error::{Error, Result};
use crate::qma::{self, Qma};
use crate::report::{CheckRecord, Recorder, Report, Status, Verdict};
use crate::rmatrix::{self, BmwRMatrix, Family};
use crate::scalars::{parse_rational, Field, Rational, F0, F1, F2, F3, PRIMES};
use crate::tensorops::TensorOperator;
use crate::twistmaps::{self, make_pair};

pub const BACKEND_ENV: &str = "QMBMW_BACKEND";

#[derive(Parser, Debug)]
#[command(
    name = "qmbmw",
    version,
    about = "Exact verification of BMW-type quantum matrix algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and write a JSON-lines report.
    Verify(VerifyArgs),
    /// Write the R-matrix in the JSON operator format.
    DumpR(InstanceArgs),
    /// Write a derived operator in the JSON operator format.
    Dump(DumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    So,
    Sp,
    Import,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Modular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Rmatrix,
    Idempotents,
    Contractors,
    Appendix,
    Twist,
    Qma,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Which {
    #[value(name = "R")]
    R,
    #[value(name = "K")]
    K,
    #[value(name = "psiR")]
    PsiR,
    #[value(name = "E")]
    E,
    #[value(name = "G")]
    G,
    #[value(name = "aN")]
    AN,
    #[value(name = "sN")]
    SN,
    #[value(name = "c2N")]
    C2N,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    #[arg(long, value_enum, default_value = "so")]
    pub family: FamilyArg,
    /// Dimension N of V; taken from the file for imported R-matrices.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value = "7/5", allow_hyphen_values = true)]
    pub q: String,
    /// JSON operator file holding R when the family is `import`.
    #[arg(long)]
    pub r_matrix: Option<PathBuf>,
    /// `P`, `R`, or a JSON operator file.
    #[arg(long, default_value = "P")]
    pub f_matrix: String,
    /// Highest idempotent order considered admissible for dumps.
    #[arg(long, default_value_t = 4)]
    pub max_order: usize,
    /// Defaults to `modular` for verify runs with `--max-degree 4`, `rational` otherwise.
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<Suite>,
    #[arg(long, default_value_t = 3)]
    pub max_degree: usize,
    /// Order bound for idempotent suites and the Newton relations.
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Order bound for the K-identities and contractor appendices.
    #[arg(long, default_value_t = 2)]
    pub j_max: usize,
    #[arg(long, default_value_t = 2)]
    pub primes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct DumpArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum)]
    pub which: Which,
    /// `N` in `aN`, `sN`, `c2N`.
    #[arg(long)]
    pub order: Option<usize>,
}

/// Where `F` comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FChoice {
    P,
    R,
    #[serde(rename = "import")]
    Import(PathBuf),
}

/// A validated run configuration.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub family: FamilyArg,
    pub dim_v: usize,
    pub q: String,
    #[serde(skip)]
    pub q_value: BigRational,
    pub r_matrix: Option<PathBuf>,
    #[serde(skip)]
    pub r_json: Option<Value>,
    pub f_choice: FChoice,
    #[serde(skip)]
    pub f_json: Option<Value>,
    pub max_degree: usize,
    pub max_order: usize,
    pub n_max: usize,
    pub j_max: usize,
    pub backend: Backend,
    pub primes: usize,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let s =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn backend_override(b: Option<Backend>) -> Result<Option<Backend>> {
    match std::env::var(BACKEND_ENV) {
        Ok(v) => Backend::from_str(v.trim(), true).map(Some).map_err(|_| {
            Error::Config(format!(
                "{BACKEND_ENV}={v:?} is neither rational nor modular"
            ))
        }),
        Err(_) => Ok(b),
    }
}

impl RunConfig {
    /// Validates everything that can be checked without running a suite.
    pub fn from_instance(a: &InstanceArgs) -> Result<Self> {
        let q_value = parse_rational(&a.q).map_err(|e| Error::Config(format!("--q: {e}")))?;
        let backend = backend_override(a.backend)?;
        let (dim_v, r_json) = match a.family {
            FamilyArg::Import => {
                let path = a
                    .r_matrix
                    .as_ref()
                    .ok_or_else(|| Error::Config("--family import needs --r-matrix".into()))?;
                let v = read_json(path)?;
                let r = TensorOperator::<Rational>::from_json(&v)?;
                if r.legs() != 2 {
                    return Err(Error::Parse(format!(
                        "{}: R must act on two legs",
                        path.display()
                    )));
                }
                if a.dim.is_some_and(|d| d != r.dim_v()) {
                    return Err(Error::Config(format!(
                        "--dim differs from dimV = {} in the file",
                        r.dim_v()
                    )));
                }
                (r.dim_v(), Some(v))
            }
            FamilyArg::So | FamilyArg::Sp => {
                if a.r_matrix.is_some() {
                    return Err(Error::Config(
                        "--r-matrix is only used with --family import".into(),
                    ));
                }
                let d = a
                    .dim
                    .ok_or_else(|| Error::Config("--dim is required".into()))?;
                match a.family {
                    FamilyArg::So if d < 3 => {
                        return Err(Error::Config(format!("SO_q(N) needs N ≥ 3, got {d}")))
                    }
                    FamilyArg::Sp if d < 2 || d % 2 == 1 => {
                        return Err(Error::Config(format!("Sp_q(N) needs even N ≥ 2, got {d}")))
                    }
                    _ => {}
                }
                (d, None)
            }
        };
        let (f_choice, f_json) = match a.f_matrix.as_str() {
            "P" => (FChoice::P, None),
            "R" => (FChoice::R, None),
            path => {
                let path = PathBuf::from(path);
                let v = read_json(&path)?;
                let f = TensorOperator::<Rational>::from_json(&v)?;
                if f.legs() != 2 || f.dim_v() != dim_v {
                    return Err(Error::Parse(format!(
                        "{}: F must act on V⊗V with N = {dim_v}",
                        path.display()
                    )));
                }
                (FChoice::Import(path), Some(v))
            }
        };
        Ok(RunConfig {
            family: a.family,
            dim_v,
            q: a.q.clone(),
            q_value,
            r_matrix: a.r_matrix.clone(),
            r_json,
            f_choice,
            f_json,
            max_degree: 3,
            max_order: a.max_order,
            n_max: 4,
            j_max: 2,
            backend: backend.unwrap_or(Backend::Rational),
            primes: 2,
            suites: vec![Suite::All],
            seed: 0,
            out: a.out.clone(),
        })
    }

    pub fn from_verify(a: &VerifyArgs) -> Result<Self> {
        let mut c = Self::from_instance(&a.instance)?;
        if a.max_degree > 4 {
            return Err(Error::Config(format!(
                "--max-degree {} exceeds 4",
                a.max_degree
            )));
        }
        if a.primes == 0 || a.primes > PRIMES.len() {
            return Err(Error::Config(format!(
                "--primes must lie in 1..={}",
                PRIMES.len()
            )));
        }
        let mut suites = a.suite.clone();
        if suites.contains(&Suite::All) {
            suites = vec![
                Suite::Rmatrix,
                Suite::Idempotents,
                Suite::Contractors,
                Suite::Appendix,
                Suite::Twist,
                Suite::Qma,
            ];
        }
        suites.sort();
        suites.dedup();
        c.suites = suites;
        c.max_degree = a.max_degree;
        if a.max_degree >= 4 && backend_override(a.instance.backend)?.is_none() {
            c.backend = Backend::Modular;
        }
        c.n_max = a.n_max;
        c.j_max = a.j_max;
        c.primes = a.primes;
        c.seed = a.seed;
        Ok(c)
    }

    fn family(&self) -> Family {
        match self.family {
            FamilyArg::So => Family::Orthogonal,
            FamilyArg::Sp => Family::Symplectic,
            FamilyArg::Import => Family::Imported,
        }
    }

    fn runs(&self, s: Suite) -> bool {
        self.suites.contains(&s)
    }

    /// The R-matrix operator over `S`.
    pub fn r_operator<S: Field>(&self) -> Result<(S, TensorOperator<S>)> {
        let q = S::from_rational(&self.q_value)?;
        let r = match &self.r_json {
            Some(v) => TensorOperator::from_json(v)?,
            None => rmatrix::standard_r_operator(self.family(), self.dim_v, &q)?,
        };
        Ok((q, r))
    }

    /// `F` over `S`, with its label.
    pub fn f_operator<S: Field>(&self, b: &BmwRMatrix<S>) -> Result<(TensorOperator<S>, String)> {
        Ok(match &self.f_choice {
            FChoice::P => (b.p(), "P".into()),
            FChoice::R => (b.r.clone(), "R".into()),
            FChoice::Import(p) => (
                TensorOperator::from_json(self.f_json.as_ref().expect("validated"))?,
                p.display().to_string(),
            ),
        })
    }
}

/// Result of one verification run.
pub struct RunOutput {
    pub header: Value,
    pub report: Report,
}

impl RunOutput {
    pub fn to_jsonl(&self) -> String {
        self.report.to_jsonl(&self.header)
    }

    /// Serialization with all timings zeroed.
    pub fn to_jsonl_without_timings(&self) -> String {
        self.report.without_timings().to_jsonl(&self.header)
    }

    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }
}

const CONTRACTOR_PREFIXES: [&str; 6] = [
    "idempotent-c",
    "absorb-c",
    "mirror-c",
    "eigen-c",
    "orthogonal-c",
    "varsigma-c",
];

fn is_contractor_check(name: &str) -> bool {
    CONTRACTOR_PREFIXES.iter().any(|p| name.starts_with(p))
}

/// Suite seeds, drawn in a fixed order so that selecting a subset of suites does not move them.
struct Seeds {
    twist: u64,
    maps: u64,
    qma: u64,
}

impl Seeds {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Seeds {
            twist: rng.next_u64(),
            maps: rng.next_u64(),
            qma: rng.next_u64(),
        }
    }
}

/// Records a single failing check standing in for a suite that could not start.
fn blocked(suite: &str, check: &str, params: Value, err: &Error) -> Report {
    let mut rec = Recorder::new(suite, params);
    rec.push(
        check,
        "construction of the objects the suite needs",
        Verdict::Fail(err.to_string()),
        0,
    );
    rec.finish()
}

fn skipped(suite: &str, params: Value, reason: &str) -> Report {
    let mut rec = Recorder::new(suite, params);
    rec.skip("suite", "suite prerequisites", reason.to_string());
    rec.finish()
}

/// Runs the selected suites over one scalar field, in dependency order.
pub fn run_suites<S: Field>(cfg: &RunConfig) -> Result<(Report, Option<Vec<usize>>)> {
    let seeds = Seeds::new(cfg.seed);
    let (q, r) = cfg.r_operator::<S>()?;
    let family = cfg.family();
    let base = json!({ "family": family.to_string(), "dimV": cfg.dim_v, "q": q.to_string() });
    let mut report = Report::new();
    if cfg.runs(Suite::Rmatrix) {
        report.extend(rmatrix::verify_operator(family, &r, &q));
    }
    let bmw = match family {
        Family::Imported => BmwRMatrix::derive(family, r, &q),
        _ => rmatrix::make_standard_r(family, cfg.dim_v, &q),
    };
    let bmw = match bmw {
        Ok(b) => b,
        Err(e @ (Error::ConstructionFailed(_) | Error::InvalidParams(_)))
            if family != Family::Imported =>
        {
            return Err(Error::Config(e.to_string()))
        }
        Err(e) => {
            for s in &cfg.suites {
                if *s != Suite::Rmatrix {
                    report.extend(blocked(
                        &format!("{s:?}").to_lowercase(),
                        "r-matrix",
                        base.clone(),
                        &e,
                    ));
                }
            }
            return Ok((report, None));
        }
    };
    if cfg.runs(Suite::Rmatrix) {
        report.extend(rmatrix::verify_k_identities(&bmw, cfg.j_max.max(3)));
    }
    let rep = Representation::new(&bmw);
    if cfg.runs(Suite::Idempotents) || cfg.runs(Suite::Contractors) {
        let mut both = bmwrep::verify_proposition22(&rep, cfg.n_max);
        both.extend(bmwrep::verify_morphisms(&rep, cfg.n_max));
        let (contr, idem): (Vec<CheckRecord>, Vec<CheckRecord>) = both
            .records
            .into_iter()
            .partition(|r| is_contractor_check(&r.check));
        if cfg.runs(Suite::Idempotents) {
            report.records.extend(idem);
        }
        if cfg.runs(Suite::Contractors) {
            report.records.extend(contr.into_iter().map(|mut r| {
                r.suite = "contractors".into();
                r
            }));
        }
    }
    if cfg.runs(Suite::Appendix) {
        report.extend(bmwrep::verify_appendices(&rep, cfg.j_max));
    }
    if !(cfg.runs(Suite::Twist) || cfg.runs(Suite::Qma)) {
        return Ok((report, None));
    }
    let (f, label) = cfg.f_operator(&bmw)?;
    let pair = match make_pair(&bmw, f, &label) {
        Ok(p) => p,
        Err(e) => {
            let params = json!({ "family": family.to_string(), "dimV": cfg.dim_v, "q": q.to_string(), "F": label });
            for s in [Suite::Twist, Suite::Qma] {
                if cfg.runs(s) {
                    report.extend(blocked(
                        &format!("{s:?}").to_lowercase(),
                        "compatible-pair",
                        params.clone(),
                        &e,
                    ));
                }
            }
            return Ok((report, None));
        }
    };
    if cfg.runs(Suite::Twist) {
        report.extend(twistmaps::verify_twist_calculus(&pair, seeds.twist));
        report.extend(twistmaps::verify_operator_g(&pair));
        report.extend(twistmaps::verify_maps(&pair, seeds.maps));
    }
    let mut dims = None;
    if cfg.runs(Suite::Qma) {
        if cfg.max_degree < 2 {
            report.extend(skipped(
                "qma",
                pair.params_json(),
                "the quadratic relations need --max-degree ≥ 2",
            ));
        } else {
            let alg = Qma::new(&pair, cfg.max_degree)?;
            dims = Some(alg.red.graded_dims().to_vec());
            report.extend(qma::verify_all(
                &alg,
                cfg.n_max.min(cfg.max_degree),
                seeds.qma,
            ));
        }
    }
    Ok((report, dims))
}

fn run_prime(idx: usize, cfg: &RunConfig) -> Result<(Report, Option<Vec<usize>>)> {
    match idx {
        0 => run_suites::<F0>(cfg),
        1 => run_suites::<F1>(cfg),
        2 => run_suites::<F2>(cfg),
        3 => run_suites::<F3>(cfg),
        _ => unreachable!("four primes"),
    }
}

/// Runs every suite once per prime and requires the statuses to agree.
///
/// A prime under which construction fails, or whose graded dimensions exceed those of another
/// prime, is replaced by the next candidate.
fn run_modular(cfg: &RunConfig) -> Result<(Report, Option<Vec<usize>>, Value)> {
    let mut runs: Vec<(u64, Report, Option<Vec<usize>>)> = Vec::new();
    let mut replaced = Vec::new();
    let mut next = 0;
    while runs.len() < cfg.primes {
        if next == PRIMES.len() {
            return Err(Error::Config(format!(
                "only {} of {} primes usable: {}",
                runs.len(),
                cfg.primes,
                Value::Array(replaced)
            )));
        }
        match run_prime(next, cfg) {
            Ok((r, d)) => runs.push((PRIMES[next], r, d)),
            Err(e @ Error::Config(_)) => return Err(e),
            Err(e) => replaced.push(json!({ "prime": PRIMES[next], "reason": e.to_string() })),
        }
        next += 1;
        if let Some(min) = runs
            .iter()
            .filter_map(|r| r.2.clone())
            .reduce(|a, b| a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect())
        {
            runs.retain(|(p, _, d)| {
                let ok = d.as_ref().is_none_or(|d| *d == min);
                if !ok {
                    replaced.push(json!({ "prime": p, "reason": format!("graded dimensions {d:?} exceed {min:?}") }));
                }
                ok
            });
        }
    }
    let primes: Vec<u64> = runs.iter().map(|r| r.0).collect();
    let (_, mut merged, dims) = runs[0].clone();
    for (p, other, _) in &runs[1..] {
        if other.records.len() != merged.records.len() {
            merged.records.push(CheckRecord {
                suite: "modular".into(),
                check: "prime-agreement".into(),
                paper_ref: "all primes produce the same checks".into(),
                params: json!({ "primes": primes }),
                status: Status::Fail,
                witness: Some(format!(
                    "{} checks mod {}, {} checks mod {p}",
                    merged.records.len(),
                    primes[0],
                    other.records.len()
                )),
                reason: None,
                elapsed_ms: 0,
            });
            continue;
        }
        for (a, b) in merged.records.iter_mut().zip(&other.records) {
            if a.check != b.check || a.status != b.status {
                a.witness = Some(format!(
                    "mod {}: {} {}; mod {p}: {} {}; {}",
                    primes[0],
                    a.check,
                    a.status,
                    b.check,
                    b.status,
                    b.witness
                        .clone()
                        .or_else(|| a.witness.clone())
                        .unwrap_or_default()
                ));
                a.status = Status::Fail;
                a.reason = None;
            }
            a.elapsed_ms += b.elapsed_ms;
        }
    }
    Ok((
        merged,
        dims,
        json!({ "primes": primes, "replacedPrimes": replaced }),
    ))
}

/// Runs the configured suites and assembles the report with its header.
pub fn run_verify(cfg: &RunConfig) -> Result<RunOutput> {
    let (report, dims, modular) = match cfg.backend {
        Backend::Rational => {
            let (r, d) = run_suites::<Rational>(cfg)?;
            (r, d, Value::Null)
        }
        Backend::Modular => run_modular(cfg)?,
    };
    let mut header = json!({
        "toolVersion": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "seed": cfg.seed,
        "gradedDims": dims.as_ref().map(|d| {
            d.iter().enumerate().map(|(deg, dim)| json!({ "degree": deg, "dim": dim })).collect::<Vec<_>>()
        }),
    });
    if cfg.backend == Backend::Modular {
        header["modular"] = modular;
    }
    Ok(RunOutput { header, report })
}

/// Builds the requested operator over `S` and serializes it.
pub fn dump_operator_with<S: Field>(
    cfg: &RunConfig,
    which: Which,
    order: Option<usize>,
) -> Result<TensorOperator<S>> {
    let needs_order = matches!(which, Which::AN | Which::SN | Which::C2N);
    let order = match (needs_order, order) {
        (true, None) => return Err(Error::Config(format!("{which:?} needs --order"))),
        (true, Some(n)) if n == 0 || n > cfg.max_order => {
            return Err(Error::Config(format!(
                "order {n} outside 1..={}",
                cfg.max_order
            )))
        }
        (false, Some(_)) => return Err(Error::Config(format!("{which:?} takes no --order"))),
        (_, o) => o.unwrap_or(0),
    };
    let (q, r) = cfg.r_operator::<S>()?;
    let family = cfg.family();
    let b = match family {
        Family::Imported => BmwRMatrix::derive(family, r, &q)?,
        _ => rmatrix::make_standard_r(family, cfg.dim_v, &q)
            .map_err(|e| Error::Config(e.to_string()))?,
    };
    let rep = Representation::new(&b);
    Ok(match which {
        Which::R => b.r.clone(),
        Which::K => b.k.clone(),
        Which::PsiR => b.psi.clone(),
        Which::E => b.e.clone(),
        Which::G => {
            let (f, label) = cfg.f_operator(&b)?;
            make_pair(&b, f, &label)?.operator_g()?.0
        }
        Which::AN => (*rep.idempotent(IdemKind::Anti, order)?).clone(),
        Which::SN => (*rep.idempotent(IdemKind::Sym, order)?).clone(),
        Which::C2N => (*rep.contractor_base(2 * order)?).clone(),
    })
}

/// The JSON operator text of a dump under the configured backend; modular dumps use the first prime.
pub fn dump_operator(cfg: &RunConfig, which: Which, order: Option<usize>) -> Result<String> {
    Ok(match cfg.backend {
        Backend::Rational => dump_operator_with::<Rational>(cfg, which, order)?.to_json_string(),
        Backend::Modular => dump_operator_with::<F0>(cfg, which, order)?.to_json_string(),
    })
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Exit code of a configuration or import error.
pub const EXIT_CONFIG: i32 = 2;

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Verify(a) => RunConfig::from_verify(&a).and_then(|cfg| {
            let out = run_verify(&cfg)?;
            write_out(&cfg.out, &out.to_jsonl())?;
            let s = out.report.summary();
            eprintln!(
                "{} checks: {} pass, {} fail, {} skipped",
                s.total, s.pass, s.fail, s.skipped
            );
            for f in out.report.failures() {
                eprintln!(
                    "FAIL {}/{}: {}",
                    f.suite,
                    f.check,
                    f.witness.clone().unwrap_or_default()
                );
            }
            Ok(out.exit_code())
        }),
        Command::DumpR(a) => RunConfig::from_instance(&a).and_then(|cfg| {
            write_out(&cfg.out, &dump_operator(&cfg, Which::R, None)?)?;
            Ok(0)
        }),
        Command::Dump(a) => RunConfig::from_instance(&a.instance).and_then(|cfg| {
            write_out(&cfg.out, &dump_operator(&cfg, a.which, a.order)?)?;
            Ok(0)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
