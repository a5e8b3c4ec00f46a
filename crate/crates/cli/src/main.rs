//! `tlforge` command-line front end.
//!
//! Exit codes: 0 verified/constructed, 1 verification failed, 2 invalid input.

mod literal;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;
use tlforge::catalog::{self, derive_n4r4_fourth, seeded_n4r4_params, Family, FamilyInstance};
use tlforge::classify::classify;
use tlforge::combinators::{direct_sum, fuse, product_rank_one, q_threshold, theorem9_construct};
use tlforge::jw::jw_ladder;
use tlforge::subspace::VSystem;
use tlforge::tensor::verification_reports;
use tlforge::{verify_all, ComplexMatrix, ReportSet, TlSolution, Tolerance, DEFAULT_CAP};

use literal::parse_complex;

const MIN_CAP: usize = 16;

#[derive(Parser, Debug)]
#[command(
    name = "tlforge",
    version,
    about = "Build, verify and classify Temperley-Lieb solutions"
)]
struct Cli {
    /// Absolute tolerance per unit dimension for residual checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest representation dimension that may be allocated.
    #[arg(long, global = true, env = "TLFORGE_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Seed for randomized parameter choices.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result document here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Args, Debug, Clone, Default)]
struct FamilyArgs {
    /// trivial, rank-one, sqrt2, sqrt3, n4r4, n-r-plus-1, q2-block, q2-tensor
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Complex parameters, comma separated (`1+0.5i,2`).
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    /// Tune the free parameters to reach this Q instead of passing `--z`.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a catalog instance (V-system and T).
    Build(FamilyArgs),
    /// Verify an instance or a matrix file.
    Verify {
        input: PathBuf,
        /// Site dimension, when the file holds a bare matrix.
        #[arg(long)]
        n: Option<usize>,
        /// Loop value, overriding the one stored in the file.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Classify (n, r, Q).
    Classify {
        #[arg(conflicts_with = "n")]
        n_pos: Option<usize>,
        #[arg(conflicts_with = "r")]
        r_pos: Option<usize>,
        #[arg(conflicts_with = "q", allow_hyphen_values = true)]
        q_pos: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Jones-Wenzl ladder as JSON lines.
    Jw {
        #[command(flatten)]
        family: FamilyArgs,
        /// Read the solution from a file instead of `--family`.
        #[arg(long, conflicts_with = "family")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Also check the cube relation and the companion identities.
        #[arg(long)]
        identities: bool,
    },
    /// Explicit solution of rank r ∈ {2,3,4} on C^n at loop value Q.
    Construct {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        /// Defaults to the smallest reachable value.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Direct sum of two instances of equal rank.
    Sum { a: PathBuf, b: PathBuf },
    /// Product with a rank-one instance.
    Product { a: PathBuf, b: PathBuf },
    /// Fusion of a solution.
    Fuse { input: PathBuf },
    /// Export T of an instance as a solution document.
    Export { input: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] tlforge::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(tlforge::Error::VerificationFailed { .. }) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// A command's result: the documents to print and whether everything verified.
struct Outcome {
    docs: Vec<Value>,
    verified: bool,
    lines: bool,
}

impl Outcome {
    fn one(doc: Value, verified: bool) -> Self {
        Self {
            docs: vec![doc],
            verified,
            lines: false,
        }
    }
}

struct Ctx {
    tol: Tolerance,
    cap: usize,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => match emit(&cli, &out) {
            Ok(()) => ExitCode::from(if out.verified { 0 } else { 1 }),
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let doc = json!({ "error": e.to_string(), "exit_code": e.code() });
    eprintln!("{doc}");
    ExitCode::from(e.code())
}

fn emit(cli: &Cli, out: &Outcome) -> CliResult<()> {
    let mut text = String::new();
    for doc in &out.docs {
        let s = if cli.format == Format::Pretty && !out.lines {
            serde_json::to_string_pretty(doc)
        } else {
            serde_json::to_string(doc)
        }
        .map_err(|e| invalid(e.to_string()))?;
        text.push_str(&s);
        text.push('\n');
    }
    match &cli.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| invalid(e.to_string())),
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(invalid(format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.cap < MIN_CAP {
        return Err(invalid(format!(
            "--cap must be at least {MIN_CAP}, got {}",
            cli.cap
        )));
    }
    let ctx = Ctx {
        tol: Tolerance::new(cli.tol, cli.tol),
        cap: cli.cap,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Build(args) => cmd_build(&ctx, args),
        Command::Verify { input, n, q } => cmd_verify(&ctx, input, *n, *q),
        Command::Classify {
            n_pos,
            r_pos,
            q_pos,
            n,
            r,
            q,
        } => {
            let n = n.or(*n_pos).ok_or_else(|| invalid("classify needs n"))?;
            let r = r.or(*r_pos).ok_or_else(|| invalid("classify needs r"))?;
            let q = q.or(*q_pos).ok_or_else(|| invalid("classify needs Q"))?;
            if n == 0 || r == 0 || !(q.is_finite() && q > 0.0) {
                return Err(invalid("classify needs n, r >= 1 and Q > 0"));
            }
            let report = classify(n, r, q, ctx.tol.abs_eps);
            Ok(Outcome::one(to_value(&report)?, true))
        }
        Command::Jw {
            family,
            input,
            depth,
            identities,
        } => cmd_jw(&ctx, family, input.as_deref(), *depth, *identities),
        Command::Construct { r, n, q } => {
            let q = match q {
                Some(q) => *q,
                None => q_threshold(*r, *n)?,
            };
            instance_outcome(&ctx, &theorem9_construct(*r, *n, q)?, Map::new())
        }
        Command::Sum { a, b } => {
            let (a, b) = (load_instance(a)?, load_instance(b)?);
            instance_outcome(&ctx, &direct_sum(&a, &b)?, Map::new())
        }
        Command::Product { a, b } => {
            let (a, b) = (load_instance(a)?, load_instance(b)?);
            instance_outcome(&ctx, &product_rank_one(&a, &b)?, Map::new())
        }
        Command::Fuse { input } => {
            let sol = load_solution(&ctx, input, None, None)?;
            let fused = fuse(&sol, ctx.cap, &ctx.tol)?;
            solution_outcome(&ctx, &fused)
        }
        Command::Export { input } => {
            let sol = load_solution(&ctx, input, None, None)?;
            solution_outcome(&ctx, &sol)
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| invalid(e.to_string()))
}

fn z_at(args: &FamilyArgs, count: usize, default: Complex64) -> CliResult<Vec<Complex64>> {
    match args.z.len() {
        0 => Ok(vec![default; count]),
        k if k == count => Ok(args.z.clone()),
        k => Err(invalid(format!(
            "expected {count} value(s) for --z, got {k}"
        ))),
    }
}

fn need_n(args: &FamilyArgs) -> CliResult<usize> {
    args.n.ok_or_else(|| invalid("this family needs --n"))
}

fn build_instance(ctx: &Ctx, args: &FamilyArgs) -> CliResult<(FamilyInstance, Map<String, Value>)> {
    let name = args
        .family
        .as_deref()
        .ok_or_else(|| invalid("missing --family"))?;
    let family: Family = name.parse()?;
    let one = Complex64::new(1.0, 0.0);
    let mut extra = Map::new();
    let inst = match (family, args.q) {
        (Family::Trivial, _) => catalog::trivial(need_n(args)?)?,
        (Family::RankOne, Some(q)) => catalog::rank_one_at(need_n(args)?, q)?,
        (Family::RankOne, None) => catalog::rank_one(need_n(args)?, z_at(args, 1, one)?[0])?,
        (Family::Sqrt2, _) => catalog::q_sqrt2()?,
        (Family::Sqrt3, _) => catalog::q_sqrt3()?,
        (Family::N4r4, q) => {
            let check = derive_n4r4_fourth(ctx.seed, 3)?;
            extra.insert("fourth_matrix_check".into(), to_value(&check)?);
            match q {
                Some(q) => catalog::n4r4_at(q)?,
                None if args.z.is_empty() => catalog::n4r4(seeded_n4r4_params(ctx.seed))?,
                None => {
                    let z = z_at(args, 4, one)?;
                    catalog::n4r4([z[0], z[1], z[2], z[3]])?
                }
            }
        }
        (Family::NRPlus1, Some(q)) => catalog::n_r_plus_1_at(need_n(args)?, q)?,
        (Family::NRPlus1, None) => {
            let z = z_at(args, 2, one)?;
            catalog::n_r_plus_1(need_n(args)?, z[0], z[1])?
        }
        (Family::Q2Block, _) => catalog::q2_block(need_n(args)?)?,
        (Family::Q2Tensor, _) => catalog::q2_tensor(need_n(args)?, z_at(args, 1, one)?[0])?,
        (Family::DirectSum | Family::Product, _) => {
            return Err(invalid(
                "use the sum/product subcommands for combined instances",
            ))
        }
    };
    Ok((inst, extra))
}

fn cmd_build(ctx: &Ctx, args: &FamilyArgs) -> CliResult<Outcome> {
    let (inst, extra) = build_instance(ctx, args)?;
    instance_outcome(ctx, &inst, extra)
}

/// Instance document: the instance fields, `n`, `r`, `T` and its verification.
fn instance_outcome(
    ctx: &Ctx,
    inst: &FamilyInstance,
    extra: Map<String, Value>,
) -> CliResult<Outcome> {
    let t = inst.t()?;
    let reports = verification_reports(&t, inst.n(), inst.q, &ctx.tol)?;
    let criterion = inst.criterion(&ctx.tol)?;
    let rank = t.rank(&ctx.tol)?;
    let verified = reports.pass() && criterion.pass && rank == inst.r();
    let mut doc = to_value(inst)?;
    let obj = doc
        .as_object_mut()
        .expect("instance serializes to an object");
    obj.insert("label".into(), json!(inst.label()));
    obj.insert("n".into(), json!(inst.n()));
    obj.insert("r".into(), json!(inst.r()));
    obj.insert("numerical_rank".into(), json!(rank));
    obj.insert("t".into(), to_value(&t)?);
    obj.insert("criterion".into(), to_value(&criterion)?);
    obj.insert("verification".into(), to_value(&reports.reports)?);
    obj.insert("pass".into(), json!(verified));
    obj.extend(extra);
    Ok(Outcome::one(doc, verified))
}

fn solution_outcome(ctx: &Ctx, sol: &TlSolution) -> CliResult<Outcome> {
    let reports = verification_reports(sol.t(), sol.n(), sol.q(), &ctx.tol)?;
    let mut doc = to_value(sol)?;
    let obj = doc
        .as_object_mut()
        .expect("solution serializes to an object");
    obj.insert("verification".into(), to_value(&reports.reports)?);
    obj.insert("pass".into(), json!(reports.pass()));
    Ok(Outcome::one(doc, reports.pass()))
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| invalid(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct InstanceDoc {
    family: Family,
    q: f64,
    #[serde(default)]
    params: Value,
    vs: VSystem,
}

#[derive(Deserialize)]
struct MatrixDoc {
    t: ComplexMatrix,
    n: Option<usize>,
    q: Option<f64>,
}

enum Loaded {
    Instance(InstanceDoc),
    Matrix(MatrixDoc),
}

fn parse_doc(path: &Path) -> CliResult<Loaded> {
    let value = read_json(path)?;
    let bad = |e: serde_json::Error| invalid(format!("{}: {e}", path.display()));
    if value.get("vs").is_some() {
        Ok(Loaded::Instance(
            serde_json::from_value(value).map_err(bad)?,
        ))
    } else if value.get("t").is_some() {
        Ok(Loaded::Matrix(serde_json::from_value(value).map_err(bad)?))
    } else if value.get("rows").is_some() {
        Ok(Loaded::Matrix(MatrixDoc {
            t: serde_json::from_value(value).map_err(bad)?,
            n: None,
            q: None,
        }))
    } else {
        Err(invalid(format!(
            "{}: neither an instance nor a matrix document",
            path.display()
        )))
    }
}

/// Re-validates the stored V-system; a system that no longer satisfies the
/// criterion is a verification failure.
fn load_instance(path: &Path) -> CliResult<FamilyInstance> {
    match parse_doc(path)? {
        Loaded::Instance(doc) => Ok(FamilyInstance::new(doc.vs, doc.q, doc.family, doc.params)?),
        Loaded::Matrix(_) => Err(invalid(format!(
            "{}: expected an instance document",
            path.display()
        ))),
    }
}

fn site_dim(t: &ComplexMatrix, n: Option<usize>) -> CliResult<usize> {
    if let Some(n) = n {
        return Ok(n);
    }
    Ok(tlforge::tensor::site_dim(t)?)
}

/// Matrix, site dimension and Q of any document.
fn load_matrix(
    path: &Path,
    n: Option<usize>,
    q: Option<f64>,
) -> CliResult<(ComplexMatrix, usize, f64, String)> {
    match parse_doc(path)? {
        Loaded::Instance(doc) => {
            let q = q.unwrap_or(doc.q);
            let t = tlforge::subspace::solution_matrix(&doc.vs, q)?;
            Ok((
                t,
                doc.vs.n(),
                q,
                format!("{}(n={})", doc.family, doc.vs.n()),
            ))
        }
        Loaded::Matrix(doc) => {
            let q = q
                .or(doc.q)
                .ok_or_else(|| invalid("Q is neither in the file nor given with --q"))?;
            let n = site_dim(&doc.t, n.or(doc.n))?;
            Ok((doc.t, n, q, path.display().to_string()))
        }
    }
}

fn load_solution(
    ctx: &Ctx,
    path: &Path,
    n: Option<usize>,
    q: Option<f64>,
) -> CliResult<TlSolution> {
    let (t, n, q, label) = load_matrix(path, n, q)?;
    check_cap(n * n * n, ctx.cap)?;
    Ok(verify_all(&t, n, q, &ctx.tol)?.with_label(label))
}

fn check_cap(dim: usize, cap: usize) -> CliResult<()> {
    if dim > cap {
        return Err(tlforge::Error::CapExceeded { dim, cap }.into());
    }
    Ok(())
}

fn cmd_verify(ctx: &Ctx, path: &Path, n: Option<usize>, q: Option<f64>) -> CliResult<Outcome> {
    let (t, n, q, label) = load_matrix(path, n, q)?;
    if !(q.is_finite() && q > 0.0) {
        return Err(invalid(format!("Q must be positive, got {q}")));
    }
    check_cap(n * n * n, ctx.cap)?;
    if !t.is_finite() {
        return Err(tlforge::Error::NonFinite("input matrix").into());
    }
    let reports: ReportSet = verification_reports(&t, n, q, &ctx.tol)?;
    let pass = reports.pass();
    let mut doc = json!({
        "input": label,
        "n": n,
        "q": q,
        "pass": pass,
        "reports": reports.reports,
    });
    if pass {
        let r = t.rank(&ctx.tol)?;
        doc["r"] = json!(r);
        doc["class"] = to_value(&classify(n, r, q, ctx.tol.abs_eps))?;
    }
    Ok(Outcome::one(doc, pass))
}

fn cmd_jw(
    ctx: &Ctx,
    family: &FamilyArgs,
    input: Option<&Path>,
    depth: usize,
    identities: bool,
) -> CliResult<Outcome> {
    let sol = match input {
        Some(path) => load_solution(ctx, path, None, None)?,
        None => {
            let (inst, _) = build_instance(ctx, family)?;
            inst.verify(&ctx.tol)?
        }
    };
    let ladder = jw_ladder(&sol, depth, ctx.cap)?;
    let rows = ladder.summary(&ctx.tol)?;
    let mut verified = rows.iter().all(|r| r.pass);
    let mut docs: Vec<Value> = rows.iter().map(to_value).collect::<CliResult<_>>()?;
    let mut checks = Vec::new();
    if identities {
        for k in 2..=ladder.depth() {
            let mut push = |name: &str, res: tlforge::Result<Value>| match res {
                Ok(v) => checks.push(json!({ "check": name, "depth": k, "result": v })),
                Err(e) => {
                    checks.push(json!({ "check": name, "depth": k, "skipped": e.to_string() }))
                }
            };
            let cube = ladder.verify_cube_relation(k, &ctx.tol, ctx.cap);
            if let Ok(r) = &cube {
                verified &= r.pass;
            }
            push(
                "cube",
                cube.map(|r| serde_json::to_value(r).unwrap_or(Value::Null)),
            );
            let lemma = ladder.verify_lemma1(k, &ctx.tol, ctx.cap);
            if let Ok(r) = &lemma {
                verified &= r.pass();
            }
            push(
                "companions",
                lemma.map(|r| serde_json::to_value(r.reports).unwrap_or(Value::Null)),
            );
        }
    }
    docs.push(json!({
        "label": sol.label(),
        "q": sol.q(),
        "requested_depth": ladder.requested_depth(),
        "depth": ladder.depth(),
        "stop_index": ladder.stop_index(),
        "pole_window_hits": ladder.rho().window_hits(),
        "identities": checks,
        "pass": verified,
    }));
    Ok(Outcome {
        docs,
        verified,
        lines: true,
    })
}
