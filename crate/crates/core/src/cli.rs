//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 verification failure or runtime error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::charsys::{y_coeff, y_coeff_from_eq7, MomentMatrix};
use crate::combinatorics::{int, Rational};
use crate::error::{Error, Result};
use crate::kinetic::{kinetic_g, kinetic_g_exact, verify_hankel, verify_oracle_match, verify_positive_definite, StateParams};
use crate::report::{self, CoeffCase, Document, Format, TensorCheck};
use crate::solver::{block_speeds, compare_closure, model_speeds, random_admissible, verify_independence, SpeedSet};
use crate::subluminal::verify_sublum;
use crate::tensor::{verify_theorem1, verify_theorem2, verify_theorem3, FrameProjectors, Theorem3Report};

/// Identity checks, theorem 3 reports per frame, and frame stability.
pub type TensorSuite = (Vec<TensorCheck>, Vec<(String, Theorem3Report)>, bool);

pub const SPEEDS_MAX_N: usize = 6;
pub const ORACLE_MAX_N: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "momentwave", version, about = "Characteristic speeds of the ultrarelativistic moment hierarchy")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = FormatArg::Table, global = true)]
    pub format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Lift the default order caps.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClosureKind {
    Kinetic,
    Random,
    File,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Wave speeds of one block or of the whole model.
    Speeds(SpeedsArgs),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Coefficient table Y_{b,n} of block p.
    Coeffs(CoeffsArgs),
}

#[derive(Args, Debug)]
pub struct SpeedsArgs {
    #[arg(long = "N")]
    pub order: usize,
    #[arg(long)]
    pub p: Option<usize>,
    /// Also assemble the full block with this closure and check it against the reduction.
    #[arg(long, value_enum)]
    pub closure: Option<ClosureKind>,
    #[arg(long)]
    pub closure_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Width of isolating intervals for irrational roots.
    #[arg(long, default_value_t = crate::solver::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub b: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Projector identities in the canonical and a boosted frame.
    Tensors {
        #[arg(long, default_value_t = 4)]
        max_rank: usize,
        /// Also record the contraction identity over p≤2, s≤3, c,d≤2.
        #[arg(long)]
        theorem3: bool,
    },
    /// Full block polynomials against reduced ones for random closures.
    Independence {
        #[arg(long = "N")]
        order: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Model speeds against the 4D matrix pencil.
    Oracle4d {
        #[arg(long = "N")]
        order: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long = "lambda", default_value_t = 0.0, allow_negative_numbers = true)]
        lam: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "k", default_value_t = 1.0)]
        k_b: f64,
    },
    /// Hankel determinants and positive definiteness of the kinetic closure.
    Hankel {
        #[arg(long, default_value_t = 8)]
        a_max: usize,
        #[arg(long, default_value_t = 6)]
        d_max: usize,
        #[arg(long, default_value_t = 10)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Real roots within the light cone for random (k, U).
    Sublum {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 5.0)]
        max_rapidity: f64,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
    },
    /// Case formulas against the general coefficient sum.
    Coeffs {
        #[arg(long = "N", default_value_t = 5)]
        order: usize,
    },
}

/// A finished command: the report and whether everything it checked passed.
pub struct Outcome {
    pub document: Document,
    pub pass: bool,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse(_) | Error::Closure(_) => 2,
        _ => 1,
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let text = outcome.document.render(cli.format.into());
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    if outcome.pass {
        0
    } else {
        1
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Speeds(a) => cmd_speeds(a, cli.force),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Verify(v) => cmd_verify(v, cli.force),
    }
}

fn closure_matrix(a: &SpeedsArgs) -> Result<(MomentMatrix<Rational>, Value)> {
    let kind = a.closure.expect("closure requested");
    if a.closure_file.is_some() && kind != ClosureKind::File {
        return Err(usage("--closure-file needs --closure file"));
    }
    match kind {
        ClosureKind::Kinetic => {
            let g = kinetic_g_exact(a.order, &int(1), &int(1))?;
            Ok((g, json!({ "kind": "kinetic", "lambda": 0, "gamma": 1, "k": 1 })))
        }
        ClosureKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let (g, rejected) = random_admissible(a.order, &mut rng)?;
            Ok((g, json!({ "kind": "random", "seed": a.seed, "rejected": rejected })))
        }
        ClosureKind::File => {
            let path = a.closure_file.as_ref().ok_or_else(|| usage("--closure file needs --closure-file"))?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let g = MomentMatrix::from_json(&text)?;
            if g.order() != a.order {
                return Err(Error::Closure(format!("closure file has N = {}, expected {}", g.order(), a.order)));
            }
            Ok((g, json!({ "kind": "file", "path": path.display().to_string() })))
        }
    }
}

fn cmd_speeds(a: &SpeedsArgs, force: bool) -> Result<Outcome> {
    positive("tol", a.tol)?;
    if a.order > SPEEDS_MAX_N && !force {
        return Err(usage(format!("N = {} exceeds the default cap {SPEEDS_MAX_N}; pass --force", a.order)));
    }
    if let Some(p) = a.p {
        if p > a.order {
            return Err(usage(format!("need 0 ≤ p ≤ N, got p = {p}, N = {}", a.order)));
        }
    }
    let (closure, pass) = match a.closure {
        None => (json!({ "kind": "none" }), true),
        Some(_) => {
            let (g, mut descriptor) = closure_matrix(a)?;
            let blocks = compare_closure(a.order, &g)?;
            let ok = blocks.iter().filter(|b| a.p.is_none_or(|p| p == b.p)).all(|b| b.equal && b.degrees_match);
            descriptor["matches_reduction"] = ok.into();
            (descriptor, ok)
        }
    };
    let sets: Vec<SpeedSet> = match a.p {
        Some(p) => vec![block_speeds(p, a.order)?],
        None => (0..=a.order).map(|p| block_speeds(p, a.order)).collect::<Result<_>>()?,
    };
    let model = if a.p.is_none() { Some(model_speeds(a.order)?) } else { None };
    let mut document = report::speeds_document(a.order, &sets, model.as_ref(), closure);
    if let Value::Object(m) = &mut document.json {
        m.insert("p".into(), a.p.map_or(Value::Null, Value::from));
    }
    Ok(Outcome { document, pass })
}

fn cmd_coeffs(a: &CoeffsArgs) -> Result<Outcome> {
    let terms = y_coeff(a.p, a.b, a.n)?;
    Ok(Outcome { document: report::coeffs_document(a.p, a.b, a.n, &terms), pass: true })
}

fn cmd_verify(v: &VerifyCommand, force: bool) -> Result<Outcome> {
    match *v {
        VerifyCommand::Tensors { max_rank, theorem3 } => {
            let (checks, t3, stable) = tensor_suite(max_rank, theorem3)?;
            let pass = checks.iter().all(|c| c.pass) && stable;
            Ok(Outcome { document: report::tensors_document(&checks, &t3, stable), pass })
        }
        VerifyCommand::Independence { order, trials, seed } => {
            if trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            let r = verify_independence(order, trials, seed)?;
            Ok(Outcome { pass: r.pass(), document: report::independence_document(&r) })
        }
        VerifyCommand::Oracle4d { order, tol, lam, gamma, k_b } => {
            positive("tol", tol)?;
            if order > ORACLE_MAX_N && !force {
                return Err(usage(format!("N = {order} exceeds the default cap {ORACLE_MAX_N}; pass --force")));
            }
            let state = StateParams { lam, gamma, k_b };
            state.validate()?;
            let r = verify_oracle_match(order, &state, tol)?;
            Ok(Outcome { pass: r.pass(), document: report::oracle_document(&r) })
        }
        VerifyCommand::Hankel { a_max, d_max, states, seed } => {
            let r = verify_hankel(a_max, d_max);
            let pd = positive_definite_suite(states, seed)?;
            let pass = r.pass() && pd.iter().all(|x| x.2);
            Ok(Outcome { document: report::hankel_document(&r, &pd), pass })
        }
        VerifyCommand::Sublum { samples, seed, tol, max_rapidity, max_order } => {
            positive("tol", tol)?;
            positive("max-rapidity", max_rapidity)?;
            let r = verify_sublum(samples, seed, tol, max_rapidity, max_order)?;
            Ok(Outcome { pass: r.pass(), document: report::sublum_document(&r) })
        }
        VerifyCommand::Coeffs { order } => {
            let cases = cross_generator_cases(order)?;
            let pass = cases.iter().all(|c| c.5);
            Ok(Outcome { document: report::coeff_check_document(order, &cases), pass })
        }
    }
}

/// Theorem 1 for `p = 2..=max_rank`, theorem 2 for `r = 1..=max_rank`, in the
/// canonical and boosted frames; optionally the theorem 3 grid (`s >= p`) in both.
pub fn tensor_suite(max_rank: usize, theorem3: bool) -> Result<TensorSuite> {
    let frames = [("canonical", FrameProjectors::canonical()), ("boosted", FrameProjectors::boosted())];
    let mut checks = Vec::new();
    let mut t3 = Vec::new();
    for (name, frame) in &frames {
        for p in 2..=max_rank {
            checks.push(TensorCheck { frame: name.to_string(), theorem: 1, label: format!("p={p}"), pass: verify_theorem1(frame, p) });
        }
        for r in 1..=max_rank {
            checks.push(TensorCheck { frame: name.to_string(), theorem: 2, label: format!("r={r}"), pass: verify_theorem2(frame, r) });
        }
        if theorem3 {
            for p in 0..=2 {
                for s in p..=3 {
                    for c in 0..=2 {
                        for d in 0..=2 {
                            t3.push((name.to_string(), verify_theorem3(frame, p, s, c, d)?));
                        }
                    }
                }
            }
        }
    }
    let half = t3.len() / 2;
    let stable = t3[..half].iter().zip(&t3[half..]).all(|(a, b)| a.1.pass == b.1.pass);
    Ok((checks, t3, stable))
}

/// `(N, state, positive definite)` for `states` random states at each `N = 2..=5`.
pub fn positive_definite_suite(states: usize, seed: u64) -> Result<Vec<(usize, String, bool)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..states {
        let state = StateParams::random(&mut rng);
        for order in 2..=5 {
            let g = kinetic_g(order, &state)?;
            out.push((order, format!("λ={:.6} γ={:.6} k={:.6}", state.lam, state.gamma, state.k_b), verify_positive_definite(&g)));
        }
    }
    Ok(out)
}

/// Every valid `(p, m, a, b, n)` with orders up to `max_order`, compared
/// between the case formulas and the general sum: `(p, m, a, b, n, equal)`.
pub fn cross_generator_cases(max_order: usize) -> Result<Vec<CoeffCase>> {
    let mut cases = Vec::new();
    for p in 0..=max_order {
        for m in p..=max_order {
            for b in 0..=m - p {
                let a = m - p - b;
                for n in p..=max_order {
                    let equal = y_coeff(p, b, n)? == y_coeff_from_eq7(p, m, a, b, n)?;
                    cases.push((p, m, a, b, n, equal));
                }
            }
        }
    }
    Ok(cases)
}
