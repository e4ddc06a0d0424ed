//! Command-line surface: curve files in, text or JSON out.
//!
//! Exit codes: 0 success, 1 a consistency verdict failed, 2 bad input,
//! 3 budget or stabilization failure.

pub mod corpus;
pub mod json;
pub mod parse;

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::curve::{Curve, DEFAULT_MAX_BRANCHES};
use crate::error::{Error, LaurentError};
use crate::filtration::{DEFAULT_MARGIN, DEFAULT_MAX_CELLS};
use crate::laurent::{canonical_render, LaurentPoly};
use crate::pipeline::{self, AnalysisReport, Config, Verdicts};

use self::json::{ErrorJson, PolyJson};
use self::parse::{parse_curve, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "alexander",
    version,
    about = "Alexander polynomials of plane curve singularities from branch parametrizations"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Extra box extent beyond the conductor vector.
    #[arg(long, global = true, default_value_t = DEFAULT_MARGIN)]
    margin: u32,
    /// Upper bound on matrix and table cells.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: u128,
    /// Worker threads for the Hilbert table.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Zeta function order.
    #[arg(long, global = true)]
    order: Option<u32>,
    /// Maximum number of branches accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BRANCHES)]
    max_branches: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report: invariants, both routes, zeta and verdicts.
    Analyze { file: PathBuf },
    /// Alexander polynomial (knot polynomial for one branch).
    Alexander { file: PathBuf },
    /// Monodromy zeta function.
    Zeta { file: PathBuf },
    /// Branch semigroups, intersection matrix and conductor vector.
    Semigroup { file: PathBuf },
    /// Fiber table over the computation box.
    Fibers { file: PathBuf },
    /// Implicit equations of the branches.
    Implicitize { file: PathBuf },
    /// Consistency verdicts only; exit 0 iff all pass.
    Check { file: PathBuf },
    /// Print a built-in curve file.
    Example { name: String },
}

enum Failure {
    Io(String),
    Parse(ParseError),
    Compute(Error),
    UnknownExample(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) | Failure::Parse(_) | Failure::UnknownExample(_) => EXIT_INPUT,
            Failure::Compute(Error::Curve(_)) => EXIT_INPUT,
            Failure::Compute(Error::Laurent(LaurentError::NotDivisible { .. })) => EXIT_VERDICT,
            Failure::Compute(_) => EXIT_BUDGET,
        }
    }

    fn kind(&self) -> String {
        match self {
            Failure::Io(_) => "IoError".into(),
            Failure::Parse(e) => e.kind().into(),
            Failure::UnknownExample(_) => "UnknownExample".into(),
            Failure::Compute(e) => {
                let dbg = match e {
                    Error::Curve(c) => format!("{c:?}"),
                    Error::Engine(c) => format!("{c:?}"),
                    Error::Laurent(c) => format!("{c:?}"),
                };
                dbg.split([' ', '{', '(']).next().unwrap_or("Error").to_string()
            }
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Parse(e) => e.to_string(),
            Failure::Compute(e) => e.to_string(),
            Failure::UnknownExample(n) => format!(
                "unknown example '{n}'; available: {}",
                corpus::NAMES.join(", ")
            ),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<crate::error::CurveError> for Failure {
    fn from(e: crate::error::CurveError) -> Self {
        Failure::Compute(e.into())
    }
}

impl From<crate::error::EngineError> for Failure {
    fn from(e: crate::error::EngineError) -> Self {
        Failure::Compute(e.into())
    }
}

impl From<LaurentError> for Failure {
    fn from(e: LaurentError) -> Self {
        Failure::Compute(e.into())
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let code = f.exit_code();
            if cli.format == Format::Json {
                let (line, column) = match &f {
                    Failure::Parse(p) => {
                        let (l, c) = p.position();
                        (Some(l), Some(c))
                    }
                    _ => (None, None),
                };
                let kind = f.kind();
                let doc = json::error_json(&ErrorJson {
                    kind: &kind,
                    message: f.message(),
                    exit_code: code,
                    line,
                    column,
                });
                let _ = writeln!(out, "{doc}");
            } else {
                let _ = writeln!(err, "error: {}", f.message());
            }
            code
        }
    }
}

fn read_source(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_curve(cli: &Cli, path: &PathBuf) -> Result<Curve, Failure> {
    let text = read_source(path)?;
    let branches = parse_curve(&text).map_err(Failure::Parse)?;
    Ok(Curve::validate_with_limit(branches, cli.max_branches)?)
}

fn config(cli: &Cli) -> Config {
    Config {
        margin: cli.margin,
        max_cells: cli.max_cells,
        order: cli.order,
        threads: cli.threads,
    }
}

fn verdict_code(v: &Verdicts) -> i32 {
    if v.all_pass() {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

fn w(out: &mut dyn Write, s: impl AsRef<str>) {
    let _ = writeln!(out, "{}", s.as_ref());
}

fn vec_str<T: ToString>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn verdict_lines(out: &mut dyn Write, v: &Verdicts) {
    w(out, format!("thm1_eq_thm2: {}", pass(v.thm1_eq_thm2)));
    w(out, format!("normalized: {}", pass(v.normalized)));
    w(out, format!("support_in_semigroup: {}", pass(v.support_in_semigroup)));
    w(out, format!("divisibility: {}", pass(v.divisibility)));
}

fn text_report(out: &mut dyn Write, report: &AnalysisReport) {
    w(out, format!("branches: {}", report.r));
    for b in &report.branches {
        w(
            out,
            format!(
                "  {}: multiplicity {}, semigroup generators {}, conductor {}",
                b.name,
                b.multiplicity,
                vec_str(&b.generators),
                b.conductor
            ),
        );
    }
    let rows: Vec<String> = report.intersection.iter().map(|r| vec_str(r)).collect();
    w(out, format!("intersection: [{}]", rows.join(", ")));
    w(out, format!("delta: {}", vec_str(&report.delta)));
    w(out, format!("box: {}", vec_str(&report.upper)));
    w(
        out,
        format!(
            "fibers: {} points, {} in the semigroup, {} with nonzero Euler characteristic",
            report.fibers.points, report.fibers.members, report.fibers.nonzero_euler
        ),
    );
    if let Some(p) = &report.p_prime {
        w(out, format!("P': {}", canonical_render(p)));
    }
    w(out, format!("alexander: {}", canonical_render(&report.alexander)));
    w(out, format!("zeta: {}", zeta_text(&report.zeta)));
    verdict_lines(out, &report.checks);
}

fn zeta_text(coeffs: &[i64]) -> String {
    canonical_render(&LaurentPoly::from_dense(coeffs))
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Example { name } => {
            let text =
                corpus::source(name).ok_or_else(|| Failure::UnknownExample(name.clone()))?;
            if json {
                w(out, serde_json::json!({ "name": name, "curve": text }).to_string());
            } else {
                let _ = write!(out, "{text}");
            }
            Ok(EXIT_OK)
        }
        Command::Semigroup { file } => {
            let curve = load_curve(cli, file)?;
            if json {
                w(out, json::semigroup_json(&curve));
            } else {
                for i in 0..curve.num_branches() {
                    let s = curve.semigroup(i);
                    w(
                        out,
                        format!(
                            "{}: multiplicity {}, generators {}, conductor {}, gaps {}",
                            curve.branch_name(i),
                            curve.multiplicities()[i],
                            vec_str(&s.generators),
                            s.conductor,
                            s.gaps().len()
                        ),
                    );
                }
                let rows: Vec<String> =
                    curve.intersection_matrix().iter().map(|r| vec_str(r)).collect();
                w(out, format!("intersection: [{}]", rows.join(", ")));
                w(out, format!("delta: {}", vec_str(curve.delta())));
            }
            Ok(EXIT_OK)
        }
        Command::Implicitize { file } => {
            let curve = load_curve(cli, file)?;
            if json {
                w(out, json::implicit_json(&curve));
            } else {
                for i in 0..curve.num_branches() {
                    w(out, format!("{}: {}", curve.branch_name(i), curve.equation(i)));
                }
                if curve.num_branches() > 1 {
                    w(out, format!("product: {}", curve.equation_product()));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Fibers { file } => {
            let curve = load_curve(cli, file)?;
            let engine = pipeline::build_engine(&curve, &config(cli))?;
            let table = engine.fiber_table()?;
            if json {
                w(out, json::fibers_json(&table));
            } else {
                w(out, "v\tc\td(S) by subset mask\tmember\tchi");
                for f in &table {
                    w(
                        out,
                        format!(
                            "{}\t{}\t{}\t{}\t{}",
                            f.v,
                            f.dim,
                            vec_str(&f.subspace_dims),
                            f.member,
                            f.euler
                        ),
                    );
                }
            }
            Ok(EXIT_OK)
        }
        Command::Analyze { file }
        | Command::Alexander { file }
        | Command::Zeta { file }
        | Command::Check { file } => {
            let curve = load_curve(cli, file)?;
            let report = pipeline::analyze(&curve, &config(cli))?;
            match (&cli.command, json) {
                (Command::Analyze { .. }, true) => w(out, json::emit_json(&report)),
                (Command::Analyze { .. }, false) => text_report(out, &report),
                (Command::Alexander { .. }, true) => w(
                    out,
                    serde_json::to_string(&serde_json::json!({
                        "alexander": PolyJson::from(&report.alexander)
                    }))
                    .expect("serializable"),
                ),
                (Command::Alexander { .. }, false) => w(out, canonical_render(&report.alexander)),
                (Command::Zeta { .. }, true) => w(
                    out,
                    serde_json::json!({ "zeta": { "coeffs": report.zeta } }).to_string(),
                ),
                (Command::Zeta { .. }, false) => w(out, zeta_text(&report.zeta)),
                (_, true) => w(
                    out,
                    serde_json::json!({ "checks": {
                        "thm1_eq_thm2": report.checks.thm1_eq_thm2,
                        "normalized": report.checks.normalized,
                        "support_in_semigroup": report.checks.support_in_semigroup,
                        "divisibility": report.checks.divisibility,
                    }})
                    .to_string(),
                ),
                (_, false) => verdict_lines(out, &report.checks),
            }
            Ok(verdict_code(&report.checks))
        }
    }
}
