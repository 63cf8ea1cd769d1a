use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use infrasolv::action::{self, FreenessReport};
use infrasolv::bundle::{self, Bundle, Diagnostic, LoadError};
use infrasolv::cohomology::{self, Exec};
use infrasolv::hull::{self, FittingReport, HullCertificate};
use infrasolv::jordan::{self, JordanPair, PredicateReport};
use infrasolv::lie::{self, UnipotentGroupData};
use infrasolv::rational::{self, Rational};
use infrasolv::report::{self, ReportOptions};
use infrasolv::Matrix;

const EXIT_INVALID: u8 = 2;
const EXIT_AXIOM: u8 = 3;

#[derive(Parser)]
#[command(
    name = "infrasolv",
    version,
    about = "Exact invariants of infra-solvmanifolds"
)]
struct Cli {
    /// Output format; JSON is the stable contract.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicative Jordan decomposition of a matrix.
    Jordan { matrix: PathBuf },
    /// Lie algebra of the Zariski closure of a unipotent matrix group.
    LieClosure { generators: PathBuf },
    /// Hull axiom certificate for a hull and a group (either may be a bundle).
    HullCheck { hull: PathBuf, group: PathBuf },
    /// Polynomial maps of every generator and its inverse.
    EmitAction { bundle: PathBuf },
    /// Search a word ball for elements with fixed points.
    FreeCheck {
        bundle: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long)]
        parallel: bool,
    },
    /// Orbit of the origin under a word ball, restricted to a box.
    Orbit {
        bundle: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// `lo:hi` for every coordinate, or one `lo:hi` per coordinate separated by commas.
        #[arg(long = "box", default_value = "-10:10", allow_hyphen_values = true)]
        bounds: String,
    },
    /// Central directions fixed by all holonomy.
    TorusRank { bundle: PathBuf },
    /// Betti numbers of the algebra and of its T-invariant part.
    Betti {
        hull: PathBuf,
        #[arg(long, default_value_t = cohomology::DEFAULT_MAX_DIM)]
        max_dim: usize,
        #[arg(long)]
        parallel: bool,
    },
    /// Run the full pipeline on a bundle.
    Report {
        bundle: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long, default_value_t = cohomology::DEFAULT_MAX_DIM)]
        max_dim: usize,
        #[arg(long)]
        parallel: bool,
    },
    /// Schema and invariant diagnostics for a bundle.
    Validate { bundle: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<infrasolv::Error> for Failure {
    fn from(e: infrasolv::Error) -> Self {
        Self::invalid(e.to_string())
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Self::invalid(e.to_string())
    }
}

/// A successful run: the payload, plus an exit code for axiom failures.
struct Outcome {
    value: Value,
    code: u8,
}

impl Outcome {
    fn ok<T: Serialize>(v: &T) -> Self {
        Self {
            value: serde_json::to_value(v).expect("serializable output"),
            code: 0,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn load_bundle(path: &Path) -> Result<Bundle, Failure> {
    Ok(bundle::load_bundle(&read(path)?)?)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    bundle::parse_json(text).map_err(|d| Failure::invalid(format!("malformed input at {d}")))
}

#[derive(Serialize)]
struct JordanOutput {
    semisimple: Matrix,
    unipotent: Matrix,
    predicates: PredicateReport,
}

#[derive(Deserialize)]
struct GeneratorsJson {
    generators: Vec<Matrix>,
}

#[derive(Serialize)]
struct HullCheckOutput {
    certificate: HullCertificate,
    fitting: FittingReport,
}

#[derive(Serialize)]
struct EmitOutput {
    #[serde(flatten)]
    action: action::EmittedAction,
    relators_ok: bool,
}

#[derive(Serialize)]
struct OrbitOutput {
    radius: usize,
    points: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct TorusRankOutput {
    torus_rank: usize,
    center_dim: usize,
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    diagnostics: Vec<Diagnostic>,
}

fn parse_bounds(arg: &str, dim: usize) -> Result<Vec<(Rational, Rational)>, Failure> {
    let one = |s: &str| -> Result<(Rational, Rational), Failure> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Failure::invalid(format!("box bound `{s}` is not of the form lo:hi")))?;
        Ok((rational::parse(lo)?, rational::parse(hi)?))
    };
    let parts: Vec<&str> = arg.split(',').collect();
    match parts.len() {
        1 => Ok(vec![one(parts[0])?; dim]),
        n if n == dim => parts.into_iter().map(one).collect(),
        n => Err(Failure::invalid(format!(
            "{n} box bounds for dimension {dim}"
        ))),
    }
}

fn run(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Jordan { matrix } => {
            let m: Matrix = parse(&read(&matrix)?)?;
            let JordanPair {
                semisimple,
                unipotent,
            } = jordan::multiplicative_jordan(&m)?;
            Ok(Outcome::ok(&JordanOutput {
                semisimple,
                unipotent,
                predicates: jordan::predicates(&m)?,
            }))
        }
        Command::LieClosure { generators } => {
            let g: GeneratorsJson = parse(&read(&generators)?)?;
            let n = g.generators.first().map_or(0, Matrix::rows);
            let group = UnipotentGroupData::new(g.generators, n)?;
            Ok(Outcome::ok(&lie::lie_closure(&group)?.to_json()))
        }
        Command::HullCheck { hull, group } => {
            let h = bundle::load_hull_document(&read(&hull)?)?;
            let g = bundle::load_group_document(&read(&group)?, h.algebra())?;
            let certificate = hull::hull_axiom_check(&h, &g)?;
            let fitting = hull::fitting_radical_check(&g);
            let code = if certificate.passed() && fitting.ok {
                0
            } else {
                EXIT_AXIOM
            };
            let mut out = Outcome::ok(&HullCheckOutput {
                certificate,
                fitting,
            });
            out.code = code;
            Ok(out)
        }
        Command::EmitAction { bundle } => {
            let b = load_bundle(&bundle)?;
            let emitted = action::emit_polynomial_action(&b.group)?;
            let relators_ok = action::relators_hold_polynomially(&b.group, &emitted)?;
            Ok(Outcome::ok(&EmitOutput {
                action: emitted,
                relators_ok,
            }))
        }
        Command::FreeCheck {
            bundle,
            radius,
            parallel,
        } => {
            let b = load_bundle(&bundle)?;
            let rep: FreenessReport = action::freeness_check(&b.group, radius, parallel)?;
            Ok(Outcome::ok(&rep))
        }
        Command::Orbit {
            bundle,
            radius,
            bounds,
        } => {
            let b = load_bundle(&bundle)?;
            let bx = parse_bounds(&bounds, b.group.algebra().dim())?;
            let pts = action::orbit_sample(&b.group, radius, &bx)?;
            Ok(Outcome::ok(&OrbitOutput {
                radius,
                points: pts
                    .iter()
                    .map(|p| p.iter().map(rational::format).collect())
                    .collect(),
            }))
        }
        Command::TorusRank { bundle } => {
            let b = load_bundle(&bundle)?;
            Ok(Outcome::ok(&TorusRankOutput {
                torus_rank: hull::torus_rank(&b.group, &b.hull)?,
                center_dim: b.hull.algebra().center().len(),
            }))
        }
        Command::Betti {
            hull,
            max_dim,
            parallel,
        } => {
            let h = bundle::load_hull_document(&read(&hull)?)?;
            let exec = if parallel {
                Exec::Parallel
            } else {
                Exec::Sequential
            };
            Ok(Outcome::ok(&cohomology::betti_report(
                h.algebra(),
                &h.hol_matrices(),
                max_dim,
                exec,
            )?))
        }
        Command::Report {
            bundle,
            radius,
            max_dim,
            parallel,
        } => {
            let b = load_bundle(&bundle)?;
            let rep = report::manifold_report(
                &b,
                ReportOptions {
                    radius,
                    max_dim,
                    parallel,
                },
            )?;
            let code = if rep.certificate.passed() {
                0
            } else {
                EXIT_AXIOM
            };
            let mut out = Outcome::ok(&rep);
            out.code = code;
            Ok(out)
        }
        Command::Validate { bundle } => {
            let diagnostics = bundle::validate(&read(&bundle)?);
            let valid = diagnostics.is_empty();
            let mut out = Outcome::ok(&ValidateOutput { valid, diagnostics });
            if !valid {
                out.code = EXIT_INVALID;
            }
            Ok(out)
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_scalar_like(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_scalar_like(x) {
                    out.push_str(&format!("{pad}- {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", inline(v))),
    }
}

/// Scalars and arrays of scalars (vectors, matrix rows) print on one line.
fn is_scalar_like(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| match x {
            Value::Array(inner) => inner.iter().all(|y| !y.is_array() && !y.is_object()),
            Value::Object(_) => false,
            _ => true,
        }),
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(inline).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.value).expect("json") + "\n",
                Format::Text => {
                    let mut s = String::new();
                    render_text(&out.value, 0, &mut s);
                    s
                }
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
