//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 property failure, 2 input error, 3 precondition
//! violation, 4 characterization-negative (no witness can exist).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::characterize::characterize;
use crate::error::BaryError;
use crate::geometry::{contains, CoveringGrid, Polytope};
use crate::hilbert_cube::{cube_alpha_max, run_cube_experiment};
use crate::rational::{parse_rational_list, to_f64, Rational, RationalVector};
use crate::rng::configure_threads_from_env;
use crate::simplex_t2::{run_simplex_experiment, SimplexPoint, SimplexRun};
use crate::witness::{barycenter, construct_witness, DiscreteMeasure};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NO_WITNESS: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "barylab",
    version,
    about = "Barycenters of measures with prescribed convex support"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relative-interior and prolongation verdicts for a point of a polytope.
    Characterize(PointArgs),
    /// Build a discrete measure with support densifying in M and barycenter a.
    Witness(WitnessArgs),
    /// Check a measure file: barycenter equals the point, atoms lie in M.
    Verify(VerifyArgs),
    /// Truncated Hilbert cube: vanishing prolongation and Monte Carlo means.
    Hilbert(HilbertArgs),
    /// Pushforward measure on the probability simplex of a finite set.
    Simplex(SimplexArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    /// Polytope JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Point as comma-separated rationals, e.g. "1/3,0".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub target: PointArgs,
    /// Number of two-point components N.
    #[arg(long, default_value_t = 64)]
    pub pairs: usize,
    /// Steps per axis of the covering-radius grid.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub target: PointArgs,
    /// Measure JSON file, either bare or as written by `witness`.
    #[arg(long)]
    pub measure: PathBuf,
}

#[derive(Args, Debug)]
pub struct HilbertArgs {
    /// Truncation dimension d.
    #[arg(long = "dim", default_value_t = 50)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SimplexArgs {
    /// Size of K; defaults to the length of --mu.
    #[arg(long)]
    pub m: Option<usize>,
    /// Target measure on K, e.g. "1/2,1/3,1/6"; uniform when absent.
    #[arg(long)]
    pub mu: Option<String>,
    /// Truncation depth J of the weight set.
    #[arg(long, default_value_t = 32)]
    pub depth: usize,
    /// Atoms of the discrete measure on the weight set.
    #[arg(long, default_value_t = 64)]
    pub lambda_atoms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Barycentric grid resolution for the coverage diagnostic.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    #[command(flatten)]
    pub output: Output,
}

/// A finished command: its text output and exit code.
#[derive(Debug)]
struct Outcome {
    body: String,
    code: i32,
}

fn error_code(e: &BaryError) -> i32 {
    match e {
        BaryError::Input(_) => EXIT_INPUT,
        BaryError::Precondition(_) => EXIT_PRECONDITION,
        BaryError::Characterization(_) => EXIT_NO_WITNESS,
    }
}

fn read_polytope(path: &Path) -> Result<Polytope, BaryError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BaryError::Input(format!("{}: {e}", path.display())))?;
    Polytope::from_json_str(&text)
}

fn read_point(args: &PointArgs) -> Result<(Polytope, RationalVector), BaryError> {
    let m = read_polytope(&args.input)?;
    let a = RationalVector(parse_rational_list(&args.point)?);
    a.check_dim(m.ambient_dim(), "point")?;
    Ok((m, a))
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn json_only(output: &Output) -> Result<(), BaryError> {
    match output.format {
        Format::Json => Ok(()),
        Format::Csv => Err(BaryError::Input(
            "csv output is only available for sweep tables (witness, hilbert)".into(),
        )),
    }
}

fn cmd_characterize(args: &PointArgs) -> Result<Outcome, BaryError> {
    json_only(&args.output)?;
    let (m, a) = read_point(args)?;
    let report = characterize(&m, &a)?;
    Ok(Outcome {
        code: if report.agrees() {
            EXIT_PASS
        } else {
            EXIT_PROPERTY_FAILURE
        },
        body: to_json(&report),
    })
}

fn witness_summary(
    m: &Polytope,
    a: &RationalVector,
    mu: &DiscreteMeasure,
    grid: &CoveringGrid,
) -> Result<serde_json::Value, BaryError> {
    let exact = &barycenter(mu) == a;
    let inside = mu
        .atoms()
        .iter()
        .try_fold(true, |ok, x| Ok::<_, BaryError>(ok && contains(m, x)?))?;
    Ok(json!({
        "barycenter_exact_match": exact,
        "atoms_in_M": inside,
        "atoms": mu.len(),
        "covering_radius": grid.covering_radius(mu.atoms())?,
    }))
}

fn cmd_witness(args: &WitnessArgs) -> Result<Outcome, BaryError> {
    let (m, a) = read_point(&args.target)?;
    if !contains(&m, &a)? {
        return Err(BaryError::Precondition(format!("point {a} is not in M")));
    }
    let grid = CoveringGrid::new(&m, args.grid)?;
    match args.target.output.format {
        Format::Json => {
            let mu = construct_witness(&m, &a, args.pairs)?;
            let summary = witness_summary(&m, &a, &mu, &grid)?;
            let ok = summary["barycenter_exact_match"] == json!(true)
                && summary["atoms_in_M"] == json!(true);
            Ok(Outcome {
                body: to_json(&json!({ "pairs": args.pairs, "summary": summary, "measure": mu })),
                code: if ok { EXIT_PASS } else { EXIT_PROPERTY_FAILURE },
            })
        }
        Format::Csv => {
            let mut body = String::from("pairs,atoms,barycenter_exact_match,covering_radius\n");
            let mut ok = true;
            let mut n = 1;
            while n <= args.pairs {
                let mu = construct_witness(&m, &a, n)?;
                let exact = barycenter(&mu) == a;
                ok &= exact;
                writeln!(
                    body,
                    "{n},{},{exact},{:.12}",
                    mu.len(),
                    grid.covering_radius(mu.atoms())?
                )
                .unwrap();
                n *= 2;
            }
            Ok(Outcome {
                body,
                code: if ok { EXIT_PASS } else { EXIT_PROPERTY_FAILURE },
            })
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, BaryError> {
    json_only(&args.target.output)?;
    let (m, a) = read_point(&args.target)?;
    let text = std::fs::read_to_string(&args.measure)
        .map_err(|e| BaryError::Input(format!("{}: {e}", args.measure.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| BaryError::Input(format!("malformed measure JSON: {e}")))?;
    let raw = value.get("measure").cloned().unwrap_or(value);
    let mu: DiscreteMeasure = serde_json::from_value(raw)
        .map_err(|e| BaryError::Input(format!("malformed measure JSON: {e}")))?;
    if mu.dim() != m.ambient_dim() {
        return Err(BaryError::Input(
            "measure and polytope dimensions differ".into(),
        ));
    }
    let exact = barycenter(&mu) == a;
    let inside = mu
        .atoms()
        .iter()
        .try_fold(true, |ok, x| Ok::<_, BaryError>(ok && contains(&m, x)?))?;
    Ok(Outcome {
        body: to_json(
            &json!({ "barycenter_exact_match": exact, "atoms_in_M": inside, "atoms": mu.len() }),
        ),
        code: if exact && inside {
            EXIT_PASS
        } else {
            EXIT_PROPERTY_FAILURE
        },
    })
}

fn cmd_hilbert(args: &HilbertArgs) -> Result<Outcome, BaryError> {
    if args.dim < 1 {
        return Err(BaryError::Input("--dim must be >= 1".into()));
    }
    match args.output.format {
        Format::Json => {
            if args.samples < 1 {
                return Err(BaryError::Input("--samples must be >= 1".into()));
            }
            let report = run_cube_experiment(args.dim, args.seed, args.samples)?;
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value["pass"] = json!(report.passed());
            Ok(Outcome {
                body: to_json(&value),
                code: if report.passed() {
                    EXIT_PASS
                } else {
                    EXIT_PROPERTY_FAILURE
                },
            })
        }
        Format::Csv => {
            let mut body = String::from("d,alpha_max,alpha_max_float\n");
            let mut prev: Option<Rational> = None;
            let mut monotone = true;
            for d in 1..=args.dim {
                let alpha = cube_alpha_max(d)?;
                monotone &= prev.as_ref().is_none_or(|p| alpha < *p);
                writeln!(body, "{d},{alpha},{:.12}", to_f64(&alpha)).unwrap();
                prev = Some(alpha);
            }
            Ok(Outcome {
                body,
                code: if monotone {
                    EXIT_PASS
                } else {
                    EXIT_PROPERTY_FAILURE
                },
            })
        }
    }
}

fn cmd_simplex(args: &SimplexArgs) -> Result<Outcome, BaryError> {
    json_only(&args.output)?;
    let probs = match (&args.mu, args.m) {
        (Some(list), m) => {
            let p = parse_rational_list(list)?;
            if m.is_some_and(|m| m != p.len()) {
                return Err(BaryError::Input(format!(
                    "--m {} does not match --mu of length {}",
                    m.unwrap(),
                    p.len()
                )));
            }
            p
        }
        (None, Some(m)) if m >= 1 => vec![Rational::new(1.into(), (m as i64).into()); m],
        (None, _) => return Err(BaryError::Input("give --mu or --m >= 1".into())),
    };
    let mu = SimplexPoint::new(probs)?;
    if args.samples < 1 || args.depth < 1 || args.lambda_atoms < 1 || args.grid < 1 {
        return Err(BaryError::Input(
            "--samples, --depth, --lambda-atoms and --grid must be >= 1".into(),
        ));
    }
    let report = run_simplex_experiment(
        &mu,
        &SimplexRun {
            depth: args.depth,
            lambda_atoms: args.lambda_atoms,
            seed: args.seed,
            samples: args.samples,
            grid_resolution: args.grid,
        },
    )?;
    let pass = report.within_4sigma;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["pass"] = json!(pass);
    let code = if !report.support_full {
        EXIT_NO_WITNESS
    } else if pass {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    };
    Ok(Outcome {
        body: to_json(&value),
        code,
    })
}

/// Writes `body` to `path` via a temporary sibling file and a rename.
fn write_atomically(path: &Path, body: &str) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, path)
}

fn output_of(cmd: &Command) -> &Output {
    match cmd {
        Command::Characterize(a) => &a.output,
        Command::Witness(a) => &a.target.output,
        Command::Verify(a) => &a.target.output,
        Command::Hilbert(a) => &a.output,
        Command::Simplex(a) => &a.output,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
        }
    };
    configure_threads_from_env();
    let result = match &cli.command {
        Command::Characterize(a) => cmd_characterize(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Hilbert(a) => cmd_hilbert(a),
        Command::Simplex(a) => cmd_simplex(a),
    };
    match result {
        Ok(out) => {
            let written = match &output_of(&cli.command).out {
                Some(path) => write_atomically(path, &out.body),
                None => std::io::stdout().write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("barylab: cannot write output: {e}");
                return EXIT_INPUT;
            }
            out.code
        }
        Err(e) => {
            eprintln!("barylab: {e}");
            error_code(&e)
        }
    }
}
