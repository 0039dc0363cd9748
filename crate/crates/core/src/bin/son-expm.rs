use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use son_expm::basis::{decompose, matrix_from_rows, norm, AlgebraVector, SkewMatrix};
use son_expm::bench::run_bench;
use son_expm::conjugacy::torus_angles;
use son_expm::error::{Error, ErrorKind};
use son_expm::expm::{evaluate, ExpmOptions, Method, RotationMatrix};
use son_expm::g2::{check_algebra_constraint, check_automorphism, embed_g2, expm_g2_with, G2Vector};
use son_expm::invariants::{compute_invariants, region_area_mc, region_contains, REGION_TOL};
use son_expm::roots::spectral_roots;
use son_expm::sample::{SampleMode, Sampler};

#[derive(Parser)]
#[command(name = "son-expm", version, about = "Closed-form exponentials of so(n), 2 <= n <= 9")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponential of one algebra element.
    Exp {
        #[command(flatten)]
        input: VectorInput,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
    },
    /// Normalized invariants and region membership (JSON lines for multi-document input).
    Invariants {
        #[command(flatten)]
        input: VectorInput,
        /// Additive tolerance for region membership.
        #[arg(long, default_value_t = REGION_TOL)]
        tol: f64,
    },
    /// Roots of the reduced characteristic polynomial.
    Roots {
        #[command(flatten)]
        input: VectorInput,
    },
    /// Maximal-torus angles and both trace evaluations.
    Angles {
        #[command(flatten)]
        input: VectorInput,
        /// Report angles reduced into [0, 2pi).
        #[arg(long)]
        fold_angles: bool,
    },
    /// Seeded random algebra elements as JSON lines.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Gaussian)]
        mode: ModeArg,
        /// Norm for sphere mode, largest norm for ball mode.
        #[arg(long, default_value_t = std::f64::consts::PI)]
        radius: f64,
    },
    /// Monte Carlo area of the allowed invariant region (n = 6, 7).
    Region {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Timing report for the closed form and both reference routes.
    Bench {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8,9")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        repetitions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The G2 subgroup of SO(7).
    G2 {
        #[command(subcommand)]
        command: G2Command,
    },
}

#[derive(Subcommand)]
enum G2Command {
    /// Exponential of a 14-parameter g2 element.
    Exp {
        #[command(flatten)]
        input: G2Input,
    },
    /// The 21 so(7) coefficients of a g2 element.
    Embed {
        #[command(flatten)]
        input: G2Input,
    },
    /// Constraint residual of an antisymmetric 7x7 matrix, or automorphism
    /// residual of any other 7x7 matrix.
    Check {
        /// JSON file with a list of rows, or `-` for stdin.
        #[arg(long)]
        input: String,
    },
}

#[derive(Args)]
struct VectorInput {
    #[arg(long, requires = "v", conflicts_with = "input")]
    n: Option<usize>,
    /// Comma-separated coefficients.
    #[arg(long, requires = "n", allow_hyphen_values = true)]
    v: Option<String>,
    /// JSON file with `{"n": .., "v": [..]}` documents, or `-` for stdin.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args)]
struct G2Input {
    /// 14 comma-separated parameters.
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    w: Option<String>,
    /// JSON file with a list of 14 numbers, or `-` for stdin.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Taylor,
    Companion,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Gaussian,
    Sphere,
    Ball,
}

/// CLI failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Usage => 2,
            ErrorKind::Invariant => 3,
            ErrorKind::Numerical => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type CliResult<T> = Result<T, Failure>;

fn read_source(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("reading {path}: {e}")))
    }
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| usage(format!("not a number: {t:?}"))))
        .collect()
}

/// All vectors named by the flags; files and stdin may hold several JSON
/// documents.
fn vectors(input: &VectorInput) -> CliResult<Vec<AlgebraVector>> {
    match (&input.n, &input.v, &input.input) {
        (Some(n), Some(v), None) => Ok(vec![AlgebraVector::new(*n, parse_list(v)?)?]),
        (None, None, Some(path)) => {
            let text = read_source(path)?;
            let docs: Vec<AlgebraVector> = serde_json::Deserializer::from_str(&text)
                .into_iter::<AlgebraVector>()
                .collect::<Result<_, _>>()
                .map_err(|e| usage(format!("malformed input: {e}")))?;
            if docs.is_empty() {
                return Err(usage("input holds no vectors"));
            }
            Ok(docs)
        }
        _ => Err(usage("give either --n with --v, or --input")),
    }
}

fn g2_vector(input: &G2Input) -> CliResult<G2Vector> {
    match (&input.w, &input.input) {
        (Some(w), None) => Ok(G2Vector::new(parse_list(w)?)?),
        (None, Some(path)) => {
            let text = read_source(path)?;
            serde_json::from_str(&text).map_err(|e| usage(format!("malformed input: {e}")))
        }
        _ => Err(usage("give either --w or --input")),
    }
}

struct Output {
    out: BufWriter<io::Stdout>,
}

impl Output {
    fn emit<T: Serialize>(&mut self, value: &T) -> CliResult<()> {
        let s = serde_json::to_string(value).map_err(|e| Failure { code: 4, message: e.to_string() })?;
        writeln!(self.out, "{s}").map_err(|e| Failure { code: 4, message: e.to_string() })
    }

    /// One document, or JSON lines when there are several.
    fn emit_all(&mut self, values: Vec<Value>) -> CliResult<()> {
        values.iter().try_for_each(|v| self.emit(v))
    }
}

fn exp_document(av: &AlgebraVector, method: Method, opts: &ExpmOptions) -> CliResult<Value> {
    let e = evaluate(av, method, opts)?;
    Ok(json!({
        "n": av.n(),
        "V": norm(av),
        "method": e.method,
        "degenerate": e.degenerate(),
        "orthogonality_residual": e.rotation.orthogonality_residual(),
        "R": serde_json::to_value(&e.rotation).map_err(|e| Failure { code: 4, message: e.to_string() })?["R"],
        "coefficients": e.coefficients.map(|c| c.c),
    }))
}

fn run(cli: Cli, out: &mut Output) -> CliResult<()> {
    let opts = ExpmOptions::from_env()?;
    match cli.command {
        Command::Exp { input, method } => {
            let method = match method {
                MethodArg::Closed => Method::Closed,
                MethodArg::Taylor => Method::Taylor,
                MethodArg::Companion => Method::Companion,
            };
            let docs = vectors(&input)?.iter().map(|av| exp_document(av, method, &opts)).collect::<CliResult<_>>()?;
            out.emit_all(docs)
        }
        Command::Invariants { input, tol } => {
            let docs = vectors(&input)?
                .iter()
                .map(|av| {
                    let inv = compute_invariants(av)?;
                    let mut doc = serde_json::to_value(&inv).expect("invariants serialize");
                    doc["in_region"] = json!(region_contains(&inv, tol));
                    Ok(doc)
                })
                .collect::<CliResult<_>>()?;
            out.emit_all(docs)
        }
        Command::Roots { input } => {
            let docs = vectors(&input)?
                .iter()
                .map(|av| {
                    let rs = spectral_roots(&compute_invariants(av)?, opts.delta)?;
                    Ok(serde_json::to_value(&rs).expect("roots serialize"))
                })
                .collect::<CliResult<_>>()?;
            out.emit_all(docs)
        }
        Command::Angles { input, fold_angles } => {
            let docs = vectors(&input)?
                .iter()
                .map(|av| {
                    let t = torus_angles(av)?;
                    let direct = evaluate(av, Method::Closed, &opts)?.rotation.matrix.trace();
                    let phi = if fold_angles { t.folded() } else { t.phi.clone() };
                    Ok(json!({
                        "n": t.n,
                        "V": t.v_norm,
                        "phi": phi,
                        "trace_closed": t.trace(),
                        "trace_direct": direct,
                    }))
                })
                .collect::<CliResult<_>>()?;
            out.emit_all(docs)
        }
        Command::Sample { n, count, seed, mode, radius } => {
            let mode = match mode {
                ModeArg::Gaussian => SampleMode::Gaussian,
                ModeArg::Sphere | ModeArg::Ball if !(radius.is_finite() && radius > 0.0) => {
                    return Err(usage("--radius must be positive"));
                }
                ModeArg::Sphere => SampleMode::Sphere(radius),
                ModeArg::Ball => SampleMode::Ball(radius),
            };
            let sampler = Sampler::new(n, seed, mode)?;
            for av in sampler.take(count as usize) {
                out.emit(&av)?;
            }
            Ok(())
        }
        Command::Region { n, samples, seed } => out.emit(&region_area_mc(n, samples, seed)?),
        Command::Bench { n, repetitions, seed } => out.emit(&run_bench(&n, repetitions, seed, &opts)?),
        Command::G2 { command } => match command {
            G2Command::Exp { input } => {
                let g = g2_vector(&input)?;
                let e = expm_g2_with(&g, &opts)?;
                let automorphism = check_automorphism(&e.rotation)?;
                out.emit(&json!({
                    "n": 7,
                    "method": e.method,
                    "orthogonality_residual": e.rotation.orthogonality_residual(),
                    "automorphism_residual": automorphism,
                    "R": serde_json::to_value(&e.rotation).expect("matrix serializes")["R"],
                }))
            }
            G2Command::Embed { input } => out.emit(&embed_g2(&g2_vector(&input)?)),
            G2Command::Check { input } => {
                let rows: Vec<Vec<f64>> = serde_json::from_str(&read_source(&input)?)
                    .map_err(|e| usage(format!("malformed matrix: {e}")))?;
                let m = matrix_from_rows(&rows)?;
                if m.nrows() != 7 || m.ncols() != 7 {
                    return Err(Error::Shape { n: 7, rows: m.nrows(), cols: m.ncols() }.into());
                }
                match SkewMatrix::new(m.clone()) {
                    Ok(skew) => {
                        let r = check_algebra_constraint(&decompose(&skew))?;
                        out.emit(&json!({ "kind": "algebra", "residual": r }))
                    }
                    Err(_) => {
                        let r = check_automorphism(&RotationMatrix { n: 7, matrix: m })?;
                        out.emit(&json!({ "kind": "automorphism", "residual": r }))
                    }
                }
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output { out: BufWriter::new(io::stdout()) };
    let result = run(cli, &mut out);
    let flushed = out.out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(f), _) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        (Ok(()), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}
