//! The `grasscurve` command line.
//!
//! Every command computes its whole result before touching the output path,
//! and files are written to a temporary sibling and renamed into place, so a
//! failed run never leaves a partial file behind.

use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use grasscurve_core::curve::{LENGTH_TOL, ROOT_MERGE_TOL};
use grasscurve_core::io::{parse_curve, parse_family, parse_sample};
use grasscurve_core::random::{random_curve, stream_rng, DEFAULT_SEED};
use grasscurve_core::verify::{run_suite, SuiteConfig};
use grasscurve_core::{atomicity_report_with_tol, flow_ensemble, flow_length_with_tol, LinearCurve};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "grasscurve", version, about = "Linear curves in Grassmannians, flow trajectories and atomicity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Length, speed, curvature, partition and monotonicity of one curve.
    CurveAnalyze(CurveArgs),
    /// Total length of a curve over the whole parameter line.
    CurveLength(CurveArgs),
    /// Roots of the determinant polynomial and the intervals between them.
    CurvePartition(CurveArgs),
    /// Length of the flow trajectory of one fibre map.
    FlowLength(FlowArgs),
    /// Flow lengths over a seeded ensemble of random complex maps.
    FlowEnsemble(EnsembleArgs),
    /// Fibre lengths of a map family over a torus grid.
    Atomicity(AtomicityArgs),
    /// Run the property suite; exits 1 if any property fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    out: Output,
    /// Curve JSON: {"p", "q", "E", "D"} with row-major (p+q) x p matrices.
    #[arg(long, conflicts_with_all = ["p", "q"], required_unless_present_all = ["p", "q"])]
    input: Option<PathBuf>,
    /// Draw a random curve in G(p, p+q) instead of reading one.
    #[arg(long, requires = "q")]
    p: Option<usize>,
    #[arg(long, requires = "p")]
    q: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = LENGTH_TOL, value_parser = positive)]
    tol_length: f64,
    /// Roots closer than this are merged.
    #[arg(long, default_value_t = ROOT_MERGE_TOL, value_parser = positive)]
    tol_root: f64,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[command(flatten)]
    out: Output,
    /// Fibre map JSON, complex {"m", "n", "re", "im"} or {"real_debug": true, "p", "q", "A"}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = LENGTH_TOL, value_parser = positive)]
    tol_length: f64,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[command(flatten)]
    out: Output,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Number of random maps.
    #[arg(long, default_value_t = 1000)]
    ensemble: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = LENGTH_TOL, value_parser = positive)]
    tol_length: f64,
}

#[derive(Debug, Args)]
struct AtomicityArgs {
    #[command(flatten)]
    out: Output,
    /// Family JSON with a grid and inline samples or a named generator.
    #[arg(long)]
    input: PathBuf,
    /// Override the grid of a generated family, e.g. `128` or `32x32`.
    #[arg(long)]
    grid: Option<String>,
    /// Also write the JSON summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = LENGTH_TOL, value_parser = positive)]
    tol_length: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    out: Output,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest p and q drawn for random curves.
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
    /// Smaller ensembles for a quick run.
    #[arg(long)]
    reduced: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
enum CliError {
    Input(String),
    SuiteFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Input(msg) => f.write_str(msg),
            Self::SuiteFailed => f.write_str("property suite failed"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::SuiteFailed => EXIT_SUITE_FAILURE,
        }
    }
}

impl From<grasscurve_core::Error> for CliError {
    fn from(e: grasscurve_core::Error) -> Self {
        Self::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("grasscurve: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::CurveAnalyze(a) => {
            let curve = load_curve(&a)?;
            let report = curve.analyze_with(a.tol_length, a.tol_root)?;
            emit(&a.out.output, json_only(a.out.format, &report)?)
        }
        Command::CurveLength(a) => {
            let curve = load_curve(&a)?;
            let length = curve.charts()?.total_length(a.tol_length)?;
            let body = match a.out.format {
                Format::Json => json(&LengthOut { length })?,
                Format::Csv => csv_rows(&["length"], [vec![length.to_string()]])?,
            };
            emit(&a.out.output, body)
        }
        Command::CurvePartition(a) => {
            let curve = load_curve(&a)?;
            let part = curve.partition_with_tol(a.tol_root)?;
            let body = match a.out.format {
                Format::Json => json(&part)?,
                Format::Csv => csv_rows(
                    &["lo", "hi"],
                    part.intervals.iter().map(|i| vec![bound(i.lo), bound(i.hi)]),
                )?,
            };
            emit(&a.out.output, body)
        }
        Command::FlowLength(a) => {
            let sample = parse_sample(&read(&a.input)?).map_err(|e| bad_input(&a.input, e))?;
            let length = flow_length_with_tol(&sample, a.tol_length)?;
            let body = match a.out.format {
                Format::Json => json(&LengthOut { length })?,
                Format::Csv => csv_rows(&["length"], [vec![length.to_string()]])?,
            };
            emit(&a.out.output, body)
        }
        Command::FlowEnsemble(a) => {
            let ens = flow_ensemble(a.seed, a.m, a.n, a.ensemble, a.tol_length)?;
            let body = match a.out.format {
                Format::Json => json(&ens)?,
                Format::Csv => csv_rows(
                    &["index", "length"],
                    ens.lengths.iter().enumerate().map(|(i, l)| vec![i.to_string(), l.to_string()]),
                )?,
            };
            emit(&a.out.output, body)
        }
        Command::Atomicity(a) => {
            let described = parse_family(&read(&a.input)?).map_err(|e| bad_input(&a.input, e))?;
            let grid = a.grid.as_deref().map(parse_grid).transpose()?;
            let family = described.to_family(grid)?;
            let report = atomicity_report_with_tol(&family, a.tol_length)?;
            let summary = json(&report)?;
            let body = match a.out.format {
                Format::Json => summary.clone(),
                Format::Csv => {
                    let g = family.grid();
                    let mut header: Vec<String> = (0..g.dim()).map(|k| format!("x{k}")).collect();
                    header.push("length".into());
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    csv_rows(
                        &header,
                        report.lengths.iter().enumerate().map(|(i, l)| {
                            let mut row: Vec<String> = g.coords(i).iter().map(f64::to_string).collect();
                            row.push(l.to_string());
                            row
                        }),
                    )?
                }
            };
            emit(&a.out.output, body)?;
            if let Some(path) = &a.summary {
                write_atomically(path, &summary)?;
            }
            Ok(())
        }
        Command::Verify(a) => {
            if a.out.format != Format::Json {
                return Err(CliError::Input("verify only writes JSON".into()));
            }
            if a.max_dim == 0 {
                return Err(CliError::Input("--max-dim must be at least 1".into()));
            }
            let cfg = if a.reduced {
                SuiteConfig::reduced(a.seed, a.max_dim)
            } else {
                SuiteConfig::full(a.seed, a.max_dim)
            };
            let summary = run_suite(&cfg);
            for p in &summary.properties {
                eprintln!("{p}");
            }
            emit(&a.out.output, json(&summary)?)?;
            if summary.all_passed {
                Ok(())
            } else {
                Err(CliError::SuiteFailed)
            }
        }
    }
}

#[derive(Serialize)]
struct LengthOut {
    length: f64,
}

fn load_curve(a: &CurveArgs) -> CliResult<LinearCurve> {
    match (&a.input, a.p, a.q) {
        (Some(path), _, _) => parse_curve(&read(path)?).map_err(|e| bad_input(path, e)),
        (None, Some(p), Some(q)) if p > 0 && q > 0 => Ok(random_curve(&mut stream_rng(a.seed, 0), p, q)),
        _ => Err(CliError::Input("--p and --q must be positive".into())),
    }
}

fn parse_grid(s: &str) -> CliResult<Vec<usize>> {
    s.split('x')
        .map(|part| match part.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Input(format!("bad grid {s:?}; expected e.g. 64 or 32x32"))),
        })
        .collect()
}

fn bad_input(path: &Path, e: grasscurve_core::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn bound(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn json_only<T: Serialize>(format: Format, value: &T) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => json(value),
        Format::Csv => Err(CliError::Input("this command only writes JSON".into())),
    }
}

fn csv_rows<R>(header: &[&str], rows: R) -> CliResult<Vec<u8>>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let fail = |e: csv::Error| CliError::Input(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

fn emit(output: &Option<PathBuf>, body: Vec<u8>) -> CliResult<()> {
    match output {
        Some(path) => write_atomically(path, &body),
        None => io::stdout()
            .write_all(&body)
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

fn write_atomically(path: &Path, body: &[u8]) -> CliResult<()> {
    let fail = |e: io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(body).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
