//! `steiner`: solve configurations, enumerate types, and run the wall,
//! perturbation and codirection experiments.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 size limit, 4 no wall, 5 codirected
//! pair found.

mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use steiner_api::{AppState, DEFAULT_PORT};
use steiner_core::ambiguity::{codirection_harness, find_wall, perturbation_experiment, WallOptions, WALL_TOLERANCE};
use steiner_core::format::{ConfigFile, SolveResultJson, TypeEntryJson, TypeJson, WallHitJson};
use steiner_core::geom::LENGTH_EPS;
use steiner_core::solver::solve_with;
use steiner_core::topology::{enumerate_full_types_with_cap, enumerate_types_with_cap, DEFAULT_TYPE_CAP};
use steiner_core::{Configuration, SolveOptions};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Invalid { path: PathBuf, source: steiner_core::Error },
    #[error(transparent)]
    Core(#[from] steiner_core::Error),
    #[error("{count} codirected pairs found; written to {}", dump.display())]
    Counterexample { count: usize, dump: PathBuf },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use steiner_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Invalid { .. } => 2,
            CliError::Counterexample { .. } => 5,
            CliError::Core(e) => match e {
                E::LimitExceeded { .. } => 3,
                E::NoWall => 4,
                E::DegenerateInput(_) | E::Precondition(_) | E::InvalidType(_) | E::DegeneratePath { .. } => 2,
                _ => 1,
            },
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// `println!` that ends the process quietly when the reader has gone away.
macro_rules! out {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn emit(args: std::fmt::Arguments) {
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{args}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

#[derive(Debug, Parser)]
#[command(name = "steiner", version, about = "Exact Euclidean Steiner minimal trees")]
struct Cli {
    /// Largest number of terminals to enumerate types for.
    #[arg(long, global = true, env = "STEINER_TYPE_CAP", default_value_t = DEFAULT_TYPE_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal trees of the configuration in FILE.
    Solve {
        file: PathBuf,
        /// Lengths within this of the best count as minimal.
        #[arg(long, default_value_t = LENGTH_EPS)]
        tol: f64,
        /// List every realizable type, not only the minimal ones.
        #[arg(long)]
        all_candidates: bool,
        /// Draw the minimal trees to this SVG file.
        #[arg(long, value_name = "OUT")]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Types on n labeled terminals.
    Enumerate {
        n: usize,
        /// Only full types (every terminal a leaf).
        #[arg(long)]
        full_only: bool,
        #[arg(long)]
        json: bool,
    },
    /// Equal-length point on the straight path between two configurations.
    Wall {
        from: PathBuf,
        to: PathBuf,
        #[arg(long, default_value_t = WALL_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Re-solve Gaussian perturbations of an ambiguous configuration.
    Perturb {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        sigma: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Look for two distinct full types leaving every terminal in the same direction.
    Codirection {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where counterexamples are written.
        #[arg(long, default_value = "codirection-counterexamples.json")]
        dump: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Refuse cross-origin browser requests.
        #[arg(long)]
        no_cors: bool,
    },
}

fn load(path: &Path) -> CliResult<Configuration> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
    file.to_configuration().map_err(|source| CliError::Invalid { path: path.into(), source })
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.into(), source })
}

fn check_cap(n: usize, cap: usize) -> CliResult<()> {
    if n > cap {
        return Err(steiner_core::Error::LimitExceeded { n, cap }.into());
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn code(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn solve(cap: usize, file: &Path, tol: f64, all: bool, svg_out: Option<&Path>, as_json: bool) -> CliResult<()> {
    let p = load(file)?;
    let r = solve_with(&p, &SolveOptions { tie_tolerance: tol, cap })?;
    if let Some(out) = svg_out {
        let trees: Vec<(String, _)> = r.minimal().iter().map(|c| (code(&c.code), &c.tree)).collect();
        write(out, &svg::render(&p, &trees))?;
    }
    if as_json {
        let top_k = if all { None } else { Some(r.n_minimal) };
        out!("{}", pretty(&SolveResultJson::new(&r, top_k, false)));
        return Ok(());
    }
    out!("points: {}", p.len());
    out!("length: {:.9}", r.min_length());
    out!("ambiguous: {}", r.ambiguous);
    out!("minimal types: {}", r.n_minimal);
    for c in r.minimal() {
        out!("  {} {:.9}", code(&c.code), c.length);
    }
    match r.runner_up_gap() {
        Some(g) => out!("runner_up_gap: {g:.9}"),
        None => out!("runner_up_gap: none"),
    }
    if all {
        out!("candidates: {}", r.candidates.len());
        for c in &r.candidates {
            out!("  {} {:.9}", code(&c.code), c.length);
        }
    }
    Ok(())
}

fn enumerate(cap: usize, n: usize, full_only: bool, as_json: bool) -> CliResult<()> {
    let types = if full_only { enumerate_full_types_with_cap(n, cap)? } else { enumerate_types_with_cap(n, cap)? };
    if as_json {
        let list: Vec<TypeEntryJson> = types.iter().map(TypeEntryJson::from).collect();
        out!("{}", pretty(&list));
        return Ok(());
    }
    out!("{} {}", types.len(), if types.len() == 1 { "type" } else { "types" });
    for t in &types {
        out!("{}", t.code_string());
    }
    Ok(())
}

fn wall(cap: usize, from: &Path, to: &Path, tol: f64, as_json: bool) -> CliResult<()> {
    let (a, b) = (load(from)?, load(to)?);
    check_cap(a.len(), cap)?;
    let hit = find_wall(&a, &b, None, &WallOptions { wall_tolerance: tol, ..Default::default() })?;
    if as_json {
        out!("{}", pretty(&WallHitJson::from(&hit)));
        return Ok(());
    }
    out!("t_star: {:.9}", hit.t_star);
    out!("types: {} {}", code(&hit.types.0.topology_code()), code(&hit.types.1.topology_code()));
    out!("lengths: {:.9} {:.9}", hit.lengths.0, hit.lengths.1);
    out!("gap: {:.9}", hit.gap);
    Ok(())
}

fn perturb(cap: usize, file: &Path, sigma: f64, trials: usize, seed: u64, format: Format) -> CliResult<()> {
    let p = load(file)?;
    check_cap(p.len(), cap)?;
    let report = perturbation_experiment(&p, sigma, trials, seed)?;
    match format {
        Format::Text => {
            out!("still_ambiguous: {}/{}", report.still_ambiguous(), report.rows.len());
            out!("fraction: {:.9}", report.fraction_still_ambiguous());
        }
        Format::Csv => out!("{}", report.to_csv().trim_end()),
        Format::Json => {
            let rows: Vec<_> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "trial": r.trial,
                        "seedOffset": r.seed_offset,
                        "ambiguous": r.ambiguous,
                        "minLength": r.min_length,
                        "runnerUpGap": r.runner_up_gap,
                    })
                })
                .collect();
            let v = json!({
                "sigma": sigma,
                "seed": seed,
                "trials": report.rows.len(),
                "stillAmbiguous": report.still_ambiguous(),
                "rows": rows,
            });
            out!("{}", pretty(&v));
        }
    }
    Ok(())
}

fn codirection(cap: usize, n: usize, trials: usize, seed: u64, dump: &Path, as_json: bool) -> CliResult<()> {
    check_cap(n, cap)?;
    let report = codirection_harness(n, trials, seed)?;
    if as_json {
        let v = json!({
            "n": n,
            "configurations": report.configurations,
            "pairsChecked": report.pairs_checked,
            "counterexamples": report.counterexamples.len(),
        });
        out!("{}", pretty(&v));
    } else {
        out!("configurations: {}", report.configurations);
        out!("pairs_checked: {}", report.pairs_checked);
        out!("counterexamples: {}", report.counterexamples.len());
    }
    if report.counterexamples.is_empty() {
        return Ok(());
    }
    let found: Vec<_> = report
        .counterexamples
        .iter()
        .map(|c| {
            json!({
                "points": ConfigFile::from_configuration(&c.config).points,
                "first": TypeJson::from(&c.first),
                "second": TypeJson::from(&c.second),
            })
        })
        .collect();
    write(dump, &pretty(&found))?;
    Err(CliError::Counterexample { count: found.len(), dump: dump.into() })
}

fn serve(cap: usize, port: u16, cors: bool) -> CliResult<()> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let rt = tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: "runtime".into(), source })?;
    rt.block_on(steiner_api::serve(port, AppState { cap }, cors))
        .map_err(|source| CliError::Io { path: format!("127.0.0.1:{port}").into(), source })
}

fn run(cli: Cli) -> CliResult<()> {
    let cap = cli.cap;
    match cli.command {
        Command::Solve { file, tol, all_candidates, svg, json } => {
            solve(cap, &file, tol, all_candidates, svg.as_deref(), json)
        }
        Command::Enumerate { n, full_only, json } => enumerate(cap, n, full_only, json),
        Command::Wall { from, to, tol, json } => wall(cap, &from, &to, tol, json),
        Command::Perturb { file, sigma, trials, seed, format } => perturb(cap, &file, sigma, trials, seed, format),
        Command::Codirection { n, trials, seed, dump, json } => codirection(cap, n, trials, seed, &dump, json),
        Command::Serve { port, no_cors } => serve(cap, port, !no_cors),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
