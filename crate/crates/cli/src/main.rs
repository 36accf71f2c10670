//! `fracspec`: Caputo derivatives, FSGIM caching, Bagley-Torvik solves and
//! convergence sweeps from the command line. Output is CSV on stdout.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "fracspec",
    version,
    about = "Spectral Caputo derivatives and fractional BVP solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate D^alpha f at a list of points.
    Caputo(CaputoArgs),
    /// Build an FSGIM and store it in the cache format.
    Fsgim(FsgimArgs),
    /// Solve a Bagley-Torvik problem described by a JSON file.
    SolveBt(SolveArgs),
    /// Error table over (lambda, n) against the closed-form derivative.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Caputo order, alpha > 0.
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Gegenbauer index of the interpolation grid.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lambda: f64,
    /// Interpolant degree.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Gegenbauer index of the quadrature grid.
    #[arg(long = "lambda-q", default_value_t = 0.5, allow_hyphen_values = true)]
    lambda_q: f64,
    /// Quadrature degree.
    #[arg(long = "n-q", default_value_t = 15)]
    n_q: usize,
    /// Comma-separated evaluation points in [0, 1].
    #[arg(long, value_parser = parse_list::<f64>, default_value = "0,0.25,0.5,0.75,1")]
    points: FloatList,
}

#[derive(Args, Debug)]
struct CaputoArgs {
    /// monomial:N, exp:beta, poly:c0,c1,...
    #[arg(long)]
    func: String,
    #[command(flatten)]
    grid: GridArgs,
    /// Add closed-form oracle and absolute error columns.
    #[arg(long = "compare-oracle")]
    compare_oracle: bool,
    /// Reuse FSGIMs stored here (defaults to FRACSPEC_CACHE_DIR).
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FsgimArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Cache file to read or write.
    #[arg(long, conflicts_with = "cache_dir")]
    out: Option<PathBuf>,
    /// Cache directory (defaults to FRACSPEC_CACHE_DIR).
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Problem JSON file.
    #[arg(long)]
    problem: PathBuf,
    /// Number of equispaced output points on [0, 1].
    #[arg(long = "eval-points", default_value_t = 50)]
    eval_points: usize,
    /// Exact solution for error reporting (monomial:N, exp:beta, poly:..., x^2, 1+x, x^2-x).
    #[arg(long)]
    exact: Option<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    func: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Comma-separated lambda values.
    #[arg(long, value_parser = parse_list::<f64>, allow_hyphen_values = true, default_value = "0.5")]
    lambdas: FloatList,
    /// Degree range `lo..hi` (inclusive) or a comma list.
    #[arg(long, value_parser = parse_degrees)]
    n: DegreeList,
    #[arg(long = "lambda-q", default_value_t = 0.5, allow_hyphen_values = true)]
    lambda_q: f64,
    #[arg(long = "n-q", default_value_t = 15)]
    n_q: usize,
    #[arg(long, value_parser = parse_list::<f64>, default_value = "0.5")]
    points: FloatList,
    /// Run cells one at a time.
    #[arg(long)]
    sequential: bool,
}

type FloatList = Vec<f64>;
type DegreeList = Vec<usize>;

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<Vec<T>, String>>()
        .and_then(|v| if v.is_empty() { Err("empty list".into()) } else { Ok(v) })
}

fn parse_degrees(s: &str) -> Result<Vec<usize>, String> {
    let v: Vec<usize> = match s.split_once("..") {
        Some((lo, hi)) => {
            let lo: usize = lo.trim().parse().map_err(|_| format!("bad range start `{lo}`"))?;
            let hi: usize = hi.trim().parse().map_err(|_| format!("bad range end `{hi}`"))?;
            (lo..=hi).collect()
        }
        None => parse_list(s)?,
    };
    if v.is_empty() {
        Err(format!("degree range `{s}` is empty"))
    } else {
        Ok(v)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Caputo(a) => commands::caputo(a),
        Command::Fsgim(a) => commands::fsgim(a),
        Command::SolveBt(a) => commands::solve_bt(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
