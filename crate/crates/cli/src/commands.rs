use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use fracspec::bagley_torvik::equispaced;
use fracspec::cache::{default_cache_dir, load_or_build, load_or_build_at, CacheKey, CacheStatus};
use fracspec::sweep::{rows_to_csv, SweepSpec};
use fracspec::{
    caputo_any_order, BagleyTorvikProblem, BasisParams, CaputoOrder, Execution, FracError, Grid, QuadratureRule,
    TestFunction,
};
use log::info;

use crate::{CaputoArgs, FsgimArgs, GridArgs, SolveArgs, SweepArgs};

/// A failed command with its exit code: 2 usage, 3 numerical, 4 I/O.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<FracError> for Failure {
    fn from(e: FracError) -> Self {
        let msg = e.to_string();
        match e {
            FracError::Io(_) => Failure::Io(msg),
            FracError::Domain(_)
            | FracError::UnknownFunction(_)
            | FracError::InvalidProblem(_)
            | FracError::IntegerOrder { .. }
            | FracError::LengthMismatch { .. } => Failure::Usage(msg),
            _ => Failure::Numerical(msg),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn emit(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn parse_function(s: &str) -> Result<TestFunction, Failure> {
    s.parse::<TestFunction>()
        .map_err(|e| Failure::Usage(format!("--func/--exact `{s}`: {e}")))
}

fn discretization(g: &GridArgs) -> Result<(Grid, QuadratureRule), Failure> {
    let grid = Grid::new(BasisParams::new(g.lambda, g.n)?)?;
    let rule = QuadratureRule::with_params(g.lambda_q, g.n_q)?;
    Ok((grid, rule))
}

fn key(g: &GridArgs) -> CacheKey {
    CacheKey {
        alpha: g.alpha,
        lambda: g.lambda,
        n: g.n,
        lambda_q: g.lambda_q,
        n_q: g.n_q,
        eval_points: g.points.clone(),
    }
}

fn report(status: &CacheStatus, path: &str) -> String {
    match status {
        CacheStatus::Hit => format!("cache hit: {path}"),
        CacheStatus::Built => format!("built: {path}"),
        CacheStatus::Rebuilt(why) => format!("rebuilt ({why}): {path}"),
    }
}

pub fn caputo(a: CaputoArgs) -> Outcome {
    let f = parse_function(&a.func)?;
    let g = &a.grid;
    let order = CaputoOrder::new(g.alpha)?;
    let (grid, rule) = discretization(g)?;
    let samples = grid.sample(|x| f.value(x));
    let cache_dir = a.cache_dir.clone().or_else(default_cache_dir);
    let values = match cache_dir {
        Some(dir) if !order.is_integer() => {
            let (op, status) = load_or_build(&dir, &key(g))?;
            info!(
                "{}",
                report(&status, &dir.join(key(g).file_name()).display().to_string())
            );
            op.apply(&samples)?
        }
        _ => caputo_any_order(g.alpha, &grid, &rule, &samples, &g.points)?,
    };

    let mut csv = String::from(if a.compare_oracle {
        "point,approximation,oracle,abs_error\n"
    } else {
        "point,approximation\n"
    });
    for (&t, &v) in g.points.iter().zip(&values) {
        if a.compare_oracle {
            let exact = f.exact_caputo(g.alpha, t)?;
            let _ = writeln!(csv, "{t},{},{exact},{:e}", v + 0.0, (v - exact).abs());
        } else {
            let _ = writeln!(csv, "{t},{}", v + 0.0);
        }
    }
    emit(&csv)
}

pub fn fsgim(a: FsgimArgs) -> Outcome {
    let order = CaputoOrder::new(a.grid.alpha)?;
    if order.is_integer() {
        return Err(FracError::IntegerOrder { alpha: order.alpha() }.into());
    }
    let k = key(&a.grid);
    let (path, built) = match (a.out, a.cache_dir.or_else(default_cache_dir)) {
        (Some(out), _) => {
            let r = load_or_build_at(&out, &k);
            (out, r)
        }
        (None, Some(dir)) => {
            let r = load_or_build(&dir, &k);
            (dir.join(k.file_name()), r)
        }
        (None, None) => {
            return Err(Failure::Usage(
                "give --out or --cache-dir, or set FRACSPEC_CACHE_DIR".into(),
            ))
        }
    };
    let shown = path.display().to_string();
    let (op, status) = built.map_err(|e| match Failure::from(e) {
        Failure::Io(m) => Failure::Io(format!("{shown}: {m}")),
        other => other,
    })?;
    emit(&format!(
        "{}\nrows={} cols={}\n",
        report(&status, &shown),
        op.matrix().rows(),
        op.matrix().cols()
    ))
}

pub fn solve_bt(a: SolveArgs) -> Outcome {
    let text = fs::read_to_string(&a.problem)
        .map_err(|e| Failure::Usage(format!("cannot read problem file {}: {e}", a.problem.display())))?;
    let problem = BagleyTorvikProblem::from_json(&text)?;
    let exact = a.exact.as_deref().map(parse_function).transpose()?;
    if a.eval_points == 0 {
        return Err(Failure::Usage("--eval-points must be at least 1".into()));
    }
    let sol = problem.solve()?;

    let mut csv = String::from(if exact.is_some() { "x,u,abs_error\n" } else { "x,u\n" });
    let mut max_err = 0.0f64;
    for x in equispaced(a.eval_points) {
        let u = sol.evaluate(x)?;
        match &exact {
            Some(f) => {
                let err = (u - f.value(x)).abs();
                max_err = max_err.max(err);
                let _ = writeln!(csv, "{x},{u},{err:e}");
            }
            None => {
                let _ = writeln!(csv, "{x},{u}");
            }
        }
    }
    let (b0, b1) = sol.boundary_residuals();
    let mut summary = format!(
        "residual_norm={:e}\nboundary_residuals={:e},{:e}\n",
        sol.residual_norm(),
        b0,
        b1
    );
    if exact.is_some() {
        let _ = writeln!(summary, "max_abs_error={max_err:e}");
    }
    match a.out {
        Some(path) => {
            write_file(&path, &csv)?;
            emit(&summary)
        }
        None => {
            emit(&csv)?;
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn sweep(a: SweepArgs) -> Outcome {
    let spec = SweepSpec {
        function: parse_function(&a.func)?,
        alpha: a.alpha,
        lambdas: a.lambdas,
        degrees: a.n,
        lambda_q: a.lambda_q,
        n_q: a.n_q,
        points: a.points,
    };
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let rows = spec.run(exec)?;
    emit(&rows_to_csv(&rows))
}
