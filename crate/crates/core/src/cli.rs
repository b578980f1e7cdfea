//! Command line front end.
//!
//! ```text
//! spbvp solve     --problem linear --scheme f --n 32 --eps 2^-5 [--output sol.csv]
//! spbvp table     --problem cubic  --scheme g --k 6..11 --eps 2^-3,2^-10 [--format md]
//! spbvp residuals --problem linear --scheme f --n 256 --eps 2^-10
//! spbvp mesh-dump --n 64 --eps 2^-10 [--m 1]
//! ```
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 solver failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::convergence::{self, compute_cells, error_exact, ConvergenceError, ConvergenceReport};
use crate::mesh::{MeshError, ShishkinMesh};
use crate::newton::{solve, SolveConfig, SolveError};
use crate::problem::{cubic_example, linear_example, Problem};
use crate::scheme::{Scheme, SchemeCoefficients};

pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        let flag = match e {
            MeshError::InvalidN(_) => "--n",
            MeshError::InvalidEpsilon(_) => "--eps",
            MeshError::InvalidM(_) => "--m",
        };
        CliError::Usage(format!("{flag}: {e}"))
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Config(msg) => CliError::Usage(format!("--tol: {msg}")),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<ConvergenceError> for CliError {
    fn from(e: ConvergenceError) -> Self {
        match e {
            ConvergenceError::Solve { .. } | ConvergenceError::NonPositiveError(..) => {
                CliError::Solver(e.to_string())
            }
            ConvergenceError::Mesh(m) => m.into(),
            ConvergenceError::InvalidK(_) | ConvergenceError::EmptyRange => {
                CliError::Usage(format!("--k: {e}"))
            }
            ConvergenceError::MissingExact(_) => CliError::Usage(format!("--problem: {e}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spbvp",
    version,
    about = "Fitted schemes on Shishkin meshes for ε² y'' = f(x, y), y(0) = y(1) = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write nodal values as CSV.
    Solve(SolveArgs),
    /// Convergence table over N = 2^k for one or more ε.
    Table(TableArgs),
    /// Per-node |residual| of the exact solution.
    Residuals(SolveArgs),
    /// Dump mesh nodes and steps as CSV.
    MeshDump(MeshArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Linear,
    Cubic,
}

impl ProblemKind {
    pub fn problem(self) -> Problem {
        match self {
            ProblemKind::Linear => linear_example(),
            ProblemKind::Cubic => cubic_example(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    F,
    G,
}

impl From<SchemeKind> for Scheme {
    fn from(s: SchemeKind) -> Self {
        match s {
            SchemeKind::F => Scheme::F,
            SchemeKind::G => Scheme::G,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value = "linear")]
    pub problem: ProblemKind,
    #[arg(long, value_enum, default_value = "f")]
    pub scheme: SchemeKind,
    /// Number of intervals; divisible by 4 and at least 8.
    #[arg(long)]
    pub n: usize,
    /// Perturbation parameter, as `2^-k` or a decimal.
    #[arg(long, value_parser = parse_epsilon)]
    pub eps: f64,
    /// Newton tolerance on the max-norm residual.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum, default_value = "linear")]
    pub problem: ProblemKind,
    #[arg(long, value_enum, default_value = "f")]
    pub scheme: SchemeKind,
    /// Range of exponents `kmin..kmax` (inclusive), N = 2^k.
    #[arg(long, value_parser = parse_k_range, default_value = "6..11")]
    pub k: RangeInclusive<u32>,
    /// Comma-separated ε values, each `2^-k` or a decimal.
    #[arg(long, value_parser = parse_epsilon, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = parse_epsilon)]
    pub eps: f64,
    /// Lower bound on f_y entering the transition point.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Accepts `2^-10`, `2^(-10)`, `2^3` and plain decimals such as `1e-3`.
pub fn parse_epsilon(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = if let Some(exp) = s.strip_prefix("2^") {
        let exp = exp.trim_start_matches('(').trim_end_matches(')');
        let k: i32 = exp
            .parse()
            .map_err(|_| format!("expected `2^-k` with integer k or a decimal, got `{s}`"))?;
        f64::from(k).exp2()
    } else {
        s.parse::<f64>()
            .map_err(|_| format!("expected `2^-k` or a decimal, got `{s}`"))?
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("epsilon must be positive and finite, got `{s}`"))
    }
}

/// Accepts `6..11` (inclusive) or a single `6`.
pub fn parse_k_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let bad = || format!("expected `kmin..kmax` with integers in [3, 20], got `{s}`");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse::<u32>().map_err(|_| bad())?,
            b.trim().trim_start_matches('=').parse::<u32>().map_err(|_| bad())?,
        ),
        None => {
            let k = s.trim().parse::<u32>().map_err(|_| bad())?;
            (k, k)
        }
    };
    if lo > hi || lo < convergence::MIN_K || hi > convergence::MAX_K {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn config(tol: f64) -> SolveConfig {
    SolveConfig {
        tol,
        ..SolveConfig::default()
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Table(args) => cmd_table(&args),
        Command::Residuals(args) => cmd_residuals(&args),
        Command::MeshDump(args) => cmd_mesh_dump(&args),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let problem = args.problem.problem();
    let mesh = ShishkinMesh::build(args.n, args.eps, problem.m())?;
    let sol = solve(&problem, &mesh, args.scheme.into(), &config(args.tol))?;

    let mut out = open_output(&args.output)?;
    if problem.has_exact() {
        writeln!(out, "x,y_numeric,y_exact")?;
    } else {
        writeln!(out, "x,y_numeric")?;
    }
    for ((&x, &c), &y) in mesh.points().iter().zip(mesh.complements()).zip(&sol.values) {
        match problem.exact_with_complement(x, c, args.eps) {
            Some(ye) => writeln!(out, "{x:.16e},{y:.16e},{ye:.16e}")?,
            None => writeln!(out, "{x:.16e},{y:.16e}")?,
        }
    }
    out.flush()?;
    drop(out);

    let mut summary = format!(
        "problem={} scheme={} N={} eps={} iterations={} residual={}",
        problem.name(),
        sol.scheme,
        args.n,
        convergence::format_epsilon(args.eps),
        sol.iterations,
        convergence::format_sci(sol.final_residual)
    );
    if problem.has_exact() {
        let e = error_exact(&sol, &problem)?;
        summary.push_str(&format!(" E_N={}", convergence::format_sci(e)));
    }
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

pub fn cmd_table(args: &TableArgs) -> Result<(), CliError> {
    let problem = args.problem.problem();
    let scheme: Scheme = args.scheme.into();
    let cfg = config(args.tol);
    cfg.validate()?;

    let cells: Vec<_> = args
        .eps
        .par_iter()
        .map(|&eps| compute_cells(&problem, scheme, eps, args.k.clone(), &cfg))
        .collect();

    let mut reports = Vec::with_capacity(cells.len());
    let mut failure = None;
    for (&eps, cells) in args.eps.iter().zip(cells) {
        let mut errors = Vec::new();
        for (k, cell) in cells {
            match cell {
                Ok(e) => errors.push((k, e)),
                Err(err) => {
                    failure = Some((eps, k, err));
                    break;
                }
            }
        }
        reports.push(ConvergenceReport::from_errors(problem.name(), scheme, eps, &errors)?);
        if failure.is_some() {
            break;
        }
    }

    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Csv => {
            writeln!(out, "{}", ConvergenceReport::csv_header())?;
            for r in &reports {
                write!(out, "{}", r.to_csv_rows())?;
            }
            if let Some((eps, k, _)) = &failure {
                writeln!(
                    out,
                    "{},{},{},{},FAILED,-",
                    problem.name(),
                    scheme,
                    convergence::format_epsilon(*eps),
                    1usize << k
                )?;
            }
        }
        Format::Md => {
            write!(out, "{}", convergence::to_markdown(&reports))?;
            if let Some((eps, k, _)) = &failure {
                writeln!(
                    out,
                    "\nFAILED at eps={} N={}",
                    convergence::format_epsilon(*eps),
                    1usize << k
                )?;
            }
        }
    }
    out.flush()?;
    match failure {
        Some((_, _, err)) => Err(err.into()),
        None => Ok(()),
    }
}

pub fn cmd_residuals(args: &SolveArgs) -> Result<(), CliError> {
    let problem = args.problem.problem();
    if !problem.has_exact() {
        return Err(ConvergenceError::MissingExact(problem.name().to_string()).into());
    }
    let mesh = ShishkinMesh::build(args.n, args.eps, problem.m())?;
    let coeffs = SchemeCoefficients::new(&mesh, problem.gamma())
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let exact: Vec<f64> = mesh
        .points()
        .iter()
        .zip(mesh.complements())
        .map(|(&x, &c)| problem.exact_with_complement(x, c, args.eps).unwrap_or(0.0))
        .collect();
    let scheme: Scheme = args.scheme.into();
    let res = scheme
        .residual(&problem, &mesh, &coeffs, &exact)
        .map_err(|e| CliError::Solver(e.to_string()))?;

    let mut out = open_output(&args.output)?;
    writeln!(out, "i,x,abs_residual")?;
    for (i, (&x, r)) in mesh.points().iter().zip(&res.values).enumerate() {
        writeln!(out, "{i},{x:.16e},{:.16e}", r.abs())?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_mesh_dump(args: &MeshArgs) -> Result<(), CliError> {
    let mesh = ShishkinMesh::build(args.n, args.eps, args.m)?;
    let mut out = open_output(&args.output)?;
    writeln!(out, "index,x,h")?;
    for (i, &x) in mesh.points().iter().enumerate() {
        if i == 0 {
            writeln!(out, "0,{x:.16e},")?;
        } else {
            writeln!(out, "{i},{x:.16e},{:.16e}", mesh.steps()[i - 1])?;
        }
    }
    out.flush()?;
    Ok(())
}
