//! Error estimates, convergence rates and table assembly.
//!
//! With a closed-form solution the error is the nodal max-norm difference.
//! Without one, the solution on `N` intervals is compared with the solution
//! on a `2N`-interval mesh sharing the same transition point (double-mesh
//! estimate). Rates use the log-corrected ratio
//! `Ord = (ln E_N - ln E_2N) / ln(2k/(k+1))` with `N = 2^k`, which reads 2 for
//! errors decaying like `(ln N / N)²`.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use thiserror::Error;

use crate::mesh::{MeshError, ShishkinMesh};
use crate::newton::{solve, DiscreteSolution, SolveConfig, SolveError};
use crate::problem::Problem;
use crate::scheme::Scheme;

pub const MIN_K: u32 = 3;
pub const MAX_K: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error("problem '{0}' has no exact solution")]
    MissingExact(String),
    #[error("k must lie in [{MIN_K}, {MAX_K}], got {0}")]
    InvalidK(u32),
    #[error("empty k range")]
    EmptyRange,
    #[error("errors must be positive, got E_N = {0:e}, E_2N = {1:e}")]
    NonPositiveError(f64, f64),
    #[error("solution on N = {n} failed: {source}")]
    Solve {
        n: usize,
        #[source]
        source: SolveError,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// `max_i |y(x_i) - values_i|`.
pub fn error_exact(solution: &DiscreteSolution, problem: &Problem) -> Result<f64, ConvergenceError> {
    if !problem.has_exact() {
        return Err(ConvergenceError::MissingExact(problem.name().to_string()));
    }
    let mesh = &solution.mesh;
    let eps = mesh.epsilon();
    let err = mesh
        .points()
        .iter()
        .zip(mesh.complements())
        .zip(&solution.values)
        .map(|((&x, &c), &v)| {
            let y = problem
                .exact_with_complement(x, c, eps)
                .expect("exact solution checked above");
            (y - v).abs()
        })
        .fold(0.0, f64::max);
    Ok(err)
}

/// Values of `fine` at the nodes of `base`.
///
/// A base node that coincides with a fine node (to `1e-14`) takes its value
/// directly; otherwise the two neighbouring fine values are interpolated
/// linearly. Returns the sampled values and how many nodes needed
/// interpolation.
pub fn sample_at_nodes(base: &ShishkinMesh, fine: &DiscreteSolution) -> (Vec<f64>, usize) {
    let xf = fine.mesh.points();
    let ratio = fine.mesh.n() / base.n().max(1);
    let mut interpolated = 0;
    let values = base
        .points()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let guess = i * ratio;
            if ratio * base.n() == fine.mesh.n() && (xf[guess] - x).abs() <= 1e-14 {
                return fine.values[guess];
            }
            let j = xf.partition_point(|&p| p < x);
            if j < xf.len() && (xf[j] - x).abs() <= 1e-14 {
                return fine.values[j];
            }
            interpolated += 1;
            let j = j.clamp(1, xf.len() - 1);
            let (x0, x1) = (xf[j - 1], xf[j]);
            let w = (x - x0) / (x1 - x0);
            fine.values[j - 1] * (1.0 - w) + fine.values[j] * w
        })
        .collect();
    (values, interpolated)
}

/// Double-mesh error estimate on `n` intervals.
pub fn error_double_mesh(
    problem: &Problem,
    scheme: Scheme,
    n: usize,
    epsilon: f64,
    config: &SolveConfig,
) -> Result<f64, ConvergenceError> {
    let base = ShishkinMesh::build(n, epsilon, problem.m())?;
    let fine = ShishkinMesh::build_shifted(2 * n, epsilon, problem.m())?;
    let coarse_sol =
        solve(problem, &base, scheme, config).map_err(|source| ConvergenceError::Solve { n, source })?;
    let fine_sol = solve(problem, &fine, scheme, config).map_err(|source| ConvergenceError::Solve {
        n: 2 * n,
        source,
    })?;
    let (sampled, _) = sample_at_nodes(&base, &fine_sol);
    Ok(sampled
        .iter()
        .zip(&coarse_sol.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Log-corrected convergence rate between `N = 2^k` and `2N`.
pub fn ord(e_n: f64, e_2n: f64, k: u32) -> Result<f64, ConvergenceError> {
    if !(e_n > 0.0 && e_2n > 0.0) {
        return Err(ConvergenceError::NonPositiveError(e_n, e_2n));
    }
    if k < 1 {
        return Err(ConvergenceError::InvalidK(k));
    }
    let k = k as f64;
    Ok((e_n.ln() - e_2n.ln()) / (2.0 * k / (k + 1.0)).ln())
}

/// Error for one table cell: exact when available, double-mesh otherwise.
pub fn cell_error(
    problem: &Problem,
    scheme: Scheme,
    epsilon: f64,
    k: u32,
    config: &SolveConfig,
) -> Result<f64, ConvergenceError> {
    if !(MIN_K..=MAX_K).contains(&k) {
        return Err(ConvergenceError::InvalidK(k));
    }
    let n = 1usize << k;
    if problem.has_exact() {
        let mesh = ShishkinMesh::build(n, epsilon, problem.m())?;
        let sol =
            solve(problem, &mesh, scheme, config).map_err(|source| ConvergenceError::Solve { n, source })?;
        error_exact(&sol, problem)
    } else {
        error_double_mesh(problem, scheme, n, epsilon, config)
    }
}

/// Computes every cell of `ks` concurrently, returned in ascending `k`.
pub fn compute_cells(
    problem: &Problem,
    scheme: Scheme,
    epsilon: f64,
    ks: RangeInclusive<u32>,
    config: &SolveConfig,
) -> Vec<(u32, Result<f64, ConvergenceError>)> {
    ks.collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| (k, cell_error(problem, scheme, epsilon, k, config)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub e_n: f64,
    pub ord: Option<f64>,
}

/// One `ε` block of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub problem_name: String,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    /// Assembles rows from `(k, E_N)` pairs in ascending, consecutive `k`.
    /// The last row has no rate.
    pub fn from_errors(
        problem_name: impl Into<String>,
        scheme: Scheme,
        epsilon: f64,
        errors: &[(u32, f64)],
    ) -> Result<Self, ConvergenceError> {
        let mut rows = Vec::with_capacity(errors.len());
        for (idx, &(k, e_n)) in errors.iter().enumerate() {
            let ord = match errors.get(idx + 1) {
                Some(&(_, e_2n)) => Some(ord(e_n, e_2n, k)?),
                None => None,
            };
            rows.push(ReportRow {
                n: 1usize << k,
                e_n,
                ord,
            });
        }
        Ok(Self {
            problem_name: problem_name.into(),
            scheme,
            epsilon,
            rows,
        })
    }

    pub fn csv_header() -> &'static str {
        "problem,scheme,epsilon,N,E_N,Ord"
    }

    /// Data rows, without header.
    pub fn to_csv_rows(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.problem_name,
                self.scheme,
                format_epsilon(self.epsilon),
                row.n,
                format_sci(row.e_n),
                format_ord(row.ord)
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::csv_header(), self.to_csv_rows())
    }
}

/// Builds the report for `ks` (each in `[3, 20]`).
pub fn build_report(
    problem: &Problem,
    scheme: Scheme,
    epsilon: f64,
    ks: RangeInclusive<u32>,
    config: &SolveConfig,
) -> Result<ConvergenceReport, ConvergenceError> {
    if ks.is_empty() {
        return Err(ConvergenceError::EmptyRange);
    }
    for k in [*ks.start(), *ks.end()] {
        if !(MIN_K..=MAX_K).contains(&k) {
            return Err(ConvergenceError::InvalidK(k));
        }
    }
    let errors = compute_cells(problem, scheme, epsilon, ks, config)
        .into_iter()
        .map(|(k, e)| e.map(|e| (k, e)))
        .collect::<Result<Vec<_>, _>>()?;
    ConvergenceReport::from_errors(problem.name(), scheme, epsilon, &errors)
}

/// Reports side by side, three `ε` per block: `N | E_N | Ord | E_N | Ord | …`
/// with an `ε` footer row under each block.
pub fn to_markdown(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for (b, block) in reports.chunks(3).enumerate() {
        if b > 0 {
            out.push('\n');
        }
        out.push_str("| N |");
        for _ in block {
            out.push_str(" E_N | Ord |");
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in block {
            out.push_str("---|---|");
        }
        out.push('\n');
        let rows = block.iter().map(|r| r.rows.len()).max().unwrap_or(0);
        for i in 0..rows {
            let n = block.iter().find_map(|r| r.rows.get(i)).map(|r| r.n).unwrap_or(0);
            let _ = write!(out, "| {} |", format_power_of_two(n));
            for report in block {
                match report.rows.get(i) {
                    Some(row) => {
                        let _ = write!(out, " {} | {} |", format_sci(row.e_n), format_ord(row.ord));
                    }
                    None => out.push_str("  |  |"),
                }
            }
            out.push('\n');
        }
        out.push_str("| ε |");
        for report in block {
            let _ = write!(out, " {} |  |", format_epsilon(report.epsilon));
        }
        out.push('\n');
    }
    out
}

/// Scientific notation with 5 significant digits and a two-digit exponent,
/// e.g. `8.1585e-04`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn format_ord(ord: Option<f64>) -> String {
    match ord {
        Some(o) => format!("{o:.2}"),
        None => "-".to_string(),
    }
}

/// `2^k` for exact powers of two, decimal otherwise.
pub fn format_epsilon(eps: f64) -> String {
    if eps > 0.0 && eps.is_finite() {
        let k = eps.log2().round();
        if k.exp2() == eps {
            return format!("2^{}", k as i64);
        }
    }
    format!("{eps}")
}

fn format_power_of_two(n: usize) -> String {
    if n.is_power_of_two() {
        format!("2^{}", n.trailing_zeros())
    } else {
        n.to_string()
    }
}
