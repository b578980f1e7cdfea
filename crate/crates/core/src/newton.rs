//! Damped Newton iteration for `Fy = 0` and `Gy = 0`.

use thiserror::Error;

use crate::mesh::ShishkinMesh;
use crate::problem::Problem;
use crate::scheme::{Scheme, SchemeCoefficients, SchemeError};
use crate::tridiag::{TridiagError, TridiagonalMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("residual became non-finite at iteration {0}")]
    NonFinite(usize),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Linear(#[from] TridiagError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Damping {
    /// Always take the full Newton step.
    None,
    /// Halve the step until the max-norm residual strictly decreases, down
    /// to a step of `2^-20`. If no trial step decreases it, the full step is taken.
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            damping: Damping::Backtracking,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tol > 0.0) {
            return Err(SolveError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(SolveError::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

const MIN_STEP: f64 = 1.0 / (1u64 << 20) as f64;

/// Extra full steps tried once the residual is below its rounding floor.
pub const POLISH_STEPS: usize = 3;

/// Converged nodal values on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub mesh: ShishkinMesh,
    pub values: Vec<f64>,
    pub scheme: Scheme,
    pub iterations: usize,
    pub final_residual: f64,
    /// Rounding floor of the residual at the last Jacobian evaluation; zero
    /// when no Jacobian was needed. On success
    /// `final_residual <= max(tol, residual_floor)`.
    pub residual_floor: f64,
}

/// Solves the discrete problem starting from `problem`'s initial guess.
pub fn solve(
    problem: &Problem,
    mesh: &ShishkinMesh,
    scheme: Scheme,
    config: &SolveConfig,
) -> Result<DiscreteSolution, SolveError> {
    let start: Vec<f64> = mesh.points().iter().map(|&x| problem.initial_guess(x)).collect();
    solve_from(problem, mesh, scheme, config, start)
}

/// Solves the discrete problem from an explicit starting vector. The
/// boundary entries are overwritten with zero.
pub fn solve_from(
    problem: &Problem,
    mesh: &ShishkinMesh,
    scheme: Scheme,
    config: &SolveConfig,
    mut y: Vec<f64>,
) -> Result<DiscreteSolution, SolveError> {
    config.validate()?;
    let n = mesh.n();
    if y.len() != n + 1 {
        return Err(SchemeError::Dimension {
            expected: n + 1,
            got: y.len(),
        }
        .into());
    }
    y[0] = 0.0;
    y[n] = 0.0;

    let coeffs = SchemeCoefficients::new(mesh, problem.gamma())?;
    let mut residual = scheme.residual(problem, mesh, &coeffs, &y)?;
    let mut norm = residual.max_norm();
    let mut iterations = 0;
    let mut floor = 0.0;
    let mut polish = POLISH_STEPS;

    while norm > config.tol {
        if !norm.is_finite() {
            return Err(SolveError::NonFinite(iterations));
        }
        let jac = scheme.jacobian(problem, mesh, &coeffs, &y)?;
        floor = rounding_floor(&jac, &y);
        let below_floor = norm <= floor;
        if below_floor && polish == 0 {
            break;
        }
        if iterations == config.max_iter {
            if below_floor {
                break;
            }
            return Err(SolveError::NotConverged {
                iterations,
                residual: norm,
            });
        }
        iterations += 1;

        let step = jac.solve(&residual.values)?;

        let full: Vec<f64> = y.iter().zip(&step).map(|(v, s)| v - s).collect();
        if below_floor {
            // Further steps only move the last bits of y. Keep one if it
            // lowers the residual, since a neighbouring representable vector
            // may still meet the tolerance.
            polish -= 1;
            let r = scheme.residual(problem, mesh, &coeffs, &full)?;
            if r.max_norm() >= norm {
                break;
            }
            y = full;
            residual = r;
            norm = residual.max_norm();
            continue;
        }
        let (next, next_res) = match config.damping {
            Damping::None => {
                let r = scheme.residual(problem, mesh, &coeffs, &full)?;
                (full, r)
            }
            Damping::Backtracking => {
                let mut accepted = None;
                let mut lambda = 1.0;
                while lambda >= MIN_STEP {
                    let trial: Vec<f64> = if lambda == 1.0 {
                        full.clone()
                    } else {
                        y.iter().zip(&step).map(|(v, s)| v - lambda * s).collect()
                    };
                    let r = scheme.residual(problem, mesh, &coeffs, &trial)?;
                    if r.max_norm() < norm {
                        accepted = Some((trial, r));
                        break;
                    }
                    lambda *= 0.5;
                }
                match accepted {
                    Some(pair) => pair,
                    None => {
                        let r = scheme.residual(problem, mesh, &coeffs, &full)?;
                        (full, r)
                    }
                }
            }
        };
        y = next;
        residual = next_res;
        norm = residual.max_norm();
    }

    debug_assert!(y[0] == 0.0 && y[n] == 0.0);
    Ok(DiscreteSolution {
        mesh: mesh.clone(),
        values: y,
        scheme,
        iterations,
        final_residual: norm,
        residual_floor: floor,
    })
}

/// Size of the residual that rounding in `y` alone can produce:
/// `16 u max_i Σ_j |J_ij| |y_j|`.
///
/// Rows of both operators carry weights up to `1/(βh)²` on differences of
/// `O(1)` values, so on fine meshes this can exceed a fixed tolerance such
/// as `1e-12`. Once the residual is below it, at most [`POLISH_STEPS`]
/// further full steps are tried and kept only if they lower the residual.
pub fn rounding_floor(jac: &TridiagonalMatrix, y: &[f64]) -> f64 {
    let n = jac.size();
    (0..n)
        .map(|i| {
            let (lo, d, up) = jac.row(i);
            let mut s = d.abs() * y[i].abs();
            if i > 0 {
                s += lo.abs() * y[i - 1].abs();
            }
            if i + 1 < n {
                s += up.abs() * y[i + 1].abs();
            }
            s
        })
        .fold(0.0, f64::max)
        * 16.0
        * f64::EPSILON
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{cubic_example, linear_example};

    #[test]
    fn linear_problem_needs_one_step() {
        let p = linear_example();
        for k in [3, 10, 30] {
            let mesh = ShishkinMesh::build(64, (-(k as f64)).exp2(), 1.0).unwrap();
            for s in [Scheme::F, Scheme::G] {
                let sol = solve(&p, &mesh, s, &SolveConfig::default()).unwrap();
                assert_eq!(sol.iterations, 1, "{s} k={k}");
                assert!(sol.final_residual <= 1e-12);
                assert_eq!(sol.values[0], 0.0);
                assert_eq!(sol.values[64], 0.0);
            }
        }
    }

    #[test]
    fn cubic_solution_is_bracketed() {
        let p = cubic_example();
        let mesh = ShishkinMesh::build(64, (-10f64).exp2(), 1.0).unwrap();
        for s in [Scheme::F, Scheme::G] {
            let sol = solve(&p, &mesh, s, &SolveConfig::default()).unwrap();
            assert!(sol.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn deterministic() {
        let p = cubic_example();
        let mesh = ShishkinMesh::build(128, 1e-4, 1.0).unwrap();
        let a = solve(&p, &mesh, Scheme::G, &SolveConfig::default()).unwrap();
        let b = solve(&p, &mesh, Scheme::G, &SolveConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reports_non_convergence() {
        let p = cubic_example();
        let mesh = ShishkinMesh::build(64, 1e-3, 1.0).unwrap();
        let cfg = SolveConfig {
            tol: 1e-12,
            max_iter: 1,
            damping: Damping::None,
        };
        assert!(matches!(
            solve(&p, &mesh, Scheme::F, &cfg),
            Err(SolveError::NotConverged { iterations: 1, .. })
        ));
    }

    #[test]
    fn rejects_bad_config() {
        let p = linear_example();
        let mesh = ShishkinMesh::build(64, 1e-3, 1.0).unwrap();
        let bad = SolveConfig {
            tol: 0.0,
            ..SolveConfig::default()
        };
        assert!(matches!(solve(&p, &mesh, Scheme::F, &bad), Err(SolveError::Config(_))));
        assert!(solve_from(&p, &mesh, Scheme::F, &SolveConfig::default(), vec![0.0; 3]).is_err());
    }
}
