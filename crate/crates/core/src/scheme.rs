//! Fitted three-point schemes and their discrete operators.
//!
//! Both schemes use per-interval coefficients built from `z = β h` with
//! `β = √γ / ε`:
//!
//! ```text
//! a  = β / sinh z      d  = β / tanh z      Δd = d - a = β tanh(z/2)
//! ```
//!
//! Scheme F weighs midpoint values of `f`, scheme G nodal values with a
//! `1 : 2 : 1` pattern. Everything here is evaluated through `t = tanh(z/2)`
//! and `e^{-z}`, which stay finite for `ε` as small as `2^-45` where `sinh`
//! and `cosh` of `z` overflow. [`printed`] keeps the textbook forms around as
//! an independent check.

use std::fmt;

use thiserror::Error;

use crate::mesh::ShishkinMesh;
use crate::problem::Problem;
use crate::tridiag::TridiagonalMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("nodal vector has {got} entries, mesh needs {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("coefficients were built for N = {coeffs}, mesh has N = {mesh}")]
    MeshMismatch { coeffs: usize, mesh: usize },
}

/// Which discrete operator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Midpoint-averaged right-hand side.
    F,
    /// Nodal right-hand side weighted `f_{i-1} + 2 f_i + f_{i+1}`.
    G,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::F => f.write_str("f"),
            Scheme::G => f.write_str("g"),
        }
    }
}

impl Scheme {
    pub fn residual(
        self,
        problem: &Problem,
        mesh: &ShishkinMesh,
        coeffs: &SchemeCoefficients,
        y: &[f64],
    ) -> Result<Residual, SchemeError> {
        match self {
            Scheme::F => residual_f(problem, mesh, coeffs, y),
            Scheme::G => residual_g(problem, mesh, coeffs, y),
        }
    }

    pub fn jacobian(
        self,
        problem: &Problem,
        mesh: &ShishkinMesh,
        coeffs: &SchemeCoefficients,
        y: &[f64],
    ) -> Result<TridiagonalMatrix, SchemeError> {
        match self {
            Scheme::F => jacobian_f(problem, mesh, coeffs, y),
            Scheme::G => jacobian_g(problem, mesh, coeffs, y),
        }
    }
}

/// Per-interval fitted coefficients. Entry `j` belongs to `[x_j, x_{j+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCoefficients {
    pub beta: f64,
    pub gamma: f64,
    pub a: Vec<f64>,
    pub d: Vec<f64>,
    pub delta_d: Vec<f64>,
    pub t: Vec<f64>,
}

impl SchemeCoefficients {
    pub fn new(mesh: &ShishkinMesh, gamma: f64) -> Result<Self, SchemeError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(SchemeError::InvalidGamma(gamma));
        }
        let beta = gamma.sqrt() / mesh.epsilon();
        let n = mesh.n();
        let mut a = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        let mut delta_d = Vec::with_capacity(n);
        let mut t = Vec::with_capacity(n);
        for &h in mesh.steps() {
            let z = beta * h;
            let th = (0.5 * z).tanh();
            // β / sinh z = 2β e^{-z} / (1 - e^{-2z})
            a.push(2.0 * beta * (-z).exp() / -(-2.0 * z).exp_m1());
            d.push(beta / z.tanh());
            delta_d.push(beta * th);
            t.push(th);
        }
        Ok(Self {
            beta,
            gamma,
            a,
            d,
            delta_d,
            t,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `β h` for interval `j`.
    pub fn beta_h(&self, mesh: &ShishkinMesh, j: usize) -> f64 {
        self.beta * mesh.steps()[j]
    }
}

/// `(Fy)_i` or `(Gy)_i` at every node; the boundary entries are `y_0` and `y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub values: Vec<f64>,
}

impl Residual {
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn check(mesh: &ShishkinMesh, coeffs: &SchemeCoefficients, y: &[f64]) -> Result<(), SchemeError> {
    if coeffs.len() != mesh.n() {
        return Err(SchemeError::MeshMismatch {
            coeffs: coeffs.len(),
            mesh: mesh.n(),
        });
    }
    if y.len() != mesh.n() + 1 {
        return Err(SchemeError::Dimension {
            expected: mesh.n() + 1,
            got: y.len(),
        });
    }
    Ok(())
}

/// Scheme F residual in the form
/// `γ/(t_l + t_r) · [ (y_{i-1} - y_i)/(2t_l) - (y_i - y_{i+1})/(2t_r) - (t_l f̄_l + t_r f̄_r)/γ ]`
/// where `f̄_l`, `f̄_r` are `f` at the midpoints of the two adjacent intervals
/// and of the adjacent nodal values.
pub fn residual_f(
    problem: &Problem,
    mesh: &ShishkinMesh,
    coeffs: &SchemeCoefficients,
    y: &[f64],
) -> Result<Residual, SchemeError> {
    check(mesh, coeffs, y)?;
    let n = mesh.n();
    let eps = mesh.epsilon();
    let gamma = coeffs.gamma;
    let mut values = vec![0.0; n + 1];
    values[0] = y[0];
    values[n] = y[n];
    for i in 1..n {
        let (tl, tr) = (coeffs.t[i - 1], coeffs.t[i]);
        let fl = problem.f(mesh.midpoint(i - 1), 0.5 * (y[i - 1] + y[i]), eps);
        let fr = problem.f(mesh.midpoint(i), 0.5 * (y[i] + y[i + 1]), eps);
        let bracket = (y[i - 1] - y[i]) / (2.0 * tl) - (y[i] - y[i + 1]) / (2.0 * tr)
            - (tl * fl + tr * fr) / gamma;
        values[i] = gamma / (tl + tr) * bracket;
    }
    Ok(Residual { values })
}

/// Scheme G residual in the form
/// `γ/(Δd_l + Δd_r) · [ (4a_l + Δd_l + Δd_r)(y_{i-1} - y_i) - (4a_r + Δd_l + Δd_r)(y_i - y_{i+1}) ]
///  - (f_{i-1} + 2 f_i + f_{i+1})`.
pub fn residual_g(
    problem: &Problem,
    mesh: &ShishkinMesh,
    coeffs: &SchemeCoefficients,
    y: &[f64],
) -> Result<Residual, SchemeError> {
    check(mesh, coeffs, y)?;
    let n = mesh.n();
    let eps = mesh.epsilon();
    let x = mesh.points();
    let f: Vec<f64> = (0..=n).map(|i| problem.f(x[i], y[i], eps)).collect();
    let mut values = vec![0.0; n + 1];
    values[0] = y[0];
    values[n] = y[n];
    for i in 1..n {
        let (wl, wr, c) = g_weights(coeffs, i);
        values[i] =
            c * (wl * (y[i - 1] - y[i]) - wr * (y[i] - y[i + 1])) - (f[i - 1] + 2.0 * f[i] + f[i + 1]);
    }
    Ok(Residual { values })
}

/// `(4a_l + ΣΔd, 4a_r + ΣΔd, γ/ΣΔd)` for interior node `i`.
#[inline]
fn g_weights(coeffs: &SchemeCoefficients, i: usize) -> (f64, f64, f64) {
    let sum = coeffs.delta_d[i - 1] + coeffs.delta_d[i];
    (
        4.0 * coeffs.a[i - 1] + sum,
        4.0 * coeffs.a[i] + sum,
        coeffs.gamma / sum,
    )
}

/// Exact Jacobian of [`residual_f`]. Each midpoint value of `f` depends on
/// both adjacent nodes with weight `½ f_y`.
pub fn jacobian_f(
    problem: &Problem,
    mesh: &ShishkinMesh,
    coeffs: &SchemeCoefficients,
    y: &[f64],
) -> Result<TridiagonalMatrix, SchemeError> {
    check(mesh, coeffs, y)?;
    let n = mesh.n();
    let eps = mesh.epsilon();
    let gamma = coeffs.gamma;
    let mut jac = TridiagonalMatrix::identity(n + 1);
    for i in 1..n {
        let (tl, tr) = (coeffs.t[i - 1], coeffs.t[i]);
        let gl = problem.f_y(mesh.midpoint(i - 1), 0.5 * (y[i - 1] + y[i]), eps);
        let gr = problem.f_y(mesh.midpoint(i), 0.5 * (y[i] + y[i + 1]), eps);
        let c = gamma / (tl + tr);
        let (pl, pr) = (0.5 / tl, 0.5 / tr);
        let (ql, qr) = (0.5 * tl * gl / gamma, 0.5 * tr * gr / gamma);
        jac.set_row(i, c * (pl - ql), -c * (pl + pr + ql + qr), c * (pr - qr));
    }
    Ok(jac)
}

/// Exact Jacobian of [`residual_g`].
pub fn jacobian_g(
    problem: &Problem,
    mesh: &ShishkinMesh,
    coeffs: &SchemeCoefficients,
    y: &[f64],
) -> Result<TridiagonalMatrix, SchemeError> {
    check(mesh, coeffs, y)?;
    let n = mesh.n();
    let eps = mesh.epsilon();
    let x = mesh.points();
    let fy: Vec<f64> = (0..=n).map(|i| problem.f_y(x[i], y[i], eps)).collect();
    let mut jac = TridiagonalMatrix::identity(n + 1);
    for i in 1..n {
        let (wl, wr, c) = g_weights(coeffs, i);
        jac.set_row(
            i,
            c * wl - fy[i - 1],
            -c * (wl + wr) - 2.0 * fy[i],
            c * wr - fy[i + 1],
        );
    }
    Ok(jac)
}

/// The operators written term by term with `sinh` and `tanh` of `β h`.
///
/// These overflow once `β h` exceeds roughly 710 and lose accuracy well
/// before that; they exist to cross-check the stable forms where both are
/// representable.
pub mod printed {
    use super::*;

    /// `(β/sinh z, β/tanh z)` for interval `j`, computed naively.
    fn naive(coeffs: &SchemeCoefficients, mesh: &ShishkinMesh, j: usize) -> (f64, f64) {
        let z = coeffs.beta * mesh.steps()[j];
        (coeffs.beta / z.sinh(), coeffs.beta / z.tanh())
    }

    pub fn residual_f(
        problem: &Problem,
        mesh: &ShishkinMesh,
        coeffs: &SchemeCoefficients,
        y: &[f64],
    ) -> Result<Residual, SchemeError> {
        check(mesh, coeffs, y)?;
        let n = mesh.n();
        let eps = mesh.epsilon();
        let gamma = coeffs.gamma;
        let mut values = vec![0.0; n + 1];
        values[0] = y[0];
        values[n] = y[n];
        for i in 1..n {
            let (al, dl) = naive(coeffs, mesh, i - 1);
            let (ar, dr) = naive(coeffs, mesh, i);
            let (ddl, ddr) = (dl - al, dr - ar);
            let (hl, hr) = ((al + dl) / 2.0, (ar + dr) / 2.0);
            let fl = problem.f(mesh.midpoint(i - 1), (y[i - 1] + y[i]) / 2.0, eps);
            let fr = problem.f(mesh.midpoint(i), (y[i] + y[i + 1]) / 2.0, eps);
            values[i] = gamma / (ddl + ddr)
                * (hl * y[i - 1] - (hl + hr) * y[i] + hr * y[i + 1]
                    - ddl / gamma * fl
                    - ddr / gamma * fr);
        }
        Ok(Residual { values })
    }

    pub fn residual_g(
        problem: &Problem,
        mesh: &ShishkinMesh,
        coeffs: &SchemeCoefficients,
        y: &[f64],
    ) -> Result<Residual, SchemeError> {
        check(mesh, coeffs, y)?;
        let n = mesh.n();
        let eps = mesh.epsilon();
        let gamma = coeffs.gamma;
        let x = mesh.points();
        let mut values = vec![0.0; n + 1];
        values[0] = y[0];
        values[n] = y[n];
        for i in 1..n {
            let (al, dl) = naive(coeffs, mesh, i - 1);
            let (ar, dr) = naive(coeffs, mesh, i);
            let (ddl, ddr) = (dl - al, dr - ar);
            let fsum = problem.f(x[i - 1], y[i - 1], eps)
                + 2.0 * problem.f(x[i], y[i], eps)
                + problem.f(x[i + 1], y[i + 1], eps);
            values[i] = gamma / (ddl + ddr)
                * ((3.0 * al + dl + ddr) * (y[i - 1] - y[i])
                    - (3.0 * ar + dr + ddl) * (y[i] - y[i + 1])
                    - fsum / gamma * (ddl + ddr));
        }
        Ok(Residual { values })
    }
}
