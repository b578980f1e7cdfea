//! The continuous problem `ε² y'' = f(x, y)` on `(0, 1)` with `y(0) = y(1) = 0`.
//!
//! A [`Problem`] carries the right-hand side and its `y`-derivative, the
//! lower bound `m` on `f_y`, the scheme constant `γ`, and optionally a
//! closed-form solution and a pair of lower/upper solutions.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// `f(x, y, ε)`.
pub type RhsFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Closed-form solution `y(x, 1 - x, ε)`.
///
/// The complement `1 - x` is passed separately so that callers holding it
/// without cancellation (mesh nodes inside the right layer) can supply it
/// exactly; right-layer terms like `exp(-(1 - x)/ε)` depend on it.
pub type ExactFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Newton starting iterate as a function of `x`.
pub type GuessFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("m must be positive and finite, got {0}")]
    InvalidM(f64),
    #[error("gamma must satisfy gamma >= m = {m}, got {gamma}")]
    InvalidGamma { gamma: f64, m: f64 },
    #[error("only homogeneous boundary conditions y(0) = y(1) = 0 are supported, got ({0}, {1})")]
    NonHomogeneousBoundary(f64, f64),
    #[error("lower solution {0} exceeds upper solution {1}")]
    InvalidBounds(f64, f64),
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// The semilinear boundary value problem together with scheme constants.
#[derive(Clone)]
pub struct Problem {
    name: String,
    f: RhsFn,
    f_y: RhsFn,
    m: f64,
    gamma: f64,
    exact: Option<ExactFn>,
    initial_guess: GuessFn,
    bounds: Option<(f64, f64)>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("gamma", &self.gamma)
            .field("has_exact", &self.exact.is_some())
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl Problem {
    pub fn builder<F, Fy>(name: impl Into<String>, f: F, f_y: Fy) -> ProblemBuilder
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        Fy: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        ProblemBuilder {
            name: name.into(),
            f: Arc::new(f),
            f_y: Arc::new(f_y),
            m: 1.0,
            gamma: 1.0,
            exact: None,
            initial_guess: Arc::new(|_| 0.0),
            bounds: None,
            boundary: (0.0, 0.0),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn f(&self, x: f64, y: f64, epsilon: f64) -> f64 {
        (self.f)(x, y, epsilon)
    }

    #[inline]
    pub fn f_y(&self, x: f64, y: f64, epsilon: f64) -> f64 {
        (self.f_y)(x, y, epsilon)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact solution at `x`, computing `1 - x` directly.
    pub fn exact(&self, x: f64, epsilon: f64) -> Option<f64> {
        self.exact_with_complement(x, 1.0 - x, epsilon)
    }

    /// Exact solution at `x` given a cancellation-free complement `1 - x`.
    pub fn exact_with_complement(&self, x: f64, one_minus_x: f64, epsilon: f64) -> Option<f64> {
        self.exact.as_ref().map(|y| y(x, one_minus_x, epsilon))
    }

    pub fn initial_guess(&self, x: f64) -> f64 {
        (self.initial_guess)(x)
    }

    /// Spot-checks `f_y >= m` and `γ >= f_y` on a sampling grid.
    ///
    /// `f_y >= m` is checked on `[0,1] × [y_L - 1, y_U + 1]` since it must hold
    /// for every `y`; `γ >= f_y` only on `[0,1] × [y_L, y_U]`, where the
    /// solution lives. Without bounds both checks use `[0,1] × [-2, 2]`.
    /// `f_y` is evaluated for a handful of representative `ε` values.
    pub fn validate(&self, sample_count: usize) -> Result<ValidationReport, ProblemError> {
        if sample_count == 0 {
            return Err(ProblemError::NoSamples);
        }
        let (m_range, gamma_range) = match self.bounds {
            Some((lo, hi)) => ((lo - 1.0, hi + 1.0), (lo, hi)),
            None => ((-2.0, 2.0), (-2.0, 2.0)),
        };
        let nx = (sample_count as f64).sqrt().ceil().max(1.0) as usize;
        let ny = sample_count.div_ceil(nx).max(1);

        let mut min_fy = f64::INFINITY;
        let mut max_fy_on_bracket = f64::NEG_INFINITY;
        for &eps in &VALIDATION_EPSILONS {
            for ix in 0..nx {
                let x = grid_point(0.0, 1.0, ix, nx);
                for iy in 0..ny {
                    let y_wide = grid_point(m_range.0, m_range.1, iy, ny);
                    min_fy = min_fy.min(self.f_y(x, y_wide, eps));
                    let y_tight = grid_point(gamma_range.0, gamma_range.1, iy, ny);
                    max_fy_on_bracket = max_fy_on_bracket.max(self.f_y(x, y_tight, eps));
                }
            }
        }

        Ok(ValidationReport {
            samples: nx * ny,
            min_fy,
            max_fy: max_fy_on_bracket,
            m: self.m,
            gamma: self.gamma,
            m_holds: min_fy >= self.m,
            gamma_holds: self.gamma >= max_fy_on_bracket,
        })
    }
}

const VALIDATION_EPSILONS: [f64; 3] = [0.125, 9.765625e-4, 2.842170943040401e-14];

fn grid_point(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

pub struct ProblemBuilder {
    name: String,
    f: RhsFn,
    f_y: RhsFn,
    m: f64,
    gamma: f64,
    exact: Option<ExactFn>,
    initial_guess: GuessFn,
    bounds: Option<(f64, f64)>,
    boundary: (f64, f64),
}

impl ProblemBuilder {
    pub fn m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn exact<E>(mut self, exact: E) -> Self
    where
        E: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn initial_guess<G>(mut self, guess: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.initial_guess = Arc::new(guess);
        self
    }

    pub fn bounds(mut self, lower: f64, upper: f64) -> Self {
        self.bounds = Some((lower, upper));
        self
    }

    /// Boundary values `(y(0), y(1))`. Anything but `(0, 0)` is rejected by [`build`](Self::build).
    pub fn boundary_values(mut self, left: f64, right: f64) -> Self {
        self.boundary = (left, right);
        self
    }

    pub fn build(self) -> Result<Problem, ProblemError> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(ProblemError::InvalidM(self.m));
        }
        if !(self.gamma >= self.m && self.gamma.is_finite()) {
            return Err(ProblemError::InvalidGamma {
                gamma: self.gamma,
                m: self.m,
            });
        }
        if self.boundary != (0.0, 0.0) {
            return Err(ProblemError::NonHomogeneousBoundary(
                self.boundary.0,
                self.boundary.1,
            ));
        }
        if let Some((lo, hi)) = self.bounds {
            if !(lo <= hi) {
                return Err(ProblemError::InvalidBounds(lo, hi));
            }
        }
        Ok(Problem {
            name: self.name,
            f: self.f,
            f_y: self.f_y,
            m: self.m,
            gamma: self.gamma,
            exact: self.exact,
            initial_guess: self.initial_guess,
            bounds: self.bounds,
        })
    }
}

/// Outcome of [`Problem::validate`]. Violations are reported, not raised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    pub min_fy: f64,
    pub max_fy: f64,
    pub m: f64,
    pub gamma: f64,
    pub m_holds: bool,
    pub gamma_holds: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.m_holds && self.gamma_holds
    }
}

/// `ε² y'' = y + 1 - 2ε² + x(x - 1)` with a known closed-form solution.
///
/// Solved with `γ = 1` from the constant start `-0.5`.
pub fn linear_example() -> Problem {
    Problem::builder(
        "linear",
        |x, y, eps| y + 1.0 - 2.0 * eps * eps + x * (x - 1.0),
        |_, _, _| 1.0,
    )
    .m(1.0)
    .gamma(1.0)
    .exact(linear_exact)
    .initial_guess(|_| -0.5)
    .build()
    .expect("built-in problem is valid")
}

/// `(e^{-x/ε} + e^{-(1-x)/ε}) / (1 + e^{-1/ε}) - x(x - 1) - 1`.
fn linear_exact(x: f64, one_minus_x: f64, eps: f64) -> f64 {
    let layers = ((-x / eps).exp() + (-one_minus_x / eps).exp()) / (1.0 + (-1.0 / eps).exp());
    layers - x * (x - 1.0) - 1.0
}

/// `ε² y'' = y³ + y - 2`; no closed form. The reduced solution `y ≡ 1`
/// starts Newton, and `γ = 4` bounds `f_y = 3y² + 1` on `[0, 1]`.
pub fn cubic_example() -> Problem {
    Problem::builder(
        "cubic",
        |_, y, _| y * y * y + y - 2.0,
        |_, y, _| 3.0 * y * y + 1.0,
    )
    .m(1.0)
    .gamma(4.0)
    .initial_guess(|_| 1.0)
    .bounds(0.0, 1.0)
    .build()
    .expect("built-in problem is valid")
}
