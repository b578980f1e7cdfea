//! Tridiagonal systems and the Thomas algorithm.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TridiagError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular or near-singular pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },
}

/// Pivots smaller than this in magnitude are treated as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-300;

/// Square tridiagonal matrix of size `n`.
///
/// `lower[i]` is entry `(i + 1, i)`, `upper[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self, TridiagError> {
        let n = diag.len();
        if n == 0 {
            return Err(TridiagError::Dimension("empty diagonal".into()));
        }
        if lower.len() != n - 1 || upper.len() != n - 1 {
            return Err(TridiagError::Dimension(format!(
                "diagonal has {n} entries but off-diagonals have {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![1.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Row `i` as `(a_{i,i-1}, a_{i,i}, a_{i,i+1})`, with zeros outside the matrix.
    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        let lo = if i > 0 { self.lower[i - 1] } else { 0.0 };
        let up = if i + 1 < self.size() { self.upper[i] } else { 0.0 };
        (lo, self.diag[i], up)
    }

    pub(crate) fn set_row(&mut self, i: usize, lo: f64, d: f64, up: f64) {
        if i > 0 {
            self.lower[i - 1] = lo;
        }
        self.diag[i] = d;
        if i + 1 < self.diag.len() {
            self.upper[i] = up;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, TridiagError> {
        let n = self.size();
        if x.len() != n {
            return Err(TridiagError::Dimension(format!(
                "matrix is {n}x{n} but vector has {} entries",
                x.len()
            )));
        }
        Ok((0..n)
            .map(|i| {
                let (lo, d, up) = self.row(i);
                let mut s = d * x[i];
                if i > 0 {
                    s += lo * x[i - 1];
                }
                if i + 1 < n {
                    s += up * x[i + 1];
                }
                s
            })
            .collect())
    }

    /// Solves `self · x = rhs` by forward elimination and back substitution
    /// without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, TridiagError> {
        let n = self.size();
        if rhs.len() != n {
            return Err(TridiagError::Dimension(format!(
                "matrix is {n}x{n} but right-hand side has {} entries",
                rhs.len()
            )));
        }
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];

        let mut pivot = self.diag[0];
        check_pivot(0, pivot)?;
        if n > 1 {
            c[0] = self.upper[0] / pivot;
        }
        x[0] = rhs[0] / pivot;
        for i in 1..n {
            let l = self.lower[i - 1];
            pivot = self.diag[i] - l * c[i - 1];
            check_pivot(i, pivot)?;
            if i + 1 < n {
                c[i] = self.upper[i] / pivot;
            }
            x[i] = (rhs[i] - l * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}

fn check_pivot(row: usize, pivot: f64) -> Result<(), TridiagError> {
    if pivot.abs() < PIVOT_THRESHOLD || !pivot.is_finite() {
        Err(TridiagError::SingularPivot { row, pivot })
    } else {
        Ok(())
    }
}
