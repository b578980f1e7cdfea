//! Piecewise-equidistant Shishkin meshes.
//!
//! `[0, 1]` is split into `[0, λ]`, `[λ, 1 - λ]` and `[1 - λ, 1]` with `N/4`,
//! `N/2` and `N/4` intervals. The transition point is
//! `λ = min{1/4, 2ε ln N / √m}`.
//!
//! Nodes are computed per block as affine functions of the block index, so the
//! block boundaries land exactly on `λ` and `1 - λ`. Steps are stored as the
//! block constants `4λ/N` and `2(1 - 2λ)/N` rather than node differences:
//! near `x = 1` the nodes of a very thin layer are not resolvable in `f64`
//! while the steps and the distances `1 - x_i` still are.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("N must be divisible by 4 and at least 8, got {0}")]
    InvalidN(usize),
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("m must be positive and finite, got {0}")]
    InvalidM(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShishkinMesh {
    n: usize,
    epsilon: f64,
    m: f64,
    lambda: f64,
    points: Vec<f64>,
    complements: Vec<f64>,
    steps: Vec<f64>,
}

/// `min{1/4, 2ε ln(log_arg) / √m}`.
fn transition_point(log_arg: f64, epsilon: f64, m: f64) -> f64 {
    (2.0 * epsilon * log_arg.ln() / m.sqrt()).min(0.25)
}

fn check_inputs(n: usize, epsilon: f64, m: f64) -> Result<(), MeshError> {
    if n < 8 || n % 4 != 0 {
        return Err(MeshError::InvalidN(n));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(MeshError::InvalidEpsilon(epsilon));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(MeshError::InvalidM(m));
    }
    Ok(())
}

impl ShishkinMesh {
    /// Standard Shishkin mesh with `n` intervals.
    pub fn build(n: usize, epsilon: f64, m: f64) -> Result<Self, MeshError> {
        check_inputs(n, epsilon, m)?;
        let lambda = transition_point(n as f64, epsilon, m);
        Ok(Self::with_transition(n, epsilon, m, lambda))
    }

    /// Mesh with `n` intervals whose transition point is taken from the
    /// half-size mesh: `λ_S = min{1/4, 2ε ln(n/2) / √m}`.
    ///
    /// This is the fine mesh of a double-mesh comparison against a base mesh
    /// of `n/2` intervals; both then share the same `λ`, so every base node is
    /// a node of this mesh.
    pub fn build_shifted(n: usize, epsilon: f64, m: f64) -> Result<Self, MeshError> {
        check_inputs(n, epsilon, m)?;
        let lambda = transition_point(n as f64 / 2.0, epsilon, m);
        Ok(Self::with_transition(n, epsilon, m, lambda))
    }

    fn with_transition(n: usize, epsilon: f64, m: f64, lambda: f64) -> Self {
        let q = n / 4;
        let qf = q as f64;
        let middle = 1.0 - 2.0 * lambda;
        let mut points = Vec::with_capacity(n + 1);
        let mut complements = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let (x, c) = if i <= q {
                let x = lambda * (i as f64 / qf);
                (x, 1.0 - x)
            } else if i < 3 * q {
                let x = lambda + middle * ((i - q) as f64 / (2.0 * qf));
                let c = lambda + middle * ((3 * q - i) as f64 / (2.0 * qf));
                (x, c)
            } else {
                let c = lambda * ((n - i) as f64 / qf);
                (1.0 - c, c)
            };
            points.push(x);
            complements.push(c);
        }

        let fine = 4.0 * lambda / n as f64;
        let coarse = 2.0 * middle / n as f64;
        let steps = (0..n)
            .map(|j| if j < q || j >= 3 * q { fine } else { coarse })
            .collect();

        Self {
            n,
            epsilon,
            m,
            lambda,
            points,
            complements,
            steps,
        }
    }

    /// Number of intervals `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Nodes `x_0 .. x_N`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `1 - x_i` for every node, computed without cancellation.
    pub fn complements(&self) -> &[f64] {
        &self.complements
    }

    /// Interval lengths; `steps()[j]` is the length of `[x_j, x_{j+1}]`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn fine_step(&self) -> f64 {
        self.steps[0]
    }

    pub fn coarse_step(&self) -> f64 {
        self.steps[self.n / 2]
    }

    /// Index of the left transition node, `N/4`.
    pub fn transition_index(&self) -> usize {
        self.n / 4
    }

    /// Midpoint of `[x_j, x_{j+1}]`.
    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.points[j] + self.points[j + 1])
    }

    /// Whether `λ` saturated at `1/4`, which makes the mesh uniform.
    pub fn is_uniform(&self) -> bool {
        self.lambda == 0.25
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturated_lambda_gives_uniform_mesh() {
        let mesh = ShishkinMesh::build(8, 1.0, 1.0).unwrap();
        assert_eq!(mesh.lambda(), 0.25);
        assert!(mesh.is_uniform());
        for (i, &x) in mesh.points().iter().enumerate() {
            assert!((x - i as f64 / 8.0).abs() < 1e-15);
        }
        assert!(mesh.steps().iter().all(|&h| h == 0.125));
    }

    #[test]
    fn fine_and_coarse_steps_match_extended_precision() {
        // 2·2⁻¹⁰·ln 64, 4λ/64 and 2(1 - 2λ)/64 evaluated with 50 digits
        let mesh = ShishkinMesh::build(64, (-10f64).exp2(), 1.0).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-15 * b.abs();
        assert!(close(mesh.lambda(), 0.008_122_818_522_186_859));
        assert!(close(mesh.fine_step(), 0.000_507_676_157_636_678_7));
        assert!(close(mesh.coarse_step(), 0.030_742_323_842_363_32));
    }

    #[test]
    fn block_boundaries_are_exact() {
        for &(n, eps) in &[(64usize, 1e-3), (128, 2e-7), (2048, 2.8e-14), (8, 0.5)] {
            let mesh = ShishkinMesh::build(n, eps, 1.0).unwrap();
            let x = mesh.points();
            assert_eq!(x[0], 0.0);
            assert_eq!(x[n], 1.0);
            assert_eq!(x[n / 4], mesh.lambda());
            assert!((x[3 * n / 4] - (1.0 - mesh.lambda())).abs() <= 1e-15);
            assert!((x[n / 2] - 0.5).abs() <= 1e-15);
            assert!(x.windows(2).all(|w| w[0] < w[1]) || eps < 1e-12);
        }
    }

    #[test]
    fn shifted_mesh_contains_base_nodes() {
        let eps = (-10f64).exp2();
        let base = ShishkinMesh::build(64, eps, 1.0).unwrap();
        let fine = ShishkinMesh::build_shifted(128, eps, 1.0).unwrap();
        assert_eq!(base.lambda(), fine.lambda());
        for (i, &x) in base.points().iter().enumerate() {
            assert!((fine.points()[2 * i] - x).abs() <= 1e-14);
        }
        let wide = ShishkinMesh::build_shifted(128, 1.0, 1.0).unwrap();
        assert_eq!(wide.lambda(), 0.25);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert_eq!(ShishkinMesh::build(30, 0.1, 1.0), Err(MeshError::InvalidN(30)));
        assert_eq!(ShishkinMesh::build(4, 0.1, 1.0), Err(MeshError::InvalidN(4)));
        assert!(matches!(
            ShishkinMesh::build(64, 0.0, 1.0),
            Err(MeshError::InvalidEpsilon(_))
        ));
        assert!(matches!(
            ShishkinMesh::build(64, 0.1, -1.0),
            Err(MeshError::InvalidM(_))
        ));
        assert!(ShishkinMesh::build_shifted(66, 0.1, 1.0).is_err());
    }
}
