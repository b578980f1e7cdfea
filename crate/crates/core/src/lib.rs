//! Fitted finite-difference schemes for the semilinear singularly perturbed
//! problem `ε² y'' = f(x, y)`, `y(0) = y(1) = 0`, with `f_y >= m > 0`.
//!
//! The pieces are layered bottom-up:
//!
//! - [`problem`]: the continuous problem and two built-in examples.
//! - [`mesh`]: Shishkin meshes with transition point `min{1/4, 2ε ln N / √m}`.
//! - [`scheme`]: the two discrete operators F and G and their Jacobians.
//! - [`tridiag`]: Thomas solver for the Newton systems.
//! - [`newton`]: damped Newton iteration.
//! - [`convergence`]: error estimates, rates and tables.
//! - [`cli`]: the `spbvp` command line front end.

pub mod cli;
pub mod convergence;
pub mod mesh;
pub mod newton;
pub mod problem;
pub mod scheme;
pub mod tridiag;

pub use convergence::{build_report, error_double_mesh, error_exact, ord, ConvergenceReport};
pub use mesh::ShishkinMesh;
pub use newton::{solve, DiscreteSolution, SolveConfig};
pub use problem::{cubic_example, linear_example, Problem};
pub use scheme::{Scheme, SchemeCoefficients};
