//! Heterogeneous-horizon nonlocal seminorms on graded meshes, with numerical checks of
//! Hardy, trace, Poincaré and comparison inequalities and nonlocal obstacle solvers.

pub mod error;
pub mod geometry;
pub mod kernel;
pub mod norms;
pub mod obstacle;
pub mod quad;
pub mod verify;
pub mod sum;

pub use error::{Error, Result};
pub use geometry::{build_graded_mesh, build_uniform_mesh, DomainSpec, MeshConfig, Point, QuadratureMesh, TangentialBc};
pub use kernel::{gamma, Coefficient, KernelParams};
pub use norms::{FunctionFamily, GridFunction, Ledger, NormReport};
pub use obstacle::{Growth, ObstacleProblem, SolverResult};
pub use sum::Summation;
