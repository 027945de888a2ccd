//! Nonlocal obstacle problems: energy assembly, projected solvers and variational-inequality checks.

mod growth;
mod problem;
mod solve;

#[cfg(test)]
mod tests;

pub use growth::{Growth, GrowthConstants};
pub use problem::{ObstacleData, ObstacleProblem, Omega0};
pub use solve::{
    certify_vi, kkt, solve_oracle, solve_projected_descent, solve_psor, DescentOptions, Kkt, Method, PsorOptions,
    SolverResult, ViReport, ORACLE_MAX_NODES,
};
