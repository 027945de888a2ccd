//! Inequality experiments: both sides of each estimate on families and refinements.

mod bounded;
mod common;
mod elementary;
pub mod families;
mod hardy1d;
mod report;
mod strip;

pub use bounded::{flattening_sigma, measured_flattening_constant, multiplier_envelope, verify_multiplier, verify_poincare, verify_trace_lipschitz};
pub use elementary::check_elementary_inequalities;
pub use hardy1d::{hardy_1d_sides, verify_hardy_1d, Hardy1dSides};
pub use report::{aitken, apply_stability, drift, Extrapolated, InequalityReport, Resolution, DRIFT_TOL};
pub use strip::{
    comparison_constants, normal_tangential_abk, verify_hardy_strip, verify_hardy_strip_theta, verify_normal_tangential,
    verify_seminorm_comparison, verify_trace_strip,
};

#[cfg(test)]
mod tests;
