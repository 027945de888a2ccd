mod directional;
mod family;
mod grid;
mod seminorms;

pub use directional::{directional_contributions, directional_seminorms};
pub use family::FunctionFamily;
pub use grid::{GridFunction, Source};
pub use seminorms::{
    boundary_exponent, boundary_fractional_power, boundary_fractional_seminorm, boundary_lp_power,
    gagliardo_power, gagliardo_seminorm, hardy_contributions, hardy_quotient, ladder_sums, lp_norm, lp_power,
    nonlocal_contributions, nonlocal_ladder, nonlocal_seminorm, Ledger, NormReport,
};
pub(crate) use seminorms::{abs_pow, require_zero_trace};

#[cfg(test)]
mod tests;
