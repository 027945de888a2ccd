//! Standard function sets, each chosen so its hypotheses are exactly checkable.

use crate::geometry::DomainSpec;
use crate::norms::FunctionFamily;

fn parse(src: &str) -> FunctionFamily {
    FunctionFamily::parse(src).expect("built-in family expression")
}

/// Lipschitz functions vanishing on the bottom face of a strip of half-width `l`.
pub fn strip_zero_trace(l: f64) -> Vec<FunctionFamily> {
    let f = 1.0 / (2.0 * l);
    vec![
        parse(&format!("prod(coord(1), cosine(0, {f:?}))")),
        parse(&format!("prod(coord(1, 2), cosine(0, {f:?}))")),
        parse(&format!("prod(sine(1, 1), lipschitz_bump(0, {:?}))", 0.8 * l)),
        parse("delta()"),
    ]
}

/// Lipschitz functions with a nontrivial trace on the bottom face.
pub fn strip_with_trace(l: f64) -> Vec<FunctionFamily> {
    let f = 1.0 / (2.0 * l);
    vec![
        parse(&format!("prod(lipschitz_bump(0, {:?}), sum(const(1), coord(1)))", 0.8 * l)),
        parse(&format!("prod(cosine(0, {f:?}), sum(const(1), coord(1)))")),
        parse(&format!("sum(const(1), prod(coord(1), sine(0, {:?})))", 2.0 * f)),
    ]
}

/// Zero-trace functions on the unit square.
pub fn square_zero_trace() -> Vec<FunctionFamily> {
    vec![
        parse("tensor_sine(1)"),
        parse("prod(delta(), tensor_sine(1))"),
        parse("delta()"),
        parse("power_alpha(2)"),
    ]
}

/// Functions with nonzero trace on bounded polygons.
pub fn polygon_with_trace() -> Vec<FunctionFamily> {
    vec![
        parse("const(1)"),
        parse("sum(const(1), prod(coord(0), coord(1)))"),
        parse("prod(cosine(0, 1), cosine(1, 1))"),
        parse("delta()"),
    ]
}

/// Functions with nonzero trace on a hypograph of half-width `l`.
pub fn hypograph_with_trace(l: f64) -> Vec<FunctionFamily> {
    vec![
        parse("sum(const(1), coord(0))"),
        parse(&format!("prod(lipschitz_bump(0, {:?}), cosine(1, 0.5))", 0.8 * l)),
        parse("sum(coord(1), prod(coord(0), coord(0)))"),
    ]
}

/// The default trace-carrying set for a domain.
pub fn with_trace(domain: &DomainSpec) -> Vec<FunctionFamily> {
    match domain {
        DomainSpec::Strip { l, .. } => strip_with_trace(*l),
        DomainSpec::Hypograph2D { half_width, .. } => hypograph_with_trace(*half_width),
        _ => polygon_with_trace(),
    }
}

/// The default zero-trace set for a domain.
pub fn zero_trace(domain: &DomainSpec) -> Vec<FunctionFamily> {
    match domain {
        DomainSpec::Strip { l, .. } => strip_zero_trace(*l),
        DomainSpec::Interval { .. } => vec![parse("coord(0)"), parse("coord(0, 2)"), parse("sine(0, 1)")],
        _ => square_zero_trace(),
    }
}
