//! Fixtures shared by the benchmarks: meshes and fields of controllable size.

use nltrace_core::{build_uniform_mesh, DomainSpec, FunctionFamily, GridFunction, KernelParams, QuadratureMesh, Result, TangentialBc};

pub struct Fixture {
    pub mesh: QuadratureMesh,
    pub params: KernelParams,
    pub u: GridFunction,
}

/// n × n uniform mesh of the unit-height strip with a smooth field carrying a trace; the
/// cutoff of two cells keeps every active horizon resolved.
pub fn strip_fixture(n: usize) -> Result<Fixture> {
    let domain = DomainSpec::strip(2, 1.0, 0.5, TangentialBc::Truncated)?;
    let params = KernelParams::new(2, 0.8, 1.5, 0.5)?;
    let mesh = build_uniform_mesh(&domain, &params, &[n, n], 2.0 / n as f64)?;
    let u = GridFunction::from_family(&mesh, &FunctionFamily::parse("prod(cosine(0, 1), sum(const(1), coord(1)))")?)?;
    Ok(Fixture { mesh, params, u })
}

/// Uniform interval mesh with n cells.
pub fn interval_fixture(n: usize) -> Result<Fixture> {
    let domain = DomainSpec::interval(1.0)?;
    let params = KernelParams::new(1, 0.8, 1.5, 0.5)?;
    let mesh = build_uniform_mesh(&domain, &params, &[n], 1.0 / 64.0)?;
    let u = GridFunction::from_family(&mesh, &FunctionFamily::parse("sum(sine(0, 1), coord(0, 2))")?)?;
    Ok(Fixture { mesh, params, u })
}
