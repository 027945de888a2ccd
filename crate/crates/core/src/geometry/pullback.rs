use super::{DomainSpec, Point, QuadratureMesh};
use crate::error::{Error, Result};
use crate::norms::GridFunction;

/// G_ζu(x′, x_d) = u(x′, x_d + ζ(x′)) on a strip mesh of the same half-width and height.
pub fn hypograph_pullback(
    domain: &DomainSpec,
    u: &GridFunction,
    source_mesh: &QuadratureMesh,
    target: &QuadratureMesh,
) -> Result<GridFunction> {
    let DomainSpec::Hypograph2D { profile, half_width, height } = domain else {
        return Err(Error::Shape("pullback needs a hypograph domain".into()));
    };
    u.check_mesh(source_mesh)?;
    match &target.domain {
        DomainSpec::Strip { d: 2, m, l, .. }
            if (l - half_width).abs() <= 1e-12 * half_width && (m - height).abs() <= 1e-12 * height => {}
        _ => {
            return Err(Error::Shape(format!(
                "pullback target must be a 2-d strip of half-width {half_width} and height {height}"
            )))
        }
    }
    let lift = |x: &Point| [x[0], x[1] + profile.eval(x[0]), 0.0];
    if u.has_source() {
        let (u, profile) = (u.clone(), profile.clone());
        let mut g = GridFunction::from_fn(target, "", move |x| {
            u.eval_at_source(&[x[0], x[1] + profile.eval(x[0]), 0.0]).unwrap_or(0.0)
        });
        g.family_tag = "pullback".into();
        return Ok(g);
    }
    let values = target.nodes.iter().map(|x| u.eval_at(source_mesh, &lift(x))).collect();
    let boundary = target.boundary.points.iter().map(|x| u.eval_at(source_mesh, &lift(x))).collect();
    let mut g = GridFunction::from_values(target, values, Some(boundary))?;
    g.family_tag = "pullback(values)".into();
    Ok(g)
}
