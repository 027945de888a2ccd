//! Averaged normal and tangential difference quotients on strips.

use std::f64::consts::PI;

use super::grid::GridFunction;
use super::seminorms::{abs_pow, ladder_sums, point_value};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, QuadratureMesh, TangentialBc};
use crate::kernel::KernelParams;
use crate::quad::gauss_on;
use crate::sum::par_map;

const GAUSS: usize = 16;

/// Per-node contributions to [u]_n^p and [u]_t^p; the second is None when d = 1.
pub fn directional_contributions(
    mesh: &QuadratureMesh,
    u: &GridFunction,
    params: &KernelParams,
    a: f64,
    b: f64,
    kappa: f64,
    cut: f64,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    params.validate()?;
    u.check_mesh(mesh)?;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Validity(format!("need 0 ≤ a < b ≤ 1; got a = {a}, b = {b}")));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Validity(format!("kappa must lie in (0, 1]; got {kappa}")));
    }
    let (half, periodic) = match &mesh.domain {
        DomainSpec::Interval { .. } => (0.0, false),
        DomainSpec::Strip { l, bc, .. } => (*l, *bc == TangentialBc::Periodic),
        _ => return Err(Error::Domain("directional seminorms are defined on strips only".into())),
    };
    let d = mesh.dim;
    let p = params.p;
    let ps = params.sp();
    let radial = gauss_on(0.0, 1.0, 8);
    let rows = par_map(mesh.len(), |i| {
        let x = mesh.nodes[i];
        let xd = x[d - 1];
        if mesh.delta[i] < cut || xd <= 0.0 {
            return (0.0, 0.0);
        }
        let ux = u.values[i];
        let scale = mesh.weights[i] * (params.theta * xd).powf(-ps);
        let mut normal = 0.0;
        for (y, w) in gauss_on(a * xd, b * xd, GAUSS) {
            let mut q = x;
            q[d - 1] = y;
            normal += w * abs_pow(point_value(mesh, u, &q) - ux, p);
        }
        normal /= (b - a) * xd;
        let r = kappa * xd;
        let wrap = |t: f64| {
            if periodic {
                (t + half).rem_euclid(2.0 * half) - half
            } else {
                t
            }
        };
        let tangential = match d {
            1 => 0.0,
            2 => {
                let (lo, hi) = if periodic { (x[0] - r, x[0] + r) } else { ((x[0] - r).max(-half), (x[0] + r).min(half)) };
                let mut acc = 0.0;
                for (y, w) in gauss_on(lo, hi, GAUSS) {
                    let q = [wrap(y), x[1], 0.0];
                    acc += w * abs_pow(point_value(mesh, u, &q) - ux, p);
                }
                acc / (hi - lo)
            }
            _ => {
                let (mut acc, mut meas) = (0.0, 0.0);
                for &(t, wt) in &radial {
                    for k in 0..GAUSS {
                        let phi = 2.0 * PI * (k as f64 + 0.5) / GAUSS as f64;
                        let y = [x[0] + r * t * phi.cos(), x[1] + r * t * phi.sin()];
                        if !periodic && (y[0].abs() > half || y[1].abs() > half) {
                            continue;
                        }
                        let w = wt * t;
                        let q = [wrap(y[0]), wrap(y[1]), x[2]];
                        acc += w * abs_pow(point_value(mesh, u, &q) - ux, p);
                        meas += w;
                    }
                }
                if meas > 0.0 {
                    acc / meas
                } else {
                    0.0
                }
            }
        };
        (scale * normal, scale * tangential)
    });
    let n: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let t = (d > 1).then(|| rows.iter().map(|r| r.1).collect());
    Ok((n, t))
}

/// ([u]_n, [u]_t) over nodes with δ ≥ the mesh cutoff.
pub fn directional_seminorms(
    mesh: &QuadratureMesh,
    u: &GridFunction,
    params: &KernelParams,
    a: f64,
    b: f64,
    kappa: f64,
) -> Result<(f64, f64)> {
    if mesh.dim == 1 {
        return Err(Error::Undefined("[u]_t needs tangential directions; the domain is one-dimensional".into()));
    }
    let cut = mesh.delta_cut();
    let (n, t) = directional_contributions(mesh, u, params, a, b, kappa, cut)?;
    let inv = 1.0 / params.p;
    let sn = ladder_sums(mesh, &n, &[cut])[0];
    let st = ladder_sums(mesh, &t.unwrap_or_default(), &[cut])[0];
    Ok((sn.powf(inv), st.powf(inv)))
}
