use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::grid::GridFunction;
use crate::error::{precondition, Error, Result};
use crate::geometry::{Point, QuadratureMesh};
use crate::kernel::KernelParams;
use crate::quad::{cube_self_moment, direction_average, sphere_rule};
use crate::sum::{pairwise_sum, par_map};

/// Boundary-layer bookkeeping attached to every singular-weight quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ledger {
    pub delta_cut: f64,
    pub excluded_measure: f64,
    pub excluded_nodes: usize,
    pub active_nodes: usize,
}

impl Ledger {
    pub fn of(mesh: &QuadratureMesh, cut: f64) -> Self {
        let excluded_nodes = mesh.delta.iter().filter(|&&d| d < cut).count();
        Self {
            delta_cut: cut,
            excluded_measure: mesh.excluded_measure(cut),
            excluded_nodes,
            active_nodes: mesh.len() - excluded_nodes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    /// The norm itself (p-th root taken where the quantity is a norm).
    pub value: f64,
    /// The underlying sum before any root.
    pub power: f64,
    pub ledger: Ledger,
}

#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 3.0 {
        a * a * a
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Validity(format!("p must lie in [1, ∞); got {p}")));
    }
    Ok(())
}

/// Partial sums of `contrib` over nodes with δ ≥ cut, for each cut.
pub fn ladder_sums(mesh: &QuadratureMesh, contrib: &[f64], cuts: &[f64]) -> Vec<f64> {
    cuts.iter()
        .map(|&c| {
            let masked: Vec<f64> = contrib.iter().zip(&mesh.delta).map(|(&v, &d)| if d >= c { v } else { 0.0 }).collect();
            pairwise_sum(&masked)
        })
        .collect()
}

pub fn lp_norm(mesh: &QuadratureMesh, u: &GridFunction, p: f64) -> Result<f64> {
    Ok(lp_power(mesh, u, p)?.powf(1.0 / p))
}

pub fn lp_power(mesh: &QuadratureMesh, u: &GridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    u.check_mesh(mesh)?;
    let c: Vec<f64> = u.values.iter().zip(&mesh.weights).map(|(v, w)| w * abs_pow(*v, p)).collect();
    Ok(pairwise_sum(&c))
}

pub fn boundary_lp_power(mesh: &QuadratureMesh, g: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if g.len() != mesh.boundary.len() {
        return Err(Error::Shape(format!("{} boundary values for {} boundary nodes", g.len(), mesh.boundary.len())));
    }
    let c: Vec<f64> = g.iter().zip(&mesh.boundary.weights).map(|(v, w)| w * abs_pow(*v, p)).collect();
    Ok(pairwise_sum(&c))
}

/// Per-node contributions w_x (ϑδ_x)^{−μ} Σ_y |B(x, ϑδ_x) ∩ cell_y| |u_y − u_x|^p for several
/// functions in one traversal; nodes with δ < cut contribute 0.
pub fn nonlocal_contributions(
    mesh: &QuadratureMesh,
    us: &[&GridFunction],
    params: &KernelParams,
    cut: f64,
) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    for u in us {
        u.check_mesh(mesh)?;
    }
    if params.d != mesh.dim {
        return Err(Error::Shape(format!("kernel dimension {} on a {}-d mesh", params.d, mesh.dim)));
    }
    if params.theta < mesh.theta() * (1.0 - 1e-12) {
        return Err(Error::Resolution(format!(
            "mesh graded for theta = {} cannot resolve theta = {}",
            mesh.theta(),
            params.theta
        )));
    }
    let p = params.p;
    let nf = us.len();
    let rows = par_map(mesh.len(), |i| {
        let mut acc = vec![0.0; nf];
        let di = mesh.delta[i];
        if di < cut || di <= 0.0 {
            return (acc, false);
        }
        let r = params.theta * di;
        let x = mesh.nodes[i];
        let mut others = false;
        mesh.for_each_in_ball(&x, r, |j, m| {
            if j != i {
                others = true;
            }
            for (a, u) in acc.iter_mut().zip(us) {
                *a += m * abs_pow(u.values[j] - u.values[i], p);
            }
        });
        let scale = mesh.weights[i] * params.ball_weight(di);
        for a in &mut acc {
            *a *= scale;
        }
        (acc, !others)
    });
    let active = mesh.delta.iter().filter(|&&d| d >= cut && d > 0.0).count();
    let empty = rows.iter().filter(|r| r.1).count();
    if empty as f64 > 0.01 * active as f64 {
        return Err(Error::Resolution(format!(
            "{empty} of {active} active nodes have no neighbours inside their horizon; refine the mesh"
        )));
    }
    Ok((0..nf).map(|k| rows.iter().map(|r| r.0[k]).collect()).collect())
}

/// |u|_{𝔚^{s,p}_ϑ} over nodes with δ ≥ the mesh cutoff.
pub fn nonlocal_seminorm(mesh: &QuadratureMesh, u: &GridFunction, params: &KernelParams) -> Result<NormReport> {
    let cut = mesh.delta_cut();
    let c = nonlocal_contributions(mesh, &[u], params, cut)?;
    let power = pairwise_sum(&c[0]);
    Ok(NormReport { value: power.powf(1.0 / params.p), power, ledger: Ledger::of(mesh, cut) })
}

/// p-th powers of the 𝔚 seminorm at each cutoff, from one traversal.
pub fn nonlocal_ladder(mesh: &QuadratureMesh, u: &GridFunction, params: &KernelParams, cuts: &[f64]) -> Result<Vec<f64>> {
    let lo = cuts.iter().copied().fold(f64::INFINITY, f64::min);
    let c = nonlocal_contributions(mesh, &[u], params, lo)?;
    Ok(ladder_sums(mesh, &c[0], cuts))
}

/// Σ w |u|^p δ^{−ps} over nodes with δ ≥ the mesh cutoff; needs a vanishing trace.
pub fn hardy_quotient(mesh: &QuadratureMesh, u: &GridFunction, params: &KernelParams) -> Result<NormReport> {
    let cut = mesh.delta_cut();
    let c = hardy_contributions(mesh, u, params, "hardy_strip")?;
    let power = ladder_sums(mesh, &c, &[cut])[0];
    Ok(NormReport { value: power, power, ledger: Ledger::of(mesh, cut) })
}

pub fn hardy_contributions(mesh: &QuadratureMesh, u: &GridFunction, params: &KernelParams, theorem: &str) -> Result<Vec<f64>> {
    params.validate()?;
    u.check_mesh(mesh)?;
    if !params.hardy_valid() {
        return Err(precondition(theorem, "sp > 1", format!("sp = {}", params.sp())));
    }
    require_zero_trace(u, theorem)?;
    let ps = params.sp();
    Ok((0..mesh.len())
        .map(|i| {
            let d = mesh.delta[i];
            if d <= 0.0 {
                0.0
            } else {
                mesh.weights[i] * abs_pow(u.values[i], params.p) * d.powf(-ps)
            }
        })
        .collect())
}

pub(crate) fn require_zero_trace(u: &GridFunction, theorem: &str) -> Result<()> {
    match u.max_abs_trace() {
        None => Err(precondition(theorem, "a known boundary trace", "no boundary values".into())),
        Some(m) if m >= 1e-12 => Err(precondition(theorem, "vanishing boundary trace", format!("max |u| on Γ = {m:e}"))),
        _ => Ok(()),
    }
}

/// Least-squares gradient of nodal values from cells near node i.
fn nodal_gradient(mesh: &QuadratureMesh, values: &[f64], i: usize) -> Vector3<f64> {
    let d = mesh.dim;
    let x = mesh.nodes[i];
    let mut a = Matrix3::<f64>::zeros();
    let mut b = Vector3::<f64>::zeros();
    let r = 1.5 * mesh.cell_diameter(i);
    mesh.for_each_near(&x, r, |j| {
        if j == i {
            return;
        }
        let y = mesh.nodes[j];
        let mut dx = Vector3::zeros();
        for k in 0..d {
            dx[k] = y[k] - x[k];
        }
        if dx.norm() >= r {
            return;
        }
        a += dx * dx.transpose();
        b += dx * (values[j] - values[i]);
    });
    for k in d..3 {
        a[(k, k)] = 1.0;
    }
    a.try_inverse().map_or(Vector3::zeros(), |inv| inv * b)
}

fn gagliardo_check(s: f64, p: f64) -> Result<()> {
    check_p(p)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Validity(format!("Gagliardo order s must lie in (0, 1); got {s}")));
    }
    Ok(())
}

/// Dense W^{s,p} Gagliardo seminorm. Each pair sum subtracts the local linear model
/// |∇u(x)·(y−x)|^p, whose integral over Ω is added back exactly along rays from every node.
pub fn gagliardo_seminorm(mesh: &QuadratureMesh, u: &GridFunction, s: f64, p: f64) -> Result<f64> {
    Ok(gagliardo_power(mesh, u, s, p)?.powf(1.0 / p))
}

pub fn gagliardo_power(mesh: &QuadratureMesh, u: &GridFunction, s: f64, p: f64) -> Result<f64> {
    gagliardo_check(s, p)?;
    u.check_mesh(mesh)?;
    let d = mesh.dim;
    let half_exp = -0.5 * (d as f64 + s * p);
    let q = p * (1.0 - s);
    let n = mesh.len();
    let v = &u.values;
    let grads: Vec<Vector3<f64>> = par_map(n, |i| nodal_gradient(mesh, v, i));
    let dirs = sphere_rule(d);
    let rows = par_map(n, |i| {
        let xi = mesh.nodes[i];
        let gi = grads[i];
        let mut acc = Vec::with_capacity(n - i);
        for j in i + 1..n {
            let z = mesh.displacement(&xi, &mesh.nodes[j]);
            let z = Vector3::new(z[0], z[1], z[2]);
            let model = 0.5 * (abs_pow(gi.dot(&z), p) + abs_pow(grads[j].dot(&z), p));
            let diff = abs_pow(v[j] - v[i], p) - model;
            if diff == 0.0 {
                continue;
            }
            acc.push(mesh.weights[j] * diff * z.norm_squared().powf(half_exp));
        }
        let off = 2.0 * mesh.weights[i] * pairwise_sum(&acc);
        if gi == Vector3::zeros() {
            return off;
        }
        let linear: Vec<f64> = dirs
            .iter()
            .map(|(e, w)| {
                let along = abs_pow(gi[0] * e[0] + gi[1] * e[1] + gi[2] * e[2], p);
                if along == 0.0 {
                    return 0.0;
                }
                let radial: f64 = mesh.domain.ray_chords(&xi, e).iter().map(|(a, b)| b.powf(q) - a.powf(q)).sum();
                w * along * radial / q
            })
            .collect();
        off + mesh.weights[i] * pairwise_sum(&linear)
    });
    Ok(pairwise_sum(&rows))
}

/// Seminorm of W^{s−1/p,p}(Γ): Σ |g_a − g_b|^p / |ξ_a − ξ_b|^{d+ps−2} over boundary pairs.
pub fn boundary_fractional_seminorm(mesh: &QuadratureMesh, g: &[f64], s: f64, p: f64) -> Result<f64> {
    Ok(boundary_fractional_power(mesh, g, s, p)?.powf(1.0 / p))
}

pub fn boundary_exponent(d: usize, s: f64, p: f64) -> f64 {
    d as f64 + p * s - 2.0
}

pub fn boundary_fractional_power(mesh: &QuadratureMesh, g: &[f64], s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    let bm = &mesh.boundary;
    if g.len() != bm.len() {
        return Err(Error::Shape(format!("{} boundary values for {} boundary nodes", g.len(), bm.len())));
    }
    let k = bm.dim;
    if k == 0 {
        return Ok(0.0);
    }
    let e = boundary_exponent(mesh.dim, s, p);
    let a = p - e;
    if a <= -(k as f64) {
        return Err(Error::Validity(format!("boundary seminorm needs s < 1 + 1/p; got s = {s}")));
    }
    let diag_const = direction_average(k, p) * cube_self_moment(k, a);
    let n = bm.len();
    let half_exp = -0.5 * e;
    let rows = par_map(n, |i| {
        let xi = bm.points[i];
        let mut acc = Vec::with_capacity(n - i);
        for j in i + 1..n {
            let diff = g[j] - g[i];
            if diff == 0.0 {
                continue;
            }
            let r = mesh.separation(&xi, &bm.points[j]);
            acc.push(bm.weights[j] * abs_pow(diff, p) * (r * r).powf(half_exp));
        }
        let off = 2.0 * bm.weights[i] * pairwise_sum(&acc);
        let grad = boundary_gradient(mesh, g, i);
        let h = bm.weights[i].powf(1.0 / k as f64);
        off + abs_pow(grad, p) * diag_const * h.powf(2.0 * k as f64 + a)
    });
    Ok(pairwise_sum(&rows))
}

fn boundary_gradient(mesh: &QuadratureMesh, g: &[f64], i: usize) -> f64 {
    let bm = &mesh.boundary;
    let wrap = |mut t: f64| {
        if let Some(per) = bm.period {
            if t > 0.5 * per {
                t -= per;
            } else if t < -0.5 * per {
                t += per;
            }
        }
        t
    };
    let mut a = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for &j in &bm.adjacency[i] {
        let j = j as usize;
        let dt = [wrap(bm.param[j][0] - bm.param[i][0]), wrap(bm.param[j][1] - bm.param[i][1])];
        let dg = g[j] - g[i];
        for r in 0..2 {
            b[r] += dt[r] * dg;
            for c in 0..2 {
                a[r][c] += dt[r] * dt[c];
            }
        }
    }
    if bm.dim == 1 {
        return if a[0][0] > 0.0 { (b[0] / a[0][0]).abs() } else { 0.0 };
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-300 {
        return 0.0;
    }
    let gx = (a[1][1] * b[0] - a[0][1] * b[1]) / det;
    let gy = (a[0][0] * b[1] - a[1][0] * b[0]) / det;
    gx.hypot(gy)
}

/// Recomputes nodal values of a sourced function at arbitrary points.
pub(crate) fn point_value(mesh: &QuadratureMesh, u: &GridFunction, x: &Point) -> f64 {
    u.eval_at(mesh, x)
}
