use super::common::Level;
use super::report::{aitken, apply_stability, InequalityReport, Resolution, DRIFT_TOL};
use crate::error::{precondition, Error, Result};
use crate::geometry::DomainSpec;
use crate::kernel::KernelParams;
use crate::norms::{boundary_fractional_power, boundary_lp_power, directional_contributions, ladder_sums, require_zero_trace, FunctionFamily};
use crate::quad::unit_ball_volume;

fn strip_height(domain: &DomainSpec, theorem: &str) -> Result<f64> {
    match domain {
        DomainSpec::Interval { m } | DomainSpec::Strip { m, .. } => Ok(*m),
        _ => Err(precondition(theorem, "a strip domain", format!("{domain:?}"))),
    }
}

fn require_hardy(params: &KernelParams, theorem: &str) -> Result<()> {
    params.validate()?;
    if !params.hardy_valid() {
        return Err(precondition(theorem, "sp > 1", format!("sp = {}", params.sp())));
    }
    Ok(())
}

/// Hardy quotient against |u|^p_{𝔚_ϑ} on a strip, per function and refinement level.
pub fn verify_hardy_strip(domain: &DomainSpec, families: &[FunctionFamily], params: &KernelParams, res: &Resolution) -> Result<Vec<InequalityReport>> {
    require_hardy(params, "hardy_strip")?;
    let m = strip_height(domain, "hardy_strip")?;
    let mut out = Vec::new();
    for &level in &res.levels {
        let lv = Level::build(domain, params, families, res, level)?;
        for u in &lv.us {
            require_zero_trace(u, "hardy_strip")?;
        }
        let h = lv.hardy(params, res, "hardy_strip")?;
        let w = lv.seminorms(params, res)?;
        for (k, f) in families.iter().enumerate() {
            let mut r = InequalityReport::new("hardy_strip", &f.to_string(), params, h[k].value, w[k].value)
                .with_level(level, res.finest_cut(), lv.ledger(res))
                .with_m(m);
            r.monotone = h[k].monotone && w[k].monotone;
            r.seed = f.seed();
            out.push(r);
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}

/// Hardy quotient against ϑ^{ps−p}|u|^p_{𝔚_ϑ} + M^{−ps}‖u‖^p_{L^p} over a ϑ sweep; the
/// `hardy_strip_theta.max` rows carry the single constant covering the whole sweep.
pub fn verify_hardy_strip_theta(
    domain: &DomainSpec,
    families: &[FunctionFamily],
    params: &KernelParams,
    thetas: &[f64],
    res: &Resolution,
) -> Result<Vec<InequalityReport>> {
    require_hardy(params, "hardy_strip_theta")?;
    let m = strip_height(domain, "hardy_strip_theta")?;
    let (p, ps) = (params.p, params.sp());
    let mut out = Vec::new();
    for &level in &res.levels {
        let mut worst: Vec<Option<InequalityReport>> = vec![None; families.len()];
        for &theta in thetas {
            let pt = params.with_theta(theta);
            pt.validate()?;
            let lv = Level::build(domain, &pt, families, res, level)?;
            for u in &lv.us {
                require_zero_trace(u, "hardy_strip_theta")?;
            }
            let h = lv.hardy(&pt, res, "hardy_strip_theta")?;
            let w = lv.seminorms(&pt, res)?;
            let lp = lv.lp(p)?;
            for (k, f) in families.iter().enumerate() {
                let rhs = theta.powf(ps - p) * w[k].value + m.powf(-ps) * lp[k];
                let mut r = InequalityReport::new("hardy_strip_theta", &f.to_string(), &pt, h[k].value, rhs)
                    .with_level(level, res.finest_cut(), lv.ledger(&res))
                    .with_m(m);
                r.monotone = h[k].monotone && w[k].monotone;
                r.seed = f.seed();
                let replace = match &worst[k] {
                    None => true,
                    Some(prev) => r.ratio.unwrap_or(f64::INFINITY) > prev.ratio.unwrap_or(f64::INFINITY),
                };
                if replace {
                    let mut agg = r.clone();
                    agg.theorem_id = "hardy_strip_theta.max".into();
                    agg.theta = thetas.iter().copied().fold(f64::INFINITY, f64::min);
                    agg.note = format!("worst theta = {theta}");
                    worst[k] = Some(agg);
                }
                out.push(r);
            }
        }
        out.extend(worst.into_iter().flatten());
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}

/// Both trace bounds on strips of height M and 2M over a ϑ sweep:
/// ‖u‖^p_{L^p(Γ)} ≤ C(M^{−1}‖u‖^p + ϑ^{ps−p}M^{ps−1}|u|^p_{𝔚_ϑ}) and
/// |u|^p_{W^{s−1/p,p}(Γ)} ≤ C(M^{−ps}‖u‖^p + ϑ^{ps−p}|u|^p_{𝔚_ϑ}).
pub fn verify_trace_strip(
    domain: &DomainSpec,
    families: &[FunctionFamily],
    params: &KernelParams,
    thetas: &[f64],
    res: &Resolution,
) -> Result<Vec<InequalityReport>> {
    require_hardy(params, "trace_strip")?;
    let (d, m0, l, bc) = match domain {
        DomainSpec::Strip { d, m, l, bc } if *d >= 2 => (*d, *m, *l, *bc),
        _ => return Err(precondition("trace_strip", "a strip of dimension 2 or 3", format!("{domain:?}"))),
    };
    let (p, s, ps) = (params.p, params.s, params.sp());
    let mut out = Vec::new();
    for mm in [m0, 2.0 * m0] {
        let dom = DomainSpec::strip(d, mm, l, bc)?;
        for &theta in thetas {
            let pt = params.with_theta(theta);
            pt.validate()?;
            for &level in &res.levels {
                let lv = Level::build(&dom, &pt, families, res, level)?;
                let w = lv.seminorms(&pt, res)?;
                let lp = lv.lp(p)?;
                for (k, f) in families.iter().enumerate() {
                    let g = lv.us[k].boundary_values.as_deref().unwrap_or(&[]);
                    let gl = boundary_lp_power(&lv.mesh, g, p)?;
                    let gs = boundary_fractional_power(&lv.mesh, g, s, p)?;
                    let tw = theta.powf(ps - p) * w[k].value;
                    let rhs1 = lp[k] / mm + tw * mm.powf(ps - 1.0);
                    let rhs2 = mm.powf(-ps) * lp[k] + tw;
                    for (id, lhs, rhs) in [("trace_strip_lp", gl, rhs1), ("trace_strip_seminorm", gs, rhs2)] {
                        let mut r = InequalityReport::new(id, &f.to_string(), &pt, lhs, rhs)
                            .with_level(level, res.finest_cut(), lv.ledger(res))
                            .with_m(mm);
                        r.monotone = w[k].monotone;
                        r.seed = f.seed();
                        out.push(r);
                    }
                }
            }
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}

/// (a, b, κ) with (a−1)² + κ² < ϑ²: (1/2, 1, 1/2) when admissible, else (1 − ϑ/2, 1, ϑ/2).
pub fn normal_tangential_abk(theta: f64) -> (f64, f64, f64) {
    if 0.5 < theta * theta {
        (0.5, 1.0, 0.5)
    } else {
        (1.0 - theta / 2.0, 1.0, theta / 2.0)
    }
}

/// [u]_n^p and [u]_t^p against |u|^p_{𝔚_ϑ}, rows `normal_tangential.n` and `.t`.
pub fn verify_normal_tangential(domain: &DomainSpec, families: &[FunctionFamily], params: &KernelParams, res: &Resolution) -> Result<Vec<InequalityReport>> {
    require_hardy(params, "normal_tangential")?;
    let m = match domain {
        DomainSpec::Strip { d, m, .. } if *d >= 2 => *m,
        _ => return Err(precondition("normal_tangential", "a strip of dimension 2 or 3", format!("{domain:?}"))),
    };
    let (a, b, kappa) = normal_tangential_abk(params.theta);
    let mut out = Vec::new();
    for &level in &res.levels {
        let lv = Level::build(domain, params, families, res, level)?;
        let w = lv.seminorms(params, res)?;
        for (k, f) in families.iter().enumerate() {
            let (n, t) = directional_contributions(&lv.mesh, &lv.us[k], params, a, b, kappa, res.finest_cut())?;
            let t = t.ok_or_else(|| Error::Undefined("[u]_t needs tangential directions".into()))?;
            for (id, c) in [("normal_tangential.n", n), ("normal_tangential.t", t)] {
                let e = aitken(&ladder_sums(&lv.mesh, &c, &res.cuts));
                let mut r = InequalityReport::new(id, &f.to_string(), params, e.value, w[k].value)
                    .with_level(level, res.finest_cut(), lv.ledger(res))
                    .with_m(m)
                    .with_abk(a, b, Some(kappa));
                r.monotone = e.monotone && w[k].monotone;
                r.seed = f.seed();
                out.push(r);
            }
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}

/// The two constants of the ϑ-comparison bound, with the exponent on θ₀/(1−θ₀) as given.
pub fn comparison_constants(params: &KernelParams, theta0: f64, m: f64, exponent: f64) -> (f64, f64) {
    let (d, p, ps, mu) = (params.d as f64, params.p, params.sp(), params.mu());
    let c1 = 2f64.powf(p) * unit_ball_volume(params.d) * theta0.powf(1.0 - mu) * ((1.0 - theta0) * m).powf(-ps);
    let c2 = 2f64.powf(d + p) * (1.0 + theta0).powf(mu) * theta0.powf(-mu) * (theta0 / (1.0 - theta0)).powf(exponent);
    (c1, c2 * params.theta.powf(ps - p))
}

/// |u|^p_{𝔚_θ₀} ≤ c₁‖u‖^p + c₂ϑ^{ps−p}|u|^p_{𝔚_ϑ} with the displayed exponent d−p
/// (`theta_comparison`) and the exponent d+p obtained in the proof (`theta_comparison.dplus`).
/// Rows pass only when the bound holds (ratio ≤ 1) and is stable.
pub fn verify_seminorm_comparison(
    domain: &DomainSpec,
    families: &[FunctionFamily],
    params: &KernelParams,
    theta0: f64,
    res: &Resolution,
) -> Result<Vec<InequalityReport>> {
    params.validate()?;
    if !params.comparison_valid() {
        return Err(precondition("theta_comparison", "sp ≥ 1", format!("sp = {}", params.sp())));
    }
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(precondition("theta_comparison", "theta0 in (0, 1)", format!("theta0 = {theta0}")));
    }
    let cap = theta0 / (1.0 - theta0);
    if params.theta > cap * (1.0 + 1e-12) {
        return Err(precondition("theta_comparison", "theta ≤ theta0/(1 − theta0)", format!("theta = {}, bound = {cap}", params.theta)));
    }
    let m = strip_height(domain, "theta_comparison")?;
    let p0 = params.with_theta(theta0);
    let coarse = params.with_theta(params.theta.min(theta0));
    let (d, p) = (params.d as f64, params.p);
    let mut out = Vec::new();
    for &level in &res.levels {
        let lv = Level::build(domain, &coarse, families, res, level)?;
        let w0 = lv.seminorms(&p0, res)?;
        let w = lv.seminorms(params, res)?;
        let lp = lv.lp(p)?;
        for (k, f) in families.iter().enumerate() {
            for (id, e) in [("theta_comparison", d - p), ("theta_comparison.dplus", d + p)] {
                let (c1, c2) = comparison_constants(params, theta0, m, e);
                let rhs = c1 * lp[k] + c2 * w[k].value;
                let mut r = InequalityReport::new(id, &f.to_string(), params, w0[k].value, rhs)
                    .with_level(level, res.finest_cut(), lv.ledger(res))
                    .with_m(m);
                r.theta0 = Some(theta0);
                r.envelope = Some(1.0);
                r.monotone = w0[k].monotone && w[k].monotone;
                r.pass = r.ratio.is_some_and(|x| x <= 1.0);
                r.seed = f.seed();
                out.push(r);
            }
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}
