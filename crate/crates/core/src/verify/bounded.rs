use super::common::Level;
use super::report::{apply_stability, InequalityReport, Resolution, DRIFT_TOL};
use crate::error::{precondition, Error, Result};
use crate::geometry::{build_graded_mesh, hypograph_pullback, DomainSpec, Point, TangentialBc};
use crate::kernel::KernelParams;
use crate::norms::{
    boundary_fractional_power, boundary_lp_power, require_zero_trace, FunctionFamily, GridFunction,
};
use crate::quad::unit_sphere_area;

fn require_hardy(params: &KernelParams, theorem: &str) -> Result<()> {
    params.validate()?;
    if !params.hardy_valid() {
        return Err(precondition(theorem, "sp > 1", format!("sp = {}", params.sp())));
    }
    Ok(())
}

/// Horizon fraction for the flattened half-space seminorm: σ = 1/(2K₂),
/// K₂ = K₁·√max(2, 1 + 2Lip²), so that σK₂ < 1.
pub fn flattening_sigma(domain: &DomainSpec) -> f64 {
    let lip = domain.lipschitz().unwrap_or(0.0);
    let k2 = domain.flattening_constant() * (2f64).max(1.0 + 2.0 * lip * lip).sqrt();
    1.0 / (2.0 * k2)
}

/// Largest |w_d − ζ(w′)| / δ(w) over a sampling grid of a hypograph.
pub fn measured_flattening_constant(domain: &DomainSpec, samples_per_axis: usize) -> Result<f64> {
    let DomainSpec::Hypograph2D { profile, half_width, height } = domain else {
        return Err(Error::Domain("flattening constant needs a hypograph".into()));
    };
    let n = samples_per_axis.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 1..=n {
            let x = -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64;
            let t = height * j as f64 / n as f64;
            let w: Point = [x, profile.eval(x) + t, 0.0];
            let d = domain.raw_delta(&w);
            if d > 0.0 {
                worst = worst.max(t / d);
            }
        }
    }
    Ok(worst)
}

/// ‖T_r u‖^p_{W^{s−1/p,p}(∂Ω)} ≤ C‖u‖^p_{𝔚^{s,p}} on polygons and hypographs. On a
/// hypograph this also reports the flattening bound |G_ζu|^p_{𝔚_σ} ≤ C|u|^p_{𝔚} and the
/// measured distance-comparison constant against √(1 + Lip²).
pub fn verify_trace_lipschitz(domain: &DomainSpec, families: &[FunctionFamily], params: &KernelParams, res: &Resolution) -> Result<Vec<InequalityReport>> {
    require_hardy(params, "trace_lipschitz")?;
    if !matches!(domain, DomainSpec::Polygon2D { .. } | DomainSpec::Hypograph2D { .. }) {
        return Err(precondition("trace_lipschitz", "a polygon or hypograph domain", format!("{domain:?}")));
    }
    let (p, s) = (params.p, params.s);
    let mut out = Vec::new();
    if let DomainSpec::Hypograph2D { .. } = domain {
        let k1 = measured_flattening_constant(domain, 201)?;
        let bound = domain.flattening_constant();
        let mut r = InequalityReport::new("trace_lipschitz.k1", "distance_comparison", params, k1, bound);
        r.envelope = Some(1.0);
        r.pass = k1 <= bound + 1e-8;
        out.push(r);
    }
    for &level in &res.levels {
        let lv = Level::build(domain, params, families, res, level)?;
        let w = lv.seminorms(params, res)?;
        let lp = lv.lp(p)?;
        for (k, f) in families.iter().enumerate() {
            let g = lv.us[k].boundary_values.as_deref().unwrap_or(&[]);
            let lhs = boundary_lp_power(&lv.mesh, g, p)? + boundary_fractional_power(&lv.mesh, g, s, p)?;
            let mut r = InequalityReport::new("trace_lipschitz", &f.to_string(), params, lhs, lp[k] + w[k].value)
                .with_level(level, res.finest_cut(), lv.ledger(res));
            r.monotone = w[k].monotone;
            r.seed = f.seed();
            out.push(r);
        }
        if let DomainSpec::Hypograph2D { half_width, height, .. } = domain {
            let sigma = flattening_sigma(domain);
            let ps = params.with_theta(sigma);
            let strip = DomainSpec::strip(2, *height, *half_width, TangentialBc::Truncated)?;
            let sm = build_graded_mesh(&strip, &ps, &res.mesh_at(level))?;
            let pulled = lv
                .us
                .iter()
                .map(|u| hypograph_pullback(domain, u, &lv.mesh, &sm))
                .collect::<Result<Vec<GridFunction>>>()?;
            let flat = Level { mesh: sm, us: pulled };
            let wf = flat.seminorms(&ps, res)?;
            let w1 = if params.theta == 1.0 { w.clone() } else { lv.seminorms(&params.with_theta(1.0), res)? };
            for (k, f) in families.iter().enumerate() {
                let mut r = InequalityReport::new("trace_lipschitz.flatten", &f.to_string(), &ps, wf[k].value, w1[k].value)
                    .with_level(level, res.finest_cut(), flat.ledger(res))
                    .with_note(format!("sigma = {sigma:.6}"));
                r.monotone = wf[k].monotone && w1[k].monotone;
                r.seed = f.seed();
                out.push(r);
            }
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}

/// ‖u‖^p_{L^p} ≤ C_P|u|^p_{𝔚} for zero-trace functions on a bounded domain.
pub fn verify_poincare(domain: &DomainSpec, families: &[FunctionFamily], params: &KernelParams, res: &Resolution) -> Result<Vec<InequalityReport>> {
    require_hardy(params, "poincare")?;
    if !matches!(domain, DomainSpec::Polygon2D { .. } | DomainSpec::Interval { .. }) {
        return Err(precondition("poincare", "a bounded domain", format!("{domain:?}")));
    }
    let mut out = Vec::new();
    for &level in &res.levels {
        let lv = Level::build(domain, params, families, res, level)?;
        for u in &lv.us {
            require_zero_trace(u, "poincare")?;
        }
        let w = lv.seminorms(params, res)?;
        let lp = lv.lp(params.p)?;
        for (k, f) in families.iter().enumerate() {
            let mut r = InequalityReport::new("poincare", &f.to_string(), params, lp[k], w[k].value)
                .with_level(level, res.finest_cut(), lv.ledger(res));
            r.monotone = w[k].monotone;
            r.seed = f.seed();
            out.push(r);
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}

/// Envelope of the multiplier constant: max(‖ψ‖^p_∞ + 2^{p−1}L^p|S^{d−1}|(ϑ·diam)^{(1−s)p}/(p+d),
/// 2^{p−1}‖ψ‖^p_∞), together with the simplified 2^{p−1}(‖ψ‖^p_∞ + L^p diam^{(1−s)p}).
pub fn multiplier_envelope(params: &KernelParams, psi_sup: f64, lip: f64, diam: f64) -> (f64, f64) {
    let (p, s, d) = (params.p, params.s, params.d);
    let sup = psi_sup.powf(p);
    let h = 2f64.powf(p - 1.0);
    let grad = h * lip.powf(p) * unit_sphere_area(d) / (p + d as f64) * (params.theta * diam).powf((1.0 - s) * p);
    let full = (sup + grad).max(h * sup);
    let simple = h * (sup + lip.powf(p) * diam.powf((1.0 - s) * p));
    (full, simple)
}

/// ‖ψu‖^p_{𝔚_ϑ} ≤ C‖u‖^p_{𝔚_ϑ} for a Lipschitz cutoff 0 ≤ ψ ≤ 1.
pub fn verify_multiplier(
    domain: &DomainSpec,
    families: &[FunctionFamily],
    psi: &FunctionFamily,
    params: &KernelParams,
    res: &Resolution,
) -> Result<Vec<InequalityReport>> {
    params.validate()?;
    if !matches!(domain, DomainSpec::Polygon2D { .. } | DomainSpec::Interval { .. }) {
        return Err(precondition("multiplier", "a bounded domain", format!("{domain:?}")));
    }
    let lip = psi
        .lipschitz()
        .ok_or_else(|| precondition("multiplier", "a cutoff with a recorded Lipschitz constant", psi.to_string()))?;
    let p = params.p;
    let mut out = Vec::new();
    for &level in &res.levels {
        let lv = Level::build(domain, params, families, res, level)?;
        let g = GridFunction::from_family(&lv.mesh, psi)?;
        let (lo, hi) = g.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if lo < 0.0 || hi > 1.0 {
            return Err(precondition("multiplier", "0 ≤ psi ≤ 1", format!("psi ranges over [{lo}, {hi}]")));
        }
        let (env, simple) = multiplier_envelope(params, hi, lip, domain.diameter());
        let prods = lv.us.iter().map(|u| g.mul(u)).collect::<Result<Vec<_>>>()?;
        let mut all: Vec<&GridFunction> = lv.refs();
        all.extend(prods.iter());
        let w = lv.seminorms_of(&all, params, res)?;
        let nf = families.len();
        for (k, f) in families.iter().enumerate() {
            let lp_u = crate::norms::lp_power(&lv.mesh, &lv.us[k], p)?;
            let lp_pu = crate::norms::lp_power(&lv.mesh, &prods[k], p)?;
            let mut r = InequalityReport::new("multiplier", &f.to_string(), params, lp_pu + w[nf + k].value, lp_u + w[k].value)
                .with_level(level, res.finest_cut(), lv.ledger(res))
                .with_note(format!("psi = {psi}; simplified envelope {simple:.6}"));
            r.envelope = Some(env);
            r.monotone = w[k].monotone && w[nf + k].monotone;
            r.pass = r.ratio.is_some_and(|x| x <= env);
            r.seed = f.seed();
            out.push(r);
        }
    }
    apply_stability(&mut out, DRIFT_TOL);
    Ok(out)
}
