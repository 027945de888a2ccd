use super::report::{aitken, apply_stability, InequalityReport};
use crate::error::{precondition, Result};
use crate::geometry::DomainSpec;
use crate::kernel::KernelParams;
use crate::norms::{abs_pow, FunctionFamily};
use crate::quad::gauss_on;

const OUTER: usize = 8;
const INNER: usize = 16;

/// Both sides of the 1-D Hardy inequality on [0, M] for one analytic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hardy1dSides {
    pub lhs: f64,
    pub rhs: f64,
}

/// Panel sums of ∫|u|^p x^{−sp} and ∫∫_{ax}^{bx} |u(y)−u(x)|^p x^{−sp−1} over x ≥ cut.
pub fn hardy_1d_sides(family: &FunctionFamily, a: f64, b: f64, s: f64, p: f64, m: f64, cuts: &[f64], level: u32) -> Result<Vec<Hardy1dSides>> {
    let dom = DomainSpec::interval(m)?;
    let u = |x: f64| family.eval(&dom, &[x, 0.0, 0.0]);
    let sp = s * p;
    let finest = cuts.iter().copied().fold(f64::INFINITY, f64::min);
    let sub = 1usize << level;
    let mut panels = Vec::new();
    let mut lo = finest;
    while lo < m {
        let hi = (2.0 * lo).min(m);
        let (l, r) = (lo, hi);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for k in 0..sub {
            let pl = l + (r - l) * k as f64 / sub as f64;
            let pr = l + (r - l) * (k + 1) as f64 / sub as f64;
            for (x, w) in gauss_on(pl, pr, OUTER) {
                let ux = u(x);
                lhs += w * abs_pow(ux, p) * x.powf(-sp);
                let mut inner = 0.0;
                for k2 in 0..sub {
                    let yl = a * x + (b - a) * x * k2 as f64 / sub as f64;
                    let yr = a * x + (b - a) * x * (k2 + 1) as f64 / sub as f64;
                    for (y, wy) in gauss_on(yl, yr, INNER) {
                        inner += wy * abs_pow(u(y) - ux, p);
                    }
                }
                rhs += w * inner * x.powf(-sp - 1.0);
            }
        }
        panels.push((lo, lhs, rhs));
        lo = hi;
    }
    Ok(cuts
        .iter()
        .map(|&c| {
            let keep = panels.iter().filter(|q| q.0 >= c * (1.0 - 1e-12));
            let (mut l, mut r) = (0.0, 0.0);
            for q in keep {
                l += q.1;
                r += q.2;
            }
            Hardy1dSides { lhs: l, rhs: r }
        })
        .collect())
}

/// Measured constant of the 1-D Hardy inequality, extrapolated over the cutoff ladder,
/// at each refinement level; passes when finite and stable to ±10%.
#[allow(clippy::too_many_arguments)]
pub fn verify_hardy_1d(
    family: &FunctionFamily,
    a: f64,
    b: f64,
    s: f64,
    p: f64,
    m: f64,
    cuts: &[f64],
    levels: &[u32],
) -> Result<Vec<InequalityReport>> {
    let params = KernelParams::new(1, s, p, 1.0)?;
    if !params.hardy_valid() {
        return Err(precondition("hardy_1d", "sp > 1", format!("sp = {}", params.sp())));
    }
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(precondition("hardy_1d", "0 ≤ a < b ≤ 1", format!("a = {a}, b = {b}")));
    }
    let dom = DomainSpec::interval(m)?;
    let u0 = family.eval(&dom, &[0.0; 3]);
    if u0.abs() >= 1e-12 {
        return Err(precondition("hardy_1d", "u(0) = 0", format!("u(0) = {u0}")));
    }
    let mut out = Vec::new();
    for &level in levels {
        let sides = hardy_1d_sides(family, a, b, s, p, m, cuts, level)?;
        let l = aitken(&sides.iter().map(|x| x.lhs).collect::<Vec<_>>());
        let r = aitken(&sides.iter().map(|x| x.rhs).collect::<Vec<_>>());
        let finest = cuts.iter().copied().fold(f64::INFINITY, f64::min);
        let mut rep = InequalityReport::new("hardy_1d", &family.to_string(), &params, l.value, r.value)
            .with_level(level, finest, finest)
            .with_m(m)
            .with_abk(a, b, None);
        rep.monotone = l.monotone && r.monotone;
        rep.seed = family.seed();
        out.push(rep);
    }
    apply_stability(&mut out, 0.10);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cuts() -> Vec<f64> {
        vec![2f64.powi(-5), 2f64.powi(-6), 2f64.powi(-7)]
    }

    #[test]
    fn identity_matches_closed_form() {
        let r = verify_hardy_1d(&FunctionFamily::coord(0), 0.5, 1.0, 0.75, 2.0, 1.0, &cuts(), &[0, 1]).unwrap();
        for rep in &r {
            assert!((rep.lhs - 2.0 / 3.0).abs() < 1e-6, "{}", rep.lhs);
            assert!((rep.rhs - 1.0 / 36.0).abs() < 1e-6, "{}", rep.rhs);
            assert!(rep.pass);
        }
    }

    #[test]
    fn square_matches_closed_form() {
        let f = FunctionFamily::Coord { axis: 0, power: 2.0 };
        let r = verify_hardy_1d(&f, 0.5, 1.0, 0.75, 2.0, 1.0, &cuts(), &[0]).unwrap();
        assert!((r[0].lhs - 2.0 / 7.0).abs() < 1e-6);
        assert!((r[0].rhs - 53.0 / 1680.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_low_sp_and_nonzero_value_at_origin() {
        let e = verify_hardy_1d(&FunctionFamily::coord(0), 0.5, 1.0, 0.45, 2.0, 1.0, &cuts(), &[0]).unwrap_err();
        assert_eq!(e.to_string(), "hardy_1d requires sp > 1; got sp = 0.9");
        assert!(verify_hardy_1d(&FunctionFamily::constant(1.0), 0.5, 1.0, 0.75, 2.0, 1.0, &cuts(), &[0]).is_err());
    }

    #[test]
    fn zero_function_has_zero_sides() {
        let r = verify_hardy_1d(&FunctionFamily::constant(0.0), 0.5, 1.0, 0.75, 2.0, 1.0, &cuts(), &[0]).unwrap();
        assert_eq!((r[0].lhs, r[0].rhs, r[0].ratio), (0.0, 0.0, Some(0.0)));
    }
}
