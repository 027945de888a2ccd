use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::InequalityReport;
use crate::error::{Error, Result};
use crate::kernel::KernelParams;

/// The two scalar inequalities behind the 1-D Hardy argument.
///
/// Part 1 samples ξ ∈ [0, 100] for sup (ξ^p − (1+ε)) / |ξ−1|^p and compares it with the
/// constructive constant α^{1−p}, α = 1 − (1+ε)^{1/(1−p)} (1 when p = 1). Part 2 samples
/// 0 ≤ a < b ≤ 1 for max (b^q − a^q) / (q(b − a)), which must stay below 1.
pub fn check_elementary_inequalities(p: f64, epsilon: f64, q: f64, samples: usize, seed: u64) -> Result<Vec<InequalityReport>> {
    if !(p >= 1.0 && p.is_finite()) || !(epsilon > 0.0) || !(q > 1.0 && q.is_finite()) {
        return Err(Error::Validity(format!("need p ≥ 1, ε > 0, q > 1; got p = {p}, ε = {epsilon}, q = {q}")));
    }
    if samples < 1000 {
        return Err(Error::Validity(format!("need at least 1000 samples; got {samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = |xi: f64| (xi.powf(p) - (1.0 + epsilon)) / (xi - 1.0).abs().powf(p);
    let mut sup = f64::NEG_INFINITY;
    for k in 0..=samples {
        let xi = 100.0 * k as f64 / samples as f64;
        if xi != 1.0 {
            sup = sup.max(ratio(xi));
        }
    }
    for _ in 0..samples {
        let xi: f64 = rng.gen_range(0.0..100.0);
        if xi != 1.0 {
            sup = sup.max(ratio(xi));
        }
    }
    let bound = if p == 1.0 {
        1.0
    } else {
        let alpha = 1.0 - (1.0 + epsilon).powf(1.0 / (1.0 - p));
        alpha.powf(1.0 - p)
    };
    let params = KernelParams { d: 1, s: 1.0, p, theta: 1.0 };
    let mut first = InequalityReport::new("elementary", &format!("xi_ratio(eps={epsilon:?})"), &params, sup, bound);
    first.envelope = Some(1.0);
    first.pass = sup.is_finite() && sup <= bound * (1.0 + 1e-12);
    first = first.with_note(format!("sampled sup C = {sup:.6}; constructive constant {bound:.6}"));

    let mut worst: f64 = 0.0;
    let mut at = (0.0, 1.0);
    for _ in 0..samples {
        let (x, y): (f64, f64) = (rng.gen(), rng.gen());
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        if b - a < 1e-9 {
            continue;
        }
        let v = (b.powf(q) - a.powf(q)) / (q * (b - a));
        if v > worst {
            worst = v;
            at = (a, b);
        }
    }
    let v01 = 1.0 / q;
    if v01 > worst {
        worst = v01;
        at = (0.0, 1.0);
    }
    let mut second = InequalityReport::new("elementary", &format!("power_quotient(q={q:?})"), &params, worst, 1.0);
    second.pass = worst < 1.0;
    second = second.with_note(format!("max at a = {:.4}, b = {:.4}", at.0, at.1));
    first.seed = Some(seed);
    second.seed = Some(seed);
    Ok(vec![first, second])
}
