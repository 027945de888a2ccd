use super::*;
use crate::geometry::{DomainSpec, MeshConfig, TangentialBc};
use crate::kernel::KernelParams;
use crate::norms::FunctionFamily;

fn coarse() -> Resolution {
    let cuts = vec![2f64.powi(-4), 2f64.powi(-5)];
    Resolution { mesh: MeshConfig::new(0.25, 2f64.powi(-5), 0.5), cuts, levels: vec![0, 1] }
}

fn strip() -> DomainSpec {
    DomainSpec::strip(2, 1.0, 0.5, TangentialBc::Periodic).unwrap()
}

fn params(theta: f64) -> KernelParams {
    KernelParams::new(2, 0.8, 1.5, theta).unwrap()
}

#[test]
fn hardy_strip_passes_on_zero_trace_families() {
    let reports = verify_hardy_strip(&strip(), &families::strip_zero_trace(0.5), &params(0.5), &coarse()).unwrap();
    assert_eq!(reports.len(), 8);
    for r in &reports {
        assert!(r.ratio.is_some_and(f64::is_finite), "{r:?}");
        assert!(r.pass, "{} {} drift {:?}", r.theorem_id, r.family, r.drift);
    }
}

#[test]
fn hardy_ratio_is_scale_invariant() {
    let base = FunctionFamily::parse("prod(coord(1), cosine(0, 1))").unwrap();
    let scaled = FunctionFamily::Scale { factor: 7.0, inner: Box::new(base.clone()) };
    let reports = verify_hardy_strip(&strip(), &[base, scaled], &params(0.5), &coarse()).unwrap();
    for pair in reports.chunks(2) {
        let (a, b) = (pair[0].ratio.unwrap(), pair[1].ratio.unwrap());
        assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
    }
}

#[test]
fn hardy_strip_rejects_subcritical_exponents() {
    let p = KernelParams::new(2, 0.6, 1.5, 0.5).unwrap();
    let err = verify_hardy_strip(&strip(), &families::strip_zero_trace(0.5), &p, &coarse()).unwrap_err();
    assert_eq!(err.to_string(), "hardy_strip requires sp > 1; got sp = 0.8999999999999999");
}

#[test]
fn trace_strip_reports_both_bounds() {
    let reports = verify_trace_strip(&strip(), &families::strip_with_trace(0.5), &params(0.5), &[0.5], &coarse()).unwrap();
    for id in ["trace_strip_lp", "trace_strip_seminorm"] {
        assert!(reports.iter().any(|r| r.theorem_id == id), "missing {id}");
    }
    assert!(reports.iter().all(|r| r.pass), "{reports:#?}");
}

#[test]
fn comparison_ratio_stays_below_one() {
    let reports = verify_seminorm_comparison(&strip(), &families::strip_with_trace(0.5), &params(0.5), 0.5, &coarse()).unwrap();
    for r in reports.iter().filter(|r| r.theorem_id == "theta_comparison") {
        assert!(r.pass && r.ratio.unwrap() <= 1.0, "{r:?}");
    }
}

#[test]
fn bounded_domain_checks_pass_on_the_unit_square() {
    let sq = DomainSpec::unit_square();
    let p = params(0.5);
    let poincare = verify_poincare(&sq, &families::square_zero_trace(), &p, &coarse()).unwrap();
    assert!(poincare.iter().all(|r| r.pass), "{poincare:#?}");
    let psi = FunctionFamily::parse("ramp(0, 0, 1)").unwrap();
    let mult = verify_multiplier(&sq, &families::polygon_with_trace(), &psi, &p, &coarse()).unwrap();
    assert!(mult.iter().all(|r| r.pass), "{mult:#?}");
}
