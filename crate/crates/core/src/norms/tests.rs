use super::*;
use crate::geometry::{build_graded_mesh, build_uniform_mesh, DomainSpec, MeshConfig, TangentialBc};
use crate::kernel::KernelParams;

fn interval_mesh(theta: f64) -> (crate::geometry::QuadratureMesh, KernelParams) {
    let params = KernelParams::new(1, 0.75, 2.0, theta).unwrap();
    let mesh = build_graded_mesh(&DomainSpec::interval(1.0).unwrap(), &params, &MeshConfig::new(0.02, 1e-3, 0.25)).unwrap();
    (mesh, params)
}

#[test]
fn lp_norm_examples() {
    let (mesh, _) = interval_mesh(0.5);
    let one = GridFunction::from_family(&mesh, &FunctionFamily::constant(1.0)).unwrap();
    assert!((lp_norm(&mesh, &one, 2.0).unwrap() - 1.0).abs() < 1e-12);
    let x = GridFunction::from_family(&mesh, &FunctionFamily::coord(0)).unwrap();
    assert!((lp_norm(&mesh, &x, 2.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-4);
    let zero = x.scaled(0.0);
    assert_eq!(lp_norm(&mesh, &zero, 3.0).unwrap(), 0.0);
}

#[test]
fn seminorms_vanish_on_constants_and_are_homogeneous() {
    let (mesh, params) = interval_mesh(0.5);
    let c = GridFunction::from_family(&mesh, &FunctionFamily::constant(2.5)).unwrap();
    assert_eq!(nonlocal_seminorm(&mesh, &c, &params).unwrap().value, 0.0);
    assert!(gagliardo_seminorm(&mesh, &c, 0.4, 2.0).unwrap() <= 1e-12);
    let u = GridFunction::from_family(&mesh, &FunctionFamily::parse("sine(0, 1.5)").unwrap()).unwrap();
    let a = nonlocal_seminorm(&mesh, &u, &params).unwrap().value;
    let b = nonlocal_seminorm(&mesh, &u.scaled(-3.0), &params).unwrap().value;
    assert!((b - 3.0 * a).abs() <= 1e-12 * b);
    assert!(a <= gagliardo_seminorm(&mesh, &u, 0.75 - 1e-9, 2.0).unwrap());
}

#[test]
fn hardy_quotient_of_identity() {
    let (mesh, params) = interval_mesh(1.0);
    let u = GridFunction::from_family(&mesh, &FunctionFamily::coord(0)).unwrap();
    let h = hardy_quotient(&mesh, &u, &params).unwrap();
    assert!((h.value - 2.0 / 3.0).abs() < 1e-3);
    assert!(h.ledger.excluded_measure > 0.0);
    let one = GridFunction::from_family(&mesh, &FunctionFamily::constant(1.0)).unwrap();
    let err = hardy_quotient(&mesh, &one, &params).unwrap_err();
    assert!(err.to_string().starts_with("hardy_strip requires vanishing boundary trace"));
    let low = KernelParams::new(1, 0.45, 2.0, 1.0).unwrap();
    let err = hardy_quotient(&mesh, &u, &low).unwrap_err();
    assert_eq!(err.to_string(), "hardy_strip requires sp > 1; got sp = 0.9");
}

#[test]
fn directional_seminorms_of_normal_coordinate() {
    let dom = DomainSpec::strip(2, 1.0, 0.5, TangentialBc::Truncated).unwrap();
    let params = KernelParams::new(2, 0.75, 2.0, 1.0).unwrap();
    let mesh = build_graded_mesh(&dom, &params, &MeshConfig::new(0.1, 1e-3, 0.5)).unwrap();
    let u = GridFunction::from_family(&mesh, &FunctionFamily::coord(1)).unwrap();
    let (n, t) = directional_seminorms(&mesh, &u, &params, 0.5, 1.0, 0.5).unwrap();
    assert_eq!(t, 0.0);
    let (a, b): (f64, f64) = (0.5, 1.0);
    let cut: f64 = mesh.delta_cut();
    let integral = 2.0 / 3.0 * (1.0 - cut.powf(1.5));
    let exact = ((1.0 - a).powi(3) - (1.0 - b).powi(3)) / (3.0 * (b - a)) * integral;
    assert!((n * n - exact).abs() < 0.01 * exact, "{} vs {}", n * n, exact);
    let (m1, _) = interval_mesh(1.0);
    let v = GridFunction::from_family(&m1, &FunctionFamily::coord(0)).unwrap();
    assert!(matches!(directional_seminorms(&m1, &v, &params.with_theta(1.0), 0.5, 1.0, 0.5), Err(crate::Error::Undefined(_))));
}

#[test]
fn boundary_seminorm_exponent_and_constants() {
    assert_eq!(boundary_exponent(2, 0.75, 2.0), 1.5);
    let dom = DomainSpec::strip(2, 1.0, 1.0, TangentialBc::Truncated).unwrap();
    let params = KernelParams::new(2, 0.75, 2.0, 0.5).unwrap();
    let mesh = build_uniform_mesh(&dom, &params, &[20, 10], 0.05).unwrap();
    let g = vec![3.0; mesh.boundary.len()];
    assert_eq!(boundary_fractional_seminorm(&mesh, &g, 0.75, 2.0).unwrap(), 0.0);
}

#[test]
fn multiple_functions_share_one_traversal() {
    let (mesh, params) = interval_mesh(0.5);
    let u = GridFunction::from_family(&mesh, &FunctionFamily::coord(0)).unwrap();
    let v = GridFunction::from_family(&mesh, &FunctionFamily::TensorSine { frequency: 2.0 }).unwrap();
    let both = nonlocal_contributions(&mesh, &[&u, &v], &params, mesh.delta_cut()).unwrap();
    let one = nonlocal_contributions(&mesh, &[&v], &params, mesh.delta_cut()).unwrap();
    assert_eq!(both[1], one[0]);
}

#[test]
fn ladder_is_monotone_in_cut() {
    let (mesh, params) = interval_mesh(0.5);
    let u = GridFunction::from_family(&mesh, &FunctionFamily::coord(0)).unwrap();
    let l = nonlocal_ladder(&mesh, &u, &params, &[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]).unwrap();
    assert!(l[0] < l[1] && l[1] < l[2]);
}

#[test]
fn pullback_examples() {
    use crate::geometry::{hypograph_pullback, Profile};
    let prof = Profile::new(vec![-1.0, 1.0], vec![-0.5, 0.5]).unwrap();
    let hyp = DomainSpec::hypograph(prof, 1.0, 1.0).unwrap();
    let params = KernelParams::new(2, 0.75, 2.0, 0.5).unwrap();
    let cfg = MeshConfig::new(0.1, 1.0 / 64.0, 0.5);
    let hm = build_graded_mesh(&hyp, &params, &cfg).unwrap();
    let strip = DomainSpec::strip(2, 1.0, 1.0, TangentialBc::Truncated).unwrap();
    let sm = build_graded_mesh(&strip, &params, &cfg).unwrap();
    let u = GridFunction::from_family(&hm, &FunctionFamily::coord(1)).unwrap();
    let g = hypograph_pullback(&hyp, &u, &hm, &sm).unwrap();
    for (x, v) in sm.nodes.iter().zip(&g.values) {
        assert!((v - (x[1] + 0.5 * x[0])).abs() < 1e-12);
    }
    let w = GridFunction::from_family(&hm, &FunctionFamily::power_alpha(0.5)).unwrap();
    let gw = hypograph_pullback(&hyp, &w, &hm, &sm).unwrap();
    let (a, b) = (lp_norm(&hm, &w, 2.0).unwrap(), lp_norm(&sm, &gw, 2.0).unwrap());
    assert!((a - b).abs() < 0.02 * a);
    assert!(hypograph_pullback(&strip, &u, &hm, &sm).is_err());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn fixture() -> (crate::geometry::QuadratureMesh, KernelParams) {
        let params = KernelParams::new(1, 0.7, 1.8, 0.5).unwrap();
        let mesh = build_uniform_mesh(&DomainSpec::interval(1.0).unwrap(), &params, &[48], 1.0 / 48.0).unwrap();
        (mesh, params)
    }

    fn values() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-5.0f64..5.0, 48)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn nonlocal_seminorm_is_subadditive(a in values(), b in values()) {
            let (mesh, params) = fixture();
            let u = GridFunction::from_values(&mesh, a, None).unwrap();
            let v = GridFunction::from_values(&mesh, b, None).unwrap();
            let sum = u.add(&v).unwrap();
            let n = |w: &GridFunction| nonlocal_seminorm(&mesh, w, &params).unwrap().value;
            prop_assert!(n(&sum) <= (n(&u) + n(&v)) * (1.0 + 1e-12));
        }

        #[test]
        fn seminorms_are_absolutely_homogeneous(a in values(), lambda in -20.0f64..20.0) {
            let (mesh, params) = fixture();
            let u = GridFunction::from_values(&mesh, a, None).unwrap();
            let base = nonlocal_seminorm(&mesh, &u, &params).unwrap().value;
            let scaled = nonlocal_seminorm(&mesh, &u.scaled(lambda), &params).unwrap().value;
            prop_assert!((scaled - lambda.abs() * base).abs() <= 1e-12 * (1.0 + scaled));
            let g = gagliardo_seminorm(&mesh, &u, 0.7, 1.8).unwrap();
            let gs = gagliardo_seminorm(&mesh, &u.scaled(lambda), 0.7, 1.8).unwrap();
            prop_assert!((gs - lambda.abs() * g).abs() <= 1e-12 * (1.0 + gs));
        }

        #[test]
        fn adding_a_constant_changes_nothing(a in values(), c in -100.0f64..100.0) {
            let (mesh, params) = fixture();
            let u = GridFunction::from_values(&mesh, a.clone(), None).unwrap();
            let shifted = GridFunction::from_values(&mesh, a.iter().map(|v| v + c).collect(), None).unwrap();
            let x = nonlocal_seminorm(&mesh, &u, &params).unwrap().value;
            let y = nonlocal_seminorm(&mesh, &shifted, &params).unwrap().value;
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x));
        }
    }
}
