use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{build_uniform_mesh, DomainSpec, TangentialBc};
use crate::kernel::{Coefficient, KernelParams};
use crate::norms::FunctionFamily;
use crate::Error;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Interval (0, 1), uniform cells, ring = first cell, Ω₀ = [0.3, 0.9].
fn interval_problem(n: usize, p: f64, growth: Growth, seed: u64) -> ObstacleProblem {
    let params = KernelParams::new(1, 0.6, p, 1.0).unwrap();
    let dom = DomainSpec::interval(1.0).unwrap();
    let mesh = build_uniform_mesh(&dom, &params, &[n], 1.0 / n as f64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega0 = Omega0::Box { lo: vec![0.3], hi: vec![0.9] };
    let obstacle = mesh
        .nodes
        .iter()
        .zip(&mesh.delta)
        .map(|(x, &d)| if omega0.contains(x, d) { rng.gen_range(0.0..0.3) } else { f64::NEG_INFINITY })
        .collect();
    let forcing = (0..n).map(|_| rng.gen_range(-0.2..0.6)).collect();
    let data = ObstacleData { phi: vec![0.0; n], obstacle, forcing };
    ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, growth, data).unwrap()
}

fn random_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn twenty_node_instance_has_twelve_obstacle_nodes() {
    let pb = interval_problem(20, 2.0, Growth::Power, 1);
    assert_eq!(pb.obstacle_nodes().len(), 12);
    assert_eq!(pb.pinned.iter().filter(|&&b| b).count(), 1);
    assert!(pb.obstacle_nonnegative);
}

#[test]
fn energy_vanishes_on_constants_and_is_translation_invariant() {
    let pb = interval_problem(20, 3.0, Growth::Power, 2);
    assert_eq!(pb.energy(&[4.25; 20]), 0.0);
    let u: Vec<f64> = (0..20).map(|i| ((i * 37) % 11) as f64 / 1024.0).collect();
    let shifted: Vec<f64> = u.iter().map(|v| v + 1.0).collect();
    assert_eq!(pb.energy(&u), pb.energy(&shifted));
}

#[test]
fn quadratic_energy_equals_bilinear_form() {
    let params = KernelParams::new(1, 0.6, 2.0, 1.0).unwrap();
    let dom = DomainSpec::interval(1.0).unwrap();
    let mesh = build_uniform_mesh(&dom, &params, &[40], 0.025).unwrap();
    let n = mesh.len();
    let data = ObstacleData { phi: vec![0.0; n], obstacle: vec![f64::NEG_INFINITY; n], forcing: vec![0.0; n] };
    let pb = ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data).unwrap();
    // G(x,y) built directly from the horizon-ball overlaps
    let mut g = vec![vec![0.0; n]; n];
    let nb = mesh.neighbor_index();
    for x in 0..n {
        let (idx, meas) = nb.row(x);
        for (&y, &m) in idx.iter().zip(meas) {
            let k = mesh.weights[x] * m * mesh.delta[x].powf(-params.mu());
            g[x][y as usize] += k;
            g[y as usize][x] += k;
        }
    }
    let u = random_values(n, 3);
    let mut b = 0.0;
    for x in 0..n {
        for y in 0..n {
            b += 0.5 * g[x][y] * (u[x] - u[y]).powi(2);
        }
    }
    let e = pb.energy(&u);
    assert!((e - b).abs() <= 1e-10 * b, "{e} vs {b}");
}

#[test]
fn gradient_matches_central_differences() {
    for (p, growth) in [(2.0, Growth::Power), (3.0, Growth::Power), (3.0, Growth::PerturbedPower)] {
        let pb = interval_problem(50, p, growth, 4);
        let u = random_values(50, 5);
        let g = pb.energy_gradient(&u);
        let eps = 1e-5;
        for i in pb.free_nodes() {
            let (mut a, mut b) = (u.clone(), u.clone());
            a[i] += eps;
            b[i] -= eps;
            let fd = (pb.energy(&a) - pb.energy(&b)) / (2.0 * eps);
            assert!((g[i] - fd).abs() <= 1e-6, "p={p} node {i}: {} vs {fd}", g[i]);
        }
    }
}

#[test]
fn quadratic_gradient_is_linear_and_vanishes_on_constants() {
    let pb = interval_problem(30, 2.0, Growth::Power, 6);
    let u = random_values(30, 7);
    let u2: Vec<f64> = u.iter().map(|v| 2.0 * v).collect();
    let (g, g2) = (pb.energy_gradient(&u), pb.energy_gradient(&u2));
    for i in 0..30 {
        assert_eq!(g2[i], 2.0 * g[i]);
    }
    let p3 = interval_problem(30, 3.0, Growth::Power, 6);
    assert!(p3.energy_gradient(&[0.7; 30]).iter().all(|&v| v == 0.0));
}

#[test]
fn projection_clamps_pins_and_is_idempotent() {
    let pb = interval_problem(20, 2.0, Growth::Power, 8);
    let below: Vec<f64> = pb.obstacle.iter().map(|&h| if h.is_finite() { h - 1.0 } else { 0.5 }).collect();
    let p = pb.project(&below);
    for i in 0..20 {
        if pb.pinned[i] {
            assert_eq!(p[i], pb.phi[i]);
        } else if pb.in_omega0(i) {
            assert_eq!(p[i], pb.obstacle[i]);
        } else {
            assert_eq!(p[i], 0.5);
        }
    }
    assert_eq!(pb.project(&p), p);
    assert!(pb.is_admissible(&pb.feasible_start()));
}

#[test]
fn trivial_instances_solve_to_zero() {
    let params = KernelParams::new(1, 0.6, 2.0, 1.0).unwrap();
    let mesh = build_uniform_mesh(&DomainSpec::interval(1.0).unwrap(), &params, &[20], 0.05).unwrap();
    let data = ObstacleData { phi: vec![0.0; 20], obstacle: vec![f64::NEG_INFINITY; 20], forcing: vec![0.0; 20] };
    let pb = ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data).unwrap();
    let start = random_values(20, 9);
    let r = solve_projected_descent(&pb, DescentOptions::default(), Some(&start)).unwrap();
    assert!(r.values.iter().all(|v| v.abs() < 1e-8), "{:?}", r.values);
    assert!(r.energy.abs() < 1e-12);

    let obstacle = mesh.nodes.iter().map(|x| if x[0] > 0.3 && x[0] < 0.9 { -0.5 } else { f64::NEG_INFINITY }).collect();
    let data = ObstacleData { phi: vec![0.0; 20], obstacle, forcing: vec![0.0; 20] };
    let pb = ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data).unwrap();
    let r = solve_psor(&pb, PsorOptions::default(), None).unwrap();
    assert!(r.values.iter().all(|&v| v == 0.0));
}

#[test]
fn psor_and_descent_match_the_enumeration_oracle() {
    for seed in [10, 11, 12] {
        let pb = interval_problem(20, 2.0, Growth::Power, seed);
        let oracle = solve_oracle(&pb).unwrap();
        let active = oracle.active(&pb, 1e-12).iter().filter(|&&a| a).count();
        assert!(active > 0 && active < 12, "seed {seed}: {active} active nodes");
        let psor = solve_psor(&pb, PsorOptions::default(), None).unwrap();
        let pd = solve_projected_descent(&pb, DescentOptions { tol: 1e-13, max_iter: 100_000 }, None).unwrap();
        for r in [&oracle, &psor, &pd] {
            assert!(max_diff(&r.values, &oracle.values) <= 1e-8, "{} off by {}", r.method, max_diff(&r.values, &oracle.values));
            assert!(r.kkt.complementarity <= 1e-8, "{}: {}", r.method, r.kkt.complementarity);
            assert!(r.kkt.max_obstacle_violation <= 1e-10 && r.kkt.boundary_exact);
        }
        let vi = certify_vi(&pb, &oracle.values, 1000, seed).unwrap();
        assert!(vi.certified(1e-8), "{vi:?}");
    }
}

#[test]
fn random_starts_reach_the_same_minimizer() {
    let pb = interval_problem(20, 2.0, Growth::Power, 13);
    let a = solve_psor(&pb, PsorOptions::default(), Some(&random_values(20, 14))).unwrap();
    let b = solve_psor(&pb, PsorOptions::default(), Some(&random_values(20, 15))).unwrap();
    assert!(max_diff(&a.values, &b.values) <= 1e-8);
}

#[test]
fn descent_agrees_with_psor_on_thirty_nodes() {
    let pb = interval_problem(30, 2.0, Growth::Power, 16);
    let a = solve_psor(&pb, PsorOptions::default(), None).unwrap();
    let b = solve_projected_descent(&pb, DescentOptions::default(), None).unwrap();
    assert!(max_diff(&a.values, &b.values) <= 1e-6);
}

#[test]
fn cubic_descent_on_a_small_strip_decreases_and_certifies() {
    let params = KernelParams::new(2, 0.6, 3.0, 1.0).unwrap();
    let dom = DomainSpec::strip(2, 1.0, 0.5, TangentialBc::Periodic).unwrap();
    let mesh = build_uniform_mesh(&dom, &params, &[6, 6], 1.0 / 6.0).unwrap();
    let data = ObstacleData::from_families(
        &mesh,
        &FunctionFamily::constant(0.0),
        &FunctionFamily::constant(0.05),
        &Omega0::Box { lo: vec![-0.5, 0.4], hi: vec![0.5, 0.6] },
        &FunctionFamily::sine(0, 2.0),
    )
    .unwrap();
    let pb = ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data).unwrap();
    let r = solve_projected_descent(&pb, DescentOptions::default(), None).unwrap();
    assert!(!r.energy_drops.is_empty() && r.energy_drops.iter().all(|&d| d < 0.0));
    assert!(r.energy_history.windows(2).all(|w| w[1] <= w[0] + 1e-14 * w[0].abs()));
    let vi = certify_vi(&pb, &r.values, 1000, 17).unwrap();
    assert!(vi.certified(1e-8), "{vi:?}");
}

#[test]
fn perturbed_solution_is_rejected_by_the_certificate() {
    let pb = interval_problem(20, 2.0, Growth::Power, 18);
    let mut u = solve_oracle(&pb).unwrap().values;
    assert_eq!(certify_vi(&pb, &u, 1, 0).unwrap().min_residual.min(0.0), certify_vi(&pb, &u, 1, 0).unwrap().min_residual);
    let free = pb.free_nodes();
    u[free[free.len() / 2]] += 1.0;
    let vi = certify_vi(&pb, &u, 1000, 19).unwrap();
    assert!(vi.min_residual < -1e-3, "{vi:?}");
}

#[test]
fn relabeling_nodes_does_not_change_the_solution() {
    let pb = interval_problem(20, 3.0, Growth::PerturbedPower, 20);
    let mut perm: Vec<usize> = (0..20).collect();
    perm.reverse();
    perm.swap(3, 11);
    let q = pb.permuted(&perm).unwrap();
    let opts = DescentOptions { tol: 1e-12, max_iter: 100_000 };
    let a = solve_projected_descent(&pb, opts, None).unwrap();
    let b = solve_projected_descent(&q, opts, None).unwrap();
    for (k, &o) in perm.iter().enumerate() {
        assert!((b.values[k] - a.values[o]).abs() <= 1e-8);
    }
}

#[test]
fn objective_is_coercive_along_a_ray() {
    let pb = interval_problem(20, 3.0, Growth::Power, 21);
    let w: Vec<f64> = (0..20).map(|i| if pb.pinned[i] { 0.0 } else { (i as f64 * 0.3).sin().abs() + 0.1 }).collect();
    let at = |k: f64| pb.objective(&w.iter().zip(&pb.phi).map(|(w, f)| f + k * w).collect::<Vec<_>>());
    let (j1, j10, j100) = (at(1.0), at(10.0), at(100.0));
    assert!(j1 < j10 && j10 < j100 && j100 > 1e3 * j1.abs());
}

#[test]
fn energy_is_sandwiched_by_growth_and_ellipticity() {
    let params = KernelParams::new(1, 0.6, 2.5, 1.0).unwrap();
    let mesh = build_uniform_mesh(&DomainSpec::interval(1.0).unwrap(), &params, &[30], 1.0 / 30.0).unwrap();
    let coef = Coefficient::Checkerboard { alpha1: 0.5, alpha2: 2.0, scale: 0.25 };
    let data = ObstacleData { phi: vec![0.0; 30], obstacle: vec![f64::NEG_INFINITY; 30], forcing: vec![0.0; 30] };
    let pb = ObstacleProblem::new(&mesh, params, coef, Growth::PerturbedPower, data).unwrap();
    let (a1, a2) = coef.bounds();
    for seed in 0..5 {
        let u = random_values(30, seed);
        let (e, s) = (pb.energy(&u), pb.seminorm_quadrature(&u));
        assert!(pb.constants.c1 * a1 * s <= e * (1.0 + 1e-12) && e <= pb.constants.c2 * a2 * s * (1.0 + 1e-12));
    }
}

#[test]
fn invalid_instances_are_rejected() {
    let params = KernelParams::new(1, 0.45, 2.0, 1.0).unwrap();
    let mesh = build_uniform_mesh(&DomainSpec::interval(1.0).unwrap(), &params, &[20], 0.05).unwrap();
    let data = ObstacleData { phi: vec![0.0; 20], obstacle: vec![f64::NEG_INFINITY; 20], forcing: vec![0.0; 20] };
    let err = ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data.clone()).unwrap_err();
    assert_eq!(err.to_string(), "obstacle requires sp > 1; got sp = 0.9");

    let cubic = interval_problem(20, 3.0, Growth::Power, 22);
    let err = solve_psor(&cubic, PsorOptions::default(), None).unwrap_err();
    assert_eq!(err.to_string(), "psor requires p = 2; got p = 3");

    // horizon balls that never leave their own cell leave free rows empty
    let thin = KernelParams::new(1, 0.6, 2.0, 0.01).unwrap();
    let mesh = build_uniform_mesh(&DomainSpec::interval(1.0).unwrap(), &thin, &[20], 0.05).unwrap();
    let pb = ObstacleProblem::new(&mesh, thin, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data).unwrap();
    assert!(matches!(solve_psor(&pb, PsorOptions::default(), None), Err(Error::Assembly(_))));
}

#[test]
fn oracle_refuses_large_obstacle_sets() {
    let params = KernelParams::new(1, 0.6, 2.0, 1.0).unwrap();
    let mesh = build_uniform_mesh(&DomainSpec::interval(1.0).unwrap(), &params, &[40], 0.025).unwrap();
    let obstacle = mesh.delta.iter().map(|&d| if d > 0.2 { 0.0 } else { f64::NEG_INFINITY }).collect();
    let data = ObstacleData { phi: vec![0.0; 40], obstacle, forcing: vec![0.0; 40] };
    let pb = ObstacleProblem::new(&mesh, params, Coefficient::Constant { alpha: 1.0 }, Growth::Power, data).unwrap();
    assert!(matches!(solve_oracle(&pb), Err(Error::Resource(_))));
}
