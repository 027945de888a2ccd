use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nltrace_bench::{interval_fixture, strip_fixture};
use nltrace_core::norms::{boundary_fractional_seminorm, gagliardo_seminorm, nonlocal_seminorm};

fn seminorms(c: &mut Criterion) {
    let mut g = c.benchmark_group("strip");
    g.sample_size(10);
    for n in [16, 32] {
        let f = strip_fixture(n).expect("fixture");
        g.bench_with_input(BenchmarkId::new("nonlocal", n), &f, |b, f| b.iter(|| nonlocal_seminorm(&f.mesh, &f.u, &f.params).unwrap()));
        g.bench_with_input(BenchmarkId::new("gagliardo", n), &f, |b, f| b.iter(|| gagliardo_seminorm(&f.mesh, &f.u, 0.8, 1.5).unwrap()));
        let trace = f.u.boundary_values.clone().unwrap_or_default();
        g.bench_with_input(BenchmarkId::new("boundary", n), &f, |b, f| {
            b.iter(|| boundary_fractional_seminorm(&f.mesh, &trace, 0.8, 1.5).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("interval");
    for n in [256, 1024] {
        let f = interval_fixture(n).expect("fixture");
        g.bench_with_input(BenchmarkId::new("nonlocal", n), &f, |b, f| b.iter(|| nonlocal_seminorm(&f.mesh, &f.u, &f.params).unwrap()));
        g.bench_with_input(BenchmarkId::new("gagliardo", n), &f, |b, f| b.iter(|| gagliardo_seminorm(&f.mesh, &f.u, 0.8, 1.5).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, seminorms);
criterion_main!(benches);
