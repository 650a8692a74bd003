use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use landau_core::fixtures;
use landau_core::graph::symanzik_first;
use landau_core::landau::{Chart, LandauSystem};
use landau_core::quadform::ProjectiveIntegral;
use landau_core::regularize::regularize_integral;
use landau_core::renorm::Hopf;
use landau_core::solver::{membership_test, SolveConfig};

fn symanzik(c: &mut Criterion) {
    let g = fixtures::nested_bubble();
    c.bench_function("symanzik_nested", |b| b.iter(|| symanzik_first(black_box(&g)).unwrap()));
}

fn generate(c: &mut Criterion) {
    let integral = ProjectiveIntegral::from_graph(&fixtures::sunrise()).unwrap();
    c.bench_function("generate_sunrise", |b| {
        b.iter(|| LandauSystem::generate(black_box(&integral), Chart::Projective).unwrap())
    });
    c.bench_function("regularize_sunrise", |b| b.iter(|| regularize_integral(black_box(&integral), None).unwrap()));
}

fn membership(c: &mut Criterion) {
    let sys = LandauSystem::generate(&fixtures::two_quadrics().into_integral().unwrap(), Chart::Projective).unwrap();
    let cfg = SolveConfig::default();
    let mut group = c.benchmark_group("membership_twoquadrics");
    group.sample_size(20);
    group.bench_function("member", |b| b.iter(|| membership_test(&sys, &[Complex64::new(2.0, 0.0)], &cfg).unwrap()));
    group.bench_function("far", |b| b.iter(|| membership_test(&sys, &[Complex64::new(1.3, 0.7)], &cfg).unwrap()));
    group.finish();
}

fn coproduct(c: &mut Criterion) {
    let g = fixtures::nested_bubble();
    c.bench_function("coproduct_nested", |b| b.iter(|| Hopf::new().coproduct(black_box(&g)).unwrap()));
    c.bench_function("antipode_nested", |b| b.iter(|| Hopf::new().antipode(black_box(&g)).unwrap()));
}

criterion_group!(benches, symanzik, generate, membership, coproduct);
criterion_main!(benches);
