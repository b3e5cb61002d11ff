use adsmass::charges::{
    charge_limits, charge_on_sphere, q_assemble_with_diagnostics, ChargeCouple, ChargeOptions,
};
use adsmass::quadrature::SphereQuadrature;
use adsmass_bench::family;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn sphere(c: &mut Criterion) {
    let data = family("schwarzschild_ads", &[("m", "1")]);
    let quad = SphereQuadrature::new(3, 24, 48).unwrap();
    let x0 = ChargeCouple::mass_function(0, 3).unwrap();
    c.bench_function("charge_on_sphere/x0/24x48", |b| {
        b.iter(|| charge_on_sphere(&data, &x0, black_box(6.0), &quad).unwrap())
    });
    let gauss = family("gaussian_perturbation", &[]);
    c.bench_function("charge_on_sphere/gaussian/24x48", |b| {
        b.iter(|| charge_on_sphere(&gauss, &x0, black_box(6.0), &quad).unwrap())
    });
}

fn limits(c: &mut Criterion) {
    let data = family("schwarzschild_ads", &[("m", "1")]);
    let opts = ChargeOptions::default();
    let couples: Vec<ChargeCouple> = (0..4)
        .map(|k| ChargeCouple::mass_function(k, 3).unwrap())
        .collect();
    let mut group = c.benchmark_group("limits");
    group.sample_size(10);
    group.bench_function("mass_vector", |b| {
        b.iter(|| charge_limits(&data, &couples, &opts).unwrap())
    });
    group.bench_function("q_assembly", |b| {
        b.iter(|| q_assemble_with_diagnostics(&data, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sphere, limits);
criterion_main!(benches);
