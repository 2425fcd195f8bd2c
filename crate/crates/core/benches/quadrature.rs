//! Parallel versus sequential quadrature. Without the `parallel` feature both
//! variants run sequentially.

use std::hint::black_box;

use casimir_core::quadrature::{default_spec_for, energy_per_area, sweep_gap, QuadratureSpec};
use casimir_core::{Plate, Stack};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn mixed_stack() -> Stack {
    Stack::new(vec![
        Plate::magnetodielectric(0.0, 2.0, 0.5).unwrap(),
        Plate::perfect_m(0.7).unwrap(),
        Plate::magnetodielectric(1.5, 0.3, 4.0).unwrap(),
        Plate::perfect_e(2.4).unwrap(),
    ])
    .unwrap()
}

fn variants(spec: QuadratureSpec) -> [(&'static str, QuadratureSpec); 2] {
    [("parallel", spec.clone()), ("sequential", spec.sequential())]
}

fn energy(c: &mut Criterion) {
    let stack = mixed_stack();
    let mut group = c.benchmark_group("energy_general_2d");
    group.sample_size(10);
    for (name, spec) in variants(default_spec_for(&stack)) {
        group.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, spec| {
            b.iter(|| energy_per_area(black_box(&stack), spec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let stack = Stack::uniform(&Plate::perfect_e(0.0).unwrap(), 4, 0.0, 1.0).unwrap();
    let widths: Vec<f64> = (0..64).map(|k| 0.5 + 0.05 * k as f64).collect();
    let mut group = c.benchmark_group("sweep_kappa_only");
    group.sample_size(10);
    for (name, spec) in variants(default_spec_for(&stack)) {
        group.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, spec| {
            b.iter(|| sweep_gap(black_box(&stack), 2, &widths, spec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, energy, sweep);
criterion_main!(benches);
