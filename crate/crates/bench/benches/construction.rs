use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rectstack::concat::concatenate;
use rectstack::{build_cubic_stack, build_lattice, LatticeDims};

fn lattice(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice");
    for d in [2, 3, 5, 7] {
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| build_lattice(LatticeDims::cubic(black_box(d)).unwrap()).unwrap())
        });
    }
    g.finish();
}

fn stack(c: &mut Criterion) {
    let mut g = c.benchmark_group("stack");
    for d in [2, 3, 5, 7] {
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| build_cubic_stack(black_box(d)).unwrap())
        });
    }
    g.finish();
}

fn concat(c: &mut Criterion) {
    let s = build_cubic_stack(2).unwrap();
    c.bench_function("concatenate d=2", |b| b.iter(|| concatenate(black_box(&s)).unwrap()));
}

criterion_group!(benches, lattice, stack, concat);
criterion_main!(benches);
