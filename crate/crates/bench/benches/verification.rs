use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rectstack::concat::{concatenate, verify_colorcode_distance};
use rectstack::surgery::{merge_stacks, split_stack};
use rectstack::transversal::{ccz_phase_exhaustive, ccz_phase_sampled, pairwise_overlap_check};
use rectstack::{build_cubic_stack, Color};

fn transversal(c: &mut Criterion) {
    let s2 = build_cubic_stack(2).unwrap();
    let s3 = build_cubic_stack(3).unwrap();
    let s4 = build_cubic_stack(4).unwrap();
    c.bench_function("ccz exhaustive d=2", |b| {
        b.iter(|| ccz_phase_exhaustive(black_box(&s2)).unwrap())
    });
    c.bench_function("ccz sampled d=3, 10^4", |b| {
        b.iter(|| ccz_phase_sampled(black_box(&s3), 10_000, 1).unwrap())
    });
    c.bench_function("pair overlaps d=4", |b| {
        b.iter(|| pairwise_overlap_check(black_box(&s4)))
    });
}

fn surgery(c: &mut Criterion) {
    let s = build_cubic_stack(3).unwrap();
    c.bench_function("merge and split d=3 g", |b| {
        b.iter(|| {
            let m = merge_stacks(black_box(&s), &s, Color::G).unwrap();
            split_stack(&m).unwrap()
        })
    });
}

fn distance(c: &mut Criterion) {
    let cc = concatenate(&build_cubic_stack(2).unwrap()).unwrap();
    let mut g = c.benchmark_group("distance");
    g.sample_size(10);
    g.bench_function("concatenated weight <= 3 scan", |b| {
        b.iter(|| verify_colorcode_distance(black_box(&cc), 3).unwrap())
    });
    g.finish();
}

criterion_group!(benches, transversal, surgery, distance);
criterion_main!(benches);
