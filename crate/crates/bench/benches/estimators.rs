use std::hint::black_box;

use acovdiff::signal::DifferenceScheme;
use acovdiff::{estimate_acf, estimate_acf_hvk, quadratic_form};
use acovdiff_bench::sample_series;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn quadratic_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadratic_form");
    for n in [1600usize, 10_000, 100_000] {
        let y = sample_series(n, 1);
        group.throughput(Throughput::Elements(n as u64));
        let first = DifferenceScheme::unit_difference(3);
        group.bench_with_input(BenchmarkId::new("first_order", n), &y, |b, y| {
            b.iter(|| quadratic_form(black_box(y), &first).unwrap())
        });
        let third = DifferenceScheme::new(vec![1.0, -3.0, 3.0, -1.0], 3).unwrap();
        group.bench_with_input(BenchmarkId::new("third_order", n), &y, |b, y| {
            b.iter(|| quadratic_form(black_box(y), &third).unwrap())
        });
    }
    group.finish();
}

fn acf(c: &mut Criterion) {
    let y = sample_series(1600, 2);
    c.bench_function("estimate_acf m=2 n=1600", |b| {
        b.iter(|| estimate_acf(black_box(&y), 2, 1.0, -1.0).unwrap())
    });
    c.bench_function("estimate_acf_hvk n=1600", |b| {
        b.iter(|| estimate_acf_hvk(black_box(&y), 2).unwrap())
    });
}

criterion_group!(benches, quadratic_forms, acf);
criterion_main!(benches);
