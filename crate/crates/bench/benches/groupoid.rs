use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use groupoid_logic::{convolve, gns_dimension, gram, set_product, sorkin_audit, Limits};
use groupoid_logic_bench::{dense_function, measured_pair, sparse_set};
use std::hint::black_box;

fn convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolve");
    for n in [4, 8, 16] {
        let mg = measured_pair(n);
        let (f, h) = (dense_function(&mg, 1), dense_function(&mg, 2));
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &n, |b, _| {
            b.iter(|| convolve(&mg, black_box(&f), black_box(&h)).unwrap())
        });
    }
    group.finish();
}

fn subset_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("set_product");
    for n in [8, 16, 32] {
        let mg = measured_pair(n);
        let (a, b) = (sparse_set(&mg, 3, 0), sparse_set(&mg, 5, 1));
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &n, |bench, _| {
            bench.iter(|| set_product(mg.groupoid(), black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn sorkin(c: &mut Criterion) {
    let mut group = c.benchmark_group("sorkin_audit");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let mg = measured_pair(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| sorkin_audit(&mg, None, &Limits::default()).unwrap())
        });
    }
    group.finish();
}

fn gns(c: &mut Criterion) {
    let mut group = c.benchmark_group("gns");
    for n in [4, 8, 16] {
        let mg = measured_pair(n);
        group.bench_with_input(BenchmarkId::new("gram", n * n), &n, |b, _| b.iter(|| gram(black_box(&mg))));
        group.bench_with_input(BenchmarkId::new("dimension", n * n), &n, |b, _| {
            b.iter(|| gns_dimension(black_box(&mg)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, convolution, subset_product, sorkin, gns);
criterion_main!(benches);
