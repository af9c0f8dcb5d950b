use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dsarray::{DistArray, Runtime};
use dsarray_bench::square_inputs;

const PART: usize = 32;

fn transpose(c: &mut Criterion) {
    let rt = Runtime::with_default_workers();
    let mut group = c.benchmark_group("transpose");
    for n in [4, 8, 16] {
        let (a, ds) = square_inputs(&rt, n, PART, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("ds-array", n), &n, |b, _| {
            b.iter(|| black_box(a.transpose().unwrap().collect().unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("dataset", n), &n, |b, _| {
            b.iter(|| black_box(ds.transpose().unwrap().collect_samples().unwrap()))
        });
    }
    group.finish();
}

fn shuffle(c: &mut Criterion) {
    let rt = Runtime::with_default_workers();
    let mut group = c.benchmark_group("shuffle");
    for n in [4, 8, 16] {
        let (a, ds) = square_inputs(&rt, n, PART, 2).unwrap();
        group.bench_with_input(BenchmarkId::new("ds-array", n), &n, |b, _| {
            b.iter(|| black_box(a.shuffle_rows(3).unwrap().collect().unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("dataset", n), &n, |b, _| {
            b.iter(|| black_box(ds.shuffle(3).unwrap().collect_samples().unwrap()))
        });
    }
    group.finish();
}

fn matmul(c: &mut Criterion) {
    let rt = Runtime::with_default_workers();
    let mut group = c.benchmark_group("matmul");
    for block in [16, 64, 256] {
        let a = DistArray::random(&rt, 256, 256, (block, block), 4).unwrap();
        let b = DistArray::random(&rt, 256, 256, (block, block), 5).unwrap();
        group.bench_with_input(BenchmarkId::new("256x256", block), &block, |bench, _| {
            bench.iter(|| black_box(a.matmul(&b).unwrap().collect().unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, transpose, shuffle, matmul);
criterion_main!(benches);
