use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use graphsimplex::*;
use graphsimplex_bench::fixture;

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("embed");
    for n in [8, 32, 128] {
        let g = fixture(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| {
                let d = eigendecompose(&laplacian(black_box(g))).unwrap();
                (embed(&d, SimplexKind::Original), embed(&d, SimplexKind::Inverse))
            })
        });
    }
    group.finish();
}

fn searches(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_search");
    group.sample_size(10);
    for n in [10, 14, 18] {
        let g = fixture(n, 2);
        let inv = embed(&eigendecompose(&laplacian(&g)).unwrap(), SimplexKind::Inverse);
        group.bench_with_input(BenchmarkId::new("max_cut", n), &g, |b, g| {
            b.iter(|| max_cut_bruteforce(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("min_altitude", n), &inv, |b, inv| {
            b.iter(|| min_altitude_cut(black_box(inv)).unwrap())
        });
    }
    group.finish();
}

fn trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("spanning_trees");
    for n in [6, 8, 10] {
        let g = corpus::complete(n);
        group.bench_with_input(BenchmarkId::new("deletion_contraction", n), &g, |b, g| {
            b.iter(|| spanning_tree_count_exact(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("spectral", n), &g, |b, g| {
            b.iter(|| spanning_tree_count(&eigendecompose(&laplacian(black_box(g))).unwrap()))
        });
    }
    group.finish();
}

fn report(c: &mut Criterion) {
    let g = fixture(10, 3);
    c.bench_function("verify_n10", |b| {
        b.iter(|| verify(&Analysis::new(black_box(&g)).unwrap(), DEFAULT_TOLERANCE).unwrap())
    });
}

criterion_group!(benches, spectral, searches, trees, report);
criterion_main!(benches);
