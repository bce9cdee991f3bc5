use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use grasscurve_bench::{complex_map, curve, point_pair};
use grasscurve_core::{flow_length, principal_angles};

fn bench_flow_length(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_length");
    for (m, n) in [(1, 1), (2, 2), (3, 3)] {
        let sample = complex_map(m, n);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{m}x{n}")), &sample, |b, s| {
            b.iter(|| flow_length(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_total_length(c: &mut Criterion) {
    let mut group = c.benchmark_group("total_length");
    for (p, q) in [(1, 1), (2, 3), (4, 4)] {
        let cv = curve(p, q);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{p}x{q}")), &cv, |b, cv| {
            b.iter(|| black_box(cv).total_length().unwrap())
        });
    }
    group.finish();
}

fn bench_principal_angles(c: &mut Criterion) {
    let mut group = c.benchmark_group("principal_angles");
    for (p, q) in [(2, 2), (6, 6)] {
        let pair = point_pair(p, q);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{p}x{q}")), &pair, |b, (u, v)| {
            b.iter(|| principal_angles(black_box(u), black_box(v)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_flow_length, bench_total_length, bench_principal_angles);
criterion_main!(benches);
