use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use owslab::dp::{exp_mech_interior_point, SortedIntDataset, TwoSidedGeometric};
use owslab::rng::stream;
use owslab::select::{most_frequent_approx, most_frequent_pure, DomainSize};
use rand::Rng;

fn geometric(c: &mut Criterion) {
    let mut g = c.benchmark_group("two_sided_geometric");
    for eps in [0.1f64, 1.0, 5.0] {
        let mech = TwoSidedGeometric::new(eps).unwrap();
        let mut rng = stream(1, 0);
        g.bench_with_input(BenchmarkId::from_parameter(eps), &mech, |b, m| b.iter(|| m.sample(&mut rng)));
    }
    g.finish();
}

fn interior(c: &mut Criterion) {
    let mut g = c.benchmark_group("exp_mech_interior_point");
    for n in [100usize, 10_000] {
        let mut rng = stream(2, n as u64);
        let values = (0..n).map(|_| rng.random_range(0..1u64 << 40)).collect();
        let data = SortedIntDataset::from_unsorted(values, 1 << 40).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, data| {
            b.iter(|| exp_mech_interior_point(black_box(data), 1.0, &mut rng).unwrap())
        });
    }
    g.finish();
}

fn frequency(c: &mut Criterion) {
    let mut g = c.benchmark_group("most_frequent");
    let mut rng = stream(3, 0);
    let items: Vec<[u8; 8]> = (0..10_000).map(|_| rng.random_range(0..500u64).to_be_bytes()).collect();
    g.bench_function("pure", |b| {
        b.iter(|| most_frequent_pure(&items, DomainSize::PowerOfTwo(64), 1.0, 0.1, &mut rng).unwrap())
    });
    g.bench_function("approx", |b| {
        b.iter(|| most_frequent_approx(&items, 1.0, 1e-6, 0.1, &mut rng).unwrap())
    });
    g.finish();
}

criterion_group!(benches, geometric, interior, frequency);
criterion_main!(benches);
