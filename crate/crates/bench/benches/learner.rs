use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use owslab::arena::pac::RealizableDistribution;
use owslab::learner::{learn_approx, learn_pure};
use owslab::rng::stream;
use owslab::{LearnConfig, Params, PrivacyBudget, SeedKey};

fn learner(c: &mut Criterion) {
    let mut g = c.benchmark_group("learn");
    g.sample_size(10);
    for d in [64usize, 256, 1024] {
        let p = Params::new(d).unwrap();
        let mut rng = stream(1, d as u64);
        let s = SeedKey::random(&p, &mut rng);
        let dist = RealizableDistribution::random_support(p, s, 100, &mut rng).unwrap();
        let data = dist.sample_n(20_000, &mut rng);
        let pure = LearnConfig::new(p, 0.1, 0.1, PrivacyBudget::pure(1.0).unwrap()).unwrap();
        let approx = LearnConfig::new(p, 0.1, 0.1, PrivacyBudget::new(1.0, 1e-6).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::new("pure", d), &data, |b, data| {
            b.iter(|| learn_pure(data, &pure, &mut rng).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("approx", d), &data, |b, data| {
            b.iter(|| learn_approx(data, &approx, &mut rng).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, learner);
criterion_main!(benches);
