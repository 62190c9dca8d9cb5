use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use medcomp_bench::{bv_erm, bv_sample, weighted_values};
use medcomp_core::rng::seeded;
use medcomp_core::weaklearn::fat_dim_of;
use medcomp_core::{
    compress, deserialize, reconstruct, run_medboost, serialize, weighted_median, BoostConfig,
    GenericWeakLearner, SparsifyConfig, TaskKind, WeakLearnConfig,
};
use std::hint::black_box;

fn quantiles(c: &mut Criterion) {
    let mut group = c.benchmark_group("weighted_median");
    for n in [9usize, 100, 1000] {
        let (v, w) = weighted_values(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| weighted_median(black_box(&v), black_box(&w)).unwrap())
        });
    }
    group.finish();
}

fn boosting(c: &mut Criterion) {
    let erm = bv_erm();
    let cfg = WeakLearnConfig::new(0.2, 0.125, fat_dim_of(&erm));
    let learner = GenericWeakLearner::new(erm, cfg);
    let mut group = c.benchmark_group("medboost_bv");
    group.sample_size(20);
    for m in [200usize, 2000] {
        let sample = bv_sample(m, 7);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| {
                run_medboost(
                    &sample,
                    &learner,
                    &BoostConfig::auto(0.2, 0.125),
                    &mut seeded(3),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn codec(c: &mut Criterion) {
    let erm = bv_erm();
    let sample = bv_sample(200, 11);
    let cs = compress(
        &sample,
        &erm,
        &BoostConfig::auto(0.2, 0.125),
        &WeakLearnConfig::new(0.2, 0.125, fat_dim_of(&erm)),
        &SparsifyConfig::adaptive(0.2, 0.125, TaskKind::Real),
        &mut seeded(5),
    )
    .unwrap();
    let bytes = serialize(&cs).unwrap();
    c.bench_function("serialize", |b| {
        b.iter(|| serialize(black_box(&cs)).unwrap())
    });
    c.bench_function("deserialize", |b| {
        b.iter(|| deserialize(black_box(&bytes)).unwrap())
    });
    c.bench_function("reconstruct", |b| {
        b.iter(|| reconstruct(black_box(&cs), erm.as_ref()).unwrap())
    });
}

criterion_group!(benches, quantiles, boosting, codec);
criterion_main!(benches);
