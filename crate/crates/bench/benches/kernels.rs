use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use orderwalk_core::feller::{decompose, recover_reverse_induction, riffle_reconstruct};
use orderwalk_core::rng::rng_from_seed;
use orderwalk_core::ssrw::chains::eta_sample;
use orderwalk_core::ssrw::exact::enumerate_statistic;
use orderwalk_core::valley::ValleyEvaluator;
use orderwalk_core::walk::{order_statistics, sample_path, IncrementSpec};

fn bench_feller(c: &mut Criterion) {
    let path = sample_path(&IncrementSpec::gaussian(1.0), 10_000, 7).unwrap();
    c.bench_function("decompose_10k", |b| b.iter(|| decompose(black_box(&path))));

    let pair = decompose(&path);
    c.bench_function("recover_reverse_induction_10k", |b| {
        b.iter(|| recover_reverse_induction(black_box(&pair)).unwrap())
    });
    let asc = pair.ascending_segments();
    let desc = pair.descending_segments();
    c.bench_function("riffle_reconstruct_10k", |b| {
        b.iter(|| riffle_reconstruct(black_box(&asc), black_box(&desc)).unwrap())
    });
    c.bench_function("order_statistics_10k", |b| b.iter(|| order_statistics(black_box(&path))));
}

fn bench_enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_max_n16", |b| {
        b.iter(|| enumerate_statistic(16, |p| order_statistics(p).max as i64).unwrap())
    });
}

fn bench_valley(c: &mut Criterion) {
    let ev = ValleyEvaluator::default();
    c.bench_function("g_a_product_1_05", |b| b.iter(|| ev.g_a(black_box(1.0), black_box(0.5))));
    let coarse = ValleyEvaluator::new(1e-5, 200_000, 1e-6);
    c.bench_function("valley_tail_a1", |b| b.iter(|| coarse.valley_tail(black_box(1.0))));
}

fn bench_chains(c: &mut Criterion) {
    c.bench_function("eta_sample_k3", |b| {
        b.iter_batched(
            || rng_from_seed(9),
            |mut rng| eta_sample(3, &mut rng),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_feller, bench_enumeration, bench_valley, bench_chains);
criterion_main!(benches);
