//! Gram-builder scaling benchmark. Runtime grows quadratically in the
//! number of samples; run with `cargo bench -p qkad-core` and compare the
//! per-size medians.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndarray::Array2;
use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::gram::gram;
use qkad_core::kernel::KernelConfig;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn features(n: usize, f: usize) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    Array2::from_shape_fn((n, f), |_| rng.random_range(-2.0..2.0))
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn bench_gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram");
    for &n in &[8usize, 16, 32] {
        let x = features(n, 6);
        let rbf = KernelConfig::rbf(0.5);
        group.bench_with_input(BenchmarkId::new("rbf", n), &n, |b, _| {
            b.iter(|| gram(x.view(), &ids(n), &rbf).unwrap())
        });
        let fidelity = KernelConfig::fidelity(FeatureMapConfig::new(6).with_depth(3));
        group.bench_with_input(BenchmarkId::new("fidelity", n), &n, |b, _| {
            b.iter(|| gram(x.view(), &ids(n), &fidelity).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_gram);
criterion_main!(benches);
