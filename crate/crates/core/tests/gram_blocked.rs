//! Blocked fidelity-Gram evaluation must agree with the fully cached path.
//! This file stays a single-test binary because it shrinks the embedding
//! cache budget through the process environment.

use ndarray::Array2;
use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::gram::{gram, gram_cross};
use qkad_core::kernel::KernelConfig;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn blocked_evaluation_matches_cached_evaluation() {
    let n = 17;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let features = Array2::from_shape_fn((n, 3), |_| rng.random_range(-2.0..2.0));
    let test = Array2::from_shape_fn((5, 3), |_| rng.random_range(-2.0..2.0));
    let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let config = KernelConfig::fidelity(FeatureMapConfig::new(3).with_depth(3));

    let cached = gram(features.view(), &ids, &config).unwrap();
    let cached_cross = gram_cross(test.view(), features.view(), &config).unwrap();

    // 3 qubits → 128 bytes per state; 600 bytes caches at most 4 states,
    // forcing the blocked path (block halves of 2 states each).
    std::env::set_var("QKAD_EMBED_CACHE_BYTES", "600");
    let blocked = gram(features.view(), &ids, &config).unwrap();
    let blocked_cross = gram_cross(test.view(), features.view(), &config).unwrap();
    std::env::remove_var("QKAD_EMBED_CACHE_BYTES");

    for i in 0..n {
        for j in 0..n {
            let a = cached.values[(i, j)];
            let b = blocked.values[(i, j)];
            assert!((a - b).abs() <= 1e-12, "({i}, {j}): {a} vs {b}");
        }
    }
    for i in 0..5 {
        for j in 0..n {
            let a = cached_cross[(i, j)];
            let b = blocked_cross[(i, j)];
            assert!((a - b).abs() <= 1e-12, "cross ({i}, {j}): {a} vs {b}");
        }
    }
}
