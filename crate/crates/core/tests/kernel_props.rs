//! Kernel and Gram-matrix properties: positive semidefiniteness, the
//! return-probability equivalence, projected-kernel agreement with the
//! reduced-density oracle, shot-noise statistics, and the single-qubit
//! bandwidth periodicity.

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use ndarray::Array2;
use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::gram::{gram, gram_cross};
use qkad_core::kernel::{
    fidelity_kernel, fidelity_via_return_probability, projected_kernel, sample_kernel, KernelConfig,
};
use qkad_core::statevector::Pauli;
use qkad_testkit as oracle;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_features(n: usize, f: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, f), |_| rng.random_range(-2.0..2.0))
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn min_max_eigenvalues(values: &Array2<f64>) -> (f64, f64) {
    let n = values.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| values[(i, j)]);
    let eig = m.symmetric_eigen();
    let min = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let max = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

#[test]
fn exact_gram_matrices_are_psd() {
    for (seed, config) in [
        (1u64, KernelConfig::rbf(0.8)),
        (
            2,
            KernelConfig::fidelity(FeatureMapConfig::new(3).with_depth(2)),
        ),
        (
            3,
            KernelConfig::projected(FeatureMapConfig::new(3).with_depth(2), 0.2),
        ),
    ] {
        let n_features = config.kind.feature_map().map(|m| m.n_qubits).unwrap_or(3);
        let features = random_features(12, n_features, seed);
        let g = gram(features.view(), &ids(12), &config).unwrap();

        for i in 0..12 {
            assert_eq!(g.values[(i, i)], 1.0);
            for j in 0..12 {
                assert!((g.values[(i, j)] - g.values[(j, i)]).abs() <= 1e-12);
                assert!(g.values[(i, j)] >= -1e-12 && g.values[(i, j)] <= 1.0 + 1e-12);
            }
        }
        let (min_eig, max_eig) = min_max_eigenvalues(&g.values);
        assert!(
            min_eig >= -1e-8 * max_eig,
            "kernel {} not PSD: min {min_eig}, max {max_eig}",
            config.kind.name()
        );
    }
}

#[test]
fn four_sample_fidelity_gram_is_psd() {
    let features = random_features(4, 2, 9);
    let config = KernelConfig::fidelity(FeatureMapConfig::new(2).with_depth(3));
    let g = gram(features.view(), &ids(4), &config).unwrap();
    let (min_eig, max_eig) = min_max_eigenvalues(&g.values);
    assert!(min_eig >= -1e-8 * max_eig);
}

#[test]
fn fidelity_equals_return_probability_everywhere() {
    let map = FeatureMapConfig::new(3).with_depth(3).with_eta(0.1);
    let config = KernelConfig::fidelity(map.clone());
    let features = random_features(6, 3, 21);
    for i in 0..6 {
        for j in 0..6 {
            let x: Vec<f64> = features.row(i).to_vec();
            let y: Vec<f64> = features.row(j).to_vec();
            let direct = fidelity_kernel(&x, &y, &config).unwrap();
            let via_return = fidelity_via_return_probability(&x, &y, &map).unwrap();
            assert_abs_diff_eq!(direct, via_return, epsilon = 1e-10);
        }
    }
}

#[test]
fn projected_kernel_matches_density_matrix_oracle() {
    // The oracle builds reduced single-qubit density matrices from the full
    // dense statevector and evaluates the same Gaussian formula.
    let map = FeatureMapConfig::new(2).with_depth(1).with_eta(0.1);
    let gamma = 0.4;
    let config = KernelConfig::projected(map.clone(), gamma);
    let features = random_features(5, 2, 33);

    for i in 0..5 {
        for j in 0..5 {
            let x: Vec<f64> = features.row(i).to_vec();
            let y: Vec<f64> = features.row(j).to_vec();

            let circuit_x = qkad_core::featuremap::build_embedding(&x, &map).unwrap();
            let circuit_y = qkad_core::featuremap::build_embedding(&y, &map).unwrap();
            let state_x = oracle::oracle_state(&circuit_x);
            let state_y = oracle::oracle_state(&circuit_y);

            let mut dist_sqr = 0.0;
            for q in 0..2 {
                let rho_x = oracle::reduced_density(&state_x, 2, q);
                let rho_y = oracle::reduced_density(&state_y, 2, q);
                for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
                    let diff =
                        oracle::pauli_trace(&rho_x, pauli) - oracle::pauli_trace(&rho_y, pauli);
                    dist_sqr += diff * diff;
                }
            }
            let want = (-gamma * dist_sqr).exp();
            let got = projected_kernel(&x, &y, &config).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        }
    }
}

#[test]
fn single_qubit_kernel_depends_on_eta_x_mod_pi() {
    // With one qubit there are no ZZ terms, so the fidelity kernel sees x
    // only through ηx mod π: κ(x, x') = cos²(η(x − x')) for d = 1.
    let eta = 0.35;
    let map = FeatureMapConfig::new(1).with_depth(1).with_eta(eta);
    let config = KernelConfig::fidelity(map.clone());
    let x_ref = [0.4];
    let period = std::f64::consts::PI / eta;
    for x in [-1.2, 0.0, 0.8, 2.5] {
        let base = fidelity_kernel(&[x], &x_ref, &config).unwrap();
        for shift in [1.0, 2.0, -1.0] {
            let shifted = fidelity_kernel(&[x + shift * period], &x_ref, &config).unwrap();
            assert_abs_diff_eq!(base, shifted, epsilon = 1e-9);
        }
        // Cross-check the closed form against the dense oracle value.
        let circuit = qkad_core::featuremap::build_embedding(&[x], &map).unwrap();
        let state = oracle::oracle_state(&circuit);
        let circuit_ref = qkad_core::featuremap::build_embedding(&x_ref, &map).unwrap();
        let state_ref = oracle::oracle_state(&circuit_ref);
        let overlap = oracle::compensated_inner(&state_ref, &state);
        assert_abs_diff_eq!(base, overlap.norm_sqr(), epsilon = 1e-10);
    }
}

#[test]
fn shot_noise_standard_deviation_tracks_binomial() {
    // For fixed p the empirical std over many seeds stays within 10% of
    // √(p(1−p)/shots). 2000 seeds keep the test fast; the acceptance suite
    // runs the full 10⁴-seed version.
    for p in [0.1, 0.5, 0.9] {
        for shots in [1_000u64, 10_000] {
            let n_seeds = 2_000;
            let mut sum = 0.0;
            let mut sum_sqr = 0.0;
            for seed in 0..n_seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let estimate = sample_kernel(p, shots, &mut rng).unwrap();
                sum += estimate;
                sum_sqr += estimate * estimate;
            }
            let mean = sum / n_seeds as f64;
            let var = sum_sqr / n_seeds as f64 - mean * mean;
            let std = var.sqrt();
            let expected = (p * (1.0 - p) / shots as f64).sqrt();
            assert!(
                (std - expected).abs() <= 0.1 * expected,
                "p={p} shots={shots}: std {std} vs {expected}"
            );
        }
    }
}

#[test]
fn sampled_gram_mirrors_pairs() {
    let features = random_features(6, 2, 5);
    let map = FeatureMapConfig::new(2).with_depth(2);
    let config = KernelConfig::fidelity(map).with_shots(500, 31).unwrap();
    let g = gram(features.view(), &ids(6), &config).unwrap();
    for i in 0..6 {
        assert_eq!(g.values[(i, i)], 1.0);
        for j in 0..6 {
            assert_eq!(g.values[(i, j)], g.values[(j, i)]);
        }
    }
    // Shot-sampled matrices may be indefinite; the solver tolerates that,
    // so only symmetry and range are guaranteed here.
    for v in g.values.iter() {
        assert!((0.0..=1.0).contains(v));
    }
}

#[test]
fn cross_matrix_shape_and_consistency() {
    let train = random_features(5, 2, 41);
    let test = random_features(3, 2, 42);
    let config = KernelConfig::rbf(0.9);
    let cross = gram_cross(test.view(), train.view(), &config).unwrap();
    assert_eq!(cross.shape(), &[3, 5]);
    let g = gram(train.view(), &ids(5), &config).unwrap();
    let self_cross = gram_cross(train.view(), train.view(), &config).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            if i != j {
                assert_abs_diff_eq!(self_cross[(i, j)], g.values[(i, j)], epsilon = 1e-12);
            }
        }
    }
}
