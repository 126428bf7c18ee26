//! Acceptance suite. Each test covers one release criterion at its stated
//! tolerance and prints a PASS/SKIP line (visible with `--nocapture`; the
//! harness reports failures either way).
//!
//! Criterion 7 needs the real credit-card dataset; point `QKAD_DATASET` at
//! it (or place it at `data/creditcard.csv` under the workspace root). When
//! absent that criterion reports SKIP, and criteria 1–6 plus 8 constitute
//! acceptance. Set `QKAD_ACCEPTANCE_FULL=1` to extend the criterion-7 sweep
//! to N ∈ {2, 5, 10, 15, 20} (hours of statevector work at N = 20; use a
//! cache directory via `QKAD_CACHE_DIR` to make it restartable).

mod common;

use nalgebra::DMatrix;
use ndarray::Array2;
use qkad_cli::commands::benchmark;
use qkad_cli::config::RunConfig;
use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::gram::gram;
use qkad_core::kernel::{sample_kernel, KernelConfig};
use qkad_core::metrics::average_precision;
use qkad_core::models::{train_ocsvm_with_tol, ModelKind};
use qkad_core::resource::{wall_time_seconds, HardwareProfile};
use qkad_core::statevector::Statevector;
use qkad_core::workflow::default_rbf_gamma;
use qkad_testkit as oracle;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

#[test]
fn criterion_1_resource_estimator_reproduction() {
    // The quoted §Discussion wall-clock figures, within 15% relative error.
    let sc_optimistic = HardwareProfile::custom("sc-optimistic", 1e6).unwrap();
    let trapped_ion = HardwareProfile::custom("trapped-ion", 1e4).unwrap();
    let photonic = HardwareProfile::custom("photonic", 1e10).unwrap();

    let year = 3.156e7;
    let week = 604_800.0;
    let cases: [(u64, u64, &HardwareProfile, f64, &str); 8] = [
        (100_000, 1_000, &sc_optimistic, 100.0, "100 s"),
        (100_000, 1_000_000, &sc_optimistic, 28.0 * 3_600.0, "28 h"),
        (100_000, 1_000, &trapped_ion, 3.0 * 3_600.0, "3 h"),
        (10_000_000_000, 1_000, &trapped_ion, 30.0 * year, "30 y"),
        (10_000_000_000, 1_000, &sc_optimistic, 16.0 * week, "16 wk"),
        (100_000, 1_000, &photonic, 0.010, "10 ms"),
        (10_000_000_000, 1_000, &photonic, 17.0 * 60.0, "17 min"),
        (500, 1_000, &sc_optimistic, 0.5, "0.5 s"),
    ];
    for (evals, shots, profile, quoted, label) in cases {
        let seconds = wall_time_seconds(evals, shots, profile);
        let relative = (seconds - quoted).abs() / quoted;
        assert!(
            relative <= 0.15,
            "{label}: computed {seconds} s vs quoted {quoted} s ({relative:.3} relative)"
        );
    }
    println!("[acceptance] criterion 1 (resource-estimator reproduction): PASS");
}

#[test]
fn criterion_2_simulator_oracle_equivalence() {
    // 200 random circuits on n ≤ 3 qubits match the dense Kronecker oracle
    // within 1e-10 per amplitude.
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_101);
    for trial in 0..200 {
        let n = rng.random_range(1..=3);
        let len = rng.random_range(0..=12);
        let circuit = oracle::random_circuit(n, len, &mut rng);
        let mut state = Statevector::zero(n).unwrap();
        state.run_circuit(&circuit).unwrap();
        let expected = oracle::oracle_state(&circuit);
        for (k, (got, want)) in state.amplitudes().iter().zip(&expected).enumerate() {
            assert!(
                (got - want).norm() <= 1e-10,
                "trial {trial}, amplitude {k}: {got} vs {want}"
            );
        }
    }
    println!("[acceptance] criterion 2 (simulator oracle equivalence): PASS");
}

#[test]
fn criterion_3_fidelity_gram_properties() {
    // 50 random 4-feature vectors, d = 3, η = 0.1: exact fidelity Gram is
    // symmetric (1e-12), unit diagonal (1e-10), PSD (min eig ≥ -1e-8 λmax).
    let n = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(31_337);
    let features = Array2::from_shape_fn((n, 4), |_| rng.random_range(-2.0..2.0));
    let map = FeatureMapConfig::new(4).with_depth(3).with_eta(0.1);
    let config = KernelConfig::fidelity(map);
    let g = gram(features.view(), &ids(n), &config).unwrap();

    for i in 0..n {
        assert!((g.values[(i, i)] - 1.0).abs() <= 1e-10, "diagonal at {i}");
        for j in 0..n {
            assert!(
                (g.values[(i, j)] - g.values[(j, i)]).abs() <= 1e-12,
                "asymmetry at ({i}, {j})"
            );
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| g.values[(i, j)]);
    let eig = m.symmetric_eigen();
    let min_eig = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let max_eig = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        min_eig >= -1e-8 * max_eig,
        "min eigenvalue {min_eig} vs max {max_eig}"
    );
    println!("[acceptance] criterion 3 (fidelity Gram properties): PASS");
}

#[test]
fn criterion_4_shot_noise_statistics() {
    // Empirical std of the shot estimator over 10⁴ seeds within 10% of
    // √(p(1-p)/shots) for p ∈ {0.1, 0.5, 0.9}, shots ∈ {10³, 10⁴}.
    let n_seeds = 10_000u64;
    for p in [0.1, 0.5, 0.9] {
        for shots in [1_000u64, 10_000] {
            let mut sum = 0.0;
            let mut sum_sqr = 0.0;
            for seed in 0..n_seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let estimate = sample_kernel(p, shots, &mut rng).unwrap();
                sum += estimate;
                sum_sqr += estimate * estimate;
            }
            let mean = sum / n_seeds as f64;
            let std = (sum_sqr / n_seeds as f64 - mean * mean).sqrt();
            let expected = (p * (1.0 - p) / shots as f64).sqrt();
            assert!(
                (std - expected).abs() <= 0.10 * expected,
                "p={p} shots={shots}: std {std} vs expected {expected}"
            );
        }
    }
    println!("[acceptance] criterion 4 (shot-noise statistics): PASS");
}

#[test]
fn criterion_5_ocsvm_nu_property() {
    // 20 seeded Gaussian blobs (100 points, RBF, ν = 0.1): outliers ≤
    // ν + 1/N, support vectors ≥ ν − 1/N, KKT residual ≤ 1e-3 on every run.
    // The ν-property is a statement about the exact optimum, so the dual is
    // solved tightly and an outlier means a decision below the solver's
    // resolution (free support vectors sit an ulp either side of ρ).
    let nu = 0.1;
    let n = 100;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let features = Array2::from_shape_fn((n, 2), |_| common::normal(&mut rng));
        let gamma = default_rbf_gamma(features.view()).unwrap();
        let k = gram(features.view(), &ids(n), &KernelConfig::rbf(gamma)).unwrap();

        let model = train_ocsvm_with_tol(&k, nu, 1e-8).unwrap();
        assert!(
            model.kkt_residual <= 1e-3,
            "seed {seed}: KKT residual {}",
            model.kkt_residual
        );

        let outliers = (0..n)
            .filter(|&i| {
                let row: Vec<f64> = k.values.row(i).to_vec();
                model.decision(&row).unwrap() < -1e-6
            })
            .count() as f64
            / n as f64;
        let sv_fraction = model.support_idx.len() as f64 / n as f64;
        assert!(
            outliers <= nu + 1.0 / n as f64,
            "seed {seed}: outlier fraction {outliers}"
        );
        assert!(
            sv_fraction >= nu - 1.0 / n as f64,
            "seed {seed}: support-vector fraction {sv_fraction}"
        );
    }
    println!("[acceptance] criterion 5 (OC-SVM ν-property): PASS");
}

#[test]
fn criterion_6_metric_correctness() {
    // Exact match with brute-force recomputation over every label placement
    // for sizes ≤ 8, and the worked 3-point example equals 5/6.
    for n in 1..=8usize {
        let scores: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
        for mask in 1u32..(1 << n) {
            let labels: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
            let got = average_precision(&scores, &labels).unwrap();
            let want = oracle::brute_force_ap(&scores, &labels);
            assert!(
                (got - want).abs() <= 1e-12,
                "n={n} mask={mask:b}: {got} vs {want}"
            );
        }
    }
    let worked = average_precision(&[0.9, 0.8, 0.7], &[1, 0, 1]).unwrap();
    assert!(
        (worked - 5.0 / 6.0).abs() <= 1e-12,
        "worked example: {worked}"
    );
    println!("[acceptance] criterion 6 (metric correctness): PASS");
}

fn real_dataset_path() -> Option<std::path::PathBuf> {
    if let Ok(path) = std::env::var("QKAD_DATASET") {
        let path = std::path::PathBuf::from(path);
        if path.exists() {
            return Some(path);
        }
    }
    let default =
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/creditcard.csv");
    default.exists().then_some(default)
}

#[test]
fn criterion_7_paper_figure_reproduction() {
    // Needs the Kaggle dataset. CI mode sweeps N ∈ {2, 5, 10} and asserts
    // the chain at N ≤ 10: (a) ocsvm-rbf AP rises from N=2 to N=10 and (b)
    // the fidelity kernel stays within 0.10 of RBF at N=10 (the paper's
    // separation only develops past 10 features). Full mode
    // (QKAD_ACCEPTANCE_FULL=1) extends to {2, 5, 10, 15, 20} and asserts
    // the plateau (RBF AP in 0.45–0.65 for N ≥ 15) and the quantum margin
    // at N=20 (strictly positive, 15 ± 10 percentage points).
    let Some(dataset) = real_dataset_path() else {
        println!(
            "[acceptance] criterion 7 (paper-figure reproduction): SKIP — dataset absent, criteria 1-6 constitute acceptance"
        );
        return;
    };
    let full_mode = std::env::var("QKAD_ACCEPTANCE_FULL").is_ok_and(|v| v == "1");
    let sweep: Vec<usize> = if full_mode {
        vec![2, 5, 10, 15, 20]
    } else {
        vec![2, 5, 10]
    };

    // Sanity-check the source file itself: 284,807 transactions, 492 fraud.
    let full = qkad_core::dataset::load_csv(&dataset).unwrap();
    assert_eq!(full.n_rows(), 284_807, "unexpected row count in dataset");
    assert_eq!(
        full.labels
            .as_ref()
            .unwrap()
            .iter()
            .filter(|&&l| l == 1)
            .count(),
        492,
        "unexpected fraud count in dataset"
    );

    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        dataset,
        output_dir: dir.path().join("out"),
        cache_dir: std::env::var("QKAD_CACHE_DIR").ok().map(Into::into),
        models: vec![ModelKind::OcsvmRbf, ModelKind::OcsvmFidelity],
        sweep: sweep.clone(),
        ..RunConfig::default()
    };
    let rows = benchmark::run(&config).unwrap();
    let ap_of = |kind: ModelKind, n: usize| -> f64 {
        rows.iter()
            .find(|r| r.model == kind && r.n_features == n)
            .map(|r| r.ap)
            .unwrap()
    };

    let rbf_low = ap_of(ModelKind::OcsvmRbf, 2);
    let rbf_ten = ap_of(ModelKind::OcsvmRbf, 10);
    assert!(
        rbf_ten > rbf_low,
        "ocsvm-rbf AP should rise with N: {rbf_low} at N=2 vs {rbf_ten} at N=10"
    );
    let fid_ten = ap_of(ModelKind::OcsvmFidelity, 10);
    assert!(
        fid_ten >= rbf_ten - 0.10,
        "fidelity AP {fid_ten} trails rbf AP {rbf_ten} by more than 0.10 at N=10"
    );

    if full_mode {
        for &n in &[15usize, 20] {
            let rbf = ap_of(ModelKind::OcsvmRbf, n);
            assert!(
                (0.45..=0.65).contains(&rbf),
                "ocsvm-rbf AP {rbf} at N={n} outside the 0.45–0.65 plateau"
            );
        }
        let margin = ap_of(ModelKind::OcsvmFidelity, 20) - ap_of(ModelKind::OcsvmRbf, 20);
        assert!(margin > 0.0, "quantum margin not positive: {margin}");
        assert!(
            (0.05..=0.25).contains(&margin),
            "quantum margin {margin} outside 0.15 ± 0.10"
        );
    }
    println!("[acceptance] criterion 7 (paper-figure reproduction): PASS");
}

#[test]
fn criterion_8_benchmark_determinism() {
    // Two runs of cmd_benchmark with one config yield byte-identical CSVs.
    let dir = tempfile::tempdir().unwrap();
    let dataset = common::write_fixture(dir.path(), 80, 16, 5);

    let config = |out: &str| RunConfig {
        dataset: dataset.clone(),
        output_dir: dir.path().join(out),
        models: vec![
            ModelKind::Logreg,
            ModelKind::OcsvmRbf,
            ModelKind::OcsvmFidelity,
        ],
        sweep: vec![2, 3],
        n_nominal: 60,
        n_fraud: 12,
        shots: Some(300),
        ..RunConfig::default()
    };

    benchmark::run(&config("run1")).unwrap();
    benchmark::run(&config("run2")).unwrap();

    let csv1 = std::fs::read(dir.path().join("run1/results.csv")).unwrap();
    let csv2 = std::fs::read(dir.path().join("run2/results.csv")).unwrap();
    assert!(!csv1.is_empty());
    assert_eq!(csv1, csv2, "results CSVs differ between identical runs");
    println!("[acceptance] criterion 8 (benchmark determinism): PASS");
}
