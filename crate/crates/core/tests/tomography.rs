use uqm_core::qstate::{random_density, trace_distance, DensityMatrix};
use uqm_core::rng::seeded;
use uqm_core::tomographic::{ensemble_state, expected_ensemble, reconstruct, run_uqm};

#[test]
fn ensemble_converges_at_the_sampling_rate() {
    for n in 2..=4usize {
        for n_samples in [10_000usize, 40_000] {
            let w: DensityMatrix<f64> = random_density(n, n, &mut seeded(n as u64 * 31)).unwrap();
            let run = run_uqm(&w, n_samples, 1000 + n as u64).unwrap();
            let r = ensemble_state(&run.samples).unwrap();
            let d = trace_distance(&r, &expected_ensemble(&w)).unwrap();
            assert!(d <= 5.0 * (n as f64 / n_samples as f64).sqrt(), "n={n} N={n_samples}: {d}");
            assert!(run.samples.iter().all(|s| (s.post_state.purity() - 1.0).abs() <= 1e-12));
        }
    }
}

#[test]
fn reconstruction_round_trip() {
    let w: DensityMatrix<f64> = random_density(3, 2, &mut seeded(77)).unwrap();
    let run = run_uqm(&w, 100_000, 5).unwrap();
    assert!(trace_distance(&run.reconstruction_psd, &w).unwrap() <= 0.05);
    assert_eq!(run.diagnostics.reconstruction_to_input, trace_distance(&run.reconstruction_psd, &w).unwrap());
    let (raw, _) = reconstruct(&expected_ensemble(&w), 3).unwrap();
    assert!(raw.matrix().max_abs_diff(w.matrix()) <= 1e-12);
}

#[test]
fn reports_are_reproducible() {
    let w: DensityMatrix<f64> = random_density(2, 1, &mut seeded(1)).unwrap();
    let a = serde_json::to_string(&run_uqm(&w, 5000, 9).unwrap().report()).unwrap();
    let b = serde_json::to_string(&run_uqm(&w, 5000, 9).unwrap().report()).unwrap();
    assert_eq!(a, b);
}
