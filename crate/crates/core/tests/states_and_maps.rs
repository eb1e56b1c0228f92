use proptest::prelude::*;
use uqm_core::cpmap::{
    apply_map, certify_positive, choi_from_kraus, kraus_from_choi, random_cp_map, ChoiMatrix, PositivityKind,
    QuantumMap,
};
use uqm_core::qstate::{
    eig_hermitian, make_density, partial_trace, random_density, random_unitary, tensor_product, trace_distance,
    ComplexMatrix, DensityMatrix, HermitianOperator, Keep,
};
use uqm_core::rng::{complex_normal_vec, seeded};
use uqm_core::{qstate, C};

fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix<f64> {
    let mut rng = seeded(seed);
    let g = ComplexMatrix::from_fn(n, n, |_, _| complex_normal_vec::<f64, _>(1, &mut rng)[0]);
    g.hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn accepted_densities_satisfy_tolerances(seed in any::<u64>(), n in 1usize..7, rank in 1usize..7) {
        let rank = rank.min(n);
        let w: DensityMatrix<f64> = random_density(n, rank, &mut seeded(seed)).unwrap();
        let again = make_density(w.matrix().clone(), 1e-9).unwrap();
        prop_assert!(eig_hermitian(again.operator()).unwrap().min_eigenvalue() >= -1e-9);
        prop_assert!((again.trace() - 1.0).abs() <= 1e-9);
        prop_assert!(again.matrix().hermiticity_residual() <= 1e-9);
    }

    #[test]
    fn eigen_reassembly(seed in any::<u64>(), n in 1usize..33) {
        let h = HermitianOperator::symmetrized(&random_hermitian(n, seed));
        let spec = eig_hermitian(&h).unwrap();
        let back = spec.reassemble();
        prop_assert!((back.matrix() - h.matrix()).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = seeded(seed);
        let a: DensityMatrix<f64> = random_density(n, n, &mut rng).unwrap();
        let b: DensityMatrix<f64> = random_density(n, 1, &mut rng).unwrap();
        let c: DensityMatrix<f64> = random_density(n, 2, &mut rng).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, trace_distance(&b, &a).unwrap());
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-12);
        prop_assert!(trace_distance(&a, &a).unwrap() <= 1e-12);
    }

    #[test]
    fn partial_trace_of_products(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded(seed);
        let a: DensityMatrix<f64> = random_density(da, da, &mut rng).unwrap();
        let b: DensityMatrix<f64> = random_density(db, 1, &mut rng).unwrap();
        let ab = make_density(tensor_product(a.matrix(), b.matrix()), 1e-9).unwrap();
        prop_assert!(partial_trace(&ab, (da, db), Keep::First).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-12);
        prop_assert!(partial_trace(&ab, (da, db), Keep::Second).unwrap().matrix().max_abs_diff(b.matrix()) <= 1e-12);
    }

    #[test]
    fn tensor_product_acts_factorwise(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = seeded(seed);
        let a = random_unitary::<f64, _>(da, &mut rng);
        let b = random_hermitian(db, seed ^ 1);
        let x = complex_normal_vec::<f64, _>(da, &mut rng);
        let y = complex_normal_vec::<f64, _>(db, &mut rng);
        let lhs = tensor_product(&a, &b).mul_vec(&qstate::kron_vec(&x, &y)).unwrap();
        let rhs = qstate::kron_vec(&a.mul_vec(&x).unwrap(), &b.mul_vec(&y).unwrap());
        for (l, r) in lhs.iter().zip(&rhs) {
            prop_assert!((l - r).norm() <= 1e-12 * (1.0 + r.norm()));
        }
    }

    #[test]
    fn choi_kraus_roundtrip(seed in any::<u64>(), n in 1usize..5, count in 1usize..6) {
        let mut rng = seeded(seed);
        let k = random_cp_map::<f64, _>(n, count, &mut rng).unwrap();
        let choi = choi_from_kraus(&k);
        let back = kraus_from_choi(&choi, 1e-9).unwrap();
        for _ in 0..20 {
            let w: DensityMatrix<f64> = random_density(n, n, &mut rng).unwrap();
            let direct = apply_map(&k, &w).unwrap();
            let via_choi = apply_map(&choi, &w).unwrap();
            let via_back = apply_map(&back, &w).unwrap();
            prop_assert!(direct.matrix().max_abs_diff(via_choi.matrix()) <= 1e-10);
            prop_assert!(direct.matrix().max_abs_diff(via_back.matrix()) <= 1e-10);
            prop_assert!(eig_hermitian(&direct).unwrap().min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn local_cp_action_stays_positive(seed in any::<u64>(), count in 1usize..4) {
        let mut rng = seeded(seed);
        let k = random_cp_map::<f64, _>(2, count, &mut rng).unwrap();
        let w: DensityMatrix<f64> = random_density(4, 4, &mut rng).unwrap();
        let out = HermitianOperator::symmetrized(&k.apply_local(w.matrix(), 2).unwrap());
        prop_assert!(eig_hermitian(&out).unwrap().min_eigenvalue() >= -1e-9);
        let out_choi = HermitianOperator::symmetrized(&choi_from_kraus(&k).apply_local(w.matrix(), 2).unwrap());
        prop_assert!(out.matrix().max_abs_diff(out_choi.matrix()) <= 1e-12);
    }
}

#[test]
fn witnesses_reevaluate_exactly() {
    let minus_id = ChoiMatrix::<f64>::identity_map(2).scale(-1.0);
    let pt = ChoiMatrix::<f64>::from_units(2, |i, j| {
        // A map that is not positive: negated identity on off-diagonal units.
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(i, j)] = if i == j { C::new(1.0, 0.0) } else { C::new(-2.0, 0.0) };
        m
    });
    for (choi, seed) in [(minus_id, 1u64), (pt, 2)] {
        let verdict = certify_positive(&choi, 32, seed, 30).unwrap();
        assert_eq!(verdict.kind, PositivityKind::NotPositive);
        let w = verdict.witness.unwrap();
        let again = choi.biquadratic_form(w.x.vector(), w.y.vector()).unwrap();
        assert!((again - w.value).abs() <= 1e-12);
        assert!(w.value < 0.0);
    }
}

#[test]
fn transpose_is_positive_but_not_cp() {
    let verdict = certify_positive(&ChoiMatrix::<f64>::transpose_map(3), 32, 5, 30).unwrap();
    assert_eq!(verdict.kind, PositivityKind::PositiveNotCpCandidate);
    assert!((verdict.min_choi_eigenvalue + 1.0).abs() < 1e-12);
}
