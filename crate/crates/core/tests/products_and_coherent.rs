use std::collections::BTreeMap;

use uqm_core::coherent::{coherent_density, sample_coherent_many, veronese_components, veronese_embed, VeroneseConfig};
use uqm_core::disentangle::{sample_disentangle_many, FactorizedSystem};
use uqm_core::montecarlo::sample_mean;
use uqm_core::projective_sampling::mc_integrate;
use uqm_core::qstate::{random_density, random_unitary, tensor_product, ComplexMatrix, DensityMatrix, PureState};
use uqm_core::rng::{complex_normal_vec, seeded};
use uqm_core::C;

#[test]
fn local_unitary_covariance_of_disentangling() {
    let sys = FactorizedSystem::new(vec![2, 2]).unwrap();
    let mut rng = seeded(3);
    let w: DensityMatrix<f64> = random_density(4, 2, &mut rng).unwrap();
    let (u1, u2) = (random_unitary::<f64, _>(2, &mut rng), random_unitary::<f64, _>(2, &mut rng));
    let rotated_w = w.conjugated(&tensor_product(&u1, &u2)).unwrap();
    let n = 60_000;
    let direct = sample_disentangle_many(&rotated_w, &sys, n, 11).unwrap();
    let moved: Vec<_> = sample_disentangle_many(&w, &sys, n, 12)
        .unwrap()
        .into_iter()
        .map(|s| uqm_core::disentangle::segre_embed(&s.outcome.rotated(&[u1.clone(), u2.clone()]).unwrap()).projector())
        .collect();
    let a = sample_mean(16, direct.iter().map(|s| s.post_state.matrix().as_slice()));
    let b = sample_mean(16, moved.iter().map(|p| p.matrix().as_slice()));
    for k in 0..16 {
        for (x, y, sx, sy) in [
            (a.mean[k].re, b.mean[k].re, a.std_error[k].re, b.std_error[k].re),
            (a.mean[k].im, b.mean[k].im, a.std_error[k].im, b.std_error[k].im),
        ] {
            let se = (sx * sx + sy * sy).sqrt();
            assert!((x - y).abs() <= 4.0 * se + 1e-12, "component {k}: {x} vs {y} (se {se})");
        }
    }
}

/// `Sym^d(U)` assembled from `U^{⊗d}` restricted to normalized symmetrized tensor basis vectors.
fn symmetric_power(u: &ComplexMatrix<f64>, d: usize) -> ComplexMatrix<f64> {
    let n = u.rows();
    let mut full = ComplexMatrix::<f64>::identity(1);
    for _ in 0..d {
        full = tensor_product(&full, u);
    }
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for t in 0..n.pow(d as u32) {
        let mut digits: Vec<usize> = (0..d).rev().map(|k| t / n.pow(k as u32) % n).collect();
        digits.sort_unstable();
        classes.entry(digits).or_default().push(t);
    }
    let basis: Vec<Vec<C<f64>>> = classes
        .values()
        .map(|members| {
            let mut v = vec![C::new(0.0, 0.0); n.pow(d as u32)];
            let amp = 1.0 / (members.len() as f64).sqrt();
            members.iter().for_each(|&t| v[t] = C::new(amp, 0.0));
            v
        })
        .collect();
    ComplexMatrix::from_fn(basis.len(), basis.len(), |k, l| full.sandwich(&basis[k], &basis[l]).unwrap())
}

#[test]
fn veronese_embedding_is_covariant() {
    let mut rng = seeded(5);
    for (n, d) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let u = random_unitary::<f64, _>(n, &mut rng);
        let sym = symmetric_power(&u, d);
        assert_eq!(sym.rows(), VeroneseConfig::new(n, d).unwrap().sym_dim);
        for _ in 0..10 {
            let phi = complex_normal_vec::<f64, _>(n, &mut rng);
            let lhs = veronese_components(&u.mul_vec(&phi).unwrap(), d);
            let rhs = sym.mul_vec(&veronese_components(&phi, d)).unwrap();
            for (l, r) in lhs.iter().zip(&rhs) {
                assert!((l - r).norm() <= 1e-10, "(n,d)=({n},{d})");
            }
        }
    }
}

#[test]
fn coherent_density_integrates_to_one() {
    for (n, d) in [(2, 2), (2, 4), (3, 2)] {
        let config = VeroneseConfig::new(n, d).unwrap();
        let w: DensityMatrix<f64> = random_density(config.sym_dim, 2, &mut seeded((n * 10 + d) as u64)).unwrap();
        let est = mc_integrate(
            |phi: &PureState<f64>, out| out[0] = C::new(coherent_density(&w, phi, &config).unwrap(), 0.0),
            n,
            1,
            60_000,
            3,
        )
        .unwrap();
        let (m, se) = est.scalar();
        assert!((m - 1.0).abs() <= 4.0 * se, "(n,d)=({n},{d}): {m} +- {se}");
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[test]
fn coherent_pure_state_fidelity_matches_beta_integral() {
    // t = |<phi|phi0>|² has FS density (n-1)(1-t)^(n-2); outcomes weight it by N t^d.
    for (n, d) in [(2usize, 2usize), (2, 3), (3, 2)] {
        let config = VeroneseConfig::new(n, d).unwrap();
        let phi0 = PureState::<f64>::normalize(complex_normal_vec(n, &mut seeded(d as u64))).unwrap();
        let w = veronese_embed(&phi0, d).unwrap().state().projector();
        let beta = factorial(d + 1) * factorial(n - 2) / factorial(d + n);
        let expected = config.sym_dim as f64 * (n - 1) as f64 * beta;
        let samples = sample_coherent_many(&w, &config, 100_000, 21).unwrap();
        let vals: Vec<[C<f64>; 1]> = samples.iter().map(|s| [C::new(s.outcome.fidelity(&phi0), 0.0)]).collect();
        let est = sample_mean(1, vals.iter().map(|v| v.as_slice()));
        let (m, se) = est.scalar();
        assert!((m - expected).abs() <= 4.0 * se, "(n,d)=({n},{d}): {m} vs {expected} (se {se})");
    }
}
