//! Coherent measurements through the degree-`d` Veronese embedding
//! `CP^{n-1} → CP^{N-1}`, `N = C(n+d-1, d)`.
//!
//! The system space is the symmetric power `Sym^d(C^n)` written in the
//! orthonormal basis indexed by nondecreasing multi-indices `(i₁ ≤ … ≤ i_d)`
//! in lexicographic order. In that basis the coherent vector of `φ` has
//! components `√(d!/Π mᵢ!)·Π φᵢ^{mᵢ}`, where `mᵢ` counts occurrences of `i`.
//! Spin `s` corresponds to `n = 2`, `d = 2s`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{ContinuousExperiment, OutcomeSample, OutcomeSpace};
use crate::montecarlo::{mc_mean, DeviationReport, McEstimate};
use crate::projective_sampling::{identity_components, sample_fs_uniform};
use crate::qstate::{inner, DensityMatrix, PureState};
use crate::rng::Trial;
use crate::scalar::{cone, Real, C};

/// `C(n+d-1, d)`, the dimension of `Sym^d(C^n)`.
pub fn sym_dim(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("base dimension must be at least 1".into()));
    }
    let overflow = || Error::Overflow { base_dim: n, degree: d };
    let mut r: u128 = 1;
    for i in 1..=d as u128 {
        // r = C(n-1+i, i) after this step; the division is exact.
        r = r.checked_mul(n as u128 - 1 + i).ok_or_else(overflow)? / i;
    }
    usize::try_from(r).map_err(|_| overflow())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VeroneseConfig {
    pub base_dim: usize,
    pub degree: usize,
    pub sym_dim: usize,
}

impl VeroneseConfig {
    pub fn new(base_dim: usize, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        Ok(Self { base_dim, degree, sym_dim: sym_dim(base_dim, degree)? })
    }

    /// Spin `s` (integer or half-integer, `s ≥ 1/2`).
    pub fn spin(s: f64) -> Result<Self> {
        let two_s = 2.0 * s;
        if two_s.is_nan() || two_s < 1.0 || two_s.fract() != 0.0 || two_s > u32::MAX as f64 {
            return Err(Error::InvalidArgument(format!("spin {s} is not a positive multiple of 1/2")));
        }
        Self::new(2, two_s as usize)
    }

    /// Multi-indices in basis order.
    pub fn multi_indices(&self) -> MultiIndices {
        MultiIndices { n: self.base_dim, next: Some(vec![0; self.degree]) }
    }
}

/// Nondecreasing tuples over `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct MultiIndices {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for MultiIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if let Some(pos) = succ.iter().rposition(|&i| i + 1 < self.n) {
            let v = succ[pos] + 1;
            succ[pos..].iter_mut().for_each(|x| *x = v);
            self.next = Some(succ);
        }
        Some(cur)
    }
}

fn sqrt_multinomial<T: Real>(idx: &[usize]) -> T {
    // d!/Π mᵢ! as a product of binomials over runs.
    let mut coeff = 1.0f64;
    let mut seen = 0usize;
    let mut k = 0;
    while k < idx.len() {
        let run = idx[k..].iter().take_while(|&&x| x == idx[k]).count();
        for j in 1..=run {
            coeff *= (seen + j) as f64 / j as f64;
        }
        seen += run;
        k += run;
    }
    T::of(coeff.sqrt())
}

/// Veronese components of an arbitrary (not necessarily unit) vector.
///
/// The norm of the result is `|φ|^d`.
pub fn veronese_components<T: Real>(phi: &[C<T>], d: usize) -> Vec<C<T>> {
    let config = VeroneseConfig { base_dim: phi.len(), degree: d, sym_dim: 0 };
    config
        .multi_indices()
        .map(|idx| idx.iter().fold(cone::<T>(), |acc, &i| acc * phi[i]) * sqrt_multinomial::<T>(&idx))
        .collect()
}

/// A coherent state: the image of a direction under the Veronese embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentVector<T: Real> {
    pub config: VeroneseConfig,
    pub direction: PureState<T>,
    pub components: Vec<C<T>>,
}

impl<T: Real> CoherentVector<T> {
    pub fn state(&self) -> PureState<T> {
        PureState::from_unit_unchecked(self.components.clone())
    }
}

pub fn veronese_embed<T: Real>(phi: &PureState<T>, d: usize) -> Result<CoherentVector<T>> {
    let config = VeroneseConfig::new(phi.dim(), d)?;
    Ok(CoherentVector { config, direction: phi.clone(), components: veronese_components(phi.vector(), d) })
}

fn check_base(config: &VeroneseConfig, phi: &PureState<impl Real>) -> Result<()> {
    if phi.dim() != config.base_dim {
        return Err(Error::DimMismatch { expected: config.base_dim, found: phi.dim() });
    }
    Ok(())
}

fn check_sym(config: &VeroneseConfig, w: &DensityMatrix<impl Real>) -> Result<()> {
    if w.dim() != config.sym_dim {
        return Err(Error::DimMismatch { expected: config.sym_dim, found: w.dim() });
    }
    Ok(())
}

/// Outcome density `N⟨coh(φ)|w|coh(φ)⟩` relative to the Fubini–Study measure on `CP^{n-1}`.
pub fn coherent_density<T: Real>(w: &DensityMatrix<T>, phi: &PureState<T>, config: &VeroneseConfig) -> Result<T> {
    check_base(config, phi)?;
    check_sym(config, w)?;
    let coh = veronese_components(phi.vector(), config.degree);
    Ok(T::of_usize(config.sym_dim) * w.expectation(&coh)?)
}

/// The coherent measurement on `Sym^d(C^n)`; outcomes are directions in `C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoherentMeasurement {
    pub config: VeroneseConfig,
}

impl CoherentMeasurement {
    pub fn new(config: VeroneseConfig) -> Self {
        Self { config }
    }
}

impl<T: Real> ContinuousExperiment<T> for CoherentMeasurement {
    type Point = PureState<T>;

    fn outcome_space(&self) -> OutcomeSpace {
        OutcomeSpace::Veronese { n: self.config.base_dim, d: self.config.degree }
    }

    fn system_dim(&self) -> usize {
        self.config.sym_dim
    }

    fn normalization(&self) -> T {
        T::of_usize(self.config.sym_dim)
    }

    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> PureState<T> {
        sample_fs_uniform(self.config.base_dim, rng)
    }

    fn embed(&self, point: &PureState<T>) -> PureState<T> {
        PureState::from_unit_unchecked(veronese_components(point.vector(), self.config.degree))
    }
}

pub fn sample_coherent<T: Real>(
    w: &DensityMatrix<T>,
    config: &VeroneseConfig,
    trial: Trial,
) -> Result<OutcomeSample<T, PureState<T>>> {
    Ok(CoherentMeasurement::new(*config).sampler(w)?.sample(trial))
}

pub fn sample_coherent_many<T: Real>(
    w: &DensityMatrix<T>,
    config: &VeroneseConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<OutcomeSample<T, PureState<T>>>> {
    Ok(CoherentMeasurement::new(*config).sampler(w)?.sample_many(n, seed))
}

/// Monte Carlo estimate of `N·∫|coh(φ)⟩⟨coh(φ)| μ(dφ)` compared with `I_N`.
pub fn check_coherent_resolution<T: Real>(
    config: &VeroneseConfig,
    n_samples: usize,
    seed: u64,
) -> Result<(McEstimate<T>, DeviationReport)> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let big_n = config.sym_dim;
    let scale = T::of_usize(big_n);
    let est = mc_mean(n_samples, seed, big_n * big_n, |_, rng, out| {
        let phi: PureState<T> = sample_fs_uniform(config.base_dim, rng);
        let coh = veronese_components(phi.vector(), config.degree);
        for (a, ca) in coh.iter().enumerate() {
            for (b, cb) in coh.iter().enumerate() {
                out[a * big_n + b] = ca * cb.conj() * scale;
            }
        }
    });
    let report = est.deviation_from(&identity_components(big_n));
    Ok((est, report))
}

/// `φ̄^A = ε^{AB}φ̄_B`, i.e. `(φ̄₂, −φ̄₁)`: the conjugate direction with its index raised.
pub fn raised_conjugate<T: Real>(phi: &PureState<T>) -> Result<PureState<T>> {
    if phi.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: phi.dim() });
    }
    let v = phi.vector();
    Ok(PureState::from_unit_unchecked(vec![v[1].conj(), -v[0].conj()]))
}

/// Symmetric-basis components of `u^{(A}v^{B)}` for two qubit vectors.
pub fn symmetrized_pair<T: Real>(u: &[C<T>], v: &[C<T>]) -> Result<Vec<C<T>>> {
    if u.len() != 2 || v.len() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: u.len().max(v.len()) });
    }
    let half = T::of(0.5);
    let x12 = (u[0] * v[1] + u[1] * v[0]) * half;
    Ok(vec![u[0] * v[0], x12 * T::SQRT_2(), u[1] * v[1]])
}

/// `|⟨coh(φ)|x⟩|` for a spin-1 vector `x` in the symmetric basis.
pub fn conic_pairing<T: Real>(phi: &PureState<T>, x: &[C<T>]) -> Result<T> {
    if phi.dim() != 2 || x.len() != 3 {
        return Err(Error::DimMismatch { expected: 3, found: x.len() });
    }
    Ok(inner(&veronese_components(phi.vector(), 2), x).norm())
}

/// Residual of the tangency identity: every `x^{AB} = φ̄^{(A}α^{B)}` is orthogonal to `coh(φ)`.
pub fn tangency_check<T: Real>(phi: &PureState<T>, alpha: &PureState<T>) -> Result<T> {
    let raised = raised_conjugate(phi)?;
    conic_pairing(phi, &symmetrized_pair(raised.vector(), alpha.vector())?)
}

/// `ε_AC ε_BD z^{AB} z^{CD}` for a spin-1 vector in the symmetric basis.
pub fn conic_residual<T: Real>(z: &[C<T>]) -> Result<C<T>> {
    if z.len() != 3 {
        return Err(Error::DimMismatch { expected: 3, found: z.len() });
    }
    let z12 = z[1] / T::SQRT_2();
    Ok((z[0] * z[2] - z12 * z12) * T::of(2.0))
}
