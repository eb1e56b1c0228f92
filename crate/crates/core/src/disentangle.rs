//! The disentangling measurement on a composite system.
//!
//! Outcomes are tuples of pure states, one per factor, assembled by the
//! Segre embedding `(α, β, …) ↦ α ⊗ β ⊗ …`. The base measure is the product
//! of the Fubini–Study probability measures of the factors and the outcome
//! density is `(Π dᵢ)·⟨ξ|w|ξ⟩`.
//!
//! For two qubits the image of the embedding is the quadric
//! `ξ⁰⁰ξ¹¹ − ξ⁰¹ξ¹⁰ = 0`. The singlet density vanishes on *coincident*
//! factors, meaning the second factor is the same vector as the first
//! (`β = α`, no conjugation), since the singlet is antisymmetric.

use rand::Rng;

use crate::error::{Error, Result};
use crate::experiment::{ContinuousExperiment, OutcomeSample, OutcomeSpace};
use crate::montecarlo::McEstimate;
use crate::projective_sampling::sample_fs_uniform;
use crate::qstate::{kron_vec, DensityMatrix, PureState};
use crate::rng::Trial;
use crate::scalar::{Real, C};

/// A composite system of `k ≥ 2` factors, each of dimension at least two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizedSystem {
    factor_dims: Vec<usize>,
    total_dim: usize,
}

impl FactorizedSystem {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.len() < 2 {
            return Err(Error::InvalidArgument("need at least two factors".into()));
        }
        if let Some(&d) = factor_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidArgument(format!("factor dimension {d} is below 2")));
        }
        let total_dim = factor_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidArgument("total dimension overflows".into()))?;
        Ok(Self { factor_dims, total_dim })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn n_factors(&self) -> usize {
        self.factor_dims.len()
    }
}

/// One unit vector per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint<T: Real> {
    factors: Vec<PureState<T>>,
}

impl<T: Real> ProductPoint<T> {
    pub fn new(factors: Vec<PureState<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product point needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[PureState<T>] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim()).collect()
    }

    /// Two identical factors `(α, α)`.
    pub fn coincident(alpha: PureState<T>) -> Self {
        Self { factors: vec![alpha.clone(), alpha] }
    }

    /// A qubit and its orthogonal partner `(α, α^⊥)` with `α^⊥ = (−ᾱ₁, ᾱ₀)`.
    pub fn opposed(alpha: PureState<T>) -> Result<Self> {
        if alpha.dim() != 2 {
            return Err(Error::DimMismatch { expected: 2, found: alpha.dim() });
        }
        let a = alpha.vector();
        let perp = PureState::from_unit_unchecked(vec![-a[1].conj(), a[0].conj()]);
        Ok(Self { factors: vec![alpha, perp] })
    }

    /// Applies one unitary per factor.
    pub fn rotated(&self, unitaries: &[crate::qstate::ComplexMatrix<T>]) -> Result<Self> {
        if unitaries.len() != self.factors.len() {
            return Err(Error::DimMismatch { expected: self.factors.len(), found: unitaries.len() });
        }
        let factors = self.factors.iter().zip(unitaries).map(|(f, u)| f.transformed(u)).collect::<Result<_>>()?;
        Ok(Self { factors })
    }
}

/// Tensor product of the factor vectors, first factor most significant.
pub fn segre_embed<T: Real>(p: &ProductPoint<T>) -> PureState<T> {
    let mut v = vec![C::new(T::one(), T::zero())];
    for f in &p.factors {
        v = kron_vec(&v, f.vector());
    }
    PureState::from_unit_unchecked(v)
}

/// `2·det` of the 2×2 reshape of a two-qubit vector; zero exactly on product vectors.
pub fn quadric_residual<T: Real>(xi: &PureState<T>) -> Result<C<T>> {
    if xi.dim() != 4 {
        return Err(Error::DimMismatch { expected: 4, found: xi.dim() });
    }
    let v = xi.vector();
    let two = T::of(2.0);
    Ok((v[0] * v[3] - v[1] * v[2]) * two)
}

/// Largest modulus of any 2×2 minor of `v` reshaped along any bipartition of the factors.
///
/// Zero exactly when `v` is a product vector.
pub fn bipartition_residual<T: Real>(v: &[C<T>], dims: &[usize]) -> Result<T> {
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(Error::DimMismatch { expected: total, found: v.len() });
    }
    let k = dims.len();
    let mut worst = T::zero();
    // Subsets containing factor 0 enumerate each bipartition once.
    for mask in 1usize..(1 << k) {
        if mask & 1 == 0 || mask == (1 << k) - 1 {
            continue;
        }
        let m = reshape_along(v, dims, mask);
        worst = worst.max(max_minor(&m));
    }
    Ok(worst)
}

fn reshape_along<T: Real>(v: &[C<T>], dims: &[usize], mask: usize) -> Vec<Vec<C<T>>> {
    let rows: usize = dims.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d).product();
    let cols = v.len() / rows;
    let mut out = vec![vec![C::new(T::zero(), T::zero()); cols]; rows];
    for (flat, &z) in v.iter().enumerate() {
        let (mut r, mut c, mut rem) = (0, 0, flat);
        let mut digits = vec![0; dims.len()];
        for i in (0..dims.len()).rev() {
            digits[i] = rem % dims[i];
            rem /= dims[i];
        }
        for (i, (&digit, &d)) in digits.iter().zip(dims).enumerate() {
            if mask >> i & 1 == 1 {
                r = r * d + digit;
            } else {
                c = c * d + digit;
            }
        }
        out[r][c] = z;
    }
    out
}

fn max_minor<T: Real>(m: &[Vec<C<T>>]) -> T {
    let mut worst = T::zero();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            for a in 0..m[0].len() {
                for b in a + 1..m[0].len() {
                    worst = worst.max((m[i][a] * m[j][b] - m[i][b] * m[j][a]).norm());
                }
            }
        }
    }
    worst
}

/// Outcome density `(Π dᵢ)·⟨ξ|w|ξ⟩` with `ξ = segre_embed(p)`.
pub fn disentangle_density<T: Real>(w: &DensityMatrix<T>, p: &ProductPoint<T>) -> Result<T> {
    let xi = segre_embed(p);
    if xi.dim() != w.dim() {
        return Err(Error::DimMismatch { expected: w.dim(), found: xi.dim() });
    }
    Ok(T::of_usize(xi.dim()) * w.expectation(xi.vector())?)
}

/// The disentangling operation as a continuous experiment over the Segre variety.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisentanglingMeasurement {
    pub system: FactorizedSystem,
}

impl DisentanglingMeasurement {
    pub fn new(system: FactorizedSystem) -> Self {
        Self { system }
    }
}

impl<T: Real> ContinuousExperiment<T> for DisentanglingMeasurement {
    type Point = ProductPoint<T>;

    fn outcome_space(&self) -> OutcomeSpace {
        OutcomeSpace::Segre { dims: self.system.factor_dims.clone() }
    }

    fn system_dim(&self) -> usize {
        self.system.total_dim
    }

    fn normalization(&self) -> T {
        T::of_usize(self.system.total_dim)
    }

    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> ProductPoint<T> {
        let factors = self.system.factor_dims.iter().map(|&d| sample_fs_uniform(d, rng)).collect();
        ProductPoint { factors }
    }

    fn embed(&self, point: &ProductPoint<T>) -> PureState<T> {
        segre_embed(point)
    }
}

/// One trial of the disentangling measurement on `w`.
pub fn sample_disentangle<T: Real>(
    w: &DensityMatrix<T>,
    sys: &FactorizedSystem,
    trial: Trial,
) -> Result<OutcomeSample<T, ProductPoint<T>>> {
    let exp = DisentanglingMeasurement::new(sys.clone());
    Ok(exp.sampler(w)?.sample(trial))
}

/// `n` trials in trial order.
pub fn sample_disentangle_many<T: Real>(
    w: &DensityMatrix<T>,
    sys: &FactorizedSystem,
    n: usize,
    seed: u64,
) -> Result<Vec<OutcomeSample<T, ProductPoint<T>>>> {
    let exp = DisentanglingMeasurement::new(sys.clone());
    Ok(exp.sampler(w)?.sample_many(n, seed))
}

/// Monte Carlo estimate of the probability that the outcome lies in `region`.
pub fn region_probability<T, F>(
    w: &DensityMatrix<T>,
    sys: &FactorizedSystem,
    region: F,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(&ProductPoint<T>) -> bool + Sync,
{
    DisentanglingMeasurement::new(sys.clone()).region_probability(w, region, n_samples, seed)
}
