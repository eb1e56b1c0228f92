//! Uniform sampling on complex projective space, the tomographic outcome
//! density, and Monte Carlo integration against the Fubini–Study measure.
//!
//! All densities are relative to the Fubini–Study *probability* measure μ,
//! with μ(Ω) = 1.

use rand::Rng;

use crate::error::{Error, Result};
use crate::experiment::{ContinuousExperiment, OutcomeSpace};
use crate::montecarlo::{mc_mean, DeviationReport, McEstimate};
use crate::qstate::{DensityMatrix, PureState};
use crate::rng::complex_normal_vec;
use crate::scalar::{cone, cr, czero, Real, C};

/// A point of `CP^{n-1}` given by a unit representative.
pub type FsPoint<T> = PureState<T>;

/// Fubini–Study uniform point: a normalised vector of `n` standard complex Gaussians.
///
/// For `n = 1` the space is a single point and `e₁` is returned without consuming randomness.
pub fn sample_fs_uniform<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> FsPoint<T> {
    assert!(n >= 1, "projective space needs n >= 1");
    if n == 1 {
        return PureState::basis(1, 0);
    }
    loop {
        if let Ok(p) = PureState::normalize(complex_normal_vec(n, rng)) {
            return p;
        }
    }
}

/// `ρ(x) = n⟨Z|w|Z⟩` for a unit representative `Z` of `x`.
pub fn density_rho<T: Real>(w: &DensityMatrix<T>, x: &FsPoint<T>) -> Result<T> {
    if w.dim() != x.dim() {
        return Err(Error::DimMismatch { expected: w.dim(), found: x.dim() });
    }
    Ok(T::of_usize(w.dim()) * w.expectation(x.vector())?)
}

/// The tomographic measurement on an `n`-dimensional system: outcomes are
/// pure states `x`, post-state `|Z(x)⟩⟨Z(x)|`, density `ρ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectiveMeasurement {
    pub n: usize,
}

impl ProjectiveMeasurement {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(Self { n })
    }
}

impl<T: Real> ContinuousExperiment<T> for ProjectiveMeasurement {
    type Point = FsPoint<T>;

    fn outcome_space(&self) -> OutcomeSpace {
        OutcomeSpace::ProjectiveSpace { n: self.n }
    }

    fn system_dim(&self) -> usize {
        self.n
    }

    fn normalization(&self) -> T {
        T::of_usize(self.n)
    }

    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> FsPoint<T> {
        sample_fs_uniform(self.n, rng)
    }

    fn embed(&self, point: &FsPoint<T>) -> PureState<T> {
        point.clone()
    }
}

/// One draw from the outcome distribution `ρ(x) μ(dx)` by rejection sampling.
pub fn sample_rho<T: Real, R: Rng + ?Sized>(w: &DensityMatrix<T>, rng: &mut R) -> Result<FsPoint<T>> {
    let exp = ProjectiveMeasurement::new(w.dim())?;
    let sampler = exp.sampler(w)?;
    Ok(sampler.draw(rng).0)
}

/// Mean of `f` over `n_samples` Fubini–Study uniform points of `CP^{n-1}`.
///
/// `f` writes its (possibly tensor-valued) result into the supplied buffer of length `width`.
pub fn mc_integrate<T, F>(f: F, n: usize, width: usize, n_samples: usize, seed: u64) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(&FsPoint<T>, &mut [C<T>]) + Sync,
{
    if n == 0 || n_samples < 2 {
        return Err(Error::InvalidArgument("need n >= 1 and at least 2 samples".into()));
    }
    Ok(mc_mean(n_samples, seed, width, |_, rng, out| {
        let z = sample_fs_uniform(n, rng);
        f(&z, out)
    }))
}

/// Components `Z^α Z^{β'} Z̄_β Z̄_{α'}` flattened in `(α, β', β, α')` order.
fn quartic_moment<T: Real>(z: &[C<T>], out: &mut [C<T>]) {
    let n = z.len();
    let mut k = 0;
    for a in 0..n {
        for bp in 0..n {
            let top = z[a] * z[bp];
            for b in 0..n {
                for ap in 0..n {
                    out[k] = top * z[b].conj() * z[ap].conj();
                    k += 1;
                }
            }
        }
    }
}

/// `(δ^α_β δ^{β'}_{α'} + δ^α_{α'} δ^{β'}_β) / (n(n+1))` in the same flattening as the moment.
pub fn quadratic_identity_rhs<T: Real>(n: usize) -> Vec<C<T>> {
    let scale = T::one() / T::of_usize(n * (n + 1));
    let mut out = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for bp in 0..n {
            for b in 0..n {
                for ap in 0..n {
                    let v = usize::from(a == b && bp == ap) + usize::from(a == ap && bp == b);
                    out.push(cr(T::of_usize(v) * scale));
                }
            }
        }
    }
    out
}

/// Monte Carlo check of the fourth-moment identity of the Fubini–Study measure.
pub fn check_quadratic_identity<T: Real>(
    n: usize,
    n_samples: usize,
    seed: u64,
) -> Result<(McEstimate<T>, DeviationReport)> {
    let est = mc_integrate(|z: &FsPoint<T>, out| quartic_moment(z.vector(), out), n, n.pow(4), n_samples, seed)?;
    let report = est.deviation_from(&quadratic_identity_rhs(n));
    Ok((est, report))
}

/// `E(A) = n ∫ 1{x ∈ A} |Z⟩⟨Z| μ(dx)`, flattened row-major.
pub fn effect_estimate<T, F>(region: F, n: usize, n_samples: usize, seed: u64) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(&FsPoint<T>) -> bool + Sync,
{
    let scale = T::of_usize(n);
    mc_integrate(
        |z: &FsPoint<T>, out| {
            if region(z) {
                let v = z.vector();
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = v[i] * v[j].conj() * scale;
                    }
                }
            }
        },
        n,
        n * n,
        n_samples,
        seed,
    )
}

/// Flattened `n x n` identity.
pub fn identity_components<T: Real>(n: usize) -> Vec<C<T>> {
    (0..n * n).map(|k| if k / n == k % n { cone() } else { czero() }).collect()
}
