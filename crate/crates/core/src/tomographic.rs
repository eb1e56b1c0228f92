//! The universal (tomographic) measurement end to end: simulate trials,
//! average the outcome projectors, and invert the dilution `r = (I + w)/(n+1)`
//! to recover the input state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{ContinuousExperiment, OutcomeSample};
use crate::montecarlo::sample_mean;
use crate::projective_sampling::{FsPoint, ProjectiveMeasurement};
use crate::qstate::{eig_hermitian, trace_distance, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::scalar::Real;
use crate::wire::StateFile;

/// Trace distances of the estimates from the input and from the exact ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub ensemble_to_expected: f64,
    pub reconstruction_to_input: f64,
    /// Most negative eigenvalue of the raw reconstruction (0 if it was PSD).
    pub raw_negativity: f64,
}

#[derive(Debug, Clone)]
pub struct UqmRun<T: Real> {
    pub input_state: DensityMatrix<T>,
    pub samples: Vec<OutcomeSample<T, FsPoint<T>>>,
    pub seed: u64,
    pub ensemble_estimate: DensityMatrix<T>,
    /// Componentwise standard errors of `ensemble_estimate` (real and imaginary parts).
    pub ensemble_std_error: ComplexMatrix<T>,
    pub reconstruction: HermitianOperator<T>,
    pub reconstruction_std_error: ComplexMatrix<T>,
    pub reconstruction_psd: DensityMatrix<T>,
    pub diagnostics: RunDiagnostics,
}

/// Runs `n_samples` independent trials of the tomographic measurement on `w`.
pub fn run_uqm<T: Real>(w: &DensityMatrix<T>, n_samples: usize, seed: u64) -> Result<UqmRun<T>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let n = w.dim();
    let exp = ProjectiveMeasurement::new(n)?;
    let samples = exp.sampler(w)?.sample_many(n_samples, seed);
    let (ensemble_estimate, ensemble_std_error) = ensemble_with_errors(&samples)?;
    let (reconstruction, reconstruction_psd) = reconstruct(&ensemble_estimate, n)?;
    let scale = T::of_usize(n + 1);
    let reconstruction_std_error = ensemble_std_error.scale(scale);
    let diagnostics = RunDiagnostics {
        ensemble_to_expected: trace_distance(&ensemble_estimate, &expected_ensemble(w))?.as_f64(),
        reconstruction_to_input: trace_distance(&reconstruction_psd, w)?.as_f64(),
        raw_negativity: eig_hermitian(&reconstruction)?.min_eigenvalue().min(T::zero()).as_f64(),
    };
    Ok(UqmRun {
        input_state: w.clone(),
        samples,
        seed,
        ensemble_estimate,
        ensemble_std_error,
        reconstruction,
        reconstruction_std_error,
        reconstruction_psd,
        diagnostics,
    })
}

fn ensemble_with_errors<T: Real, O>(samples: &[OutcomeSample<T, O>]) -> Result<(DensityMatrix<T>, ComplexMatrix<T>)> {
    let first = samples.first().ok_or(Error::EmptyRun)?;
    let n = first.post_state.dim();
    if let Some(bad) = samples.iter().find(|s| s.post_state.dim() != n) {
        return Err(Error::DimMismatch { expected: n, found: bad.post_state.dim() });
    }
    let est = sample_mean(n * n, samples.iter().map(|s| s.post_state.matrix().as_slice()));
    let mean = HermitianOperator::symmetrized(&est.mean_matrix(n));
    Ok((DensityMatrix::from_hermitian_unchecked(mean), est.std_error_matrix(n)))
}

/// Arithmetic mean of the outcome projectors.
pub fn ensemble_state<T: Real, O>(samples: &[OutcomeSample<T, O>]) -> Result<DensityMatrix<T>> {
    Ok(ensemble_with_errors(samples)?.0)
}

/// Inverts the dilution: raw `(n+1)r − I`, and its projection onto density
/// matrices by clipping negative eigenvalues and renormalising the trace.
pub fn reconstruct<T: Real>(r: &DensityMatrix<T>, n: usize) -> Result<(HermitianOperator<T>, DensityMatrix<T>)> {
    if r.dim() != n {
        return Err(Error::DimMismatch { expected: n, found: r.dim() });
    }
    let raw = &r.matrix().scale(T::of_usize(n + 1)) - &ComplexMatrix::identity(n);
    let raw = HermitianOperator::symmetrized(&raw);
    let projected = project_to_density(&raw)?;
    Ok((raw, projected))
}

/// Nearest-by-clipping density matrix: negative eigenvalues set to zero, trace renormalised.
pub fn project_to_density<T: Real>(h: &HermitianOperator<T>) -> Result<DensityMatrix<T>> {
    let clipped = eig_hermitian(h)?.map_eigenvalues(|l| l.max(T::zero()));
    let tr = clipped.trace();
    if tr.is_nan() || tr <= T::zero() {
        return Err(Error::NotPositive { min_eigenvalue: eig_hermitian(h)?.min_eigenvalue().as_f64() });
    }
    Ok(DensityMatrix::from_hermitian_unchecked(clipped.scale(T::one() / tr)))
}

/// The exact outcome ensemble `(I + w)/(n+1)`.
pub fn expected_ensemble<T: Real>(w: &DensityMatrix<T>) -> DensityMatrix<T> {
    let n = w.dim();
    let m = (&ComplexMatrix::identity(n) + w.matrix()).scale(T::one() / T::of_usize(n + 1));
    DensityMatrix::from_hermitian_unchecked(HermitianOperator::symmetrized(&m))
}

/// JSON report of a tomography run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UqmReport {
    pub input_state: StateFile,
    pub n_samples: usize,
    pub ensemble_estimate: StateFile,
    pub reconstruction_raw: StateFile,
    pub reconstruction_psd: StateFile,
    pub trace_distance_to_input: f64,
    pub seed: u64,
}

impl<T: Real> UqmRun<T> {
    pub fn report(&self) -> UqmReport {
        UqmReport {
            input_state: StateFile::from_density(&self.input_state),
            n_samples: self.samples.len(),
            ensemble_estimate: StateFile::from_density(&self.ensemble_estimate),
            reconstruction_raw: StateFile::from_hermitian(&self.reconstruction),
            reconstruction_psd: StateFile::from_density(&self.reconstruction_psd),
            trace_distance_to_input: self.diagnostics.reconstruction_to_input,
            seed: self.seed,
        }
    }
}
