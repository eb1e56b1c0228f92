//! Simulation of universal quantum measurements.
//!
//! States, completely positive maps and experiments are generic over a
//! [`Real`] scalar (`f32` or `f64`); the aliases at the crate root fix `f64`.
//!
//! Composite systems use row-major Kronecker ordering: the first factor is the
//! most significant index. Choi matrices follow `C = Σ_ij φ(E_ij) ⊗ E_ij`.
//!
//! ```
//! use uqm_core::{qstate, tomographic};
//!
//! let w = qstate::random_density::<f64, _>(2, 2, &mut uqm_core::rng::seeded(1)).unwrap();
//! let run = tomographic::run_uqm(&w, 20_000, 42).unwrap();
//! assert!(run.diagnostics.reconstruction_to_input < 0.1);
//! ```

pub mod coherent;
pub mod cpmap;
pub mod disentangle;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod projective_sampling;
pub mod qstate;
pub mod rng;
pub mod scalar;
pub mod tomographic;
pub mod wire;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type ComplexMatrix = qstate::ComplexMatrix<f64>;
pub type HermitianOperator = qstate::HermitianOperator<f64>;
pub type SpectralDecomposition = qstate::SpectralDecomposition<f64>;
pub type PureState = qstate::PureState<f64>;
pub type DensityMatrix = qstate::DensityMatrix<f64>;
pub type KrausSet = cpmap::KrausSet<f64>;
pub type ChoiMatrix = cpmap::ChoiMatrix<f64>;
pub type Operation = cpmap::Operation<f64>;
pub type DiscreteExperiment = experiment::DiscreteExperiment<f64>;
pub type OutcomeSample<O> = experiment::OutcomeSample<f64, O>;
pub type McEstimate = montecarlo::McEstimate<f64>;
pub type FsPoint = projective_sampling::FsPoint<f64>;
pub type UqmRun = tomographic::UqmRun<f64>;
pub type ProductPoint = disentangle::ProductPoint<f64>;
pub type CoherentVector = coherent::CoherentVector<f64>;
