//! Complex operators, spectral tools and quantum state types.
//!
//! Composite systems use row-major Kronecker ordering with the first factor
//! most significant: index `(i, j)` of a `d1 x d2` system is `i * d2 + j`.

mod matrix;
mod spectral;
mod state;

pub use matrix::{inner, kron_vec, norm, tensor_product, ComplexMatrix};
pub use spectral::{eig_hermitian, HermitianOperator, SpectralDecomposition};
pub use state::{
    make_density, partial_trace, random_density, random_unitary, reduced_state, singlet, singlet_vector,
    trace_distance, DensityMatrix, Keep, PureState,
};

/// Default numerical tolerances.
pub mod tol {
    pub const HERM: f64 = 1e-9;
    pub const TRACE: f64 = 1e-9;
    pub const NORM: f64 = 1e-9;
    pub const PSD: f64 = 1e-9;
    pub const RECON: f64 = 1e-10;
    /// Outcome probabilities at or below this are treated as zero.
    pub const PROB: f64 = 1e-12;
}
