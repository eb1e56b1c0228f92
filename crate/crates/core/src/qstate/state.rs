use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::matrix::{inner, norm, ComplexMatrix};
use crate::qstate::spectral::{eig_hermitian, HermitianOperator};
use crate::qstate::tol;
use crate::rng::complex_normal_vec;
use crate::scalar::{cone, cr, czero, Real, C};

/// Unit-norm representative of a ray in Hilbert space.
///
/// Two states describe the same projective point when their vectors differ
/// by a unit-modulus factor; see [`PureState::same_ray`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    vector: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    /// Wraps a vector that is already unit-norm within `tol`.
    pub fn new(vector: Vec<C<T>>, tol: T) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidShape("empty state vector".into()));
        }
        let nrm = norm(&vector);
        if (nrm - T::one()).abs() > tol || nrm.is_nan() {
            return Err(Error::NotNormalized { norm: nrm.as_f64() });
        }
        Ok(Self { vector })
    }

    /// Normalises any nonzero vector.
    pub fn normalize(vector: Vec<C<T>>) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidShape("empty state vector".into()));
        }
        let nrm = norm(&vector);
        if nrm == T::zero() || !nrm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { vector: vector.into_iter().map(|z| z / nrm).collect() })
    }

    /// Computational basis vector `e_k` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index out of range");
        let mut v = vec![czero(); n];
        v[k] = cone();
        Self { vector: v }
    }

    pub(crate) fn from_unit_unchecked(vector: Vec<C<T>>) -> Self {
        Self { vector }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &[C<T>] {
        &self.vector
    }

    pub fn into_vector(self) -> Vec<C<T>> {
        self.vector
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> C<T> {
        inner(&self.vector, &other.vector)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.overlap(other).norm_sqr()
    }

    /// Projective equality: `|⟨self|other⟩| = 1` within `tol`.
    pub fn same_ray(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && (T::one() - self.overlap(other).norm()).abs() <= tol
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        DensityMatrix::from_hermitian_unchecked(HermitianOperator::symmetrized(&ComplexMatrix::outer(
            &self.vector,
            &self.vector,
        )))
    }

    /// `U|ψ⟩`, renormalised against rounding drift.
    pub fn transformed(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        Self::normalize(u.mul_vec(&self.vector)?)
    }
}

/// Unit-trace positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    op: HermitianOperator<T>,
}

/// Validates `m` as a density matrix.
///
/// Asymmetry up to `tol` is removed by taking the Hermitian part; eigenvalues
/// down to `-tol` and trace errors up to `tol` are tolerated.
pub fn make_density<T: Real>(m: ComplexMatrix<T>, tol: T) -> Result<DensityMatrix<T>> {
    let op = HermitianOperator::new(m, tol)?;
    DensityMatrix::from_hermitian(op, tol)
}

impl<T: Real> DensityMatrix<T> {
    pub fn from_hermitian(op: HermitianOperator<T>, tol: T) -> Result<Self> {
        let spec = eig_hermitian(&op)?;
        let min = spec.min_eigenvalue();
        if min < -tol {
            return Err(Error::NotPositive { min_eigenvalue: min.as_f64() });
        }
        let tr = op.trace();
        if (tr - T::one()).abs() > tol || tr.is_nan() {
            return Err(Error::BadTrace { trace: tr.as_f64() });
        }
        Ok(Self { op })
    }

    pub(crate) fn from_hermitian_unchecked(op: HermitianOperator<T>) -> Self {
        Self { op }
    }

    /// Normalises a positive operator by its trace. The caller guarantees positivity.
    pub(crate) fn normalized_unchecked(op: &HermitianOperator<T>) -> Result<Self> {
        let tr = op.trace();
        if tr.is_nan() || tr <= T::zero() {
            return Err(Error::BadTrace { trace: tr.as_f64() });
        }
        Ok(Self { op: op.scale(T::one() / tr) })
    }

    /// `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { op: HermitianOperator::identity(n).scale(T::one() / T::of_usize(n)) }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.op.matrix()
    }

    pub fn into_operator(self) -> HermitianOperator<T> {
        self.op
    }

    pub fn trace(&self) -> T {
        self.op.trace()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> T {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨v|ρ|v⟩`.
    pub fn expectation(&self, v: &[C<T>]) -> Result<T> {
        self.op.expectation(v)
    }

    pub fn max_eigenvalue(&self) -> Result<T> {
        Ok(eig_hermitian(&self.op)?.max_eigenvalue())
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let m = u.matmul(self.matrix())?.matmul(&u.adjoint())?;
        Ok(Self { op: HermitianOperator::symmetrized(&m) })
    }
}

/// Which factor of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Half the trace norm of `ρ - σ`.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    // A fixed argument order makes the result exactly symmetric.
    let (a, b) = if precedes(sigma.matrix(), rho.matrix()) { (sigma, rho) } else { (rho, sigma) };
    let diff = HermitianOperator::symmetrized(&(a.matrix() - b.matrix()));
    let spec = eig_hermitian(&diff)?;
    let half = T::of(0.5);
    Ok(spec.eigenvalues.iter().map(|l| l.abs()).sum::<T>() * half)
}

fn precedes<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> bool {
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        match (x.re, x.im).partial_cmp(&(y.re, y.im)) {
            Some(std::cmp::Ordering::Less) => return true,
            Some(std::cmp::Ordering::Greater) => return false,
            _ => {}
        }
    }
    false
}

/// Reduced state of a bipartite `d1 x d2` system.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix<T>> {
    let factor = match keep {
        Keep::First => 0,
        Keep::Second => 1,
    };
    reduced_state(rho, &[dims.0, dims.1], &[factor])
}

/// Traces out every factor not listed in `keep` (kept factors stay in their original order).
pub fn reduced_state<T: Real>(rho: &DensityMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix<T>> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimMismatch { expected: total, found: rho.dim() });
    }
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument("kept factor list out of range".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();

    let split = |mut idx: usize| -> (usize, usize) {
        let mut digits = vec![0; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = idx % dims[f];
            idx /= dims[f];
        }
        let (mut kept_idx, mut rest_idx) = (0, 0);
        for (f, &d) in digits.iter().enumerate() {
            if kept.binary_search(&f).is_ok() {
                kept_idx = kept_idx * dims[f] + d;
            } else {
                rest_idx = rest_idx * dims[f] + d;
            }
        }
        (kept_idx, rest_idx)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();

    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..total {
        for j in 0..total {
            if parts[i].1 == parts[j].1 {
                out[(parts[i].0, parts[j].0)] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_hermitian_unchecked(HermitianOperator::symmetrized(&out)))
}

/// Random density matrix of the given rank: `Σ v v† / Σ |v|²` over Gaussian `v`.
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    if n == 0 || rank == 0 || rank > n {
        return Err(Error::InvalidArgument(format!("need 1 <= rank <= n, got rank={rank}, n={n}")));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    let mut weight = T::zero();
    for _ in 0..rank {
        let v: Vec<C<T>> = complex_normal_vec(n, rng);
        weight += norm(&v).powi(2);
        m = &m + &ComplexMatrix::outer(&v, &v);
    }
    let op = HermitianOperator::symmetrized(&m.scale(T::one() / weight));
    let rho = DensityMatrix { op };
    debug_assert!((rho.trace() - T::one()).abs() <= T::of(tol::TRACE));
    Ok(rho)
}

/// Haar-random unitary by Gram–Schmidt on Gaussian columns.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C<T>> = complex_normal_vec(n, rng);
        // Two passes keep the columns orthonormal to working precision.
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let nrm = norm(&v);
        if nrm > T::of(1e-6) {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `|ψ⁻⟩ = (e₁⊗e₂ − e₂⊗e₁)/√2` on two qubits.
pub fn singlet_vector<T: Real>() -> PureState<T> {
    let s = T::one() / T::of(2.0).sqrt();
    PureState::from_unit_unchecked(vec![czero(), cr(s), cr(-s), czero()])
}

pub fn singlet<T: Real>() -> DensityMatrix<T> {
    singlet_vector().projector()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    type M = ComplexMatrix<f64>;

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = make_density(M::identity(2).scale(0.5), 1e-9).unwrap();
        let e = eig_hermitian(rho.operator()).unwrap();
        assert_eq!(e.eigenvalues, vec![0.5, 0.5]);
    }

    #[test]
    fn projector_is_valid_and_pure() {
        let rho = make_density(M::from_diagonal(&[1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(rho.purity(), 1.0);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let err = make_density(M::from_diagonal(&[1.2, -0.2]), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotPositive { min_eigenvalue } if (min_eigenvalue + 0.2).abs() < 1e-12));
    }

    #[test]
    fn bad_trace_and_asymmetry_rejected() {
        assert!(matches!(make_density(M::from_diagonal(&[0.7, 0.7]), 1e-9), Err(Error::BadTrace { .. })));
        let m = M::from_real(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(matches!(make_density(m, 1e-9), Err(Error::NotHermitian { .. })));
        assert!(matches!(make_density(M::zeros(2, 3), 1e-9), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let m = M::from_real(&[&[0.5, 1e-12], &[0.0, 0.5]]).unwrap();
        let rho = make_density(m, 1e-9).unwrap();
        assert_eq!(rho.matrix().hermiticity_residual(), 0.0);
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::<f64>::from_hermitian_unchecked(HermitianOperator::from_diagonal(&[1.0, 0.0]));
        let b = DensityMatrix::from_hermitian_unchecked(HermitianOperator::from_diagonal(&[0.0, 1.0]));
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&mixed, &a).unwrap() - 0.5).abs() < 1e-15);
        let c = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(matches!(trace_distance(&a, &c), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = seeded(5);
        let a: DensityMatrix<f64> = random_density(2, 2, &mut rng).unwrap();
        let b: DensityMatrix<f64> = random_density(3, 2, &mut rng).unwrap();
        let ab = DensityMatrix::from_hermitian_unchecked(HermitianOperator::symmetrized(&a.matrix().kron(b.matrix())));
        let ra = partial_trace(&ab, (2, 3), Keep::First).unwrap();
        let rb = partial_trace(&ab, (2, 3), Keep::Second).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) <= 1e-12);
        assert!(rb.matrix().max_abs_diff(b.matrix()) <= 1e-12);
        assert!(matches!(partial_trace(&ab, (2, 2), Keep::First), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn singlet_marginals_are_maximally_mixed() {
        let s = singlet::<f64>();
        for keep in [Keep::First, Keep::Second] {
            let r = partial_trace(&s, (2, 2), keep).unwrap();
            assert!(r.matrix().max_abs_diff(&M::identity(2).scale(0.5)) <= 1e-15);
        }
    }

    #[test]
    fn random_density_properties() {
        let mut rng = seeded(9);
        let pure: DensityMatrix<f64> = random_density(4, 1, &mut rng).unwrap();
        assert!((pure.purity() - 1.0).abs() <= 1e-12);
        let full: DensityMatrix<f64> = random_density(3, 3, &mut rng).unwrap();
        assert!(eig_hermitian(full.operator()).unwrap().min_eigenvalue() > 0.0);
        let r6: DensityMatrix<f64> = random_density(6, 3, &mut rng).unwrap();
        let red = partial_trace(&r6, (2, 3), Keep::Second).unwrap();
        assert!((red.trace() - 1.0).abs() <= 1e-12);
        let x: DensityMatrix<f64> = random_density(3, 2, &mut seeded(1)).unwrap();
        let y: DensityMatrix<f64> = random_density(3, 2, &mut seeded(1)).unwrap();
        assert_eq!(x, y);
        assert!(random_density::<f64, _>(3, 4, &mut rng).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u: M = random_unitary(5, &mut seeded(3));
        let uu = &u.adjoint() * &u;
        assert!(uu.max_abs_diff(&M::identity(5)) < 1e-13);
    }

    #[test]
    fn pure_state_projective_identity() {
        let v = PureState::<f64>::normalize(vec![C::new(1.0, 1.0), C::new(0.0, 2.0)]).unwrap();
        let w = PureState::new(v.vector().iter().map(|z| z * C::new(0.0, 1.0)).collect(), 1e-9).unwrap();
        assert!(v.same_ray(&w, 1e-12));
        assert!(!v.same_ray(&PureState::basis(2, 0), 1e-6));
        assert!(matches!(PureState::<f64>::normalize(vec![czero(); 2]), Err(Error::ZeroVector)));
        assert!(matches!(PureState::<f64>::new(vec![cr(2.0)], 1e-9), Err(Error::NotNormalized { .. })));
    }
}
