use crate::error::{Error, Result};
use crate::qstate::matrix::{inner, ComplexMatrix};
use crate::scalar::{cone, cr, czero, Real, C};

const MAX_SWEEPS: usize = 64;

/// Square complex matrix known to equal its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Real> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Accepts `m` when `|m - m†| ≤ tol` entrywise and stores its Hermitian part.
    pub fn new(m: ComplexMatrix<T>, tol: T) -> Result<Self> {
        m.dim()?;
        let residual = m.hermiticity_residual();
        if residual.is_nan() || residual > tol {
            return Err(Error::NotHermitian { residual: residual.as_f64() });
        }
        Ok(Self::symmetrized(&m))
    }

    /// Hermitian part `(m + m†)/2` of a square matrix, without any tolerance check.
    pub fn symmetrized(m: &ComplexMatrix<T>) -> Self {
        assert!(m.is_square(), "Hermitian operators are square");
        let mut h = m.hermitian_part();
        for i in 0..h.rows() {
            h[(i, i)] = cr(h[(i, i)].re);
        }
        Self { matrix: h }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self { matrix: ComplexMatrix::from_diagonal(diag) }
    }

    /// `Σ w_i |v_i⟩⟨v_i|`.
    pub fn from_spectrum(weights: &[T], vectors: &[Vec<C<T>>]) -> Self {
        let n = vectors.first().map_or(1, Vec::len);
        let mut m = ComplexMatrix::zeros(n, n);
        for (&w, v) in weights.iter().zip(vectors) {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        Self::symmetrized(&m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `⟨v|H|v⟩`, real by Hermiticity.
    pub fn expectation(&self, v: &[C<T>]) -> Result<T> {
        Ok(self.matrix.sandwich(v, v)?.re)
    }

    pub fn eigen(&self) -> Result<SpectralDecomposition<T>> {
        eig_hermitian(self)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { matrix: self.matrix.scale(s) }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<C<T>>>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `Σ λ_i v_i v_i†`.
    pub fn reassemble(&self) -> HermitianOperator<T> {
        HermitianOperator::from_spectrum(&self.eigenvalues, &self.eigenvectors)
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn map_eigenvalues(&self, f: impl Fn(T) -> T) -> HermitianOperator<T> {
        let w: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        HermitianOperator::from_spectrum(&w, &self.eigenvectors)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue lies in `[lo, hi]`.
    pub fn spectral_projector(&self, lo: T, hi: T) -> ComplexMatrix<T> {
        let w: Vec<T> =
            self.eigenvalues.iter().map(|&l| if l >= lo && l <= hi { T::one() } else { T::zero() }).collect();
        HermitianOperator::from_spectrum(&w, &self.eigenvectors).into_matrix()
    }

    /// Largest `|⟨v_i|v_j⟩ - δ_ij|`.
    pub fn orthonormality_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, u) in self.eigenvectors.iter().enumerate() {
            for (j, v) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { cone() } else { czero() };
                worst = worst.max((inner(u, v) - target).norm());
            }
        }
        worst
    }
}

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi rotations.
pub fn eig_hermitian<T: Real>(h: &HermitianOperator<T>) -> Result<SpectralDecomposition<T>> {
    let n = h.dim();
    let mut a: Vec<C<T>> = h.matrix().as_slice().to_vec();
    let mut v: Vec<C<T>> = ComplexMatrix::<T>::identity(n).into_vec();
    let fro = h.matrix().frobenius_norm();
    if !fro.is_finite() {
        return Err(Error::ConvergenceFailure { sweeps: 0 });
    }
    let target = T::epsilon() * fro;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > target * T::of(16.0) {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.partial_cmp(&a[j * n + j].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let eigenvectors = order.iter().map(|&j| (0..n).map(|i| v[i * n + j]).collect()).collect();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_norm<T: Real>(a: &[C<T>], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// One Jacobi step zeroing a[p][q]: phase the q axis so a_pq is real, then apply
// the real symmetric rotation. U = diag-phase · R, A ← U† A U, V ← V U.
fn rotate<T: Real>(a: &mut [C<T>], v: &mut [C<T>], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (r + r);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -mag
        } else {
            mag
        }
    };
    if t == T::zero() {
        a[p * n + q] = czero();
        a[q * n + p] = czero();
        return;
    }
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let u_pp = cr(c);
    let u_pq = cr(s);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * u_pp + akq * u_qp;
        a[k * n + q] = akp * u_pq + akq * u_qq;
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * u_pp + vkq * u_qp;
        v[k * n + q] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[p * n + q] = czero();
    a[q * n + p] = czero();
    a[p * n + p] = cr(a[p * n + p].re);
    a[q * n + q] = cr(a[q * n + q].re);
}
