use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, Real, C};

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} matrix is empty")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Real matrix literal, handy for tests and examples.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let nested: Vec<Vec<C<T>>> = rows.iter().map(|r| r.iter().map(|&x| cr(T::of(x))).collect()).collect();
        Self::from_rows(&nested)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| czero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { cone() } else { czero() })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { cr(diag[i]) } else { czero() })
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[C<T>], v: &[C<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Reshapes a vector into a `rows x cols` matrix, row-major.
    pub fn unvec(v: &[C<T>], rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entry of `|M - M†|`; zero for exactly Hermitian input.
    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = vec![czero::<T>(); self.rows * rhs.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: self.rows, cols: rhs.cols, data: out })
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if self.cols != v.len() {
            return Err(Error::DimMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `⟨u|M|v⟩ = u† M v`.
    pub fn sandwich(&self, u: &[C<T>], v: &[C<T>]) -> Result<C<T>> {
        let mv = self.mul_vec(v)?;
        if u.len() != mv.len() {
            return Err(Error::DimMismatch { expected: mv.len(), found: u.len() });
        }
        Ok(inner(u, &mv))
    }

    /// Kronecker product, first factor major: `(A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l]`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (br, bc) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * br, self.cols * bc, |r, c| self[(r / br, c / bc)] * rhs[(r % br, c % bc)])
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::InvalidShape(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// Largest entrywise distance to `rhs`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.try_sub(rhs).map_or(T::infinity(), |d| d.max_abs())
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods on untrusted input.
impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix shapes must agree")
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix shapes must agree")
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

/// Kronecker product of two matrices under the first-factor-major convention.
pub fn tensor_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// `⟨u|v⟩ = Σ conj(u_i) v_i`.
pub fn inner<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Kronecker product of vectors, first factor major.
pub fn kron_vec<T: Real>(u: &[C<T>], v: &[C<T>]) -> Vec<C<T>> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn rejects_bad_shapes() {
        assert!(M::new(0, 2, vec![]).is_err());
        assert!(M::new(2, 2, vec![C::new(1.0, 0.0); 3]).is_err());
        assert!(M::from_real(&[&[1.0, 2.0], &[3.0]]).is_err());
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = M::identity(2);
        assert_eq!(tensor_product(&i2, &i2), M::identity(4));
    }

    #[test]
    fn projector_tensor_projector() {
        let p = M::from_diagonal(&[1.0, 0.0]);
        assert_eq!(tensor_product(&p, &p), M::from_diagonal(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_block_layout() {
        let a = M::from_real(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = M::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let k = a.kron(&b);
        // Block (0,1) is 2·B.
        assert_eq!(k[(0, 3)], C::new(2.0, 0.0));
        assert_eq!(k[(1, 2)], C::new(2.0, 0.0));
        assert_eq!(k[(3, 0)], C::new(3.0, 0.0));
        assert_eq!(k[(0, 0)], C::new(0.0, 0.0));
    }

    #[test]
    fn hermitian_part_and_residual() {
        let m = M::from_rows(&[vec![C::new(1.0, 0.0), C::new(0.0, 1.0)], vec![C::new(0.0, -1.0), C::new(2.0, 0.0)]])
            .unwrap();
        assert_eq!(m.hermiticity_residual(), 0.0);
        let skew = M::from_real(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert_eq!(skew.hermiticity_residual(), 2.0);
        assert_eq!(skew.hermitian_part().max_abs(), 0.0);
    }

    #[test]
    fn matmul_mismatch_is_error() {
        let a = M::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }
}
