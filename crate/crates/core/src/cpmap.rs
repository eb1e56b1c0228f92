//! Positive and completely positive maps: Kraus and Choi representations,
//! conversions between them, and positivity certification.
//!
//! Choi convention: `C = Σ_ij φ(E_ij) ⊗ E_ij` (unnormalised), so that
//! `C[(a,i),(b,j)] = φ(E_ij)[a,b]` and a Kraus set `{K}` has
//! `C = Σ_k vec(K_k) vec(K_k)†` with row-major `vec`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{eig_hermitian, kron_vec, tol, ComplexMatrix, DensityMatrix, HermitianOperator, PureState};
use crate::rng::{complex_normal, substream};
use crate::scalar::{cr, czero, Real, C};

/// Kraus relative-eigenvalue cutoff used by [`kraus_from_choi`].
pub const KRAUS_RANK_CUTOFF: f64 = 1e-12;

/// A linear map on `n x n` operators.
pub trait QuantumMap<T: Real> {
    fn dim(&self) -> usize;

    /// `F ↦ φ(F)` for an arbitrary `n x n` operator.
    fn apply_matrix(&self, f: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>>;

    /// `(φ ⊗ id_m)(F)` for an operator on `n·m` dimensions (system factor first).
    fn apply_local(&self, f: &ComplexMatrix<T>, ancilla_dim: usize) -> Result<ComplexMatrix<T>>;

    fn to_choi(&self) -> ChoiMatrix<T>;
}

/// Applies `map` to a density matrix.
pub fn apply_map<T: Real, M: QuantumMap<T> + ?Sized>(map: &M, rho: &DensityMatrix<T>) -> Result<HermitianOperator<T>> {
    if rho.dim() != map.dim() {
        return Err(Error::DimMismatch { expected: map.dim(), found: rho.dim() });
    }
    Ok(HermitianOperator::symmetrized(&map.apply_matrix(rho.matrix())?))
}

/// Operators `K(i)` with `φ(F) = Σ_i K(i) F K(i)†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet<T: Real> {
    dim: usize,
    operators: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausSet<T> {
    pub fn new(operators: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyKrausSet)?;
        let dim = first.dim()?;
        for k in &operators {
            let d = k.dim()?;
            if d != dim {
                return Err(Error::DimMismatch { expected: dim, found: d });
            }
        }
        Ok(Self { dim, operators })
    }

    pub fn identity(n: usize) -> Self {
        Self { dim: n, operators: vec![ComplexMatrix::identity(n)] }
    }

    /// Single rank-one operator `s·|ξ⟩⟨ξ|`.
    pub fn rank_one(xi: &[C<T>], s: T) -> Self {
        Self { dim: xi.len(), operators: vec![ComplexMatrix::outer(xi, xi).scale(s)] }
    }

    /// Qubit depolarizing channel `ρ ↦ (1-p)ρ + p·I/2`.
    pub fn depolarizing(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::of(4.0 / 3.0)) {
            return Err(Error::InvalidArgument(format!("depolarizing parameter {p} out of range")));
        }
        let quarter = T::of(0.25);
        let a = (T::one() - T::of(3.0) * p * quarter).sqrt();
        let b = (p * quarter).sqrt();
        let [x, y, z] = pauli_matrices::<T>();
        Self::new(vec![ComplexMatrix::identity(2).scale(a), x.scale(b), y.scale(b), z.scale(b)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix<T>] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Concatenation of two Kraus families (the sum of the maps).
    pub fn union(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        let mut ops = self.operators.clone();
        ops.extend(other.operators.iter().cloned());
        Ok(Self { dim: self.dim, operators: ops })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dim: self.dim, operators: self.operators.iter().map(|k| k.scale(s)).collect() }
    }

    /// `Σ K(i)† K(i)`, the effect of the map.
    pub fn effect(&self) -> HermitianOperator<T> {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            acc = &acc + &(&k.adjoint() * k);
        }
        HermitianOperator::symmetrized(&acc)
    }
}

impl<T: Real> QuantumMap<T> for KrausSet<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, f: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        check_dim(f, self.dim)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out = &out + &(&(k * f) * &k.adjoint());
        }
        Ok(out)
    }

    fn apply_local(&self, f: &ComplexMatrix<T>, ancilla_dim: usize) -> Result<ComplexMatrix<T>> {
        check_dim(f, self.dim * ancilla_dim)?;
        let id = ComplexMatrix::identity(ancilla_dim);
        let mut out = ComplexMatrix::zeros(f.rows(), f.cols());
        for k in &self.operators {
            let big = k.kron(&id);
            out = &out + &(&(&big * f) * &big.adjoint());
        }
        Ok(out)
    }

    fn to_choi(&self) -> ChoiMatrix<T> {
        choi_from_kraus(self)
    }
}

/// Choi matrix of a map on `n x n` operators; an `n² x n²` Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<T: Real> {
    dim: usize,
    matrix: HermitianOperator<T>,
}

impl<T: Real> ChoiMatrix<T> {
    /// Validates an `n² x n²` Hermitian matrix (within `tol`).
    pub fn new(matrix: ComplexMatrix<T>, tol: T) -> Result<Self> {
        let op = HermitianOperator::new(matrix, tol)?;
        Self::from_hermitian(op)
    }

    pub fn from_hermitian(op: HermitianOperator<T>) -> Result<Self> {
        let big = op.dim();
        let n = (big as f64).sqrt().round() as usize;
        if n * n != big {
            return Err(Error::InvalidShape(format!("Choi matrix side {big} is not a perfect square")));
        }
        Ok(Self { dim: n, matrix: op })
    }

    /// Choi matrix of the identity map: `Σ_ij E_ij ⊗ E_ij`.
    pub fn identity_map(n: usize) -> Self {
        Self::from_units(n, |i, j| ComplexMatrix::from_fn(n, n, |a, b| unit(a == i && b == j)))
    }

    /// Choi matrix of the transpose map, which is the swap operator.
    pub fn transpose_map(n: usize) -> Self {
        Self::from_units(n, |i, j| ComplexMatrix::from_fn(n, n, |a, b| unit(a == j && b == i)))
    }

    /// Builds `Σ_ij φ(E_ij) ⊗ E_ij` from the images of the matrix units.
    pub fn from_units(n: usize, image: impl Fn(usize, usize) -> ComplexMatrix<T>) -> Self {
        let mut c = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let img = image(i, j);
                for a in 0..n {
                    for b in 0..n {
                        c[(a * n + i, b * n + j)] = img[(a, b)];
                    }
                }
            }
        }
        Self { dim: n, matrix: HermitianOperator::symmetrized(&c) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> &HermitianOperator<T> {
        &self.matrix
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.matrix.matrix()
    }

    /// The effect `φ†(I)`, with entries `E[j][i] = tr φ(E_ij)`.
    pub fn effect(&self) -> HermitianOperator<T> {
        let n = self.dim;
        let c = self.matrix.matrix();
        let m = ComplexMatrix::from_fn(n, n, |j, i| (0..n).map(|a| c[(a * n + i, a * n + j)]).sum());
        HermitianOperator::symmetrized(&m)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(eig_hermitian(&self.matrix)?.min_eigenvalue())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dim: self.dim, matrix: self.matrix.scale(s) }
    }

    /// `⟨X|φ(|Y⟩⟨Y|)|X⟩ = (X⊗Ȳ)† C (X⊗Ȳ)`.
    pub fn biquadratic_form(&self, x: &[C<T>], y: &[C<T>]) -> Result<T> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: x.len().max(y.len()) });
        }
        let ybar: Vec<C<T>> = y.iter().map(|z| z.conj()).collect();
        let u = kron_vec(x, &ybar);
        self.matrix.expectation(&u)
    }

    // φ(|Y⟩⟨Y|)
    fn image_of_pure(&self, y: &[C<T>]) -> HermitianOperator<T> {
        HermitianOperator::symmetrized(
            &self.apply_matrix(&ComplexMatrix::outer(y, y)).expect("dimension checked by caller"),
        )
    }

    // N[i][j] = Σ_ab conj(X_a) X_b C[(a,i),(b,j)], so that the form equals ū† N ū with u = Ȳ.
    fn form_in_y(&self, x: &[C<T>]) -> HermitianOperator<T> {
        let n = self.dim;
        let c = self.matrix();
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let mut s = czero();
            for a in 0..n {
                for b in 0..n {
                    s += x[a].conj() * x[b] * c[(a * n + i, b * n + j)];
                }
            }
            s
        });
        HermitianOperator::symmetrized(&m)
    }
}

impl<T: Real> QuantumMap<T> for ChoiMatrix<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, f: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let n = self.dim;
        check_dim(f, n)?;
        let c = self.matrix();
        Ok(ComplexMatrix::from_fn(n, n, |a, b| {
            let mut s = czero();
            for i in 0..n {
                for j in 0..n {
                    s += c[(a * n + i, b * n + j)] * f[(i, j)];
                }
            }
            s
        }))
    }

    fn apply_local(&self, f: &ComplexMatrix<T>, m: usize) -> Result<ComplexMatrix<T>> {
        let n = self.dim;
        check_dim(f, n * m)?;
        let c = self.matrix();
        Ok(ComplexMatrix::from_fn(n * m, n * m, |r, col| {
            let (a, j) = (r / m, r % m);
            let (b, k) = (col / m, col % m);
            let mut s = czero();
            for i in 0..n {
                for l in 0..n {
                    s += c[(a * n + i, b * n + l)] * f[(i * m + j, l * m + k)];
                }
            }
            s
        }))
    }

    fn to_choi(&self) -> ChoiMatrix<T> {
        self.clone()
    }
}

/// A map given either by Kraus operators or by its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Operation<T: Real> {
    Kraus(KrausSet<T>),
    Choi(ChoiMatrix<T>),
}

impl<T: Real> Operation<T> {
    pub fn as_kraus(&self) -> Option<&KrausSet<T>> {
        match self {
            Operation::Kraus(k) => Some(k),
            Operation::Choi(_) => None,
        }
    }

    /// Sum of two maps. Kraus families are concatenated; otherwise Choi matrices are added.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Operation::Kraus(a), Operation::Kraus(b)) => Ok(Operation::Kraus(a.union(b)?)),
            _ => {
                let (a, b) = (self.to_choi(), other.to_choi());
                if a.dim != b.dim {
                    return Err(Error::DimMismatch { expected: a.dim, found: b.dim });
                }
                Ok(Operation::Choi(ChoiMatrix {
                    dim: a.dim,
                    matrix: HermitianOperator::symmetrized(&(a.matrix() + b.matrix())),
                }))
            }
        }
    }

    /// The map `F ↦ s·φ(F)` for `s ≥ 0`.
    pub fn scale_map(&self, s: T) -> Self {
        match self {
            Operation::Kraus(k) => Operation::Kraus(k.scale(s.sqrt())),
            Operation::Choi(c) => Operation::Choi(c.scale(s)),
        }
    }
}

impl<T: Real> QuantumMap<T> for Operation<T> {
    fn dim(&self) -> usize {
        match self {
            Operation::Kraus(k) => k.dim(),
            Operation::Choi(c) => c.dim(),
        }
    }

    fn apply_matrix(&self, f: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        match self {
            Operation::Kraus(k) => k.apply_matrix(f),
            Operation::Choi(c) => c.apply_matrix(f),
        }
    }

    fn apply_local(&self, f: &ComplexMatrix<T>, ancilla_dim: usize) -> Result<ComplexMatrix<T>> {
        match self {
            Operation::Kraus(k) => k.apply_local(f, ancilla_dim),
            Operation::Choi(c) => c.apply_local(f, ancilla_dim),
        }
    }

    fn to_choi(&self) -> ChoiMatrix<T> {
        match self {
            Operation::Kraus(k) => k.to_choi(),
            Operation::Choi(c) => c.clone(),
        }
    }
}

/// `C = Σ_k vec(K_k) vec(K_k)†`.
pub fn choi_from_kraus<T: Real>(k: &KrausSet<T>) -> ChoiMatrix<T> {
    let n = k.dim;
    let mut c = ComplexMatrix::zeros(n * n, n * n);
    for op in &k.operators {
        let v = op.as_slice();
        c = &c + &ComplexMatrix::outer(v, v);
    }
    ChoiMatrix { dim: n, matrix: HermitianOperator::symmetrized(&c) }
}

/// Kraus decomposition from the eigendecomposition of the Choi matrix.
///
/// Fails with `NotCompletelyPositive` when an eigenvalue lies below `-tol`.
/// Eigenvalues at or below `KRAUS_RANK_CUTOFF · λ_max` are dropped.
pub fn kraus_from_choi<T: Real>(c: &ChoiMatrix<T>, tol: T) -> Result<KrausSet<T>> {
    let n = c.dim;
    let spec = eig_hermitian(&c.matrix)?;
    let min = spec.min_eigenvalue();
    if min < -tol {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: min.as_f64() });
    }
    let cutoff = T::of(KRAUS_RANK_CUTOFF) * spec.max_eigenvalue().max(T::zero());
    let mut ops = Vec::new();
    for (lambda, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors).rev() {
        if *lambda > cutoff && *lambda > T::zero() {
            ops.push(ComplexMatrix::unvec(v, n, n)?.scale(lambda.sqrt()));
        }
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(n, n));
    }
    KrausSet::new(ops)
}

/// Trace behaviour of a Kraus family, read off the spectrum of `Σ K†K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCondition<T> {
    pub is_trace_reducing: bool,
    pub is_trace_preserving: bool,
    pub max_eigenvalue: T,
}

pub fn check_trace_condition<T: Real>(k: &KrausSet<T>) -> Result<TraceCondition<T>> {
    trace_condition_of_effect(&k.effect())
}

/// Trace condition of any map, read off its Choi matrix.
pub fn check_map_trace_condition<T: Real, M: QuantumMap<T> + ?Sized>(map: &M) -> Result<TraceCondition<T>> {
    trace_condition_of_effect(&map.to_choi().effect())
}

fn trace_condition_of_effect<T: Real>(effect: &HermitianOperator<T>) -> Result<TraceCondition<T>> {
    let t = T::of(tol::PSD);
    let spec = eig_hermitian(effect)?;
    let max = spec.max_eigenvalue();
    let min = spec.min_eigenvalue();
    Ok(TraceCondition {
        is_trace_reducing: max <= T::one() + t,
        is_trace_preserving: (max - T::one()).abs() <= t && (min - T::one()).abs() <= t,
        max_eigenvalue: max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityKind {
    /// Choi matrix is positive semidefinite: an exact certificate.
    CompletelyPositive,
    /// Choi matrix has a negative eigenvalue but the search found no negative
    /// value of the biquadratic form. Heuristic, not a proof of positivity.
    PositiveNotCpCandidate,
    /// A pair `(X, Y)` with `⟨X|φ(|Y⟩⟨Y|)|X⟩ < 0` was found.
    NotPositive,
}

#[derive(Debug, Clone)]
pub struct Witness<T: Real> {
    pub x: PureState<T>,
    pub y: PureState<T>,
    pub value: T,
}

#[derive(Debug, Clone)]
pub struct PositivityVerdict<T: Real> {
    pub kind: PositivityKind,
    pub witness: Option<Witness<T>>,
    pub min_choi_eigenvalue: T,
}

/// Classifies a map as completely positive, positive-but-not-CP candidate, or not positive.
///
/// Non-CP maps are searched for violations of the biquadratic form over
/// `trials` random starting pairs, each refined by `refine_steps` rounds of
/// alternating minimisation (each half-step is an exact minimum-eigenvector
/// solve, so the value never increases). Trials run in parallel on
/// substreams of `seed`.
pub fn certify_positive<T: Real>(
    choi: &ChoiMatrix<T>,
    trials: usize,
    seed: u64,
    refine_steps: usize,
) -> Result<PositivityVerdict<T>> {
    let min_eig = choi.min_eigenvalue()?;
    let t = T::of(tol::PSD);
    if min_eig >= -t {
        return Ok(PositivityVerdict {
            kind: PositivityKind::CompletelyPositive,
            witness: None,
            min_choi_eigenvalue: min_eig,
        });
    }
    let trials = trials.max(1);
    let results: Vec<Result<Witness<T>>> = (0..trials as u64)
        .into_par_iter()
        .map(|idx| search_trial(choi, &mut substream(seed, idx), refine_steps))
        .collect();
    let mut best: Option<Witness<T>> = None;
    for r in results {
        let w = r?;
        if best.as_ref().is_none_or(|b| w.value < b.value) {
            best = Some(w);
        }
    }
    let best = best.expect("at least one trial");
    if best.value < -t {
        Ok(PositivityVerdict { kind: PositivityKind::NotPositive, witness: Some(best), min_choi_eigenvalue: min_eig })
    } else {
        Ok(PositivityVerdict {
            kind: PositivityKind::PositiveNotCpCandidate,
            witness: None,
            min_choi_eigenvalue: min_eig,
        })
    }
}

fn search_trial<T: Real, R: Rng + ?Sized>(
    choi: &ChoiMatrix<T>,
    rng: &mut R,
    refine_steps: usize,
) -> Result<Witness<T>> {
    let n = choi.dim;
    let mut x = PureState::normalize((0..n).map(|_| complex_normal(rng)).collect())?;
    let mut y = PureState::normalize((0..n).map(|_| complex_normal(rng)).collect())?;
    for _ in 0..refine_steps {
        let spec = eig_hermitian(&choi.image_of_pure(y.vector()))?;
        x = PureState::normalize(spec.eigenvectors[0].clone())?;
        let spec = eig_hermitian(&choi.form_in_y(x.vector()))?;
        y = PureState::normalize(spec.eigenvectors[0].iter().map(|z| z.conj()).collect())?;
    }
    let value = choi.biquadratic_form(x.vector(), y.vector())?;
    Ok(Witness { x, y, value })
}

/// Random CP map with `count` Gaussian Kraus operators, scaled by `1/sqrt(n·count)`.
pub fn random_cp_map<T: Real, R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<KrausSet<T>> {
    if n == 0 || count == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and count >= 1".into()));
    }
    let s = T::one() / T::of_usize(n * count).sqrt();
    let ops = (0..count).map(|_| ComplexMatrix::from_fn(n, n, |_, _| complex_normal::<T, R>(rng) * s)).collect();
    KrausSet::new(ops)
}

/// Random trace-preserving channel: Gaussian operators `G_k` rescaled to `G_k S^{-1/2}`, `S = Σ G†G`.
pub fn random_channel<T: Real, R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<KrausSet<T>> {
    let raw: KrausSet<T> = random_cp_map(n, count, rng)?;
    let inv_sqrt = eig_hermitian(&raw.effect())?.map_eigenvalues(|l| T::one() / l.sqrt());
    let ops = raw.operators.iter().map(|g| g * inv_sqrt.matrix()).collect();
    KrausSet::new(ops)
}

/// Pauli X, Y, Z.
pub fn pauli_matrices<T: Real>() -> [ComplexMatrix<T>; 3] {
    let (o, l) = (T::zero(), T::one());
    let x = ComplexMatrix::from_fn(2, 2, |i, j| cr(if i != j { l } else { o }));
    let y = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C::new(o, -l),
        (1, 0) => C::new(o, l),
        _ => czero(),
    });
    let z = ComplexMatrix::from_diagonal(&[l, -l]);
    [x, y, z]
}

fn unit<T: Real>(on: bool) -> C<T> {
    if on {
        cr(T::one())
    } else {
        czero()
    }
}

fn check_dim<T: Real>(f: &ComplexMatrix<T>, n: usize) -> Result<()> {
    let d = f.dim()?;
    if d != n {
        return Err(Error::DimMismatch { expected: n, found: d });
    }
    Ok(())
}
