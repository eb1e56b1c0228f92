//! JSON file formats for states, maps and discrete experiments.
//!
//! A matrix is a list of rows, each entry a `[re, im]` pair:
//!
//! ```json
//! { "dim": 2, "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]] }
//! ```
//!
//! Maps are `{ "dim": n, "kraus": [matrix, ...] }` or `{ "dim": n, "choi": matrix }`
//! (Choi matrices are `n² x n²`). Experiments are
//! `{ "outcomes": [label, ...], "transforms": [t, ...] }` where each `t` is a
//! list of Kraus matrices or a map object without `dim`.
//!
//! Floats are written in shortest round-trip form, which reproduces every
//! `f64` bit-exactly on reading.

use serde::{Deserialize, Serialize};

use crate::cpmap::{ChoiMatrix, KrausSet, Operation};
use crate::error::{Error, Result};
use crate::experiment::DiscreteExperiment;
use crate::qstate::{make_density, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::scalar::{Real, C};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransformJson {
    Kraus(Vec<MatrixJson>),
    Map {
        #[serde(default)]
        kraus: Option<Vec<MatrixJson>>,
        #[serde(default)]
        choi: Option<MatrixJson>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentFile {
    pub outcomes: Vec<String>,
    pub transforms: Vec<TransformJson>,
}

pub fn matrix_to_json<T: Real>(m: &ComplexMatrix<T>) -> MatrixJson {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()).collect()
}

pub fn matrix_from_json<T: Real>(rows: &MatrixJson) -> Result<ComplexMatrix<T>> {
    let nested: Vec<Vec<C<T>>> =
        rows.iter().map(|r| r.iter().map(|[re, im]| C::new(T::of(*re), T::of(*im))).collect()).collect();
    if nested.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Format("non-finite matrix entry".into()));
    }
    ComplexMatrix::from_rows(&nested)
}

fn check_square(m: &ComplexMatrix<impl Real>, dim: usize, what: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::Format(format!("{what} is {}x{} but dim declares {dim}x{dim}", m.rows(), m.cols())));
    }
    Ok(())
}

impl StateFile {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        Self { dim: m.rows(), matrix: matrix_to_json(m) }
    }

    pub fn from_density<T: Real>(w: &DensityMatrix<T>) -> Self {
        Self::from_matrix(w.matrix())
    }

    pub fn from_hermitian<T: Real>(h: &HermitianOperator<T>) -> Self {
        Self::from_matrix(h.matrix())
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let m = matrix_from_json(&self.matrix)?;
        check_square(&m, self.dim, "state matrix")?;
        Ok(m)
    }

    /// Parses and validates as a density matrix at tolerance `tol`.
    pub fn to_density<T: Real>(&self, tol: T) -> Result<DensityMatrix<T>> {
        make_density(self.to_matrix()?, tol)
    }
}

impl MapFile {
    pub fn from_operation<T: Real>(op: &Operation<T>) -> Self {
        match op {
            Operation::Kraus(k) => {
                Self { dim: k.dim(), kraus: Some(k.operators().iter().map(matrix_to_json).collect()), choi: None }
            }
            Operation::Choi(c) => Self { dim: c.dim(), kraus: None, choi: Some(matrix_to_json(c.matrix())) },
        }
    }

    pub fn to_operation<T: Real>(&self, tol: T) -> Result<Operation<T>> {
        let op = operation_from_parts(self.kraus.as_ref(), self.choi.as_ref(), tol)?;
        let d = crate::cpmap::QuantumMap::dim(&op);
        if d != self.dim {
            return Err(Error::Format(format!("map acts on dimension {d} but dim declares {}", self.dim)));
        }
        Ok(op)
    }
}

fn operation_from_parts<T: Real>(
    kraus: Option<&Vec<MatrixJson>>,
    choi: Option<&MatrixJson>,
    tol: T,
) -> Result<Operation<T>> {
    match (kraus, choi) {
        (Some(ops), None) => {
            let ops = ops.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
            Ok(Operation::Kraus(KrausSet::new(ops)?))
        }
        (None, Some(c)) => Ok(Operation::Choi(ChoiMatrix::new(matrix_from_json(c)?, tol)?)),
        _ => Err(Error::Format("map needs exactly one of `kraus` or `choi`".into())),
    }
}

impl ExperimentFile {
    pub fn from_experiment<T: Real>(e: &DiscreteExperiment<T>) -> Self {
        let transforms = e
            .transforms()
            .iter()
            .map(|t| match t {
                Operation::Kraus(k) => TransformJson::Kraus(k.operators().iter().map(matrix_to_json).collect()),
                Operation::Choi(c) => TransformJson::Map { kraus: None, choi: Some(matrix_to_json(c.matrix())) },
            })
            .collect();
        Self { outcomes: e.labels().to_vec(), transforms }
    }

    pub fn to_experiment<T: Real>(&self, tol: T) -> Result<DiscreteExperiment<T>> {
        let transforms = self
            .transforms
            .iter()
            .map(|t| match t {
                TransformJson::Kraus(ops) => operation_from_parts(Some(ops), None, tol),
                TransformJson::Map { kraus, choi } => operation_from_parts(kraus.as_ref(), choi.as_ref(), tol),
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteExperiment::new(self.outcomes.clone(), transforms)
    }
}

pub fn parse<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn to_pretty_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize infallibly")
}
