use std::path::Path;

use serde::Serialize;
use uqm_core::cpmap::{
    certify_positive, check_map_trace_condition, choi_from_kraus, kraus_from_choi, PositivityKind, QuantumMap,
};
use uqm_core::experiment::ValidationReport;
use uqm_core::wire::{matrix_to_json, ExperimentFile, MapFile, MatrixJson};
use uqm_core::Operation;

use crate::io::{emit, read_json};
use crate::report::{Check, Report, ResolvedConfig};
use crate::Failure;

/// Random starting pairs and refinement rounds for the positivity search.
const WITNESS_TRIALS: usize = 64;
const WITNESS_REFINE_STEPS: usize = 40;
/// Random probe states used to test the trace condition of an experiment.
const PROBE_STATES: usize = 64;

fn load_map(path: &Path, tol: f64) -> Result<Operation, Failure> {
    let file: MapFile = read_json(path, "map")?;
    file.to_operation(tol).map_err(|e| Failure::BadData(format!("map file {}: {e}", path.display())))
}

#[derive(Serialize)]
struct WitnessJson {
    x: Vec<[f64; 2]>,
    y: Vec<[f64; 2]>,
    value: f64,
}

#[derive(Serialize)]
struct PositivityJson {
    kind: PositivityKind,
    witness: Option<WitnessJson>,
}

#[derive(Serialize)]
struct DecomposeResult {
    dim: usize,
    min_choi_eigenvalue: f64,
    completely_positive: bool,
    kraus_count: usize,
    kraus: Vec<MatrixJson>,
    roundtrip_error: Option<f64>,
    positivity: Option<PositivityJson>,
}

fn vector_json(v: &[uqm_core::Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn choi_decompose(path: &Path, config: &ResolvedConfig) -> Result<(), Failure> {
    let op = load_map(path, config.tol)?;
    let choi = op.to_choi();
    let min_choi_eigenvalue = choi.min_eigenvalue()?;
    let completely_positive = min_choi_eigenvalue >= -config.tol;
    let mut checks = Vec::new();
    let mut result = DecomposeResult {
        dim: op.dim(),
        min_choi_eigenvalue,
        completely_positive,
        kraus_count: 0,
        kraus: Vec::new(),
        roundtrip_error: None,
        positivity: None,
    };
    if completely_positive {
        let kraus = kraus_from_choi(&choi, config.tol)?;
        let err = choi_from_kraus(&kraus).matrix().max_abs_diff(choi.matrix());
        checks.push(Check::at_most(
            "choi-kraus-roundtrip",
            "largest entry of the difference between the input Choi matrix and the one rebuilt from the Kraus operators",
            err,
            1e-10,
        ));
        result.kraus_count = kraus.len();
        result.kraus = kraus.operators().iter().map(matrix_to_json).collect();
        result.roundtrip_error = Some(err);
    } else {
        let verdict = certify_positive(&choi, WITNESS_TRIALS, config.seed, WITNESS_REFINE_STEPS)?;
        result.positivity = Some(PositivityJson {
            kind: verdict.kind,
            witness: verdict.witness.map(|w| WitnessJson {
                x: vector_json(w.x.vector()),
                y: vector_json(w.y.vector()),
                value: w.value,
            }),
        });
    }
    emit(config, &Report::new(config, checks, result))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ValidateResult {
    Map {
        dim: usize,
        min_choi_eigenvalue: f64,
        max_effect_eigenvalue: f64,
        completely_positive: bool,
        trace_reducing: bool,
        trace_preserving: bool,
    },
    Experiment {
        dim: usize,
        validation: ValidationReport,
    },
}

pub fn validate(path: &Path, config: &ResolvedConfig) -> Result<(), Failure> {
    let value: serde_json::Value = read_json(path, "map")?;
    if value.get("outcomes").is_some() {
        let file: ExperimentFile = read_json(path, "experiment")?;
        let exp = file
            .to_experiment(config.tol)
            .map_err(|e| Failure::BadData(format!("experiment file {}: {e}", path.display())))?;
        let validation = exp.validate(PROBE_STATES, config.seed)?;
        let checks = vec![Check::at_most(
            "experiment-axioms",
            "number of violated conditions (complete positivity, trace reduction, total probability)",
            validation.violations.len() as f64,
            0.0,
        )];
        let result = ValidateResult::Experiment { dim: exp.dim(), validation };
        return emit(config, &Report::new(config, checks, result));
    }
    let op = load_map(path, config.tol)?;
    let min_choi_eigenvalue = op.to_choi().min_eigenvalue()?;
    let trace = check_map_trace_condition(&op)?;
    let checks = vec![
        Check::at_least(
            "completely-positive",
            "smallest eigenvalue of the Choi matrix",
            min_choi_eigenvalue,
            -config.tol,
        ),
        Check::at_most(
            "trace-reducing",
            "largest eigenvalue of the effect (adjoint map applied to the identity)",
            trace.max_eigenvalue,
            1.0 + config.tol,
        ),
    ];
    let result = ValidateResult::Map {
        dim: op.dim(),
        min_choi_eigenvalue,
        max_effect_eigenvalue: trace.max_eigenvalue,
        completely_positive: checks[0].passed,
        trace_reducing: checks[1].passed,
        trace_preserving: trace.is_trace_preserving,
    };
    emit(config, &Report::new(config, checks, result))
}
