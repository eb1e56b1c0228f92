use std::path::Path;

use serde::Serialize;
use uqm_core::tomographic::{expected_ensemble, run_uqm, RunDiagnostics, UqmReport};
use uqm_core::wire::{matrix_to_json, MatrixJson, StateFile};

use super::require_samples;
use crate::io::{complex_cells, complex_columns, emit, load_state, write_csv};
use crate::report::{Check, Report, ResolvedConfig};
use crate::Failure;

#[derive(Serialize)]
struct TomographyResult {
    #[serde(flatten)]
    run: UqmReport,
    ensemble_std_error: MatrixJson,
    reconstruction_std_error: MatrixJson,
    expected_ensemble: StateFile,
    diagnostics: RunDiagnostics,
}

pub fn run(state: &Path, config: &ResolvedConfig) -> Result<(), Failure> {
    let w = load_state(state, config.tol)?;
    let n_samples = require_samples(config, 1)?;
    let run = run_uqm(&w, n_samples, config.seed)?;
    let n = w.dim();

    let bound = 5.0 * (n as f64 / n_samples as f64).sqrt();
    let checks = vec![Check::at_most(
        "ensemble-dilution-law",
        "trace distance between the mean outcome projector and (I + w)/(n + 1)",
        run.diagnostics.ensemble_to_expected,
        bound,
    )];
    let result = TomographyResult {
        run: run.report(),
        ensemble_std_error: matrix_to_json(&run.ensemble_std_error),
        reconstruction_std_error: matrix_to_json(&run.reconstruction_std_error),
        expected_ensemble: StateFile::from_density(&expected_ensemble(&w)),
        diagnostics: run.diagnostics,
    };

    let mut header = vec!["trial".to_string(), "density".to_string()];
    header.extend(complex_columns("z", n));
    write_csv(
        config,
        &header,
        run.samples.iter().map(|s| {
            let mut row = vec![s.trial_index.to_string(), s.probability_density.to_string()];
            row.extend(complex_cells(s.outcome.vector()));
            row
        }),
    )?;
    emit(config, &Report::new(config, checks, result))
}
