mod coherent;
mod disentangle;
mod identity;
mod maps;
mod tomography;

use serde::Serialize;
use uqm_core::coherent::VeroneseConfig;
use uqm_core::wire::{matrix_to_json, MatrixJson};
use uqm_core::McEstimate;

use crate::args::{Cli, Command, Shape};
use crate::report::ResolvedConfig;
use crate::Failure;

pub fn dispatch(cli: &Cli, config: &ResolvedConfig) -> Result<(), Failure> {
    match &cli.command {
        Command::Tomography { state } => tomography::run(state, config),
        Command::Disentangle { state, dims } => disentangle::run(state, dims, config),
        Command::Coherent { state, shape } => coherent::run(state, shape, config),
        Command::ChoiDecompose { map } => maps::choi_decompose(map, config),
        Command::ValidateMap { map } => maps::validate(map, config),
        Command::IdentityCheck { shape } => identity::run(shape, config),
    }
}

fn require_samples(config: &ResolvedConfig, min: usize) -> Result<usize, Failure> {
    if config.samples < min {
        return Err(Failure::BadConfig(format!("--samples must be at least {min}, got {}", config.samples)));
    }
    Ok(config.samples)
}

/// Resolves `--base-dim/--degree` or `--spin`; `None` when no degree was requested.
fn veronese_shape(shape: &Shape) -> Result<Option<VeroneseConfig>, Failure> {
    let bad = |e: uqm_core::Error| Failure::BadConfig(e.to_string());
    match (shape.spin, shape.degree) {
        (Some(s), _) => {
            let c = VeroneseConfig::spin(s).map_err(bad)?;
            if shape.base_dim.is_some_and(|n| n != 2) {
                return Err(Failure::BadConfig("--spin implies --base-dim 2".into()));
            }
            Ok(Some(c))
        }
        (None, Some(d)) => {
            let n = shape.base_dim.ok_or_else(|| Failure::BadConfig("--degree needs --base-dim".into()))?;
            VeroneseConfig::new(n, d).map(Some).map_err(bad)
        }
        (None, None) => Ok(None),
    }
}

/// Mean and standard error of a real scalar estimate.
#[derive(Debug, Clone, Copy, Serialize)]
struct ScalarEstimate {
    mean: f64,
    std_error: f64,
    n_samples: usize,
}

impl From<&McEstimate> for ScalarEstimate {
    fn from(e: &McEstimate) -> Self {
        let (mean, std_error) = e.scalar();
        Self { mean, std_error, n_samples: e.n_samples }
    }
}

/// An `n x n` matrix estimate with componentwise standard errors.
#[derive(Debug, Clone, Serialize)]
struct MatrixEstimate {
    mean: MatrixJson,
    std_error: MatrixJson,
}

impl MatrixEstimate {
    fn from_estimate(e: &McEstimate, n: usize) -> Self {
        Self { mean: matrix_to_json(&e.mean_matrix(n)), std_error: matrix_to_json(&e.std_error_matrix(n)) }
    }
}
