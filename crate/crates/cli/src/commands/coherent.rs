use std::path::Path;

use serde::Serialize;
use uqm_core::coherent::{
    check_coherent_resolution, sample_coherent_many, veronese_components, CoherentMeasurement, VeroneseConfig,
};
use uqm_core::experiment::ContinuousExperiment;
use uqm_core::montecarlo::{sample_mean, DeviationReport};
use uqm_core::C;

use super::{require_samples, veronese_shape, MatrixEstimate, ScalarEstimate};
use crate::args::Shape;
use crate::io::{complex_cells, complex_columns, emit, load_state, write_csv};
use crate::report::{Check, Report, ResolvedConfig};
use crate::Failure;

#[derive(Serialize)]
struct CoherentResult {
    veronese: VeroneseConfig,
    n_samples: usize,
    direction_mean_projector: MatrixEstimate,
    max_membership_residual: f64,
    total_probability: ScalarEstimate,
    total_probability_deviation: DeviationReport,
    resolution_of_identity: DeviationReport,
}

pub fn run(state: &Path, shape: &Shape, config: &ResolvedConfig) -> Result<(), Failure> {
    let veronese = veronese_shape(shape)?
        .ok_or_else(|| Failure::BadConfig("coherent needs --base-dim with --degree, or --spin".into()))?;
    let w = load_state(state, config.tol)?;
    if w.dim() != veronese.sym_dim {
        return Err(Failure::BadData(format!(
            "state has dimension {} but the symmetric space has dimension {}",
            w.dim(),
            veronese.sym_dim
        )));
    }
    let n_samples = require_samples(config, 2)?;
    let n = veronese.base_dim;
    let samples = sample_coherent_many(&w, &veronese, n_samples, config.seed)?;

    let projectors: Vec<_> = samples.iter().map(|s| s.outcome.projector()).collect();
    let direction_mean_projector =
        MatrixEstimate::from_estimate(&sample_mean(n * n, projectors.iter().map(|p| p.matrix().as_slice())), n);
    let mut max_membership_residual = 0.0f64;
    for s in &samples {
        let coh = veronese_components(s.outcome.vector(), veronese.degree);
        let overlap = s.post_state.expectation(&coh)?;
        max_membership_residual =
            max_membership_residual.max((1.0 - overlap).abs()).max((1.0 - s.post_state.purity()).abs());
    }
    let exp = CoherentMeasurement::new(veronese);
    let total = ContinuousExperiment::<f64>::total_probability(&exp, &w, n_samples, config.seed)?;
    let total_probability_deviation = total.deviation_from(&[C::new(1.0, 0.0)]);
    let (_, resolution_of_identity) = check_coherent_resolution::<f64>(&veronese, n_samples, config.seed)?;

    let checks = vec![
        Check::at_most(
            "posteriors-are-coherent-states",
            "largest deviation of a post-state from purity or from the coherent state at its outcome",
            max_membership_residual,
            1e-12,
        ),
        Check::at_most(
            "total-probability",
            "standard errors between the integrated outcome density and 1",
            total_probability_deviation.max_se_deviation,
            4.0,
        ),
        Check::at_most(
            "coherent-resolution-of-identity",
            "largest componentwise deviation of N times the mean coherent projector from the identity, in standard errors",
            resolution_of_identity.max_se_deviation,
            5.0,
        ),
    ];
    let result = CoherentResult {
        veronese,
        n_samples,
        direction_mean_projector,
        max_membership_residual,
        total_probability: (&total).into(),
        total_probability_deviation,
        resolution_of_identity,
    };

    let mut header = vec!["trial".to_string(), "density".to_string()];
    header.extend(complex_columns("phi", n));
    write_csv(
        config,
        &header,
        samples.iter().map(|s| {
            let mut row = vec![s.trial_index.to_string(), s.probability_density.to_string()];
            row.extend(complex_cells(s.outcome.vector()));
            row
        }),
    )?;
    emit(config, &Report::new(config, checks, result))
}
