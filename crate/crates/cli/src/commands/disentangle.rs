use std::path::Path;

use serde::Serialize;
use uqm_core::disentangle::{
    bipartition_residual, region_probability, sample_disentangle_many, segre_embed, FactorizedSystem,
};
use uqm_core::montecarlo::{sample_mean, DeviationReport};
use uqm_core::qstate::inner;
use uqm_core::C;

use super::{require_samples, MatrixEstimate, ScalarEstimate};
use crate::io::{complex_cells, complex_columns, emit, load_state, write_csv};
use crate::report::{Check, Report, ResolvedConfig};
use crate::Failure;

/// Overlap above which two factors count as aligned.
const ALIGNED: f64 = 0.99;

#[derive(Serialize)]
struct DisentangleResult {
    dims: Vec<usize>,
    n_samples: usize,
    factor_mean_projectors: Vec<MatrixEstimate>,
    max_product_residual: f64,
    total_probability: ScalarEstimate,
    total_probability_deviation: DeviationReport,
    /// Fraction of two-factor outcomes with `|<α|β>|² > 0.99`; absent unless both factors have equal dimension.
    aligned_fraction: Option<f64>,
}

pub fn run(state: &Path, dims: &[usize], config: &ResolvedConfig) -> Result<(), Failure> {
    let sys = FactorizedSystem::new(dims.to_vec()).map_err(|e| Failure::BadConfig(format!("--dims: {e}")))?;
    let w = load_state(state, config.tol)?;
    if w.dim() != sys.total_dim() {
        return Err(Failure::BadData(format!(
            "state has dimension {} but --dims multiplies to {}",
            w.dim(),
            sys.total_dim()
        )));
    }
    let n_samples = require_samples(config, 2)?;
    let samples = sample_disentangle_many(&w, &sys, n_samples, config.seed)?;

    let factor_mean_projectors = dims
        .iter()
        .enumerate()
        .map(|(f, &d)| {
            let projectors: Vec<_> = samples.iter().map(|s| s.outcome.factors()[f].projector()).collect();
            MatrixEstimate::from_estimate(&sample_mean(d * d, projectors.iter().map(|p| p.matrix().as_slice())), d)
        })
        .collect();
    let max_product_residual = samples
        .iter()
        .map(|s| bipartition_residual(segre_embed(&s.outcome).vector(), dims))
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))?;
    let aligned_fraction = (dims.len() == 2 && dims[0] == dims[1]).then(|| {
        let hits = samples
            .iter()
            .filter(|s| inner(s.outcome.factors()[0].vector(), s.outcome.factors()[1].vector()).norm_sqr() > ALIGNED)
            .count();
        hits as f64 / n_samples as f64
    });
    let total = region_probability(&w, &sys, |_| true, n_samples, config.seed)?;
    let total_probability_deviation = total.deviation_from(&[C::new(1.0, 0.0)]);

    let checks = vec![
        Check::at_most(
            "outcomes-are-product-states",
            "largest 2x2 minor of any sampled outcome reshaped along any bipartition",
            max_product_residual,
            1e-10,
        ),
        Check::at_most(
            "total-probability",
            "standard errors between the integrated outcome density and 1",
            total_probability_deviation.max_se_deviation,
            4.0,
        ),
    ];
    let result = DisentangleResult {
        dims: dims.to_vec(),
        n_samples,
        factor_mean_projectors,
        max_product_residual,
        total_probability: (&total).into(),
        total_probability_deviation,
        aligned_fraction,
    };

    let mut header = vec!["trial".to_string(), "density".to_string()];
    for (f, &d) in dims.iter().enumerate() {
        header.extend(complex_columns(&format!("f{f}_"), d));
    }
    write_csv(
        config,
        &header,
        samples.iter().map(|s| {
            let mut row = vec![s.trial_index.to_string(), s.probability_density.to_string()];
            for f in s.outcome.factors() {
                row.extend(complex_cells(f.vector()));
            }
            row
        }),
    )?;
    emit(config, &Report::new(config, checks, result))
}
