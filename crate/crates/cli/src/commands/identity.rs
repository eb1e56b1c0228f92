use serde::Serialize;
use uqm_core::coherent::{check_coherent_resolution, VeroneseConfig};
use uqm_core::montecarlo::DeviationReport;
use uqm_core::projective_sampling::check_quadratic_identity;

use super::{require_samples, veronese_shape};
use crate::args::Shape;
use crate::io::emit;
use crate::report::{Check, Report, ResolvedConfig};
use crate::Failure;

/// Allowed deviation, in standard errors, of any component of a checked identity.
const SE_LIMIT: f64 = 5.0;

#[derive(Serialize)]
struct CoherentPart {
    veronese: VeroneseConfig,
    /// Seed of this check, distinct from the fourth-moment seed so the two use independent draws.
    seed: u64,
    deviation: DeviationReport,
}

#[derive(Serialize)]
struct IdentityResult {
    base_dim: usize,
    fourth_moment: DeviationReport,
    coherent_resolution: Option<CoherentPart>,
}

pub fn run(shape: &Shape, config: &ResolvedConfig) -> Result<(), Failure> {
    let veronese = veronese_shape(shape)?;
    let n = veronese.map_or(shape.base_dim.unwrap_or(2), |v| v.base_dim);
    if n == 0 {
        return Err(Failure::BadConfig("--base-dim must be at least 1".into()));
    }
    let n_samples = require_samples(config, 2)?;

    let (_, fourth_moment) = check_quadratic_identity::<f64>(n, n_samples, config.seed)?;
    let mut checks = vec![Check::at_most(
        "fubini-study-fourth-moment",
        "largest componentwise deviation of the mean of Z Z Zbar Zbar from (dd + dd)/(n(n+1)), in standard errors",
        fourth_moment.max_se_deviation,
        SE_LIMIT,
    )];
    let coherent_resolution = match veronese {
        Some(v) => {
            let seed = config.seed.wrapping_add(1);
            let (_, deviation) = check_coherent_resolution::<f64>(&v, n_samples, seed)?;
            checks.push(Check::at_most(
                "coherent-resolution-of-identity",
                "largest componentwise deviation of N times the mean coherent projector from the identity, in standard errors",
                deviation.max_se_deviation,
                SE_LIMIT,
            ));
            Some(CoherentPart { veronese: v, seed, deviation })
        }
        None => None,
    };
    emit(config, &Report::new(config, checks, IdentityResult { base_dim: n, fourth_moment, coherent_resolution }))
}
