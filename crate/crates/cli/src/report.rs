use std::path::Path;

use serde::Serialize;

use crate::args::{Cli, Command};
use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self { name: "uqm", version: env!("CARGO_PKG_VERSION") }
    }
}

/// Every option after defaults and seed generation, as recorded in the report.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub command: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub state: Option<String>,
    pub map: Option<String>,
    pub dims: Option<Vec<usize>>,
    pub base_dim: Option<usize>,
    pub degree: Option<usize>,
    pub spin: Option<f64>,
    pub out: Option<String>,
    pub csv_samples: Option<String>,
    pub threads: Option<usize>,
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

impl ResolvedConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, Failure> {
        if !(cli.tol.is_finite() && cli.tol >= 0.0) {
            return Err(Failure::BadConfig(format!("--tol must be a non-negative number, got {}", cli.tol)));
        }
        let mut cfg = Self {
            command: cli.command.name(),
            seed: cli.seed.unwrap_or_else(rand::random),
            samples: cli.samples,
            tol: cli.tol,
            state: None,
            map: None,
            dims: None,
            base_dim: None,
            degree: None,
            spin: None,
            out: cli.out.as_deref().map(show),
            csv_samples: cli.csv_samples.as_deref().map(show),
            threads: cli.threads,
        };
        match &cli.command {
            Command::Tomography { state } => cfg.state = Some(show(state)),
            Command::Disentangle { state, dims } => {
                cfg.state = Some(show(state));
                cfg.dims = Some(dims.clone());
            }
            Command::Coherent { state, shape } => {
                cfg.state = Some(show(state));
                (cfg.base_dim, cfg.degree, cfg.spin) = (shape.base_dim, shape.degree, shape.spin);
            }
            Command::ChoiDecompose { map } | Command::ValidateMap { map } => cfg.map = Some(show(map)),
            Command::IdentityCheck { shape } => {
                (cfg.base_dim, cfg.degree, cfg.spin) = (shape.base_dim, shape.degree, shape.spin);
            }
        }
        Ok(cfg)
    }
}

/// A named numerical check with its measured value and acceptance threshold.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub description: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(id: &'static str, description: &'static str, value: f64, threshold: f64) -> Self {
        Self { id, description, value, threshold, passed: value <= threshold }
    }

    pub fn at_least(id: &'static str, description: &'static str, value: f64, threshold: f64) -> Self {
        Self { id, description, value, threshold, passed: value >= threshold }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<R: Serialize> {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub config: ResolvedConfig,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub result: R,
}

impl<R: Serialize> Report<R> {
    pub fn new(config: &ResolvedConfig, checks: Vec<Check>, result: R) -> Self {
        Self {
            tool: ToolInfo::current(),
            command: config.command,
            config: config.clone(),
            seed: config.seed,
            checks,
            result,
        }
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }
}
