use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug, Clone)]
#[command(name = "uqm", version, about = "Seeded simulations of universal quantum measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed; a random one is drawn (and reported) when absent
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Number of Monte Carlo trials
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,

    /// Numerical tolerance for validating input states and maps
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Dump individual samples as CSV
    #[arg(long = "csv-samples", global = true)]
    pub csv_samples: Option<PathBuf>,

    /// Cap on worker threads (results do not depend on it)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Tomographic measurement of a state and linear-inversion reconstruction
    Tomography {
        #[arg(long)]
        state: PathBuf,
    },
    /// Disentangling measurement of a composite state
    Disentangle {
        #[arg(long)]
        state: PathBuf,
        /// Factor dimensions, e.g. "2,2"
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
    },
    /// Coherent-state measurement on a symmetric power
    Coherent {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        shape: Shape,
    },
    /// Kraus decomposition of a map, or a positivity verdict when it is not completely positive
    ChoiDecompose {
        #[arg(long)]
        map: PathBuf,
    },
    /// Checks complete positivity and the trace condition of a map or a discrete experiment
    ValidateMap {
        #[arg(long)]
        map: PathBuf,
    },
    /// Monte Carlo checks of the Fubini–Study moment identity and the coherent resolution of identity
    IdentityCheck {
        #[command(flatten)]
        shape: Shape,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct Shape {
    /// Dimension n of the underlying space
    #[arg(long = "base-dim")]
    pub base_dim: Option<usize>,
    /// Degree d of the Veronese embedding
    #[arg(long, conflicts_with = "spin")]
    pub degree: Option<usize>,
    /// Spin s, shorthand for base dimension 2 and degree 2s
    #[arg(long)]
    pub spin: Option<f64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tomography { .. } => "tomography",
            Command::Disentangle { .. } => "disentangle",
            Command::Coherent { .. } => "coherent",
            Command::ChoiDecompose { .. } => "choi-decompose",
            Command::ValidateMap { .. } => "validate-map",
            Command::IdentityCheck { .. } => "identity-check",
        }
    }
}
