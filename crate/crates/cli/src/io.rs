use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use uqm_core::wire::{self, StateFile};
use uqm_core::DensityMatrix;

use crate::report::{Report, ResolvedConfig};
use crate::Failure;

pub fn read_json<D: DeserializeOwned>(path: &Path, what: &str) -> Result<D, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::BadConfig(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::BadData(format!("{what} file {}: {e}", path.display())))
}

pub fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix, Failure> {
    let file: StateFile = read_json(path, "state")?;
    file.to_density(tol).map_err(|e| Failure::BadData(format!("state file {}: {e}", path.display())))
}

/// Writes the report to `--out` or stdout, then turns failed checks into exit status 1.
pub fn emit<R: Serialize>(config: &ResolvedConfig, report: &Report<R>) -> Result<(), Failure> {
    let text = wire::to_pretty_json(report) + "\n";
    match &config.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::BadConfig(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    let failed = report.failed_checks();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::CheckFailed(failed.join(", ")))
    }
}

/// Writes rows to the `--csv-samples` path when one was given.
pub fn write_csv(
    config: &ResolvedConfig,
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), Failure> {
    let Some(path) = &config.csv_samples else { return Ok(()) };
    let io_err = |e: csv::Error| Failure::BadConfig(format!("cannot write {path}: {e}"));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::BadConfig(format!("cannot write {path}: {e}")))
}

/// Column names `{prefix}{k}_re`, `{prefix}{k}_im` for `k < n`.
pub fn complex_columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).flat_map(|k| [format!("{prefix}{k}_re"), format!("{prefix}{k}_im")]).collect()
}

pub fn complex_cells(v: &[uqm_core::Complex64]) -> Vec<String> {
    v.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect()
}
