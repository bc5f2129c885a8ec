//! Experiment runner for the spectral viscosity ensemble solver: TOML
//! configuration, the run pipeline, snapshot diagnostics, resolution
//! extrapolation and the theory-check suite.

pub mod checks;
pub mod config;
pub mod extrapolate;
pub mod run;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sveuler::diagnostics::{c_max, d_max, energy_spectrum, structure_function, KernelKind, RGrid};
use sveuler::spectral::snapshot;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotDiagnostics {
    pub n_modes: usize,
    pub time: f64,
    pub c_max: f64,
    pub d_max: f64,
    pub structure_csv: String,
    pub spectrum_csv: String,
}

/// Recomputes structure function and spectrum of a stored snapshot on the
/// default radius grid for its resolution.
pub fn diagnose_snapshot(path: &Path, alpha: f64, lambda: f64, kernel: KernelKind) -> Result<SnapshotDiagnostics> {
    let (u, meta) = snapshot::read(path).with_context(|| format!("reading snapshot {}", path.display()))?;
    let table = structure_function(&u, &RGrid::for_resolution(meta.n_modes), kernel);
    let spectrum = energy_spectrum(&u);
    Ok(SnapshotDiagnostics {
        n_modes: meta.n_modes,
        time: meta.time,
        c_max: c_max(&table, alpha),
        d_max: d_max(&spectrum, lambda),
        structure_csv: table.to_csv(),
        spectrum_csv: spectrum.to_csv(lambda),
    })
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
