//! Monte-Carlo ensembles: draw `M` initial fields, evolve them independently
//! and reduce per-member results in member order.

use crate::error::{DiagnosticsError, InitialDataError, SolverError};
use crate::initial::{InitialPreset, InitialSampler};
use crate::solver::{SolverConfig, SvOperator, Trajectory};
use crate::spectral::SpectralField;

/// How members are scheduled. `Parallel` degrades to sequential execution
/// when the crate is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `workers = 0` uses the available parallelism.
    Parallel { workers: usize },
    #[default]
    Auto,
}

impl Execution {
    pub fn workers(self) -> usize {
        match self {
            Self::Sequential => 1,
            Self::Parallel { workers } if workers > 0 => workers,
            _ => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n_samples: usize,
    pub solver: SolverConfig,
    pub preset: InitialPreset,
    pub master_seed: u64,
    pub execution: Execution,
}

impl EnsembleConfig {
    /// Ensemble with the default size `M = N`.
    pub fn new(solver: SolverConfig, preset: InitialPreset, master_seed: u64) -> Self {
        Self { n_samples: solver.n_modes, solver, preset, master_seed, execution: Execution::Auto }
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = self.solver.violations();
        if self.n_samples == 0 {
            v.push("ensemble needs at least one member".into());
        }
        if let Err(e) = self.preset.validate() {
            v.push(e.to_string());
        }
        v
    }
}

/// Seed of member `index`.
pub fn member_seed(master_seed: u64, index: usize) -> u64 {
    master_seed ^ index as u64
}

/// Result of one member; failures do not abort the ensemble.
#[derive(Debug, Clone)]
pub struct MemberOutcome<R> {
    pub index: usize,
    pub seed: u64,
    pub result: Result<R, SolverError>,
}

impl<R> MemberOutcome<R> {
    pub fn ok(&self) -> Option<&R> {
        self.result.as_ref().ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    pub std: f64,
    pub mc_error: f64,
}

/// Mean, sample standard deviation (`M - 1` denominator, 0 for `M = 1`) and
/// `std / sqrt(M)`. Sums in the given order.
pub fn aggregate(values: &[f64]) -> Result<EnsembleStats, DiagnosticsError> {
    if values.is_empty() {
        return Err(DiagnosticsError::Empty);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let std = if values.len() == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0)).sqrt()
    };
    Ok(EnsembleStats { mean, std, mc_error: std / m.sqrt() })
}

pub fn sample_initials(cfg: &EnsembleConfig) -> Result<Vec<SpectralField>, InitialDataError> {
    let sampler = InitialSampler::new(cfg.preset, cfg.solver.n_modes)?;
    (0..cfg.n_samples).map(|i| sampler.sample(member_seed(cfg.master_seed, i))).collect()
}

#[cfg(feature = "parallel")]
fn map_members<T, F>(execution: Execution, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if execution == Execution::Sequential || count <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(execution.workers()).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_members<T, F>(_execution: Execution, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

/// Common time step: the smallest stable step over all initial members, so
/// every trajectory shares its time levels.
pub fn common_time_step(cfg: &EnsembleConfig, sampler: &InitialSampler) -> Result<f64, InitialDataError> {
    let dts = map_members(cfg.execution, cfg.n_samples, |i| -> Result<f64, InitialDataError> {
        let u = sampler.sample(member_seed(cfg.master_seed, i))?;
        let mut op = SvOperator::new(&cfg.solver).map_err(|e| InitialDataError::Spec(e.to_string()))?;
        Ok(op.stable_dt(&u))
    });
    let mut dt = f64::INFINITY;
    for d in dts {
        dt = dt.min(d?);
    }
    Ok(dt)
}

/// Evolves every member and maps its trajectory through `reduce` as soon as
/// it completes, so full trajectories need not be held for the whole
/// ensemble. Outcomes are returned in member order.
pub fn evolve_ensemble_with<R, F>(cfg: &EnsembleConfig, reduce: F) -> Result<Vec<MemberOutcome<R>>, InitialDataError>
where
    R: Send,
    F: Fn(usize, Trajectory) -> R + Sync + Send,
{
    let v = cfg.violations();
    if !v.is_empty() {
        return Err(InitialDataError::Spec(v.join("; ")));
    }
    let sampler = InitialSampler::new(cfg.preset, cfg.solver.n_modes)?;
    let dt = common_time_step(cfg, &sampler)?;
    let outcomes = map_members(cfg.execution, cfg.n_samples, |i| -> Result<MemberOutcome<R>, InitialDataError> {
        let seed = member_seed(cfg.master_seed, i);
        let u = sampler.sample(seed)?;
        let result = SvOperator::new(&cfg.solver).and_then(|mut op| op.run_with_dt(&u, dt)).map(|t| reduce(i, t));
        Ok(MemberOutcome { index: i, seed, result })
    });
    outcomes.into_iter().collect()
}

pub fn evolve_ensemble(cfg: &EnsembleConfig) -> Result<Vec<MemberOutcome<Trajectory>>, InitialDataError> {
    evolve_ensemble_with(cfg, |_, t| t)
}
