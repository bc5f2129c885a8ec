//! Experiment configuration: TOML input with preset defaults, exhaustive
//! validation and a canonical serialization used for hashing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sveuler::diagnostics::{KernelKind, RGrid, DEFAULT_R_POINTS};
use sveuler::ensemble::{EnsembleConfig, Execution};
use sveuler::initial::InitialPreset;
use sveuler::solver::{MultiplierMode, SolverConfig};

/// Configuration file as written by the user; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub preset: String,
    pub n_modes: Option<usize>,
    pub master_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub solver: RawSolver,
    #[serde(default)]
    pub initial: RawInitial,
    #[serde(default)]
    pub ensemble: RawEnsemble,
    #[serde(default)]
    pub diagnostics: RawDiagnostics,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub eps: Option<f64>,
    pub multiplier: Option<Multiplier>,
    pub t_final: Option<f64>,
    pub cfl: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInitial {
    pub rho: Option<f64>,
    pub q: Option<usize>,
    pub amplitude: Option<f64>,
    pub wavenumber: Option<usize>,
    pub hurst: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEnsemble {
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    pub max_failure_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDiagnostics {
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub snapshot_times: Option<Vec<f64>>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_points: Option<usize>,
    pub kernel: Option<Kernel>,
    pub theory_check: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Multiplier {
    SpectralViscosity,
    NsLike,
}

impl From<Multiplier> for MultiplierMode {
    fn from(m: Multiplier) -> Self {
        match m {
            Multiplier::SpectralViscosity => MultiplierMode::SpectralViscosity,
            Multiplier::NsLike => MultiplierMode::NavierStokesLike,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Exact,
    Numerical,
}

impl From<Kernel> for KernelKind {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Exact => KernelKind::Exact,
            Kernel::Numerical => KernelKind::Numerical,
        }
    }
}

/// Fully resolved configuration. Serializing it gives the canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub n_modes: usize,
    pub master_seed: u64,
    /// Where artifacts go. Not part of the canonical form.
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub solver: SolverSection,
    pub initial: InitialSection,
    pub ensemble: EnsembleSection,
    pub diagnostics: DiagnosticsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub eps: f64,
    pub multiplier: Multiplier,
    pub t_final: f64,
    pub cfl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub samples: usize,
    /// Worker threads; 0 means the available parallelism. Not hashed.
    #[serde(skip)]
    pub workers: usize,
    pub max_failure_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    pub alpha: f64,
    pub lambda: f64,
    pub snapshot_times: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub kernel: Kernel,
    pub theory_check: bool,
}

struct PresetDefaults {
    n_modes: usize,
    eps: f64,
    multiplier: Multiplier,
    t_final: f64,
    alpha: f64,
    lambda: f64,
    /// `None` means `M = N`.
    samples: Option<usize>,
}

fn defaults_for(preset: &InitialPreset) -> PresetDefaults {
    match preset {
        InitialPreset::DetSinusoidal { .. } => PresetDefaults {
            n_modes: 128,
            eps: 0.01,
            multiplier: Multiplier::NsLike,
            t_final: 1.0,
            alpha: 0.5,
            lambda: 2.0,
            samples: Some(1),
        },
        InitialPreset::PerturbedSinusoidal { .. } => PresetDefaults {
            n_modes: 128,
            eps: 0.01,
            multiplier: Multiplier::SpectralViscosity,
            t_final: 1.0,
            alpha: 0.5,
            lambda: 2.0,
            samples: None,
        },
        InitialPreset::UnsignedSheet { .. } => PresetDefaults {
            n_modes: 128,
            eps: 0.05,
            multiplier: Multiplier::SpectralViscosity,
            t_final: 2.0,
            alpha: 0.5,
            lambda: 2.0,
            samples: None,
        },
        InitialPreset::Fbm { hurst } => PresetDefaults {
            n_modes: 64,
            eps: 0.05,
            multiplier: Multiplier::SpectralViscosity,
            t_final: 1.0,
            alpha: *hurst,
            lambda: 2.0 * hurst + 1.0,
            samples: None,
        },
    }
}

/// Reads, fills and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text)?;
    resolve(raw)
}

/// Fills preset defaults and collects every invariant violation.
pub fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    let mut problems = Vec::new();
    let base = match InitialPreset::from_name(&raw.preset) {
        Ok(p) => p,
        Err(e) => bail!("{e}; known presets: {}", InitialPreset::NAMES.join(", ")),
    };
    let ri = &raw.initial;
    let unused = |name: &str, present: bool, problems: &mut Vec<String>| {
        if present {
            problems.push(format!("initial.{name} is not used by preset `{}`", raw.preset));
        }
    };
    let preset = match base {
        InitialPreset::DetSinusoidal { rho } => {
            unused("q", ri.q.is_some(), &mut problems);
            unused("amplitude", ri.amplitude.is_some(), &mut problems);
            unused("wavenumber", ri.wavenumber.is_some(), &mut problems);
            unused("hurst", ri.hurst.is_some(), &mut problems);
            InitialPreset::DetSinusoidal { rho: ri.rho.unwrap_or(rho) }
        }
        InitialPreset::PerturbedSinusoidal { rho, q, alpha } => {
            unused("wavenumber", ri.wavenumber.is_some(), &mut problems);
            unused("hurst", ri.hurst.is_some(), &mut problems);
            InitialPreset::PerturbedSinusoidal {
                rho: ri.rho.unwrap_or(rho),
                q: ri.q.unwrap_or(q),
                alpha: ri.amplitude.unwrap_or(alpha),
            }
        }
        InitialPreset::UnsignedSheet { rho, wavenumber, q, alpha } => {
            unused("hurst", ri.hurst.is_some(), &mut problems);
            InitialPreset::UnsignedSheet {
                rho: ri.rho.unwrap_or(rho),
                wavenumber: ri.wavenumber.unwrap_or(wavenumber),
                q: ri.q.unwrap_or(q),
                alpha: ri.amplitude.unwrap_or(alpha),
            }
        }
        InitialPreset::Fbm { hurst } => {
            unused("rho", ri.rho.is_some(), &mut problems);
            unused("q", ri.q.is_some(), &mut problems);
            unused("amplitude", ri.amplitude.is_some(), &mut problems);
            unused("wavenumber", ri.wavenumber.is_some(), &mut problems);
            InitialPreset::Fbm { hurst: ri.hurst.unwrap_or(hurst) }
        }
    };
    if let Err(e) = preset.validate() {
        problems.push(e.to_string());
    }
    let d = defaults_for(&preset);
    let n_modes = raw.n_modes.unwrap_or(d.n_modes);
    let t_final = raw.solver.t_final.unwrap_or(d.t_final);
    let rd = &raw.diagnostics;
    let snapshot_times = rd.snapshot_times.clone().unwrap_or_else(|| (0..=4).map(|i| t_final * (i as f64 / 4.0)).collect());
    let cfg = ExperimentConfig {
        preset: raw.preset.clone(),
        n_modes,
        master_seed: raw.master_seed.unwrap_or(0),
        output_dir: raw.output_dir.clone().unwrap_or_else(|| PathBuf::from(format!("runs/{}-n{n_modes}", raw.preset))),
        solver: SolverSection {
            eps: raw.solver.eps.unwrap_or(d.eps),
            multiplier: raw.solver.multiplier.unwrap_or(d.multiplier),
            t_final,
            cfl: raw.solver.cfl.unwrap_or(0.5),
        },
        initial: section_of(&preset),
        ensemble: EnsembleSection {
            samples: raw.ensemble.samples.unwrap_or(d.samples.unwrap_or(n_modes)),
            workers: raw.ensemble.workers.unwrap_or(0),
            max_failure_fraction: raw.ensemble.max_failure_fraction.unwrap_or(0.0),
        },
        diagnostics: DiagnosticsSection {
            alpha: rd.alpha.unwrap_or(d.alpha),
            lambda: rd.lambda.unwrap_or(d.lambda),
            snapshot_times,
            r_min: rd.r_min.unwrap_or(0.25 / n_modes.max(1) as f64),
            r_max: rd.r_max.unwrap_or(0.5),
            r_points: rd.r_points.unwrap_or(DEFAULT_R_POINTS),
            kernel: rd.kernel.unwrap_or(Kernel::Numerical),
            theory_check: rd.theory_check.unwrap_or(false),
        },
    };
    problems.extend(cfg.violations());
    if !problems.is_empty() {
        bail!("invalid configuration:\n  - {}", problems.join("\n  - "));
    }
    Ok(cfg)
}

fn section_of(preset: &InitialPreset) -> InitialSection {
    let mut s = InitialSection { rho: None, q: None, amplitude: None, wavenumber: None, hurst: None };
    match *preset {
        InitialPreset::DetSinusoidal { rho } => s.rho = Some(rho),
        InitialPreset::PerturbedSinusoidal { rho, q, alpha } => {
            s.rho = Some(rho);
            s.q = Some(q);
            s.amplitude = Some(alpha);
        }
        InitialPreset::UnsignedSheet { rho, wavenumber, q, alpha } => {
            s.rho = Some(rho);
            s.wavenumber = Some(wavenumber);
            s.q = Some(q);
            s.amplitude = Some(alpha);
        }
        InitialPreset::Fbm { hurst } => s.hurst = Some(hurst),
    }
    s
}

impl ExperimentConfig {
    /// Every violated invariant beyond those of the preset parameters.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.solver_config().violations();
        let d = &self.diagnostics;
        if !(d.alpha > 0.0 && d.alpha < 1.0) {
            v.push(format!("diagnostics.alpha must lie in (0, 1), got {}", d.alpha));
        }
        if !(d.lambda > 1.0 && d.lambda < 3.0) {
            v.push(format!("diagnostics.lambda must lie in (1, 3), got {}", d.lambda));
        }
        if let Err(e) = RGrid::log_spaced(d.r_min, d.r_max, d.r_points) {
            v.push(e.to_string());
        }
        if self.ensemble.samples == 0 {
            v.push("ensemble.samples must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.ensemble.max_failure_fraction) {
            v.push(format!("ensemble.max_failure_fraction must lie in [0, 1], got {}", self.ensemble.max_failure_fraction));
        }
        // manifests are TOML, whose integers are signed 64-bit
        if i64::try_from(self.master_seed).is_err() {
            v.push(format!("master_seed must be below 2^63, got {}", self.master_seed));
        }
        if self.output_dir.as_os_str().is_empty() {
            v.push("output_dir must not be empty".into());
        }
        v
    }

    pub fn preset(&self) -> InitialPreset {
        let i = &self.initial;
        match self.preset.as_str() {
            "det-sinusoidal" => InitialPreset::DetSinusoidal { rho: i.rho.unwrap() },
            "perturbed-sinusoidal" => {
                InitialPreset::PerturbedSinusoidal { rho: i.rho.unwrap(), q: i.q.unwrap(), alpha: i.amplitude.unwrap() }
            }
            "unsigned-sheet" => InitialPreset::UnsignedSheet {
                rho: i.rho.unwrap(),
                wavenumber: i.wavenumber.unwrap(),
                q: i.q.unwrap(),
                alpha: i.amplitude.unwrap(),
            },
            _ => InitialPreset::Fbm { hurst: i.hurst.unwrap() },
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig::new(self.n_modes, s.eps, s.multiplier.into(), s.t_final)
            .with_cfl(s.cfl)
            .with_snapshots(self.diagnostics.snapshot_times.clone())
    }

    pub fn execution(&self) -> Execution {
        match self.ensemble.workers {
            1 => Execution::Sequential,
            w => Execution::Parallel { workers: w },
        }
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        EnsembleConfig {
            n_samples: self.ensemble.samples,
            solver: self.solver_config(),
            preset: self.preset(),
            master_seed: self.master_seed,
            execution: self.execution(),
        }
    }

    pub fn r_grid(&self) -> RGrid {
        let d = &self.diagnostics;
        RGrid::log_spaced(d.r_min, d.r_max, d.r_points).expect("validated grid")
    }

    /// Canonical TOML text; stable across runs and independent of the input layout.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("serializable configuration")
    }

    /// First 16 hex digits of the SHA-256 of [`ExperimentConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        hex::encode(digest)[..16].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_det_sinusoidal_gets_defaults() {
        let cfg = parse_config("preset = \"det-sinusoidal\"\n").unwrap();
        assert_eq!(cfg.solver.eps, 0.01);
        assert_eq!(cfg.solver.multiplier, Multiplier::NsLike);
        assert_eq!(cfg.initial.rho, Some(10.0));
        assert_eq!(cfg.solver.t_final, 1.0);
        assert_eq!(cfg.diagnostics.alpha, 0.5);
        assert_eq!(cfg.diagnostics.lambda, 2.0);
        assert_eq!(cfg.ensemble.samples, 1);
        assert_eq!(cfg.diagnostics.snapshot_times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn fbm_defaults_follow_hurst() {
        let cfg = parse_config("preset = \"fbm\"\n[initial]\nhurst = 0.75\n").unwrap();
        assert_eq!(cfg.diagnostics.alpha, 0.75);
        assert_eq!(cfg.diagnostics.lambda, 2.5);
        assert_eq!(cfg.ensemble.samples, 64);
        assert_eq!(cfg.solver.eps, 0.05);
    }

    #[test]
    fn violations_are_listed_together() {
        let err = parse_config(
            "preset = \"det-sinusoidal\"\n[diagnostics]\nalpha = 1.5\nlambda = 4.0\n[solver]\ncfl = 0.0\n",
        )
        .unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("alpha") && msg.contains("lambda") && msg.contains("cfl"), "{msg}");
    }

    #[test]
    fn unknown_keys_and_presets_are_rejected() {
        let err = parse_config("preset = \"det-sinusoidal\"\nbogus = 1\n").unwrap_err();
        assert!(format!("{err:#}").contains("bogus"));
        assert!(parse_config("preset = \"nope\"\n").is_err());
        assert!(parse_config("preset = \"det-sinusoidal\"\n[initial]\nhurst = 0.5\n").is_err());
    }

    #[test]
    fn parse_errors_carry_line_info() {
        let err = parse_config("preset = \"fbm\"\n[solver]\neps = \"x\"\n").unwrap_err();
        assert!(format!("{err:#}").contains("line 3"), "{err:#}");
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = parse_config("preset = \"unsigned-sheet\"\nn_modes = 32\n[ensemble]\nsamples = 3\n").unwrap();
        let again = parse_config(&cfg.canonical()).unwrap();
        assert_eq!(again.canonical(), cfg.canonical());
        assert_eq!(again.preset(), cfg.preset());
        assert_eq!(again.hash(), cfg.hash());
        let other = parse_config("preset = \"unsigned-sheet\"\nn_modes = 32\n[ensemble]\nsamples = 4\n").unwrap();
        assert_ne!(other.hash(), cfg.hash());
    }
}
