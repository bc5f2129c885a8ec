//! The `run` pipeline: evolve the ensemble, reduce diagnostics at snapshot
//! times and write every artifact.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sveuler::diagnostics::{c_max, d_max, energy_spectrum, structure_squares, SpectrumTable, StructureTable};
use sveuler::ensemble::{aggregate, evolve_ensemble_with, MemberOutcome};
use sveuler::solver::{InvariantLog, ScalarSample, Trajectory};
use sveuler::spectral::snapshot;
use sveuler::SpectralField;

use crate::checks::{format_report, run_theory_checks, CheckSettings};
use crate::config::ExperimentConfig;

/// One row of `summary.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub n_modes: usize,
    pub t: f64,
    pub mean_energy: f64,
    pub std_energy: f64,
    pub c_max: f64,
    pub d_max: f64,
    /// `(E(t) - E(0)) / E(0)` of the ensemble mean energy.
    pub rel_ediss: f64,
    /// Monte-Carlo error of `rel_ediss`.
    pub mc_error: f64,
}

pub const SUMMARY_HEADER: [&str; 8] = ["n_modes", "t", "mean_energy", "std_energy", "c_max", "d_max", "rel_ediss", "mc_error"];

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub config_hash: String,
    pub dt: f64,
    pub completed: usize,
    pub failed: usize,
    /// Whether the failed fraction stays within `max_failure_fraction`.
    pub within_failure_budget: bool,
    pub files: Vec<PathBuf>,
    pub summary: Vec<SummaryRow>,
    /// Worst structural defects over every step of every member.
    pub invariants: InvariantLog,
    /// Largest relative per-step excess over the enstrophy bound.
    pub enstrophy_excess: f64,
    /// Ensemble structure table and spectrum at each snapshot time.
    pub tables: Vec<(f64, StructureTable, SpectrumTable)>,
}

/// Per-member reduction kept after the trajectory is dropped.
struct MemberData {
    series: Vec<ScalarSample>,
    structure_sq: Vec<Vec<f64>>,
    spectra: Vec<Vec<f64>>,
    snapshots: Vec<(f64, SpectralField)>,
    invariants: InvariantLog,
    enstrophy_excess: f64,
    dt: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config_hash: &'a str,
    preset: &'a str,
    n_modes: usize,
    samples: usize,
    master_seed: u64,
    dt: f64,
    completed: usize,
    failed: usize,
    files: Vec<String>,
    members: Vec<MemberEntry>,
}

#[derive(Serialize)]
struct MemberEntry {
    index: usize,
    seed: u64,
    status: &'static str,
    #[serde(skip_serializing_if = "String::is_empty")]
    message: String,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn fmt_time(t: f64) -> String {
    format!("{t}")
}

/// Writes `text` and records the path relative to `out`.
fn put(out: &Path, rel: &str, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(rel);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    files.push(PathBuf::from(rel));
    Ok(())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let v = cfg.violations();
    if !v.is_empty() {
        anyhow::bail!("invalid configuration:\n  {}", v.join("\n  "));
    }
    let out = cfg.output_dir.clone();
    for sub in ["members", "structure", "spectra", "snapshots"] {
        fs::create_dir_all(out.join(sub)).with_context(|| format!("creating {}", out.join(sub).display()))?;
    }
    let hash = cfg.hash();
    let ens = cfg.ensemble_config();
    let r_grid = cfg.r_grid();
    let kernel = cfg.diagnostics.kernel.into();
    let times = cfg.diagnostics.snapshot_times.clone();

    let reduce = |index: usize, traj: Trajectory| -> MemberData {
        let mut structure_sq = Vec::new();
        let mut spectra = Vec::new();
        for (_, f) in &traj.snapshots {
            structure_sq.push(structure_squares(f, &r_grid, kernel));
            spectra.push(energy_spectrum(f).e);
        }
        let enstrophy_excess = traj.enstrophy_budget_excess();
        MemberData {
            snapshots: if index == 0 { traj.snapshots } else { Vec::new() },
            series: traj.series,
            structure_sq,
            spectra,
            invariants: traj.invariants,
            enstrophy_excess,
            dt: traj.dt,
        }
    };
    let outcomes: Vec<MemberOutcome<MemberData>> =
        evolve_ensemble_with(&ens, reduce).map_err(|e| anyhow::anyhow!("initial data: {e}"))?;

    let mut files = Vec::new();
    put(&out, "config.toml", &cfg.canonical(), &mut files)?;

    let ok: Vec<&MemberData> = outcomes.iter().filter_map(|o| o.ok()).collect();
    let dt = ok.first().map_or(f64::NAN, |m| m.dt);
    let mut invariants = InvariantLog::default();
    let mut enstrophy_excess = f64::NEG_INFINITY;
    for (o, m) in outcomes.iter().filter_map(|o| o.ok().map(|m| (o, m))) {
        let rel = format!("members/member_{:04}.csv", o.index);
        let mut w = csv_writer(&out.join(&rel))?;
        w.write_record(["t", "energy", "enstrophy", "dissipation_integral"])?;
        for s in &m.series {
            w.write_record([s.t, s.energy, s.enstrophy, s.dissipation_integral].map(|v| v.to_string()))?;
        }
        w.flush()?;
        files.push(PathBuf::from(rel));
        invariants = invariants.merge(m.invariants);
        enstrophy_excess = enstrophy_excess.max(m.enstrophy_excess);
    }

    let mut summary = Vec::new();
    let mut tables = Vec::new();
    if let Some(first) = ok.first() {
        let rel = "aggregate.csv";
        let mut w = csv_writer(&out.join(rel))?;
        w.write_record(["t", "mean_energy", "std_energy", "mc_error"])?;
        for (j, s) in first.series.iter().enumerate() {
            let stats = aggregate(&ok.iter().map(|m| m.series[j].energy).collect::<Vec<_>>())?;
            w.write_record([s.t, stats.mean, stats.std, stats.mc_error].map(|v| v.to_string()))?;
        }
        w.flush()?;
        files.push(PathBuf::from(rel));

        let e0 = aggregate(&ok.iter().map(|m| m.series[0].energy).collect::<Vec<_>>())?.mean;
        let m = ok.len() as f64;
        for (i, &t) in times.iter().enumerate() {
            let j = first.series.iter().position(|s| s.t == t).expect("snapshot times are time levels");
            let stats = aggregate(&ok.iter().map(|m| m.series[j].energy).collect::<Vec<_>>())?;
            let mut sq = vec![0.0; r_grid.len()];
            let mut spec = vec![0.0; cfg.n_modes + 1];
            for member in &ok {
                sq.iter_mut().zip(&member.structure_sq[i]).for_each(|(a, b)| *a += b);
                spec.iter_mut().zip(&member.spectra[i]).for_each(|(a, b)| *a += b);
            }
            let table = StructureTable { r: r_grid.clone(), s2: sq.iter().map(|a| (a / m).sqrt()).collect(), kernel };
            let spectrum = SpectrumTable { e: spec.iter().map(|a| a / m).collect() };
            put(&out, &format!("structure/structure_t{}.csv", fmt_time(t)), &table.to_csv(), &mut files)?;
            put(
                &out,
                &format!("spectra/spectrum_t{}.csv", fmt_time(t)),
                &spectrum.to_csv(cfg.diagnostics.lambda),
                &mut files,
            )?;
            summary.push(SummaryRow {
                n_modes: cfg.n_modes,
                t,
                mean_energy: stats.mean,
                std_energy: stats.std,
                c_max: c_max(&table, cfg.diagnostics.alpha),
                d_max: d_max(&spectrum, cfg.diagnostics.lambda),
                rel_ediss: if e0 > 0.0 { (stats.mean - e0) / e0 } else { 0.0 },
                mc_error: if e0 > 0.0 { stats.mc_error / e0 } else { 0.0 },
            });
            tables.push((t, table, spectrum));
        }
        let rel = "summary.csv";
        let mut w = csv_writer(&out.join(rel))?;
        w.write_record(SUMMARY_HEADER)?;
        for r in &summary {
            let mut rec = vec![r.n_modes.to_string()];
            rec.extend([r.t, r.mean_energy, r.std_energy, r.c_max, r.d_max, r.rel_ediss, r.mc_error].map(|v| v.to_string()));
            w.write_record(rec)?;
        }
        w.flush()?;
        files.push(PathBuf::from(rel));
    }

    if let Some(first) = outcomes.iter().find_map(|o| o.ok().filter(|_| o.index == 0)) {
        for (t, f) in &first.snapshots {
            let rel = format!("snapshots/member_0000_t{}.bin", fmt_time(*t));
            snapshot::write(&out.join(&rel), f, *t, &hash)?;
            files.push(PathBuf::from(format!("{rel}.meta")));
            files.push(PathBuf::from(rel));
        }
    }

    if cfg.diagnostics.theory_check {
        let lines = run_theory_checks(&CheckSettings::quick(cfg.master_seed));
        put(&out, "theory_check.txt", &format_report(&lines), &mut files)?;
    }

    let failed = outcomes.len() - ok.len();
    let members = outcomes
        .iter()
        .map(|o| MemberEntry {
            index: o.index,
            seed: o.seed,
            status: if o.result.is_ok() { "ok" } else { "failed" },
            message: o.result.as_ref().err().map(|e| e.to_string()).unwrap_or_default(),
        })
        .collect();
    files.push(PathBuf::from("manifest.toml"));
    let manifest = Manifest {
        config_hash: &hash,
        preset: &cfg.preset,
        n_modes: cfg.n_modes,
        samples: cfg.ensemble.samples,
        master_seed: cfg.master_seed,
        dt,
        completed: ok.len(),
        failed,
        files: files.iter().map(|p| p.to_string_lossy().into_owned()).collect(),
        members,
    };
    fs::write(out.join("manifest.toml"), toml::to_string(&manifest)?)?;

    let within_failure_budget = failed as f64 <= cfg.ensemble.max_failure_fraction * outcomes.len() as f64;
    Ok(RunReport {
        out_dir: out,
        config_hash: hash,
        dt,
        completed: ok.len(),
        failed,
        within_failure_budget,
        files,
        summary,
        invariants,
        enstrophy_excess,
        tables,
    })
}

/// Reads a `summary.csv` written by [`run_experiment`].
pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SUMMARY_HEADER {
        anyhow::bail!("{}: unexpected header {:?}", path.display(), header);
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().with_context(|| format!("{} row {}: bad number `{}`", path.display(), line + 2, &rec[i]))
        };
        rows.push(SummaryRow {
            n_modes: rec[0].parse().with_context(|| format!("{} row {}", path.display(), line + 2))?,
            t: num(1)?,
            mean_energy: num(2)?,
            std_energy: num(3)?,
            c_max: num(4)?,
            d_max: num(5)?,
            rel_ediss: num(6)?,
            mc_error: num(7)?,
        });
    }
    Ok(rows)
}
