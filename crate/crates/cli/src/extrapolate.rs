//! Relative energy dissipation across resolutions: the reference initial
//! energy and the final values are both Richardson-extrapolated in
//! `Delta = 1/N` from the three finest runs.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use sveuler::diagnostics::richardson_extrapolate;

use crate::run::SummaryRow;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationRow {
    pub t: f64,
    /// `(E_N(t) - E0_ref) / E0_ref` per resolution, coarsest first.
    pub rel: [f64; 3],
    pub mc_error: [f64; 3],
    pub extrapolated: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub n_modes: [usize; 3],
    /// Extrapolated initial energy.
    pub e0_ref: f64,
    pub rows: Vec<ExtrapolationRow>,
}

impl Extrapolation {
    pub fn to_csv(&self) -> String {
        let [a, b, c] = self.n_modes;
        let mut s = format!("t,rel_n{a},rel_n{b},rel_n{c},mc_n{a},mc_n{b},mc_n{c},extrapolated\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.t, r.rel[0], r.rel[1], r.rel[2], r.mc_error[0], r.mc_error[1], r.mc_error[2], r.extrapolated
            );
        }
        s
    }
}

/// Each summary holds the rows of one run. Only the three finest resolutions
/// are used; times missing from any of them are skipped.
pub fn extrapolate(summaries: &[Vec<SummaryRow>]) -> Result<Extrapolation> {
    let mut runs: Vec<&Vec<SummaryRow>> = summaries.iter().filter(|s| !s.is_empty()).collect();
    runs.sort_by_key(|s| s[0].n_modes);
    runs.dedup_by_key(|s| s[0].n_modes);
    if runs.len() < 3 {
        bail!("need summaries at three distinct resolutions, got {}", runs.len());
    }
    let runs = &runs[runs.len() - 3..];
    let n_modes = [runs[0][0].n_modes, runs[1][0].n_modes, runs[2][0].n_modes];
    let at = |run: &[SummaryRow], t: f64| run.iter().find(|r| r.t == t).copied();
    let delta = |i: usize| 1.0 / n_modes[i] as f64;

    let mut e0 = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        match at(run, 0.0) {
            Some(r) => e0.push((delta(i), r.mean_energy)),
            None => bail!("summary at N = {} has no t = 0 row", n_modes[i]),
        }
    }
    let e0_ref = richardson_extrapolate(&e0)?;
    if !(e0_ref > 0.0) {
        bail!("extrapolated initial energy {e0_ref} is not positive");
    }

    let mut rows = Vec::new();
    for base in runs[0].iter() {
        let found: Vec<SummaryRow> = runs.iter().filter_map(|run| at(run, base.t)).collect();
        if found.len() < 3 {
            continue;
        }
        let rel = [0, 1, 2].map(|i| (found[i].mean_energy - e0_ref) / e0_ref);
        // summaries scale the error by their own initial energy
        let mc_error = [0, 1, 2].map(|i| found[i].mc_error * e0[i].1 / e0_ref);
        let extrapolated = richardson_extrapolate(&[(delta(0), rel[0]), (delta(1), rel[1]), (delta(2), rel[2])])?;
        rows.push(ExtrapolationRow { t: base.t, rel, mc_error, extrapolated });
    }
    Ok(Extrapolation { n_modes, e0_ref, rows })
}
