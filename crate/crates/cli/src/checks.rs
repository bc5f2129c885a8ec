//! The `theory-check` suite: kernel equivalence, the gradient identity, the
//! interpolation inequality and the envelope construction, each reduced to
//! one measured number against a threshold.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sveuler::diagnostics::{kernel_exact, kernel_numerical, RGrid};
use sveuler::spectral::{random_divergence_free, sobolev_seminorm_sq};
use sveuler::theory::{check_envelope, hgrad_identity_check, interpolation_inequality_check, sublinear_envelope};
use sveuler::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSettings {
    pub kernel_points: usize,
    pub hgrad_fields: usize,
    pub n_quad: usize,
    pub radii: Vec<f64>,
    /// Resolution of the random test fields.
    pub field_modes: usize,
    pub inequality_fields: usize,
    pub envelope_sequences: usize,
    pub envelope_k_max: usize,
    pub seed: u64,
}

impl CheckSettings {
    /// The full-size suite.
    pub fn full(seed: u64) -> Self {
        Self {
            kernel_points: 10_000,
            hgrad_fields: 20,
            n_quad: 10_000,
            radii: vec![0.02, 0.05, 0.1],
            field_modes: 8,
            inequality_fields: 1000,
            envelope_sequences: 100,
            envelope_k_max: 200,
            seed,
        }
    }

    /// A reduced suite for attaching to experiment runs.
    pub fn quick(seed: u64) -> Self {
        Self { kernel_points: 1000, hgrad_fields: 3, n_quad: 1000, inequality_fields: 50, envelope_sequences: 20, ..Self::full(seed) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl CheckLine {
    fn upper(name: &'static str, measured: f64, threshold: f64) -> Self {
        Self { name, passed: measured <= threshold, measured, threshold }
    }
}

/// `J1` from its integral representation `(1/pi) int_0^pi cos(t - x sin t) dt`;
/// the trapezoid rule converges geometrically for this periodic integrand.
pub fn j1_integral(x: f64) -> f64 {
    let n = 512;
    let h = PI / n as f64;
    let f = |t: f64| (t - x * t.sin()).cos();
    let inner: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) * h / PI
}

/// Largest of `exact / numerical` and `numerical / exact` on a log grid.
pub fn kernel_ratio(points: usize) -> CheckLine {
    let (lo, hi) = (1e-3f64.ln(), 1e3f64.ln());
    let worst = (0..points)
        .map(|i| {
            let x = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
            let (e, n) = (kernel_exact(x), kernel_numerical(x));
            (e / n).max(n / e)
        })
        .fold(0.0, f64::max);
    CheckLine::upper("kernel ratio", worst, 2.25)
}

pub fn kernel_oracle() -> CheckLine {
    let err = (kernel_exact(1.0) - (2.0 - 4.0 * j1_integral(1.0))).abs();
    CheckLine::upper("kernel_exact(1) vs integral J1", err, 1e-6)
}

fn test_field(s: &CheckSettings, i: usize) -> sveuler::SpectralField {
    let grid = GridSpec::new(s.field_modes).expect("positive resolution");
    // spread the spectral decay over the fields
    let decay = 0.5 + 0.5 * (i % 5) as f64;
    random_divergence_free(grid, s.field_modes, decay, s.seed ^ (i as u64).wrapping_mul(0x9e37_79b9))
}

/// Worst `|lhs / rhs - 1|` of the gradient identity.
pub fn hgrad(s: &CheckSettings) -> CheckLine {
    let mut worst: f64 = 0.0;
    for i in 0..s.hgrad_fields {
        let u = test_field(s, i);
        for &r in &s.radii {
            let (lhs, rhs) = hgrad_identity_check(&u, r, s.n_quad);
            worst = worst.max((lhs / rhs - 1.0).abs());
        }
    }
    CheckLine::upper("gradient identity", worst, 1e-5)
}

/// Most negative interpolation margin relative to `||u||`, over the default
/// radius grid.
pub fn interpolation(s: &CheckSettings) -> CheckLine {
    let radii = RGrid::for_resolution(s.field_modes);
    let mut worst = f64::INFINITY;
    for i in 0..s.inequality_fields {
        let u = test_field(s, 1_000_000 + i);
        let norm = sobolev_seminorm_sq(&u, 0).sqrt();
        for &r in radii.values() {
            worst = worst.min(interpolation_inequality_check(&u, r) / norm);
        }
    }
    let threshold = -1e-8;
    CheckLine { name: "interpolation margin / ||u||", passed: worst >= threshold, measured: worst, threshold }
}

/// Random nonincreasing sups with `(k + 1) sups[k]` bounded, so the envelope
/// decays like `1 / k`.
pub fn random_sups(rng: &mut impl Rng, k_max: usize) -> Vec<f64> {
    let a = rng.random_range(0.0..5.0);
    let p = rng.random_range(1.0..3.0);
    let mut prev = f64::INFINITY;
    (0..=k_max)
        .map(|k| {
            let v = (a * (1.0 + k as f64).powf(-p) * rng.random_range(0.5..1.0)).min(prev);
            prev = v;
            v
        })
        .collect()
}

/// Hand recursions plus every property on random admissible inputs; the
/// measured value counts failures.
pub fn envelope(s: &CheckSettings) -> CheckLine {
    let mut failures = 0usize;
    let harmonic: Vec<f64> = (0..3).map(|k: usize| 1.0 / (1 + k.saturating_sub(1)) as f64).collect();
    if sublinear_envelope(&harmonic).map(|e| e.knots().to_vec()).ok() != Some(vec![2.0, 1.5, 1.0]) {
        failures += 1;
    }
    if sublinear_envelope(&[0.0; 3]).map(|e| e.knots().to_vec()).ok() != Some(vec![1.0, 0.5, 1.0 / 3.0]) {
        failures += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    for _ in 0..s.envelope_sequences {
        let sups = random_sups(&mut rng, s.envelope_k_max);
        let ok = sublinear_envelope(&sups).map(|env| {
            let report = check_envelope(&env, &sups);
            report.all_hold() && report.decays
        });
        if ok.ok() != Some(true) {
            failures += 1;
        }
    }
    CheckLine::upper("envelope properties (failures)", failures as f64, 0.0)
}

pub fn run_theory_checks(s: &CheckSettings) -> Vec<CheckLine> {
    vec![kernel_ratio(s.kernel_points), kernel_oracle(), hgrad(s), interpolation(s), envelope(s)]
}

pub fn format_report(lines: &[CheckLine]) -> String {
    let mut out = String::new();
    for l in lines {
        let verdict = if l.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict} {}: measured {:e}, threshold {:e}", l.name, l.measured, l.threshold);
    }
    out
}
