//! Structure functions, energy spectra, best-decay constants and
//! extrapolation of the relative energy dissipation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::DiagnosticsError;
use crate::spectral::SpectralField;

const TWO_PI: f64 = 2.0 * PI;
const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Points of the default r-grid.
pub const DEFAULT_R_POINTS: usize = 200;

/// Bessel function of the first kind, order one.
pub fn j1(x: f64) -> f64 {
    if x < 0.0 {
        return -j1(-x);
    }
    if x <= 12.0 {
        j1_series(x)
    } else {
        j1_asymptotic(x)
    }
}

fn j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h;
    let mut sum = term;
    for m in 1..100 {
        term *= -h * h / (m * (m + 1)) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel expansion, summed until the terms stop decreasing.
fn j1_asymptotic(x: f64) -> f64 {
    let mu = 4.0;
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for j in 1..60 {
        let odd = (2 * j - 1) as f64;
        term *= (mu - odd * odd) / (j as f64 * z);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        // j odd feeds Q with sign (+, -, ...), j even feeds P with sign (-, +, ...)
        match j % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `I(x) = 2 - 4 J1(x) / x`, the exact ball-average kernel.
pub fn kernel_exact(x: f64) -> f64 {
    let x = x.abs();
    if x <= 2.0 {
        // 2 - 4 J1(x)/x = -2 sum_{m >= 1} (-1)^m (x/2)^(2m) / (m! (m+1)!)
        let h2 = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for m in 1..40 {
            term *= -h2 / (m * (m + 1)) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        -2.0 * sum
    } else {
        2.0 - 4.0 * j1(x) / x
    }
}

/// `min(x / 2, sqrt 2)^2`.
pub fn kernel_numerical(x: f64) -> f64 {
    let m = (0.5 * x.abs()).min(SQRT2);
    m * m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Exact,
    Numerical,
}

impl KernelKind {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Exact => kernel_exact(x),
            Self::Numerical => kernel_numerical(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Numerical => "numerical",
        }
    }
}

/// Increment radii, strictly increasing in `(0, 1/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RGrid {
    values: Vec<f64>,
}

impl RGrid {
    pub fn new(values: Vec<f64>) -> Result<Self, DiagnosticsError> {
        if values.is_empty() {
            return Err(DiagnosticsError::RGrid("no radii".into()));
        }
        if values.iter().any(|&r| !(r > 0.0 && r <= 0.5)) {
            return Err(DiagnosticsError::RGrid("radii must lie in (0, 1/2]".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DiagnosticsError::RGrid("radii must be strictly increasing".into()));
        }
        Ok(Self { values })
    }

    /// `points` logarithmically spaced radii from `lo` to `hi` inclusive.
    pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Result<Self, DiagnosticsError> {
        if points < 2 || !(lo > 0.0 && lo < hi) {
            return Err(DiagnosticsError::RGrid(format!("bad log grid [{lo}, {hi}] with {points} points")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let mut values: Vec<f64> =
            (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect();
        values[0] = lo;
        values[points - 1] = hi;
        Self::new(values)
    }

    /// Default grid `[1/(4N), 1/2]`.
    pub fn for_resolution(n_modes: usize) -> Self {
        Self::log_spaced(0.25 / n_modes as f64, 0.5, DEFAULT_R_POINTS).expect("valid default grid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    pub r: RGrid,
    pub s2: Vec<f64>,
    pub kernel: KernelKind,
}

impl StructureTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,s2\n");
        for (r, s) in self.r.values().iter().zip(&self.s2) {
            writeln!(out, "{r},{s}").unwrap();
        }
        out
    }
}

/// Total `sum |u_hat(k)|^2` over components, grouped by `|k|^2`.
fn shell_masses(u: &SpectralField) -> Vec<(f64, f64)> {
    let grid = *u.grid();
    let mut masses: BTreeMap<i64, f64> = BTreeMap::new();
    for c in 0..u.components() {
        for ((k1, k2), z) in grid.modes().zip(u.component(c)) {
            let m = z.norm_sqr();
            if m > 0.0 {
                *masses.entry(k1 * k1 + k2 * k2).or_insert(0.0) += m;
            }
        }
    }
    masses.into_iter().map(|(k2, m)| ((k2 as f64).sqrt(), m)).collect()
}

/// Squared structure function `sum_k kernel(2 pi |k| r) |u_hat(k)|^2` per radius.
pub fn structure_squares(u: &SpectralField, r_grid: &RGrid, kernel: KernelKind) -> Vec<f64> {
    let masses = shell_masses(u);
    r_grid
        .values()
        .iter()
        .map(|&r| masses.iter().map(|&(k, m)| kernel.eval(TWO_PI * k * r) * m).sum())
        .collect()
}

/// `S(r) = (sum_k kernel(2 pi |k| r) |u_hat(k)|^2)^(1/2)`.
pub fn structure_function(u: &SpectralField, r_grid: &RGrid, kernel: KernelKind) -> StructureTable {
    let s2 = structure_squares(u, r_grid, kernel).into_iter().map(f64::sqrt).collect();
    StructureTable { r: r_grid.clone(), s2, kernel }
}

/// Statistical structure function: root of the member mean of squares.
pub fn ensemble_structure_function(
    members: &[&SpectralField],
    r_grid: &RGrid,
    kernel: KernelKind,
) -> Result<StructureTable, DiagnosticsError> {
    if members.is_empty() {
        return Err(DiagnosticsError::Empty);
    }
    let mut acc = vec![0.0; r_grid.len()];
    for u in members {
        for (a, s) in acc.iter_mut().zip(structure_squares(u, r_grid, kernel)) {
            *a += s;
        }
    }
    let m = members.len() as f64;
    let s2 = acc.into_iter().map(|a| (a / m).sqrt()).collect();
    Ok(StructureTable { r: r_grid.clone(), s2, kernel })
}

/// Shell energies `E(K) = 1/2 sum_{|k|_inf = K} |u_hat(k)|^2`, `K = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub e: Vec<f64>,
}

impl SpectrumTable {
    pub fn n_shells(&self) -> usize {
        self.e.len()
    }

    pub fn total(&self) -> f64 {
        self.e.iter().sum()
    }

    pub fn to_csv(&self, lambda: f64) -> String {
        let mut out = String::from("K,E,compensated\n");
        for (k, e) in self.e.iter().enumerate() {
            writeln!(out, "{k},{e},{}", (k as f64).powf(lambda) * e).unwrap();
        }
        out
    }
}

pub fn energy_spectrum(u: &SpectralField) -> SpectrumTable {
    let grid = *u.grid();
    let mut e = vec![0.0; grid.n_modes() + 1];
    for c in 0..u.components() {
        for ((k1, k2), z) in grid.modes().zip(u.component(c)) {
            e[k1.unsigned_abs().max(k2.unsigned_abs()) as usize] += 0.5 * z.norm_sqr();
        }
    }
    SpectrumTable { e }
}

/// Member average of [`energy_spectrum`].
pub fn ensemble_energy_spectrum(members: &[&SpectralField]) -> Result<SpectrumTable, DiagnosticsError> {
    let first = members.first().ok_or(DiagnosticsError::Empty)?;
    let mut e = vec![0.0; first.n_modes() + 1];
    for u in members {
        for (a, b) in e.iter_mut().zip(energy_spectrum(u).e) {
            *a += b;
        }
    }
    let m = members.len() as f64;
    e.iter_mut().for_each(|x| *x /= m);
    Ok(SpectrumTable { e })
}

/// `max_r r^(-alpha) s2(r)` over the table's grid.
pub fn c_max(table: &StructureTable, alpha: f64) -> f64 {
    table.r.values().iter().zip(&table.s2).map(|(r, s)| s * r.powf(-alpha)).fold(0.0, f64::max)
}

/// `max_{K >= 1} K^lambda E(K)`.
pub fn d_max(spectrum: &SpectrumTable, lambda: f64) -> f64 {
    spectrum.e.iter().enumerate().skip(1).map(|(k, e)| (k as f64).powf(lambda) * e).fold(0.0, f64::max)
}

/// Value at `delta = 0` of the quadratic through three `(delta, value)` points.
pub fn richardson_extrapolate(points: &[(f64, f64)]) -> Result<f64, DiagnosticsError> {
    if points.len() != 3 {
        return Err(DiagnosticsError::PointCount(points.len()));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if points[i].0 == points[j].0 {
                return Err(DiagnosticsError::DuplicateDelta(points[i].0));
            }
        }
    }
    // Lagrange form evaluated at zero
    let mut total = 0.0;
    for (i, &(di, vi)) in points.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(dj, _)) in points.iter().enumerate() {
            if i != j {
                w *= dj / (dj - di);
            }
        }
        total += w * vi;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeDissipation {
    pub t: f64,
    /// `(E(t) - E0) / E0`.
    pub value: f64,
    /// Monte-Carlo error of the mean energy, relative to `E0`.
    pub mc_error: f64,
}

/// `(E(t) - E0) / E0` for rows `(t, mean energy, mc error)`.
pub fn relative_energy_dissipation(
    series: &[(f64, f64, f64)],
    e0_ref: f64,
) -> Result<Vec<RelativeDissipation>, DiagnosticsError> {
    if !(e0_ref > 0.0) {
        return Err(DiagnosticsError::NonpositiveReference(e0_ref));
    }
    Ok(series
        .iter()
        .map(|&(t, e, err)| RelativeDissipation { t, value: (e - e0_ref) / e0_ref, mc_error: err / e0_ref })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_divergence_free, sobolev_seminorm_sq, GridSpec};
    use num_complex::Complex64;

    /// `J1(x) = (1/pi) int_0^pi cos(t - x sin t) dt`, trapezoid on a periodic integrand.
    fn j1_integral(x: f64) -> f64 {
        let n = 4096;
        let h = PI / n as f64;
        let f = |t: f64| (t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h / PI
    }

    #[test]
    fn j1_matches_integral_oracle() {
        for &x in &[0.0, 1e-3, 0.5, 1.0, 3.8317, 7.0, 11.9, 12.1, 20.0, 55.5, 300.0] {
            assert!((j1(x) - j1_integral(x)).abs() < 1e-10, "x = {x}: {} vs {}", j1(x), j1_integral(x));
        }
        assert!((j1(1.0) - 0.4400505857).abs() < 1e-10);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_exact(0.0), 0.0);
        assert!((kernel_exact(1.0) - (2.0 - 4.0 * 0.4400505857449335)).abs() < 1e-12);
        assert!((kernel_exact(1.0) - 0.239798).abs() < 1e-6);
        assert!((kernel_exact(1e4) - 2.0).abs() < 1e-5);
        assert!((kernel_exact(1e-4) - 0.25e-8).abs() < 2e-18);
        assert_eq!(kernel_numerical(0.0), 0.0);
        assert_eq!(kernel_numerical(2.0), 1.0);
        assert!((kernel_numerical(2.0 * SQRT2) - 2.0).abs() < 1e-15);
        assert!((kernel_numerical(50.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_kernel_is_continuous_across_branches() {
        let below = kernel_exact(2.0 - 1e-12);
        let above = kernel_exact(2.0 + 1e-12);
        assert!((below - above).abs() < 1e-10);
        let below = kernel_exact(12.0 - 1e-12);
        let above = kernel_exact(12.0 + 1e-12);
        assert!((below - above).abs() < 1e-9);
        for i in 0..2000 {
            let x = i as f64 * 0.05;
            let v = kernel_exact(x);
            // the first Bessel overshoot peaks near x = 5.14 at about 2.2648
            assert!((0.0..=2.265).contains(&v), "x = {x}: {v}");
        }
    }

    #[test]
    fn rgrid_rules() {
        let g = RGrid::for_resolution(64);
        assert_eq!(g.len(), DEFAULT_R_POINTS);
        assert_eq!(g.values()[0], 1.0 / 256.0);
        assert_eq!(*g.values().last().unwrap(), 0.5);
        assert!(RGrid::new(vec![0.1, 0.1]).is_err());
        assert!(RGrid::new(vec![0.6]).is_err());
        assert!(RGrid::new(vec![]).is_err());
    }

    #[test]
    fn zero_field_diagnostics() {
        let u = SpectralField::zeros_vector(GridSpec::new(4).unwrap());
        let g = RGrid::for_resolution(4);
        let t = structure_function(&u, &g, KernelKind::Exact);
        assert!(t.s2.iter().all(|&s| s == 0.0));
        assert_eq!(c_max(&t, 0.5), 0.0);
        let e = energy_spectrum(&u);
        assert!(e.e.iter().all(|&x| x == 0.0));
        assert_eq!(d_max(&e, 2.0), 0.0);
    }

    #[test]
    fn single_mode_structure_function() {
        let g = GridSpec::new(8).unwrap();
        let mut u = SpectralField::zeros_vector(g);
        // |k| = 5, A^2 = 2 * 0.25
        u.set_pair(0, 3, 4, Complex64::new(0.3, 0.4));
        let a = u.norm();
        let grid = RGrid::log_spaced(1e-3, 0.5, 40).unwrap();
        let t = structure_function(&u, &grid, KernelKind::Numerical);
        for (r, s) in grid.values().iter().zip(&t.s2) {
            let expect = a * (TWO_PI * 5.0 * r / 2.0).min(SQRT2);
            assert!((s - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn c_max_single_mode_closed_form() {
        // hand-built table for kappa = 8, A = 1 with the kernel argument kappa r
        let grid = RGrid::for_resolution(128);
        let s2 = grid.values().iter().map(|r| (8.0 * r / 2.0).min(SQRT2)).collect();
        let table = StructureTable { r: grid.clone(), s2, kernel: KernelKind::Numerical };
        let exact = SQRT2 * (8.0 / (2.0 * SQRT2)).sqrt();
        assert!((exact - 2.37841).abs() < 1e-5);
        let got = c_max(&table, 0.5);
        assert!(got <= exact * (1.0 + 1e-12) && got >= 0.99 * exact, "{got} vs {exact}");
        // dense search confirms the argmax
        let dense = RGrid::log_spaced(1e-3, 0.5, 200_000).unwrap();
        let (rbest, _) = dense
            .values()
            .iter()
            .map(|&r| (r, (8.0 * r / 2.0).min(SQRT2) / r.sqrt()))
            .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((rbest - 2.0 * SQRT2 / 8.0).abs() < 1e-4);
    }

    #[test]
    fn homogeneity() {
        let g = GridSpec::new(8).unwrap();
        let u = random_divergence_free(g, 8, 1.0, 3);
        let mut v = u.clone();
        v.scale(-3.0);
        let grid = RGrid::for_resolution(8);
        let c1 = c_max(&structure_function(&u, &grid, KernelKind::Numerical), 0.5);
        let c3 = c_max(&structure_function(&v, &grid, KernelKind::Numerical), 0.5);
        assert!((c3 - 3.0 * c1).abs() < 1e-12 * c3);
        let d1 = d_max(&energy_spectrum(&u), 2.0);
        let d3 = d_max(&energy_spectrum(&v), 2.0);
        assert!((d3 - 9.0 * d1).abs() < 1e-12 * d3);
    }

    #[test]
    fn spectrum_examples() {
        let g = GridSpec::new(5).unwrap();
        let mut u = SpectralField::zeros_vector(g);
        u.set_pair(0, 3, 0, Complex64::new(1.0, 0.0));
        let e = energy_spectrum(&u);
        assert_eq!(e.e[3], 1.0);
        assert_eq!(e.total(), 1.0);
        let v = random_divergence_free(g, 5, 0.5, 9);
        assert!((energy_spectrum(&v).total() - 0.5 * v.norm_sq()).abs() < 1e-12 * v.norm_sq());
        assert_eq!(d_max(&SpectrumTable { e: vec![0.0, 0.0, 0.0, 0.0, 0.0, 2.0] }, 2.0), 50.0);
        let lambda = 1.7;
        let pure = SpectrumTable { e: (0..20).map(|k| if k == 0 { 0.0 } else { (k as f64).powf(-lambda) }).collect() };
        assert!((d_max(&pure, lambda) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_structure_is_rms_of_members() {
        let g = GridSpec::new(6).unwrap();
        let a = random_divergence_free(g, 6, 1.0, 1);
        let b = random_divergence_free(g, 6, 1.0, 2);
        let grid = RGrid::for_resolution(6);
        let ta = structure_function(&a, &grid, KernelKind::Exact);
        let tb = structure_function(&b, &grid, KernelKind::Exact);
        let tab = ensemble_structure_function(&[&a, &b], &grid, KernelKind::Exact).unwrap();
        for i in 0..grid.len() {
            let expect = 0.5 * (ta.s2[i].powi(2) + tb.s2[i].powi(2));
            assert!((tab.s2[i].powi(2) - expect).abs() < 1e-14 * expect.max(1e-300));
        }
        assert!(ensemble_structure_function(&[], &grid, KernelKind::Exact).is_err());
    }

    #[test]
    fn numerical_structure_is_monotone_and_capped() {
        let g = GridSpec::new(10).unwrap();
        let u = random_divergence_free(g, 10, 0.0, 4);
        let grid = RGrid::for_resolution(10);
        let t = structure_function(&u, &grid, KernelKind::Numerical);
        assert!(t.s2.windows(2).all(|w| w[0] <= w[1]));
        assert!(*t.s2.last().unwrap() <= SQRT2 * u.norm() * (1.0 + 1e-14));
    }

    #[test]
    fn small_r_branch_is_linear() {
        let n = 10;
        let g = GridSpec::new(n).unwrap();
        let u = random_divergence_free(g, n, 1.0, 5);
        let grad = sobolev_seminorm_sq(&u, 1).sqrt();
        // below 2 sqrt 2 / (2 pi sqrt 2 N) every mode sits on the linear branch
        let r_top = 2.0 * SQRT2 / (TWO_PI * SQRT2 * n as f64 * 1.0001);
        let grid = RGrid::log_spaced(r_top / 100.0, r_top, 10).unwrap();
        let t = structure_function(&u, &grid, KernelKind::Numerical);
        for (r, s) in grid.values().iter().zip(&t.s2) {
            assert!((s - grad * r / 2.0).abs() <= 1e-12 * s);
        }
    }

    #[test]
    fn richardson_examples() {
        let quad = |d: f64| 1.0 + 2.0 * d + 3.0 * d * d;
        let ds = [1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0];
        let pts: Vec<_> = ds.iter().map(|&d| (d, quad(d))).collect();
        assert!((richardson_extrapolate(&pts).unwrap() - 1.0).abs() < 1e-13);
        let c: Vec<_> = ds.iter().map(|&d| (d, 4.25)).collect();
        assert!((richardson_extrapolate(&c).unwrap() - 4.25).abs() < 1e-13);
        let cubic: Vec<_> = ds.iter().map(|&d| (d, 1.0 + d * d * d)).collect();
        assert!((richardson_extrapolate(&cubic).unwrap() - 1.0).abs() <= 2.0 * (1.0f64 / 256.0).powi(3));
        assert!(matches!(
            richardson_extrapolate(&[(0.1, 1.0), (0.1, 2.0), (0.2, 3.0)]),
            Err(DiagnosticsError::DuplicateDelta(_))
        ));
        assert!(matches!(richardson_extrapolate(&pts[..2]), Err(DiagnosticsError::PointCount(2))));
    }

    #[test]
    fn relative_dissipation_examples() {
        let rows = relative_energy_dissipation(&[(0.0, 2.0, 0.0), (1.0, 1.0, 0.1)], 2.0).unwrap();
        assert_eq!(rows[0].value, 0.0);
        assert_eq!(rows[1].value, -0.5);
        assert_eq!(rows[1].mc_error, 0.05);
        assert!(relative_energy_dissipation(&[], 0.0).is_err());
    }
}
