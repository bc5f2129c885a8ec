//! Initial conditions: mollified vortex sheets, random vertical perturbations
//! of a sheet, and fractional-Brownian-motion velocity fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::error::InitialDataError;
use crate::spectral::{leray_project, velocity_from_vorticity, GridSpec, SpectralField};

const TWO_PI: f64 = 2.0 * PI;
/// Amplitude of the sheet curve `x2 = 0.2 sin(2 pi K x1)`.
pub const SHEET_AMPLITUDE: f64 = 0.2;
/// Largest tolerated quadrature tail coefficient.
pub const QUADRATURE_TAIL: f64 = 1e-10;

/// Tensor cubic B-spline mollifier with smoothing length `rho_N = rho / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierSpec {
    pub rho: f64,
}

impl MollifierSpec {
    pub fn new(rho: f64) -> Result<Self, InitialDataError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(InitialDataError::Spec(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { rho })
    }

    pub fn length(&self, n_modes: usize) -> f64 {
        self.rho / n_modes as f64
    }
}

/// Random vertical shift `sigma(x1) = sum_{k=1}^q alpha_k sin(2 pi k x1 - beta_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub q: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<(), InitialDataError> {
        if self.q == 0 {
            return Err(InitialDataError::Spec("q must be at least 1".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(InitialDataError::Spec(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        Ok(())
    }

    /// `(alpha_k, beta_k)` for `k = 1..=q`, drawn as `U[0, alpha]`, `U[0, 2 pi)`.
    pub fn draws(&self) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.q)
            .map(|_| {
                let a = if self.alpha > 0.0 { rng.random_range(0.0..=self.alpha) } else { 0.0 };
                let b = rng.random_range(0.0..TWO_PI);
                (a, b)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmSpec {
    pub hurst: f64,
    pub n_modes: usize,
    pub seed: u64,
}

impl FbmSpec {
    pub fn validate(&self) -> Result<(), InitialDataError> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(InitialDataError::Spec(format!("Hurst index must lie in (0, 1), got {}", self.hurst)));
        }
        if self.n_modes == 0 {
            return Err(InitialDataError::Spec("n_modes must be at least 1".into()));
        }
        Ok(())
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `sinc(pi k1 rho)^4 sinc(pi k2 rho)^4`, the Fourier transform of the tensor
/// cubic B-spline of width `4 rho`.
pub fn bspline_mollifier_hat(k1: i64, k2: i64, rho: f64) -> f64 {
    let a = sinc(PI * k1 as f64 * rho);
    let b = sinc(PI * k2 as f64 * rho);
    (a * a) * (a * a) * (b * b) * (b * b)
}

/// Multiplies every mode of `f` by the mollifier with smoothing length `rho`.
pub fn mollify(f: &mut SpectralField, rho: f64) {
    let grid = *f.grid();
    let weights: Vec<f64> = grid.modes().map(|(k1, k2)| bspline_mollifier_hat(k1, k2, rho)).collect();
    for c in 0..f.components() {
        for (z, w) in f.component_mut(c).iter_mut().zip(&weights) {
            *z *= *w;
        }
    }
}

/// Quadrature nodes for the line integral over `x2 = 0.2 sin(2 pi K x1)`.
///
/// The integrand for row `k2` has bandwidth about `K (2 pi 0.2 |k2| + O(1))`
/// in `x1`; `16 N` nodes suffice for `K = 1`.
pub fn sheet_nodes(n_modes: usize, wavenumber: usize) -> usize {
    let factor = ((TWO_PI * SHEET_AMPLITUDE * wavenumber as f64 + 1.0) / 4.0).ceil().max(1.0) as usize;
    16 * n_modes * factor
}

/// Mollified vorticity of a sheet on `x2 = 0.2 sin(2 pi K x1)` with density
/// `strength(x1)` per unit `x1`, mean removed.
fn sheet_vorticity(
    n_modes: usize,
    rho: f64,
    wavenumber: usize,
    strength: impl Fn(f64) -> f64,
) -> Result<SpectralField, InitialDataError> {
    let grid = GridSpec::new(n_modes).map_err(|e| InitialDataError::Spec(e.to_string()))?;
    let mollifier = MollifierSpec::new(rho)?;
    let nq = sheet_nodes(n_modes, wavenumber);
    let fft = FftPlanner::new().plan_fft_forward(nq);
    let mut buf = vec![Complex64::new(0.0, 0.0); nq];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let xs: Vec<f64> = (0..nq).map(|j| j as f64 / nq as f64).collect();
    let weights: Vec<f64> = xs.iter().map(|&x| strength(x) / nq as f64).collect();
    let curve: Vec<f64> = xs.iter().map(|&x| SHEET_AMPLITUDE * (TWO_PI * wavenumber as f64 * x).sin()).collect();

    let n = n_modes as i64;
    let mut omega = SpectralField::zeros_scalar(grid);
    let tail_band = nq / 16;
    for k2 in 0..=n {
        for j in 0..nq {
            buf[j] = Complex64::from_polar(weights[j], -TWO_PI * k2 as f64 * curve[j]);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        let tail = (nq / 2 - tail_band..=nq / 2 + tail_band).map(|m| buf[m].norm()).fold(0.0, f64::max);
        if !(tail <= QUADRATURE_TAIL) {
            return Err(InitialDataError::QuadratureUnresolved { nodes: nq, tail });
        }
        for k1 in -n..=n {
            if (k1, k2) <= (0, 0) {
                continue;
            }
            let value = buf[k1.rem_euclid(nq as i64) as usize];
            omega.set_pair(0, k1, k2, value);
        }
    }
    mollify(&mut omega, mollifier.length(n_modes));
    Ok(omega)
}

/// Vorticity of the mollified sheet on `x2 = 0.2 sin(2 pi x1)`, uniform in `x1`.
pub fn sinusoidal_sheet_vorticity(n_modes: usize, rho: f64) -> Result<SpectralField, InitialDataError> {
    check_sheet_resolution(n_modes)?;
    sheet_vorticity(n_modes, rho, 1, |_| 1.0)
}

/// Vorticity of the mollified sheet on `x2 = 0.2 sin(2 pi K x1)` with strength `sin(2 pi K x1)`.
pub fn unsigned_sheet_vorticity(n_modes: usize, rho: f64, wavenumber: usize) -> Result<SpectralField, InitialDataError> {
    check_sheet_resolution(n_modes)?;
    if wavenumber == 0 {
        return Err(InitialDataError::Spec("sheet wavenumber K must be at least 1".into()));
    }
    let kk = wavenumber as f64;
    sheet_vorticity(n_modes, rho, wavenumber, |x| (TWO_PI * kk * x).sin())
}

fn check_sheet_resolution(n_modes: usize) -> Result<(), InitialDataError> {
    if n_modes < 8 {
        return Err(InitialDataError::Spec(format!("vortex sheets need N >= 8, got {n_modes}")));
    }
    Ok(())
}

pub fn sinusoidal_vortex_sheet(n_modes: usize, rho: f64) -> Result<SpectralField, InitialDataError> {
    let omega = sinusoidal_sheet_vorticity(n_modes, rho)?;
    Ok(velocity_from_vorticity(&omega).expect("mean-free scalar"))
}

pub fn unsigned_vortex_sheet(n_modes: usize, rho: f64, wavenumber: usize) -> Result<SpectralField, InitialDataError> {
    let omega = unsigned_sheet_vorticity(n_modes, rho, wavenumber)?;
    Ok(velocity_from_vorticity(&omega).expect("mean-free scalar"))
}

/// `u(x1, x2 + sigma(x1))` evaluated exactly per column on `nodes`
/// equispaced `x1` points, truncated to `|k1| <= N`, symmetrized and
/// Leray-projected.
pub fn vertical_shift(u: &SpectralField, sigma: impl Fn(f64) -> f64, nodes: usize) -> SpectralField {
    let grid = *u.grid();
    let n = grid.n_modes() as i64;
    let nodes = nodes.max(2 * grid.n_modes() + 1);
    let mut planner = FftPlanner::new();
    let inv = planner.plan_fft_inverse(nodes);
    let fwd = planner.plan_fft_forward(nodes);
    let mut scratch =
        vec![Complex64::new(0.0, 0.0); inv.get_inplace_scratch_len().max(fwd.get_inplace_scratch_len())];
    let shifts: Vec<f64> = (0..nodes).map(|j| sigma(j as f64 / nodes as f64)).collect();
    let mut row = vec![Complex64::new(0.0, 0.0); nodes];
    let mut out = SpectralField::zeros(grid, u.components());
    for c in 0..u.components() {
        let src = u.component(c);
        for k2 in -n..=n {
            row.fill(Complex64::new(0.0, 0.0));
            for k1 in -n..=n {
                row[k1.rem_euclid(nodes as i64) as usize] = src[grid.index(k1, k2)];
            }
            inv.process_with_scratch(&mut row, &mut scratch);
            for (v, s) in row.iter_mut().zip(&shifts) {
                *v *= Complex64::from_polar(1.0 / nodes as f64, TWO_PI * k2 as f64 * s);
            }
            fwd.process_with_scratch(&mut row, &mut scratch);
            let dst = out.component_mut(c);
            for k1 in -n..=n {
                dst[grid.index(k1, k2)] = row[k1.rem_euclid(nodes as i64) as usize];
            }
        }
    }
    out.symmetrize();
    if out.is_vector() {
        leray_project(&out).expect("vector field")
    } else {
        out
    }
}

/// Shifts `u` vertically by a random `sigma` drawn from `spec`.
pub fn random_vertical_shift(u: &SpectralField, spec: &PerturbationSpec) -> Result<SpectralField, InitialDataError> {
    spec.validate()?;
    let draws = spec.draws();
    let n = u.n_modes();
    // Carson-type bound on the x1-bandwidth of exp(2 pi i k2 sigma(x1))
    let swing: f64 = draws.iter().enumerate().map(|(i, (a, _))| (i + 1) as f64 * a).sum();
    let band = (TWO_PI * n as f64 * swing).ceil() as usize + spec.q + 16;
    let nodes = (2 * (n + band)).next_power_of_two();
    let sigma = |x: f64| draws.iter().enumerate().map(|(i, (a, b))| a * (TWO_PI * (i + 1) as f64 * x - b).sin()).sum();
    Ok(vertical_shift(u, sigma, nodes))
}

/// Coefficients of one scalar fBM-type field
/// `W = sum_k |k|^(-(H+1)) (a_cc cc + a_cs cs + a_sc sc + a_ss ss)` with
/// `a ~ U(-1, 1)` i.i.d. and `cs = cos(2 pi k1 x1) sin(2 pi k2 x2)` etc.
fn fbm_scalar(grid: GridSpec, hurst: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let n = grid.n_modes() as i64;
    let mut w = SpectralField::zeros_scalar(grid);
    let quarter = 0.25;
    for k1 in -n..=n {
        for k2 in -n..=n {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let amp = ((k1 * k1 + k2 * k2) as f64).powf(-0.5 * (hurst + 1.0));
            let cc: f64 = rng.random_range(-1.0..1.0);
            let cs: f64 = rng.random_range(-1.0..1.0);
            let sc: f64 = rng.random_range(-1.0..1.0);
            let ss: f64 = rng.random_range(-1.0..1.0);
            let comp = w.component_mut(0);
            for s1 in [-1i64, 1] {
                for s2 in [-1i64, 1] {
                    let (f1, f2) = (s1 as f64, s2 as f64);
                    // cos = (e + e*) / 2, sin = (e - e*) / 2i
                    let re = quarter * (cc - f1 * f2 * ss);
                    let im = -quarter * (f2 * cs + f1 * sc);
                    comp[grid.index(s1 * k1, s2 * k2)] += Complex64::new(re, im) * amp;
                }
            }
        }
    }
    w
}

/// Leray projection of two independent fBM-type scalar fields.
pub fn fbm_field(spec: &FbmSpec) -> Result<SpectralField, InitialDataError> {
    spec.validate()?;
    let grid = GridSpec::new(spec.n_modes).map_err(|e| InitialDataError::Spec(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let w1 = fbm_scalar(grid, spec.hurst, &mut rng);
    let w2 = fbm_scalar(grid, spec.hurst, &mut rng);
    let mut coeffs = w1.into_coeffs();
    coeffs.extend(w2.into_coeffs());
    let mut w = SpectralField::from_coeffs(grid, 2, coeffs).expect("two components");
    w.symmetrize();
    Ok(leray_project(&w).expect("vector field"))
}

/// Named initial measures with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialPreset {
    DetSinusoidal { rho: f64 },
    PerturbedSinusoidal { rho: f64, q: usize, alpha: f64 },
    UnsignedSheet { rho: f64, wavenumber: usize, q: usize, alpha: f64 },
    Fbm { hurst: f64 },
}

impl InitialPreset {
    pub const NAMES: [&'static str; 4] = ["det-sinusoidal", "perturbed-sinusoidal", "unsigned-sheet", "fbm"];

    /// The preset called `name` with its default parameters.
    pub fn from_name(name: &str) -> Result<Self, InitialDataError> {
        match name {
            "det-sinusoidal" => Ok(Self::DetSinusoidal { rho: 10.0 }),
            "perturbed-sinusoidal" => Ok(Self::PerturbedSinusoidal { rho: 5.0, q: 10, alpha: 1.0 / 320.0 }),
            "unsigned-sheet" => Ok(Self::UnsignedSheet { rho: 5.0, wavenumber: 10, q: 10, alpha: 0.025 }),
            "fbm" => Ok(Self::Fbm { hurst: 0.5 }),
            other => Err(InitialDataError::UnknownPreset(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::DetSinusoidal { .. } => "det-sinusoidal",
            Self::PerturbedSinusoidal { .. } => "perturbed-sinusoidal",
            Self::UnsignedSheet { .. } => "unsigned-sheet",
            Self::Fbm { .. } => "fbm",
        }
    }

    /// Whether the initial measure is a single Dirac mass.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::DetSinusoidal { .. })
    }

    pub fn validate(&self) -> Result<(), InitialDataError> {
        match *self {
            Self::DetSinusoidal { rho } => MollifierSpec::new(rho).map(|_| ()),
            Self::PerturbedSinusoidal { rho, q, alpha } => {
                MollifierSpec::new(rho)?;
                PerturbationSpec { q, alpha, seed: 0 }.validate()
            }
            Self::UnsignedSheet { rho, wavenumber, q, alpha } => {
                MollifierSpec::new(rho)?;
                if wavenumber == 0 {
                    return Err(InitialDataError::Spec("sheet wavenumber K must be at least 1".into()));
                }
                PerturbationSpec { q, alpha, seed: 0 }.validate()
            }
            Self::Fbm { hurst } => FbmSpec { hurst, n_modes: 1, seed: 0 }.validate(),
        }
    }
}

/// Draws initial fields for one preset at one resolution, computing any
/// shared deterministic base field once.
#[derive(Debug, Clone)]
pub struct InitialSampler {
    preset: InitialPreset,
    n_modes: usize,
    base: Option<SpectralField>,
}

impl InitialSampler {
    pub fn new(preset: InitialPreset, n_modes: usize) -> Result<Self, InitialDataError> {
        preset.validate()?;
        let base = match preset {
            InitialPreset::DetSinusoidal { rho } | InitialPreset::PerturbedSinusoidal { rho, .. } => {
                Some(sinusoidal_vortex_sheet(n_modes, rho)?)
            }
            InitialPreset::UnsignedSheet { rho, wavenumber, .. } => Some(unsigned_vortex_sheet(n_modes, rho, wavenumber)?),
            InitialPreset::Fbm { .. } => {
                if n_modes == 0 {
                    return Err(InitialDataError::Spec("n_modes must be at least 1".into()));
                }
                None
            }
        };
        Ok(Self { preset, n_modes, base })
    }

    pub fn preset(&self) -> &InitialPreset {
        &self.preset
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// The field drawn with `seed`; deterministic presets ignore it.
    pub fn sample(&self, seed: u64) -> Result<SpectralField, InitialDataError> {
        match (self.preset, &self.base) {
            (InitialPreset::DetSinusoidal { .. }, Some(base)) => Ok(base.clone()),
            (InitialPreset::PerturbedSinusoidal { q, alpha, .. }, Some(base))
            | (InitialPreset::UnsignedSheet { q, alpha, .. }, Some(base)) => {
                random_vertical_shift(base, &PerturbationSpec { q, alpha, seed })
            }
            (InitialPreset::Fbm { hurst }, _) => fbm_field(&FbmSpec { hurst, n_modes: self.n_modes, seed }),
            _ => unreachable!("sheet presets always carry a base field"),
        }
    }
}
