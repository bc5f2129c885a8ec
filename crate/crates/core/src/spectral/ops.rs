//! Differential operators on [`SpectralField`]s under the convention
//! `u(x) = sum_k u_hat(k) exp(2 pi i k.x)`, so `d/dx_j -> 2 pi i k_j`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use super::transform::Transform;
use crate::error::FieldError;

const TWO_PI: f64 = 2.0 * PI;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Applies `I - k k^T / |k|^2` to one mode, in place.
#[inline]
fn project_mode(k1: f64, k2: f64, a: &mut Complex64, b: &mut Complex64) {
    let k2n = k1 * k1 + k2 * k2;
    let dot = (*a * k1 + *b * k2) / k2n;
    *a -= dot * k1;
    *b -= dot * k2;
}

fn project_in_place(grid: &GridSpec, u1: &mut [Complex64], u2: &mut [Complex64]) {
    for (i, (k1, k2)) in grid.modes().enumerate() {
        if k1 == 0 && k2 == 0 {
            u1[i] = ZERO;
            u2[i] = ZERO;
        } else {
            project_mode(k1 as f64, k2 as f64, &mut u1[i], &mut u2[i]);
        }
    }
}

/// Leray projection onto divergence-free fields; the mean mode is zeroed.
pub fn leray_project(f: &SpectralField) -> Result<SpectralField, FieldError> {
    f.require_vector()?;
    let mut out = f.clone();
    let grid = *out.grid();
    let (u1, u2) = out.split_vector_mut();
    project_in_place(&grid, u1, u2);
    Ok(out)
}

/// Divergence-free velocity with `curl u = omega`:
/// `u_hat(k) = -i k_perp omega_hat(k) / (2 pi |k|^2)`, `k_perp = (-k2, k1)`.
pub fn velocity_from_vorticity(omega: &SpectralField) -> Result<SpectralField, FieldError> {
    omega.require_scalar()?;
    let grid = *omega.grid();
    let mean = omega.mean_defect();
    if mean > 1e-12 * omega.norm().max(1.0) {
        return Err(FieldError::NonzeroMean(mean));
    }
    let mut u = SpectralField::zeros_vector(grid);
    let w = omega.component(0);
    let (u1, u2) = u.split_vector_mut();
    for (i, (k1, k2)) in grid.modes().enumerate() {
        if k1 == 0 && k2 == 0 {
            continue;
        }
        let k1 = k1 as f64;
        let k2 = k2 as f64;
        let s = w[i] / (TWO_PI * (k1 * k1 + k2 * k2));
        // -i * (-k2) s and -i * k1 s
        u1[i] = Complex64::new(0.0, k2) * s;
        u2[i] = Complex64::new(0.0, -k1) * s;
    }
    Ok(u)
}

/// `omega_hat(k) = 2 pi i (k1 u2_hat - k2 u1_hat)`.
pub fn vorticity_from_velocity(u: &SpectralField) -> Result<SpectralField, FieldError> {
    u.require_vector()?;
    let grid = *u.grid();
    let mut w = SpectralField::zeros_scalar(grid);
    let (u1, u2) = u.split_vector();
    let wc = w.component_mut(0);
    for (i, (k1, k2)) in grid.modes().enumerate() {
        let d = u2[i] * k1 as f64 - u1[i] * k2 as f64;
        wc[i] = Complex64::new(0.0, TWO_PI) * d;
    }
    Ok(w)
}

/// Energy `sum |u_hat|^2` and enstrophy `sum |omega_hat|^2` of a velocity field.
pub fn quadratic_norms(u: &SpectralField) -> Result<(f64, f64), FieldError> {
    u.require_vector()?;
    let (u1, u2) = u.split_vector();
    let mut energy = 0.0;
    let mut enstrophy = 0.0;
    for (i, (k1, k2)) in u.grid().modes().enumerate() {
        energy += u1[i].norm_sqr() + u2[i].norm_sqr();
        let d = u2[i] * k1 as f64 - u1[i] * k2 as f64;
        enstrophy += TWO_PI * TWO_PI * d.norm_sqr();
    }
    Ok((energy, enstrophy))
}

/// `sum_k (2 pi |k|)^(2p) |u_hat(k)|^2` over all components, i.e. `||grad^p u||^2`.
pub fn sobolev_seminorm_sq(f: &SpectralField, p: u32) -> f64 {
    let grid = *f.grid();
    let mut total = 0.0;
    for c in 0..f.components() {
        for ((k1, k2), z) in grid.modes().zip(f.component(c)) {
            let k2n = TWO_PI * TWO_PI * (k1 * k1 + k2 * k2) as f64;
            total += k2n.powi(p as i32) * z.norm_sqr();
        }
    }
    total
}

/// Dealiased advection: evaluates `-P(P_N(u . grad u))` on the padded grid.
///
/// Uses the divergence form `d_j(u_j u_i)`, which equals the advective form
/// for divergence-free `u`. In two dimensions the projected term is fixed by
/// its component along `k_perp = (-k2, k1)`, which only involves the products
/// `u2^2 - u1^2` and `u1 u2`, so one forward transform pair suffices. With
/// `n_phys > 3N` every retained mode of the products is exact, so the term is
/// energy- and enstrophy-neutral at the Galerkin level.
pub struct Advection {
    transform: Transform,
    u1: Vec<f64>,
    u2: Vec<f64>,
    diff: Vec<f64>,
    prod: Vec<f64>,
    diff_hat: Vec<Complex64>,
    prod_hat: Vec<Complex64>,
    // per mode: 2 pi k1 k2 / |k|^2, 2 pi (k1^2 - k2^2) / |k|^2, k1, k2 (zero at k = 0)
    weights: Vec<[f64; 4]>,
}

impl std::fmt::Debug for Advection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Advection").field("grid", self.transform.grid()).finish()
    }
}

impl Advection {
    pub fn new(grid: GridSpec) -> Self {
        let m = grid.n_phys() * grid.n_phys();
        let n = grid.len();
        let weights = grid
            .modes()
            .map(|(k1, k2)| {
                if k1 == 0 && k2 == 0 {
                    return [0.0; 4];
                }
                let (k1, k2) = (k1 as f64, k2 as f64);
                let k_sq = k1 * k1 + k2 * k2;
                [TWO_PI * k1 * k2 / k_sq, TWO_PI * (k1 * k1 - k2 * k2) / k_sq, k1, k2]
            })
            .collect();
        Self {
            weights,
            transform: Transform::new(grid),
            u1: vec![0.0; m],
            u2: vec![0.0; m],
            diff: vec![0.0; m],
            prod: vec![0.0; m],
            diff_hat: vec![ZERO; n],
            prod_hat: vec![ZERO; n],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.transform.grid()
    }

    pub fn transform_mut(&mut self) -> &mut Transform {
        &mut self.transform
    }

    fn velocity_to_grid(&mut self, u: &SpectralField) {
        let (a, b) = u.split_vector();
        self.transform.to_physical_pair(a, b, &mut self.u1, &mut self.u2);
    }

    /// `max_x |u(x)|` over the padded grid.
    pub fn max_speed(&mut self, u: &SpectralField) -> f64 {
        self.velocity_to_grid(u);
        self.u1.iter().zip(&self.u2).map(|(a, b)| (a * a + b * b).sqrt()).fold(0.0, f64::max)
    }

    /// Writes `-P(P_N(u . grad u))` into `out`.
    pub fn tendency_into(&mut self, u: &SpectralField, out: &mut SpectralField) {
        debug_assert_eq!(u.grid(), self.grid());
        self.velocity_to_grid(u);
        for (((d, p), &a), &b) in self.diff.iter_mut().zip(&mut self.prod).zip(&self.u1).zip(&self.u2) {
            *d = b * b - a * a;
            *p = a * b;
        }
        self.transform.to_spectral_pair(&self.diff, &self.prod, &mut self.diff_hat, &mut self.prod_hat);
        let (o1, o2) = out.split_vector_mut();
        for (i, &[a, b, k1, k2]) in self.weights.iter().enumerate() {
            // k_perp . (2 pi i k_j (u_j u)^) / |k|^2 = 2 pi i (k1 k2 diff + (k1^2 - k2^2) prod) / |k|^2
            let z = self.diff_hat[i] * a + self.prod_hat[i] * b;
            let c = Complex64::new(-z.im, z.re);
            o1[i] = c * k2;
            o2[i] = -c * k1;
        }
    }

    pub fn tendency(&mut self, u: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros_vector(*u.grid());
        self.tendency_into(u, &mut out);
        out
    }
}

/// Convenience wrapper allocating a one-shot [`Advection`] workspace.
pub fn nonlinear_term(u: &SpectralField) -> Result<SpectralField, FieldError> {
    u.require_vector()?;
    Ok(Advection::new(*u.grid()).tendency(u))
}
