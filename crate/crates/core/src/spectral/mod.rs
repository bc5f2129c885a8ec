//! Fourier-space fields on the unit torus, transforms and operators.

mod field;
mod grid;
pub mod ops;
pub mod snapshot;
mod transform;

pub use field::{InvariantDefects, SpectralField};
pub use grid::{padded_size, GridSpec};
pub use ops::{
    leray_project, nonlinear_term, quadratic_norms, sobolev_seminorm_sq, velocity_from_vorticity,
    vorticity_from_velocity, Advection,
};
pub use transform::Transform;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Real, mean-free random field with `components` components, supported on
/// `|k|_inf <= band` with amplitudes `|k|^(-decay) * U(-1, 1)` per real and
/// imaginary part.
pub fn random_field(grid: GridSpec, components: usize, band: usize, decay: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, components);
    let band = band.min(grid.n_modes()) as i64;
    for c in 0..components {
        for k1 in -band..=band {
            for k2 in -band..=band {
                if (k1, k2) <= (0, 0) {
                    continue;
                }
                let amp = ((k1 * k1 + k2 * k2) as f64).powf(-0.5 * decay);
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = rng.random_range(-1.0..1.0);
                f.set_pair(c, k1, k2, Complex64::new(re, im) * amp);
            }
        }
    }
    f
}

/// Leray projection of a [`random_field`] vector field.
pub fn random_divergence_free(grid: GridSpec, band: usize, decay: f64, seed: u64) -> SpectralField {
    leray_project(&random_field(grid, 2, band, decay, seed)).expect("vector field")
}
