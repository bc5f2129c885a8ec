use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::FieldError;

/// Fourier coefficients of a real, periodic scalar (1 component) or vector
/// (2 components) field on the unit torus, with
/// `u(x) = sum_k u_hat(k) exp(2 pi i k.x)` over `|k|_inf <= N`.
///
/// Storage is dense over the square lattice, component-major then row-major
/// over `k1`, then `k2`. Reality `u_hat(-k) = conj(u_hat(k))` is an invariant
/// of every constructor in this crate, not a storage optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        assert!(components == 1 || components == 2, "fields have 1 or 2 components");
        Self { grid, components, coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()] }
    }

    pub fn zeros_scalar(grid: GridSpec) -> Self {
        Self::zeros(grid, 1)
    }

    pub fn zeros_vector(grid: GridSpec) -> Self {
        Self::zeros(grid, 2)
    }

    pub fn from_coeffs(grid: GridSpec, components: usize, coeffs: Vec<Complex64>) -> Result<Self, FieldError> {
        if components != 1 && components != 2 {
            return Err(FieldError::Components { expected: 2, found: components });
        }
        if coeffs.len() != components * grid.len() {
            return Err(FieldError::Snapshot(format!(
                "expected {} coefficients, got {}",
                components * grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, components, coeffs })
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        self.grid.n_modes()
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_vector(&self) -> bool {
        self.components == 2
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    /// Both components of a vector field.
    pub fn split_vector(&self) -> (&[Complex64], &[Complex64]) {
        debug_assert!(self.is_vector());
        self.coeffs.split_at(self.grid.len())
    }

    pub fn split_vector_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        debug_assert!(self.is_vector());
        let n = self.grid.len();
        self.coeffs.split_at_mut(n)
    }

    pub fn get(&self, c: usize, k1: i64, k2: i64) -> Complex64 {
        self.component(c)[self.grid.index(k1, k2)]
    }

    /// Sets mode `k` of component `c` to `value` and mode `-k` to its conjugate.
    pub fn set_pair(&mut self, c: usize, k1: i64, k2: i64, value: Complex64) {
        let i = self.grid.index(k1, k2);
        let j = self.grid.conjugate_index(i);
        let comp = self.component_mut(c);
        comp[i] = value;
        comp[j] = value.conj();
        if i == j {
            comp[i] = Complex64::new(value.re, 0.0);
        }
    }

    /// `sum_k |u_hat(k)|^2` over all components, i.e. the squared L2 norm.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// L2 distance to a field on the same grid.
    pub fn distance(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.coeffs {
            *z *= s;
        }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &SpectralField) {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * alpha;
        }
    }

    /// `a * x + b * y`.
    pub fn lincomb(a: f64, x: &SpectralField, b: f64, y: &SpectralField) -> SpectralField {
        assert_eq!(x.coeffs.len(), y.coeffs.len());
        let coeffs = x.coeffs.iter().zip(&y.coeffs).map(|(p, q)| p * a + q * b).collect();
        SpectralField { grid: x.grid, components: x.components, coeffs }
    }

    /// `self = a * x + b * self`.
    pub fn lincomb_assign(&mut self, a: f64, x: &SpectralField, b: f64) {
        assert_eq!(self.coeffs.len(), x.coeffs.len());
        for (q, p) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *q = p * a + *q * b;
        }
    }

    /// Largest `|u_hat(-k) - conj(u_hat(k))|`.
    pub fn reality_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let comp = self.component(c);
            for i in 0..n {
                let j = n - 1 - i;
                worst = worst.max((comp[j] - comp[i].conj()).norm_sqr());
            }
        }
        worst.sqrt()
    }

    /// Largest `|u_hat(0)|` over components.
    pub fn mean_defect(&self) -> f64 {
        let zero = self.grid.index(0, 0);
        (0..self.components).map(|c| self.component(c)[zero].norm()).fold(0.0, f64::max)
    }

    /// Largest `|k.u_hat(k)| / |k|` for a vector field.
    pub fn divergence_defect(&self) -> f64 {
        assert!(self.is_vector());
        let (u1, u2) = self.split_vector();
        let mut worst = 0.0f64;
        for (i, (k1, k2)) in self.grid.modes().enumerate() {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let d = (u1[i] * k1 as f64 + u2[i] * k2 as f64).norm_sqr() / (k1 * k1 + k2 * k2) as f64;
            worst = worst.max(d);
        }
        worst.sqrt()
    }

    /// Projects onto real fields with zero mean: `u_hat(k) <- (u_hat(k) + conj(u_hat(-k))) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.grid.len();
        let zero = self.grid.index(0, 0);
        for c in 0..self.components {
            let comp = self.component_mut(c);
            for i in 0..n / 2 {
                let j = n - 1 - i;
                let avg = (comp[i] + comp[j].conj()) * 0.5;
                comp[i] = avg;
                comp[j] = avg.conj();
            }
            comp[zero] = Complex64::new(0.0, 0.0);
        }
    }

    /// Point evaluation by direct summation; O(modes) per point.
    pub fn eval(&self, c: usize, x1: f64, x2: f64) -> f64 {
        let comp = self.component(c);
        self.grid
            .modes()
            .zip(comp)
            .map(|((k1, k2), z)| {
                let phase = 2.0 * PI * (k1 as f64 * x1 + k2 as f64 * x2);
                z.re * phase.cos() - z.im * phase.sin()
            })
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn require_vector(&self) -> Result<(), FieldError> {
        if self.components != 2 {
            return Err(FieldError::Components { expected: 2, found: self.components });
        }
        Ok(())
    }

    pub fn require_scalar(&self) -> Result<(), FieldError> {
        if self.components != 1 {
            return Err(FieldError::Components { expected: 1, found: self.components });
        }
        Ok(())
    }
}

/// Structural checks shared by the solver and the tests.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantDefects {
    pub reality: f64,
    pub mean: f64,
    pub divergence: f64,
}

impl InvariantDefects {
    /// Defects of `f`, each relative to `||f||` (absolute for the zero field).
    pub fn of(f: &SpectralField) -> Self {
        let scale = f.norm().max(f64::MIN_POSITIVE);
        let divergence = if f.is_vector() { f.divergence_defect() } else { 0.0 };
        let rel = |d: f64| if d == 0.0 { 0.0 } else { d / scale };
        Self { reality: rel(f.reality_defect()), mean: rel(f.mean_defect()), divergence: rel(divergence) }
    }

    pub fn max(&self) -> f64 {
        self.reality.max(self.mean).max(self.divergence)
    }

    pub fn worst(self, other: Self) -> Self {
        Self {
            reality: self.reality.max(other.reality),
            mean: self.mean.max(other.mean),
            divergence: self.divergence.max(other.divergence),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_pair_keeps_reality() {
        let g = GridSpec::new(4).unwrap();
        let mut f = SpectralField::zeros_vector(g);
        f.set_pair(0, 1, -3, Complex64::new(0.3, -0.7));
        f.set_pair(1, 2, 2, Complex64::new(-1.0, 0.5));
        assert_eq!(f.reality_defect(), 0.0);
        assert!((f.norm_sq() - 2.0 * (0.58 + 1.25)).abs() < 1e-14);
    }

    #[test]
    fn eval_matches_sine() {
        let g = GridSpec::new(3).unwrap();
        let mut f = SpectralField::zeros_scalar(g);
        // sin(2 pi x1) = (e^{i} - e^{-i}) / 2i
        f.set_pair(0, 1, 0, Complex64::new(0.0, -0.5));
        for &x in &[0.1, 0.25, 0.7] {
            assert!((f.eval(0, x, 0.3) - (2.0 * PI * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetrize_projects_to_real() {
        let g = GridSpec::new(3).unwrap();
        let mut f = SpectralField::zeros_scalar(g);
        for (i, z) in f.coeffs_mut().iter_mut().enumerate() {
            *z = Complex64::new(i as f64, (i * i) as f64 * 0.1);
        }
        f.symmetrize();
        assert!(f.reality_defect() < 1e-15);
        assert_eq!(f.mean_defect(), 0.0);
    }
}
