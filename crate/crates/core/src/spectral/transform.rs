use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// FFT workspace mapping between truncated mode arrays and the padded
/// `n_phys x n_phys` physical grid.
///
/// Physical arrays are row-major `[i1 * n_phys + i2]` at `x = (i1, i2) / n_phys`.
/// Both directions are pruned: only the `2N + 1` nonzero lattice rows are
/// transformed along the first axis. Two real fields travel through one
/// complex transform (`a + i b`).
pub struct Transform {
    grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    full: Vec<Complex64>,
    rows: Vec<Complex64>,
    scratch: Vec<Complex64>,
    // position of each retained mode, and of its negative, in `rows`
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).finish()
    }
}

impl Transform {
    pub fn new(grid: GridSpec) -> Self {
        let m = grid.n_phys();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let n = grid.n_modes() as i64;
        let at = |k1: i64, k2: i64| (k2 + n) as usize * m + Self::wrap(k1, m);
        let pos = grid.modes().map(|(k1, k2)| at(k1, k2)).collect();
        let neg = grid.modes().map(|(k1, k2)| at(-k1, -k2)).collect();
        Self {
            grid,
            fwd,
            inv,
            full: vec![ZERO; m * m],
            rows: vec![ZERO; grid.side() * m],
            scratch: vec![ZERO; scratch_len],
            pos,
            neg,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Wrapped position of signed wavenumber `k` on an axis of length `m`.
    #[inline]
    fn wrap(k: i64, m: usize) -> usize {
        k.rem_euclid(m as i64) as usize
    }

    /// Zeroes the columns `N + 1 .. m - N` of every length-`m` row, the
    /// positions no retained wavenumber maps to.
    fn clear_gap(buf: &mut [Complex64], m: usize, n: usize) {
        for row in buf.chunks_exact_mut(m) {
            row[n + 1..m - n].fill(ZERO);
        }
    }

    /// Mixed representation `[k2 row][i1]`: inverse transform along `k1` only.
    fn fill_mixed(&mut self, z: impl Fn(usize) -> Complex64) {
        let m = self.grid.n_phys();
        Self::clear_gap(&mut self.rows, m, self.grid.n_modes());
        for (idx, &p) in self.pos.iter().enumerate() {
            self.rows[p] = z(idx);
        }
        self.inv.process_with_scratch(&mut self.rows, &mut self.scratch);
    }

    /// Completes an inverse transform from the mixed rows into `full`.
    fn mixed_to_full(&mut self) {
        let m = self.grid.n_phys();
        let n = self.grid.n_modes() as i64;
        Self::clear_gap(&mut self.full, m, self.grid.n_modes());
        for r in 0..self.grid.side() {
            let col = Self::wrap(r as i64 - n, m);
            let row = &self.rows[r * m..(r + 1) * m];
            for (i1, v) in row.iter().enumerate() {
                self.full[i1 * m + col] = *v;
            }
        }
        self.inv.process_with_scratch(&mut self.full, &mut self.scratch);
    }

    /// Forward transform of `full` into the retained mode rows `[k2 row][k1 wrapped]`,
    /// unnormalized.
    fn full_to_rows(&mut self) {
        let m = self.grid.n_phys();
        let n = self.grid.n_modes() as i64;
        self.fwd.process_with_scratch(&mut self.full, &mut self.scratch);
        for r in 0..self.grid.side() {
            let col = Self::wrap(r as i64 - n, m);
            for i1 in 0..m {
                self.rows[r * m + i1] = self.full[i1 * m + col];
            }
        }
        self.fwd.process_with_scratch(&mut self.rows, &mut self.scratch);
    }

    /// Physical values of two real fields given their coefficients.
    pub fn to_physical_pair(&mut self, a: &[Complex64], b: &[Complex64], out_a: &mut [f64], out_b: &mut [f64]) {
        let i = Complex64::new(0.0, 1.0);
        self.fill_mixed(|idx| a[idx] + i * b[idx]);
        self.mixed_to_full();
        for ((v, pa), pb) in self.full.iter().zip(out_a.iter_mut()).zip(out_b.iter_mut()) {
            *pa = v.re;
            *pb = v.im;
        }
    }

    pub fn to_physical(&mut self, a: &[Complex64], out: &mut [f64]) {
        self.fill_mixed(|idx| a[idx]);
        self.mixed_to_full();
        for (v, p) in self.full.iter().zip(out.iter_mut()) {
            *p = v.re;
        }
    }

    /// Truncated coefficients of two real physical fields. The split through
    /// `Z(k) +- conj(Z(-k))` makes both outputs exactly Hermitian.
    pub fn to_spectral_pair(&mut self, a: &[f64], b: &[f64], out_a: &mut [Complex64], out_b: &mut [Complex64]) {
        for ((v, pa), pb) in self.full.iter_mut().zip(a).zip(b) {
            *v = Complex64::new(*pa, *pb);
        }
        self.full_to_rows();
        self.split_rows(out_a, Some(out_b));
    }

    pub fn to_spectral(&mut self, a: &[f64], out: &mut [Complex64]) {
        for (v, pa) in self.full.iter_mut().zip(a) {
            *v = Complex64::new(*pa, 0.0);
        }
        self.full_to_rows();
        self.split_rows(out, None);
    }

    fn split_rows(&self, out_a: &mut [Complex64], mut out_b: Option<&mut [Complex64]>) {
        let m = self.grid.n_phys();
        let norm = 1.0 / (m * m) as f64;
        let zero = self.grid.index(0, 0);
        for (idx, (&p, &q)) in self.pos.iter().zip(&self.neg).enumerate() {
            let z = self.rows[p] * norm;
            let zc = self.rows[q].conj() * norm;
            out_a[idx] = (z + zc) * 0.5;
            if let Some(b) = out_b.as_deref_mut() {
                // (z - zc) / 2i
                let d = (z - zc) * 0.5;
                b[idx] = Complex64::new(d.im, -d.re);
            }
        }
        out_a[zero] = Complex64::new(out_a[zero].re, 0.0);
        if let Some(b) = out_b {
            b[zero] = Complex64::new(b[zero].re, 0.0);
        }
    }

    /// Mixed representation of one component: returns `[k2 row][i1]` with
    /// `row k2 = sum_k1 u_hat(k1, k2) exp(2 pi i k1 i1 / n_phys)`.
    pub fn to_mixed(&mut self, a: &[Complex64]) -> Vec<Complex64> {
        self.fill_mixed(|idx| a[idx]);
        self.rows.clone()
    }

    /// Inverse of [`Transform::to_mixed`] followed by truncation to `|k1| <= N`.
    /// The result is not symmetrized.
    pub fn from_mixed(&mut self, mixed: &[Complex64], out: &mut [Complex64]) {
        let m = self.grid.n_phys();
        self.rows.copy_from_slice(mixed);
        self.fwd.process_with_scratch(&mut self.rows, &mut self.scratch);
        let norm = 1.0 / m as f64;
        for (o, &p) in out.iter_mut().zip(&self.pos) {
            *o = self.rows[p] * norm;
        }
    }
}
