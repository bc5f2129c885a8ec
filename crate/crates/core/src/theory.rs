//! Executable checks of the structure-function identities and of the
//! sub-linear envelope construction.

use std::f64::consts::PI;

use crate::diagnostics::{structure_function, KernelKind, RGrid};
use crate::error::TheoryError;
use crate::spectral::{sobolev_seminorm_sq, SpectralField, Transform};

const TWO_PI: f64 = 2.0 * PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-type initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Polar quadrature for the average over the disc of radius `r`: Gauss in
/// the radius, trapezoid in the angle, about `n_quad` nodes in total.
/// Returns `(h1, h2, weight)` with weights summing to one.
pub fn disc_average_rule(r: f64, n_quad: usize) -> Vec<(f64, f64, f64)> {
    let n_r = ((n_quad as f64 / 4.0).sqrt().floor() as usize).max(2);
    let n_t = (n_quad / n_r).max(4);
    let (xs, ws) = gauss_legendre(n_r);
    let area = PI * r * r;
    let mut rule = Vec::with_capacity(n_r * n_t);
    for (x, w) in xs.iter().zip(&ws) {
        let rho = 0.5 * r * (x + 1.0);
        let wr = 0.5 * r * w * rho * TWO_PI / n_t as f64 / area;
        for j in 0..n_t {
            let th = TWO_PI * (j as f64 + 0.5) / n_t as f64;
            rule.push((rho * th.cos(), rho * th.sin(), wr));
        }
    }
    rule
}

/// Both sides of `int_D avg_{B_r} |h . grad u(x)|^2 dh dx = r^2/4 ||grad u||^2`.
/// The left side is a tensor quadrature: disc rule times the physical grid.
pub fn hgrad_identity_check(u: &SpectralField, r: f64, n_quad: usize) -> (f64, f64) {
    let grid = *u.grid();
    let rhs = 0.25 * r * r * sobolev_seminorm_sq(u, 1);
    let m = grid.n_phys();
    let mut transform = Transform::new(grid);
    // d1 u_c and d2 u_c on the grid
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for c in 0..u.components() {
        let src = u.component(c);
        let d1: Vec<_> = grid.modes().zip(src).map(|((k1, _), z)| z * num_complex::Complex64::new(0.0, TWO_PI * k1 as f64)).collect();
        let d2: Vec<_> = grid.modes().zip(src).map(|((_, k2), z)| z * num_complex::Complex64::new(0.0, TWO_PI * k2 as f64)).collect();
        let mut a = vec![0.0; m * m];
        let mut b = vec![0.0; m * m];
        transform.to_physical_pair(&d1, &d2, &mut a, &mut b);
        grads.push((a, b));
    }
    let mut lhs = 0.0;
    for (h1, h2, w) in disc_average_rule(r, n_quad) {
        let mut s = 0.0;
        for (a, b) in &grads {
            for (x, y) in a.iter().zip(b) {
                let d = h1 * x + h2 * y;
                s += d * d;
            }
        }
        lhs += w * s;
    }
    (lhs / (m * m) as f64, rhs)
}

/// `S2(u; r) + (r^2/2) ||grad^2 u|| - (r/2) ||grad u||`, nonnegative by the
/// first-order Taylor split of the increments.
pub fn interpolation_inequality_check(u: &SpectralField, r: f64) -> f64 {
    let grid = RGrid::new(vec![r.min(0.5)]).expect("radius in (0, 1/2]");
    let s2 = structure_function(u, &grid, KernelKind::Exact).s2[0];
    s2 + 0.5 * r * r * sobolev_seminorm_sq(u, 2).sqrt() - 0.5 * r * sobolev_seminorm_sq(u, 1).sqrt()
}

/// Piecewise-linear function through knots `q_k` at `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFunction {
    knots: Vec<f64>,
}

impl EnvelopeFunction {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn k_max(&self) -> usize {
        self.knots.len() - 1
    }

    /// Slope on `(k, k + 1)`.
    pub fn slope(&self, k: usize) -> f64 {
        self.knots[k + 1] - self.knots[k]
    }
}

/// Knots `q_0 = qbar_0`, `q_k = max(qbar_k, q_{k-1} / (1 + 1/k))` with
/// `qbar_k = 1/(k+1) + sups[k]`, where `sups[k] = sup_{z >= max(k-1, 0)} q(z)`.
pub fn sublinear_envelope(sups: &[f64]) -> Result<EnvelopeFunction, TheoryError> {
    if sups.len() < 2 {
        return Err(TheoryError::TooShort);
    }
    for (k, s) in sups.iter().enumerate() {
        if !(*s >= 0.0 && s.is_finite()) || (k > 0 && *s > sups[k - 1]) {
            return Err(TheoryError::NonMonotone(k));
        }
    }
    let mut knots = Vec::with_capacity(sups.len());
    for (k, s) in sups.iter().enumerate() {
        let bar = 1.0 / (k + 1) as f64 + s;
        let q = if k == 0 { bar } else { bar.max(knots[k - 1] / (1.0 + 1.0 / k as f64)) };
        knots.push(q);
    }
    Ok(EnvelopeFunction { knots })
}

/// `q_k + (z - k)(q_{k+1} - q_k)` on `[k, k + 1]`.
pub fn envelope_eval(env: &EnvelopeFunction, z: f64) -> Result<f64, TheoryError> {
    let k_max = env.k_max();
    if !(0.0..=k_max as f64).contains(&z) {
        return Err(TheoryError::OutOfRange { z, k_max });
    }
    let k = (z.floor() as usize).min(k_max - 1);
    Ok(env.knots[k] + (z - k as f64) * env.slope(k))
}

/// Outcome of each envelope property on one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// Linear on every integer interval (midpoints interpolate the knots).
    pub piecewise_linear: bool,
    /// `Q >= q` on `[k, k + 1]`, using `sup_{z >= k} q` as the bound for `q`.
    pub dominates: bool,
    pub positive: bool,
    pub nonincreasing: bool,
    /// `Q(k_max) < Q(0) / 10`; only meaningful for long envelopes of vanishing `q`.
    pub decays: bool,
    /// `z Q'(z) + Q(z) >= 0` on each open interval, i.e. `(k+2) q_{k+1} >= (k+1) q_k`.
    pub sublinear: bool,
    /// Smallest `(k+2) q_{k+1} - (k+1) q_k`.
    pub sublinear_margin: f64,
}

impl EnvelopeReport {
    pub fn all_hold(&self) -> bool {
        self.piecewise_linear && self.dominates && self.positive && self.nonincreasing && self.sublinear
    }
}

pub fn check_envelope(env: &EnvelopeFunction, sups: &[f64]) -> EnvelopeReport {
    let q = env.knots();
    let k_max = env.k_max();
    let piecewise_linear = (0..k_max).all(|k| {
        let mid = envelope_eval(env, k as f64 + 0.5).unwrap();
        (mid - 0.5 * (q[k] + q[k + 1])).abs() <= 1e-15 * q[k].abs().max(1.0)
    });
    let dominates = (0..k_max).all(|k| {
        let bound = sups.get(k + 1).copied().unwrap_or(sups[k_max]);
        q[k].min(q[k + 1]) >= bound
    });
    let positive = q.iter().all(|&v| v > 0.0);
    let nonincreasing = q.windows(2).all(|w| w[1] <= w[0]);
    let decays = q[k_max] < 0.1 * q[0];
    let sublinear_margin =
        (0..k_max).map(|k| (k + 2) as f64 * q[k + 1] - (k + 1) as f64 * q[k]).fold(f64::INFINITY, f64::min);
    let sublinear = sublinear_margin >= -1e-14 * q[0];
    EnvelopeReport { piecewise_linear, dominates, positive, nonincreasing, decays, sublinear, sublinear_margin }
}
