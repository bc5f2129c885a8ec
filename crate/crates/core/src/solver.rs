//! Time integration of the spectral vanishing viscosity scheme
//!
//! `d/dt u_hat(k) = -P(P_N(u . grad u))^(k) - eps_N (2 pi |k|)^2 Q_k u_hat(k)`
//!
//! with `eps_N = eps / N`, advanced by explicit three-stage SSP Runge-Kutta.

use std::f64::consts::PI;

use crate::error::SolverError;
use crate::spectral::{quadratic_norms, sobolev_seminorm_sq, Advection, GridSpec, InvariantDefects, SpectralField};

const TWO_PI: f64 = 2.0 * PI;
/// Relative one-step energy growth treated as blow-up.
pub const INSTABILITY_GROWTH: f64 = 1e-6;
/// Relative one-step energy growth counted as a monotonicity violation.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierMode {
    /// `Q_k = 1 - m_N / |k|^2` for `|k| >= m_N`, else 0, with `m_N = ceil(sqrt(N))`.
    SpectralViscosity,
    /// `m_N = 0`, `Q = I`: plain Laplacian diffusion.
    NavierStokesLike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n_modes: usize,
    pub eps: f64,
    pub multiplier: MultiplierMode,
    pub t_final: f64,
    pub cfl: f64,
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn new(n_modes: usize, eps: f64, multiplier: MultiplierMode, t_final: f64) -> Self {
        Self { n_modes, eps, multiplier, t_final, cfl: 0.5, snapshot_times: vec![0.0, t_final] }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    /// Every violated invariant, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.n_modes == 0 {
            v.push("n_modes must be at least 1".to_string());
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            v.push(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            v.push(format!("t_final must be positive, got {}", self.t_final));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            v.push(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if self.snapshot_times.iter().any(|&t| !(0.0..=self.t_final).contains(&t)) {
            v.push(format!("snapshot times must lie in [0, {}]", self.t_final));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
            v.push("snapshot times must be strictly increasing".to_string());
        }
        v
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SolverError::Config(v.join("; ")))
        }
    }

    /// `eps_N = eps / N`.
    pub fn eps_n(&self) -> f64 {
        self.eps / self.n_modes as f64
    }

    /// `m_N`: `ceil(sqrt(N))` for spectral viscosity, 0 for Navier-Stokes-like diffusion.
    pub fn cutoff(&self) -> usize {
        match self.multiplier {
            MultiplierMode::SpectralViscosity => (self.n_modes as f64).sqrt().ceil() as usize,
            MultiplierMode::NavierStokesLike => 0,
        }
    }

    pub fn grid(&self) -> Result<GridSpec, SolverError> {
        GridSpec::new(self.n_modes).map_err(|e| SolverError::Config(e.to_string()))
    }
}

/// Fourier multiplier `Q_k` for a nonzero mode.
pub fn q_multiplier(k1: i64, k2: i64, config: &SolverConfig) -> f64 {
    match config.multiplier {
        MultiplierMode::NavierStokesLike => 1.0,
        MultiplierMode::SpectralViscosity => {
            let m = config.cutoff() as f64;
            let k2n = (k1 * k1 + k2 * k2) as f64;
            if k2n.sqrt() >= m {
                1.0 - m / k2n
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSample {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    /// `||grad omega||^2`.
    pub palinstrophy: f64,
    /// `||sqrt(Q) omega||^2`.
    pub q_enstrophy: f64,
    /// `2 eps_N int_0^t ||sqrt(Q) omega||^2 ds`, by the corrected trapezoid rule.
    pub dissipation_integral: f64,
}

/// Worst structural defects seen along a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantLog {
    pub steps: usize,
    pub worst: InvariantDefects,
    pub energy_increases: usize,
    pub max_energy_growth: f64,
}

impl InvariantLog {
    pub fn clean(&self, tol: f64) -> bool {
        self.worst.max() <= tol && self.energy_increases == 0
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            steps: self.steps + other.steps,
            worst: self.worst.worst(other.worst),
            energy_increases: self.energy_increases + other.energy_increases,
            max_energy_growth: self.max_energy_growth.max(other.max_energy_growth),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub dt: f64,
    pub snapshots: Vec<(f64, SpectralField)>,
    pub series: Vec<ScalarSample>,
    pub invariants: InvariantLog,
}

impl Trajectory {
    pub fn snapshot_at(&self, t: f64) -> Option<&SpectralField> {
        self.snapshots.iter().find(|(s, _)| (s - t).abs() <= 1e-12 * t.abs().max(1.0)).map(|(_, f)| f)
    }

    pub fn final_sample(&self) -> &ScalarSample {
        self.series.last().expect("trajectory has at least the initial sample")
    }

    /// Largest per-step excess of the discrete enstrophy change over
    /// `h * avg(-2 eps_N ||grad omega||^2 + 8 eps_N (2 pi m_N)^2 ||omega||^2)`,
    /// relative to the enstrophy at the start of the step.
    pub fn enstrophy_budget_excess(&self) -> f64 {
        let eps_n = self.config.eps_n();
        let m = TWO_PI * self.config.cutoff() as f64;
        let bound = |s: &ScalarSample| -2.0 * eps_n * s.palinstrophy + 8.0 * eps_n * m * m * s.enstrophy;
        self.series
            .windows(2)
            .map(|w| {
                let h = w[1].t - w[0].t;
                let lhs = w[1].enstrophy - w[0].enstrophy;
                let rhs = 0.5 * h * (bound(&w[0]) + bound(&w[1]));
                (lhs - rhs) / w[0].enstrophy.max(f64::MIN_POSITIVE)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Right-hand side and integrator for one resolution. Owns its FFT workspace.
#[derive(Debug)]
pub struct SvOperator {
    config: SolverConfig,
    advection: Advection,
    /// `eps_N (2 pi |k|)^2 Q_k` per mode.
    damping: Vec<f64>,
    /// `(2 pi |k|)^2 Q_k` per mode.
    q_weight: Vec<f64>,
    // reusable stage buffers for the Runge-Kutta step
    scratch: Option<(SpectralField, SpectralField)>,
}

impl SvOperator {
    pub fn new(config: &SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let grid = config.grid()?;
        let eps_n = config.eps_n();
        let q_weight: Vec<f64> = grid
            .modes()
            .map(|(k1, k2)| {
                if k1 == 0 && k2 == 0 {
                    0.0
                } else {
                    TWO_PI * TWO_PI * (k1 * k1 + k2 * k2) as f64 * q_multiplier(k1, k2, config)
                }
            })
            .collect();
        let damping = q_weight.iter().map(|w| eps_n * w).collect();
        Ok(Self { config: config.clone(), advection: Advection::new(grid), damping, q_weight, scratch: None })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn check_grid(&self, u: &SpectralField) -> Result<(), SolverError> {
        if u.n_modes() != self.config.n_modes || !u.is_vector() {
            return Err(SolverError::ResolutionMismatch { field: u.n_modes(), config: self.config.n_modes });
        }
        Ok(())
    }

    pub fn rhs_into(&mut self, u: &SpectralField, out: &mut SpectralField) {
        self.advection.tendency_into(u, out);
        let (u1, u2) = u.split_vector();
        let (o1, o2) = out.split_vector_mut();
        for (((o1, o2), (a, b)), d) in o1.iter_mut().zip(o2).zip(u1.iter().zip(u2)).zip(&self.damping) {
            *o1 -= a * d;
            *o2 -= b * d;
        }
    }

    pub fn rhs(&mut self, u: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros_vector(*u.grid());
        self.rhs_into(u, &mut out);
        out
    }

    /// `cfl * min(dx / max|u|, 1 / (2 eps_N (2 pi N)^2))`; the advective bound
    /// is dropped for `u = 0`.
    pub fn stable_dt(&mut self, u: &SpectralField) -> f64 {
        let c = &self.config;
        let k_max = TWO_PI * c.n_modes as f64;
        let diffusive = 1.0 / (2.0 * c.eps_n() * k_max * k_max);
        let speed = self.advection.max_speed(u);
        let advective = if speed > 0.0 { self.advection.grid().dx() / speed } else { f64::INFINITY };
        c.cfl * advective.min(diffusive)
    }

    /// `||sqrt(Q) omega||^2` for a divergence-free field.
    pub fn q_enstrophy(&self, u: &SpectralField) -> f64 {
        let (u1, u2) = u.split_vector();
        self.q_weight.iter().zip(u1).zip(u2).map(|((w, a), b)| w * (a.norm_sqr() + b.norm_sqr())).sum()
    }

    /// `d/dt ||sqrt(Q) omega||^2` along the tendency `rhs` at `u`.
    fn q_enstrophy_rate(&self, u: &SpectralField, rhs: &SpectralField) -> f64 {
        let (u1, u2) = u.split_vector();
        let (r1, r2) = rhs.split_vector();
        let mut total = 0.0;
        for i in 0..self.q_weight.len() {
            total += self.q_weight[i] * ((u1[i].conj() * r1[i]).re + (u2[i].conj() * r2[i]).re);
        }
        2.0 * total
    }

    /// One SSP-RK3 step without the energy guard.
    pub fn advance(&mut self, u: &SpectralField, dt: f64) -> SpectralField {
        let k0 = self.rhs(u);
        self.advance_from(u, &k0, dt)
    }

    /// SSP-RK3 step given the tendency `k0` at `u`.
    fn advance_from(&mut self, u: &SpectralField, k0: &SpectralField, dt: f64) -> SpectralField {
        let (mut k, mut stage) = self
            .scratch
            .take()
            .unwrap_or_else(|| (SpectralField::zeros_vector(*u.grid()), SpectralField::zeros_vector(*u.grid())));
        stage.clone_from(u);
        stage.add_scaled(dt, k0);

        self.rhs_into(&stage, &mut k);
        stage.add_scaled(dt, &k);
        stage.lincomb_assign(0.75, u, 0.25);

        self.rhs_into(&stage, &mut k);
        stage.add_scaled(dt, &k);
        let next = SpectralField::lincomb(1.0 / 3.0, u, 2.0 / 3.0, &stage);
        self.scratch = Some((k, stage));
        next
    }

    fn guard(u: &SpectralField, next: &SpectralField, t_next: f64) -> Result<(), SolverError> {
        if !next.is_finite() {
            return Err(SolverError::NonFinite(t_next));
        }
        let e0 = u.norm_sq();
        let e1 = next.norm_sq();
        if e0 > 0.0 && (e1 - e0) / e0 > INSTABILITY_GROWTH {
            return Err(SolverError::Instability { time: t_next, growth: (e1 - e0) / e0 });
        }
        Ok(())
    }

    /// One SSP-RK3 step; fails if the energy grows by more than [`INSTABILITY_GROWTH`].
    pub fn step(&mut self, u: &SpectralField, dt: f64, t: f64) -> Result<SpectralField, SolverError> {
        self.check_grid(u)?;
        let next = self.advance(u, dt);
        Self::guard(u, &next, t + dt)?;
        Ok(next)
    }

    /// Scalar sample and structural defects of `u` in one pass over the modes.
    fn measure(&self, t: f64, u: &SpectralField) -> (ScalarSample, InvariantDefects) {
        let (u1, u2) = u.split_vector();
        let (mut energy, mut enstrophy, mut palinstrophy, mut q_enstrophy) = (0.0, 0.0, 0.0, 0.0);
        let mut div_sq = 0.0f64;
        for (i, (k1, k2)) in u.grid().modes().enumerate() {
            let e = u1[i].norm_sqr() + u2[i].norm_sqr();
            let k_sq = (k1 * k1 + k2 * k2) as f64;
            energy += e;
            enstrophy += TWO_PI * TWO_PI * (u2[i] * k1 as f64 - u1[i] * k2 as f64).norm_sqr();
            palinstrophy += (TWO_PI * TWO_PI * k_sq).powi(2) * e;
            q_enstrophy += self.q_weight[i] * e;
            if k_sq > 0.0 {
                div_sq = div_sq.max((u1[i] * k1 as f64 + u2[i] * k2 as f64).norm_sqr() / k_sq);
            }
        }
        let scale = energy.sqrt().max(f64::MIN_POSITIVE);
        let rel = |d: f64| if d == 0.0 { 0.0 } else { d / scale };
        let defects = InvariantDefects {
            reality: rel(u.reality_defect()),
            mean: rel(u.mean_defect()),
            divergence: rel(div_sq.sqrt()),
        };
        (ScalarSample { t, energy, enstrophy, palinstrophy, q_enstrophy, dissipation_integral: 0.0 }, defects)
    }

    fn sample(&self, t: f64, u: &SpectralField, dissipation_integral: f64) -> ScalarSample {
        let (energy, enstrophy) = quadratic_norms(u).expect("vector field");
        ScalarSample {
            t,
            energy,
            enstrophy,
            palinstrophy: sobolev_seminorm_sq(u, 2),
            q_enstrophy: self.q_enstrophy(u),
            dissipation_integral,
        }
    }

    /// Integrates `initial` to `t_final` with fixed step at most `dt`, landing
    /// exactly on every snapshot time.
    pub fn run_with_dt(&mut self, initial: &SpectralField, dt: f64) -> Result<Trajectory, SolverError> {
        self.check_grid(initial)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::Config(format!("time step must be positive, got {dt}")));
        }
        let config = self.config.clone();
        let eps_n = config.eps_n();
        let mut targets: Vec<f64> = config.snapshot_times.iter().copied().filter(|&t| t > 0.0).collect();
        if targets.last().is_none_or(|&t| t < config.t_final) {
            targets.push(config.t_final);
        }
        let wants = |t: f64| config.snapshot_times.iter().any(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0));

        let mut u = initial.clone();
        let mut k_cur = self.rhs(&u);
        let mut rate_dot = self.q_enstrophy_rate(&u, &k_cur);
        let mut t = 0.0;
        let mut snapshots = Vec::new();
        if wants(0.0) {
            snapshots.push((0.0, u.clone()));
        }
        let mut series = vec![self.sample(0.0, &u, 0.0)];
        let mut log = InvariantLog { worst: InvariantDefects::of(&u), ..Default::default() };
        for &target in &targets {
            let span = target - t;
            let n_steps = ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / n_steps as f64;
            let t0 = t;
            for s in 0..n_steps {
                let next = self.advance_from(&u, &k_cur, h);
                let t_next = if s + 1 == n_steps { target } else { t0 + (s + 1) as f64 * h };
                Self::guard(&u, &next, t_next)?;
                let k_next = self.rhs(&next);
                let next_dot = self.q_enstrophy_rate(&next, &k_next);
                let prev = *series.last().unwrap();
                let (mut sample, defects) = self.measure(t_next, &next);
                // trapezoid with endpoint-derivative correction
                let hh = t_next - t;
                let quad = 0.5 * hh * (prev.q_enstrophy + sample.q_enstrophy) + hh * hh / 12.0 * (rate_dot - next_dot);
                sample.dissipation_integral = prev.dissipation_integral + 2.0 * eps_n * quad;
                log.steps += 1;
                log.worst = log.worst.worst(defects);
                if prev.energy > 0.0 {
                    let growth = (sample.energy - prev.energy) / prev.energy;
                    log.max_energy_growth = log.max_energy_growth.max(growth);
                    if growth > MONOTONE_TOLERANCE {
                        log.energy_increases += 1;
                    }
                }
                series.push(sample);
                u = next;
                k_cur = k_next;
                rate_dot = next_dot;
                t = t_next;
            }
            if wants(target) {
                snapshots.push((target, u.clone()));
            }
        }
        Ok(Trajectory { config, dt, snapshots, series, invariants: log })
    }

    pub fn run(&mut self, initial: &SpectralField) -> Result<Trajectory, SolverError> {
        self.check_grid(initial)?;
        let dt = self.stable_dt(initial);
        self.run_with_dt(initial, dt)
    }
}

/// Tendency of the scheme at `u`.
pub fn sv_rhs(u: &SpectralField, config: &SolverConfig) -> Result<SpectralField, SolverError> {
    let mut op = SvOperator::new(config)?;
    op.check_grid(u)?;
    Ok(op.rhs(u))
}

pub fn stable_dt(u: &SpectralField, config: &SolverConfig) -> Result<f64, SolverError> {
    let mut op = SvOperator::new(config)?;
    op.check_grid(u)?;
    Ok(op.stable_dt(u))
}

pub fn step(u: &SpectralField, dt: f64, config: &SolverConfig) -> Result<SpectralField, SolverError> {
    SvOperator::new(config)?.step(u, dt, 0.0)
}

pub fn run(initial: &SpectralField, config: &SolverConfig) -> Result<Trajectory, SolverError> {
    SvOperator::new(config)?.run(initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_divergence_free;
    use num_complex::Complex64;

    fn shear(n: usize) -> SpectralField {
        let mut u = SpectralField::zeros_vector(GridSpec::new(n).unwrap());
        u.set_pair(0, 0, 1, Complex64::new(0.0, -0.5));
        u
    }

    fn sv(n: usize) -> SolverConfig {
        SolverConfig::new(n, 0.05, MultiplierMode::SpectralViscosity, 1.0)
    }

    fn ns(n: usize) -> SolverConfig {
        SolverConfig::new(n, 0.05, MultiplierMode::NavierStokesLike, 1.0)
    }

    #[test]
    fn multiplier_examples() {
        let mut c = sv(16);
        assert_eq!(c.cutoff(), 4);
        // |k|^2 = 16 with m_N = 4
        assert!((q_multiplier(4, 0, &c) - 0.75).abs() < 1e-15);
        assert_eq!(q_multiplier(2, 0, &c), 0.0);
        assert_eq!(q_multiplier(1, 1, &c), 0.0);
        c.multiplier = MultiplierMode::NavierStokesLike;
        assert_eq!(q_multiplier(1, 0, &c), 1.0);
        assert_eq!(q_multiplier(7, -3, &c), 1.0);
        assert_eq!(sv(17).cutoff(), 5);
    }

    #[test]
    fn multiplier_range() {
        let c = sv(64);
        let mut last = 0.0;
        for k in 1..=64 {
            let q = q_multiplier(k, 0, &c);
            assert!((0.0..=1.0).contains(&q));
            assert!(q >= last);
            last = q;
        }
        assert!(last > 0.99);
    }

    #[test]
    fn config_violations_are_listed() {
        let mut c = sv(8);
        c.eps = -1.0;
        c.cfl = 2.0;
        c.snapshot_times = vec![0.5, 0.2, 3.0];
        assert_eq!(c.violations().len(), 4);
    }

    #[test]
    fn rhs_examples() {
        let g = GridSpec::new(8).unwrap();
        assert_eq!(sv_rhs(&SpectralField::zeros_vector(g), &sv(8)).unwrap().norm(), 0.0);
        let u = shear(8);
        let c = ns(8);
        let r = sv_rhs(&u, &c).unwrap();
        let mut expect = u.clone();
        expect.scale(-c.eps_n() * 4.0 * PI * PI);
        assert!(r.distance(&expect) < 1e-14);
        assert!(sv_rhs(&u, &sv(8)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn stable_dt_examples() {
        let c = SolverConfig::new(128, 0.01, MultiplierMode::NavierStokesLike, 1.0);
        let zero = SpectralField::zeros_vector(GridSpec::new(128).unwrap());
        let dt = stable_dt(&zero, &c).unwrap();
        let expect = 0.5 / (2.0 * (0.01 / 128.0) * (2.0 * PI * 128.0).powi(2));
        assert!((dt - expect).abs() < 1e-15);
        assert!((dt - 4.95e-3).abs() < 1e-5);
        let half = stable_dt(&zero, &c.clone().with_cfl(0.25)).unwrap();
        assert!((half - 0.5 * dt).abs() < 1e-15);

        // diffusion-limited: doubling a tiny velocity leaves dt unchanged
        let mut u = shear(128);
        u.scale(1e-6);
        let d1 = stable_dt(&u, &c).unwrap();
        u.scale(2.0);
        assert_eq!(stable_dt(&u, &c).unwrap(), d1);
    }

    #[test]
    fn single_mode_decay_matches_exponential() {
        let c = ns(16);
        let u = shear(16);
        let lambda = c.eps_n() * 4.0 * PI * PI;
        for &dt in &[0.5, 0.1, 0.02] {
            let next = step(&u, dt, &c).unwrap();
            let ratio = next.norm_sq() / u.norm_sq();
            let exact = (-2.0 * lambda * dt).exp();
            assert!((ratio - exact).abs() <= (lambda * dt).powi(4), "dt = {dt}");
        }
    }

    #[test]
    fn shear_below_cutoff_is_steady() {
        let u = shear(16);
        let next = step(&u, 0.01, &sv(16)).unwrap();
        assert!(next.distance(&u) < 1e-15);
        let zero = SpectralField::zeros_vector(GridSpec::new(4).unwrap());
        assert_eq!(step(&zero, 0.1, &sv(4)).unwrap().norm(), 0.0);
    }

    #[test]
    fn rejects_mismatched_resolution() {
        let u = shear(8);
        assert!(matches!(run(&u, &sv(16)), Err(SolverError::ResolutionMismatch { .. })));
    }

    #[test]
    fn blow_up_is_reported() {
        // far beyond the advective limit
        let g = GridSpec::new(16).unwrap();
        let mut u = random_divergence_free(g, 16, 0.0, 1);
        u.scale(50.0);
        let mut op = SvOperator::new(&sv(16)).unwrap();
        let mut state = u;
        let mut failed = false;
        for i in 0..200 {
            match op.step(&state, 0.05, i as f64 * 0.05) {
                Ok(next) => state = next,
                Err(SolverError::Instability { .. }) | Err(SolverError::NonFinite(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(failed);
    }

    #[test]
    fn zero_run_stays_zero() {
        let g = GridSpec::new(8).unwrap();
        let c = sv(8).with_snapshots(vec![0.0, 0.5, 1.0]);
        let traj = run(&SpectralField::zeros_vector(g), &c).unwrap();
        assert_eq!(traj.snapshots.len(), 3);
        assert!(traj.snapshots.iter().all(|(_, f)| f.norm() == 0.0));
        assert!(traj.series.iter().all(|s| s.energy == 0.0));
    }

    #[test]
    fn run_hits_snapshot_times_and_balances_energy() {
        let g = GridSpec::new(16).unwrap();
        let u = random_divergence_free(g, 6, 1.5, 2);
        let c = ns(16).with_snapshots(vec![0.0, 0.1, 0.25]);
        let c = SolverConfig { t_final: 0.25, cfl: 0.1, ..c };
        let traj = run(&u, &c).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|(t, _)| *t).collect();
        assert_eq!(times, vec![0.0, 0.1, 0.25]);
        let last = traj.final_sample();
        assert_eq!(last.t, 0.25);
        let e0 = traj.series[0].energy;
        let defect = (e0 - last.energy - last.dissipation_integral).abs() / e0;
        assert!(defect <= 1e-6, "balance defect {defect:e}, dt {}", traj.dt);
        assert!(traj.invariants.clean(1e-12), "{:?}", traj.invariants);
        assert!(traj.enstrophy_budget_excess() <= 1e-6);
    }
}
