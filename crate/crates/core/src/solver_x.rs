//! Pseudospectral RK4 integration of `i u_t = ū (u u_x)_x + μ |u|² u` in
//! physical coordinates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::run::{is_snapshot_step, RunObserver};
use crate::spectral::{Field, Grid, MultiplierSpec};
use crate::stability::{assemble_diagnostics, stability_distance, DiagnosticsRecord, StabilityResult};
use crate::states::{self, BreatherSpec, PerturbationSpec};

/// `C_s` in `dt ≤ C_s / (max|u|² ξ_max²)`.
pub const STABILITY_CONSTANT: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct XState {
    pub t: f64,
    pub u: Field,
    pub mu: f64,
}

/// Right-hand side with its filtered second derivative cached.
pub struct XOperator {
    d2: MultiplierSpec,
    mu: f64,
}

impl XOperator {
    pub fn new(grid: Grid, mu: f64) -> Self {
        let d2 = MultiplierSpec::derivative(grid, 2)
            .compose(&MultiplierSpec::smooth_dealias(grid, 1.0))
            .expect("same grid");
        Self { d2, mu }
    }

    /// `-i(ū · ∂²σ(D)(u²/2) + μ|u|²u)` with the smooth two-thirds filter `σ`.
    pub fn rhs(&self, u: &Field) -> Field {
        let lap = self.d2.apply(&(u * u)).expect("same grid");
        let mu = self.mu;
        u.zip_map(&lap, |v, l| -Complex64::i() * (0.5 * v.conj() * l + mu * v.norm_sqr() * v))
    }

    pub fn step(&self, s: &XState, dt: f64) -> Result<XState> {
        let axpy = |a: &Field, k: &Field, h: f64| a.zip_map(k, |x, y| x + h * y);
        let k1 = self.rhs(&s.u);
        let k2 = self.rhs(&axpy(&s.u, &k1, 0.5 * dt));
        let k3 = self.rhs(&axpy(&s.u, &k2, 0.5 * dt));
        let k4 = self.rhs(&axpy(&s.u, &k3, dt));
        let mut next = s.u.samples().to_vec();
        for (n, v) in next.iter_mut().enumerate() {
            *v += dt / 6.0 * (k1.at(n) + 2.0 * k2.at(n) + 2.0 * k3.at(n) + k4.at(n));
        }
        let t = s.t + dt;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t });
        }
        Ok(XState { t, u: Field::new(*s.u.grid(), next)?, mu: s.mu })
    }
}

pub fn rhs_x(s: &XState) -> Field {
    XOperator::new(*s.u.grid(), s.mu).rhs(&s.u)
}

pub fn step_x(s: &XState, dt: f64) -> Result<XState> {
    XOperator::new(*s.u.grid(), s.mu).step(s, dt)
}

/// Largest admissible step for `u`.
pub fn stability_bound(u: &Field) -> f64 {
    let rho = u.samples().iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    STABILITY_CONSTANT / (rho.max(f64::MIN_POSITIVE) * u.grid().xi_max().powi(2))
}

/// Fully resolved physical-coordinate run.
#[derive(Clone, Debug)]
pub struct XRunConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    /// Steps between snapshots; the final step is always stored.
    pub snapshot_stride: usize,
    /// Steps between diagnostics rows.
    pub diagnostics_stride: usize,
    pub breather: BreatherSpec,
    pub perturbation: Option<PerturbationSpec>,
    /// Evaluate the orbital distance at every snapshot.
    pub stability: bool,
}

impl XRunConfig {
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn initial_data(&self) -> Result<Field> {
        match &self.perturbation {
            Some(p) => states::perturbed_data(&self.breather, p, self.grid),
            None => states::breather_exact(0.0, &self.breather, self.grid),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.breather.validate()?;
        if let Some(p) = &self.perturbation {
            p.validate()?;
        }
        if !(self.dt > 0.0 && self.t_final >= 0.0) {
            return Err(Error::InvalidParameter("dt must be positive and T non-negative".into()));
        }
        if self.snapshot_stride == 0 || self.diagnostics_stride == 0 {
            return Err(Error::InvalidParameter("strides must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct XRunOutput {
    pub last: XState,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<(f64, Field)>,
    pub stability: Vec<(f64, StabilityResult)>,
}

pub fn run_x(cfg: &XRunConfig, obs: &mut dyn RunObserver) -> Result<XRunOutput> {
    cfg.validate()?;
    let u0 = cfg.initial_data()?;
    let bound = stability_bound(&u0);
    if cfg.dt > bound {
        return Err(Error::InvalidParameter(format!("dt = {} exceeds the stability bound {bound:.3e}", cfg.dt)));
    }
    let op = XOperator::new(cfg.grid, cfg.breather.mu);
    let n_steps = cfg.n_steps();
    let mut out = XRunOutput { last: XState { t: 0.0, u: u0, mu: cfg.breather.mu }, diagnostics: Vec::new(), snapshots: Vec::new(), stability: Vec::new() };
    let mut snap_index = 0;
    for k in 0..=n_steps {
        if k > 0 {
            let mut next = op.step(&out.last, cfg.dt)?;
            next.t = k as f64 * cfg.dt;
            out.last = next;
        }
        let s = &out.last;
        let snap = is_snapshot_step(k, n_steps, cfg.snapshot_stride);
        let st = (snap && cfg.stability).then(|| stability_distance(&s.u, cfg.breather.omega));
        if snap || k % cfg.diagnostics_stride == 0 {
            let rec = assemble_diagnostics(s.t, &s.u, &cfg.breather, st);
            obs.diagnostics(&rec)?;
            out.diagnostics.push(rec);
        }
        if snap {
            obs.snapshot(snap_index, s.t, &s.u)?;
            out.snapshots.push((s.t, s.u.clone()));
            if let Some(r) = st {
                obs.stability(s.t, &r)?;
                out.stability.push((s.t, r));
            }
            snap_index += 1;
        }
    }
    Ok(out)
}

/// Figure-1 preset: `N = 256`, `T = 0.5`, `f = 0.1 e^{-20x²}`, `μ = 1`, five slices.
pub fn figure1_config() -> XRunConfig {
    let dt = 1e-5;
    let t_final = 0.5;
    XRunConfig {
        grid: Grid::new(states::default_x_half_length(), 256).expect("valid grid"),
        dt,
        t_final,
        snapshot_stride: ((t_final / dt).round() as usize) / 4,
        diagnostics_stride: 1,
        breather: BreatherSpec::default(),
        perturbation: Some(PerturbationSpec::default()),
        stability: true,
    }
}
