//! RK4 integration of the regularized flattened system for `(U, W = S_ref + V, c)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::background::SplitField;
use crate::coords::{b_field, big_b_field, gauge_rhs_with, half_line_masses, inverse_map};
use crate::error::{Error, Result};
use crate::norms::{a_norm, c_tau_h_norm, h_norm, smoothing_pairing, z_norm_parts, Base, NormReport, OverflowFlags};
use crate::run::{is_snapshot_step, GaugeRecord, RunObserver};
use crate::spectral::{calculus::diff, Field, Grid, MultiplierSpec};
use crate::states::{self, BreatherSpec, PerturbationSpec};

/// Coefficient of `|W|²` in the nonlinear flux `(2W² - k|W|²)_y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxVariant {
    /// `k = 1`; keeps the breather stationary.
    #[default]
    Derived,
    /// `k = 1/2`.
    Printed,
}

impl FluxVariant {
    fn coefficient(self) -> f64 {
        match self {
            FluxVariant::Derived => 1.0,
            FluxVariant::Printed => 0.5,
        }
    }
}

/// `τ(t) = τ_0 (1 - (M/δ) t)` on `[0, δ/(2M)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauSchedule {
    pub tau0: f64,
    pub m: f64,
    pub delta: f64,
}

impl TauSchedule {
    pub fn new(tau0: f64, m: f64, delta: f64) -> Result<Self> {
        let s = Self { tau0, m, delta };
        if !(tau0 > 0.0 && tau0 <= 1.0) {
            return Err(Error::InvalidParameter(format!("tau0 = {tau0} outside (0, 1]")));
        }
        if !(m >= 1.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("M = {m} must be at least 1")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta = {delta} outside (0, 1)")));
        }
        Ok(s)
    }

    pub fn tau(&self, t: f64) -> f64 {
        self.tau0 * (1.0 - self.m / self.delta * t)
    }

    /// `dτ/dt`.
    pub fn rate(&self) -> f64 {
        -self.tau0 * self.m / self.delta
    }

    pub fn horizon(&self) -> f64 {
        self.delta / (2.0 * self.m)
    }
}

#[derive(Clone, Debug)]
pub struct YState {
    pub t: f64,
    pub u: Field,
    pub w: SplitField,
    pub c: f64,
    /// Frequency cutoff; `None` means no projection.
    pub j: Option<u32>,
    pub mu: f64,
}

impl YState {
    pub fn new(u: Field, w: &Field, j: Option<u32>, mu: f64) -> Self {
        Self { t: 0.0, u, w: SplitField::from_total(w), c: 0.0, j, mu }
    }
}

/// Time derivatives of `(U, V, c)`.
#[derive(Clone, Debug)]
pub struct YRhs {
    pub du: Field,
    pub dv: Field,
    pub dc: f64,
}

/// Cached multipliers for one grid, cutoff and flux variant.
pub struct YOperator {
    mask: MultiplierSpec,
    lowpass: Option<MultiplierSpec>,
    j: Option<u32>,
    flux: FluxVariant,
}

impl YOperator {
    pub fn new(grid: Grid, j: Option<u32>, flux: FluxVariant) -> Self {
        Self {
            mask: MultiplierSpec::dealias(grid),
            lowpass: j.map(|j| MultiplierSpec::lp_lowpass(grid, j)),
            j,
            flux,
        }
    }

    fn low(&self, f: &Field) -> Field {
        match &self.lowpass {
            Some(m) => m.apply(f).expect("same grid"),
            None => f.clone(),
        }
    }

    pub fn rhs(&self, s: &YState) -> Result<YRhs> {
        let mu = s.mu;
        let i = Complex64::i();

        let ul = self.low(&s.u);
        let beta_l = self.low(&s.w.v).im();
        let uy = diff(&ul, 1);
        let uyy = diff(&ul, 2);
        let big_b = big_b_field(&s.w, self.j);
        let mut inner = Vec::with_capacity(ul.len());
        for n in 0..ul.len() {
            let (v, d1, d2) = (ul.at(n), uy.at(n), uyy.at(n));
            inner.push(-big_b.at(n).re * d1 - i * d2 + 2.0 * beta_l.at(n).re * d1 - i * mu * v.norm_sqr() * v);
        }
        let du = self.low(&self.mask.apply(&Field::new(*s.u.grid(), inner)?)?);

        let w = s.w.total();
        let wy = s.w.derivative(1);
        let wyy = s.w.derivative(2);
        let b = b_field(&s.w);
        let bs = b.samples();
        let k = 2.0 * self.flux.coefficient();
        let mut dv = Vec::with_capacity(w.len());
        for n in 0..w.len() {
            let (w0, w1, w2) = (w.at(n), wy.at(n), wyy.at(n));
            let (alpha, beta) = (w0.re, w0.im);
            let flux = 4.0 * w0 * w1 - k * (w0.conj() * w1).re;
            dv.push(-bs.at(n).re * w1 - i * w2 - i * flux + 3.0 * alpha * beta * w0 - 2.0 * i * mu * s.u.at(n).norm_sqr() * alpha);
        }
        let dv = self.mask.apply(&Field::new(*s.u.grid(), dv)?)?;
        let dc = gauge_rhs_with(&s.w, &b, s.c)?;
        if !(du.is_finite() && dv.is_finite() && dc.is_finite()) {
            return Err(Error::BlowUp { t: s.t });
        }
        Ok(YRhs { du, dv, dc })
    }

    /// One RK4 step on `(U, V, c)`; the gauge shares the stages.
    pub fn step(&self, s: &YState, dt: f64) -> Result<YState> {
        let stage = |k: &YRhs, h: f64| YState {
            t: s.t + h,
            u: s.u.zip_map(&k.du, |a, b| a + h * b),
            w: SplitField { bg: s.w.bg, v: s.w.v.zip_map(&k.dv, |a, b| a + h * b) },
            c: s.c + h * k.dc,
            j: s.j,
            mu: s.mu,
        };
        let k1 = self.rhs(s)?;
        let k2 = self.rhs(&stage(&k1, 0.5 * dt))?;
        let k3 = self.rhs(&stage(&k2, 0.5 * dt))?;
        let k4 = self.rhs(&stage(&k3, dt))?;
        let comb = |a: &Field, f: fn(&YRhs) -> &Field| {
            let mut out = a.samples().to_vec();
            for (n, v) in out.iter_mut().enumerate() {
                *v += dt / 6.0 * (f(&k1).at(n) + 2.0 * f(&k2).at(n) + 2.0 * f(&k3).at(n) + f(&k4).at(n));
            }
            out
        };
        let u = comb(&s.u, |k| &k.du);
        let v = comb(&s.w.v, |k| &k.dv);
        let c = s.c + dt / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
        let t = s.t + dt;
        if u.iter().chain(v.iter()).any(|z| !z.is_finite()) || !c.is_finite() {
            return Err(Error::BlowUp { t });
        }
        let grid = *s.u.grid();
        Ok(YState { t, u: Field::new(grid, u)?, w: SplitField { bg: s.w.bg, v: Field::new(grid, v)? }, c, j: s.j, mu: s.mu })
    }
}

pub fn rhs_y(s: &YState, flux: FluxVariant) -> Result<YRhs> {
    YOperator::new(*s.u.grid(), s.j, flux).rhs(s)
}

/// Refuses to step past the validity horizon of `sched`.
pub fn step_y(s: &YState, dt: f64, sched: &TauSchedule, flux: FluxVariant) -> Result<YState> {
    check_horizon(s.t + dt, sched)?;
    YOperator::new(*s.u.grid(), s.j, flux).step(s, dt)
}

fn check_horizon(t: f64, sched: &TauSchedule) -> Result<()> {
    let horizon = sched.horizon();
    if t > horizon * (1.0 + 1e-12) {
        return Err(Error::HorizonExceeded { t, horizon });
    }
    Ok(())
}

/// `‖W - Ū U_y/|U|²‖_{L∞}` over nodes with `|U| ≥ 10⁻³ ‖U‖_{L∞}`.
pub fn utow_residual(u: &Field, w: &Field) -> f64 {
    let uy = diff(u, 1);
    let cut = 1e-3 * u.linf_norm();
    (0..u.len())
        .filter(|&n| u.at(n).norm() >= cut)
        .map(|n| {
            let v = u.at(n);
            (w.at(n) - v.conj() * uy.at(n) / v.norm_sqr()).norm()
        })
        .fold(0.0, f64::max)
}

/// Norm row of a flattened run: `U` in `H^s`, `AH^s_τ`, `L∞` and the smoothing
/// pairing; `W` in `Z^s` and `AZ^s_τ` with the background handled analytically.
pub fn y_norm_report(t: f64, u: &Field, w: &SplitField, s: f64, tau: f64) -> NormReport {
    let mut flags = OverflowFlags::default();
    let ah = a_norm(u, Base::H(s), tau).unwrap_or_else(|_| {
        flags.ah_s_tau = true;
        f64::NAN
    });
    let az = w.az_norm(s, tau).unwrap_or_else(|_| {
        flags.az_s_tau = true;
        f64::NAN
    });
    let pairing = smoothing_pairing(u, tau).unwrap_or_else(|_| {
        flags.smoothing_pairing = true;
        f64::NAN
    });
    NormReport {
        t,
        h_s: h_norm(u, s),
        z_s: z_norm_parts(&w.total(), &w.derivative(1), s),
        ah_s_tau: ah,
        az_s_tau: az,
        l_inf: u.linf_norm(),
        smoothing_pairing: pairing,
        overflow_flags: flags,
    }
}

/// The three terms of `-½ d/dt ‖C_τ U‖² + Re⟨C_τ U_t, C_τ U⟩ = (M τ_0/δ) P_τ(U)`
/// sampled at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentitySample {
    pub t: f64,
    pub c_norm_sq: f64,
    pub rhs_pairing: f64,
    pub smoothing: f64,
}

pub fn energy_identity_sample(op: &YOperator, s: &YState, sched: &TauSchedule) -> Result<EnergyIdentitySample> {
    let tau = sched.tau(s.t);
    let cosh = MultiplierSpec::cosh(*s.u.grid(), tau);
    let cu = cosh.apply(&s.u)?;
    let cut = cosh.apply(&op.rhs(s)?.du)?;
    Ok(EnergyIdentitySample {
        t: s.t,
        c_norm_sq: c_tau_h_norm(&s.u, 0.0, tau)?.powi(2),
        rhs_pairing: cut.inner(&cu).re,
        smoothing: smoothing_pairing(&s.u, tau)?,
    })
}

/// Fully resolved flattened-coordinate run.
#[derive(Clone, Debug)]
pub struct YRunConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_stride: usize,
    /// Steps between norm and gauge rows.
    pub norms_stride: usize,
    pub j: Option<u32>,
    pub s: f64,
    pub tau0: f64,
    /// `None` selects `max(1, ‖U_0‖²_{AH^s_{τ0}} + ‖W_0‖²_{AZ^s_{τ0}})`.
    pub m: Option<f64>,
    pub delta: f64,
    pub flux: FluxVariant,
    pub breather: BreatherSpec,
    pub perturbation: Option<PerturbationSpec>,
    /// Physical grid for the mapped-back snapshots.
    pub x_grid: Grid,
}

impl YRunConfig {
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn initial_data(&self) -> Result<(Field, Field)> {
        self.breather.validate()?;
        Ok(match &self.perturbation {
            Some(p) => {
                p.validate()?;
                states::perturbed_y_data(&self.breather, p, self.grid)
            }
            None => states::breather_y_exact(0.0, &self.breather, self.grid),
        })
    }

    pub fn schedule(&self, u0: &Field, w0: &SplitField) -> Result<TauSchedule> {
        let m = match self.m {
            Some(m) => m,
            None => {
                let a = a_norm(u0, Base::H(self.s), self.tau0)?;
                let z = w0.az_norm(self.s, self.tau0)?;
                (a * a + z * z).max(1.0)
            }
        };
        TauSchedule::new(self.tau0, m, self.delta)
    }
}

#[derive(Clone, Debug)]
pub struct YRunOutput {
    pub last: YState,
    pub schedule: TauSchedule,
    pub norms: Vec<NormReport>,
    pub gauge: Vec<GaugeRecord>,
    pub energy_identity: Vec<EnergyIdentitySample>,
    /// `(t, U, W)` in flattened coordinates.
    pub snapshots: Vec<(f64, Field, Field)>,
    /// `(t, u)` mapped back to `x_grid`.
    pub snapshots_x: Vec<(f64, Field)>,
}

pub fn run_y(cfg: &YRunConfig, obs: &mut dyn RunObserver) -> Result<YRunOutput> {
    if !(cfg.dt > 0.0 && cfg.t_final >= 0.0) || cfg.snapshot_stride == 0 || cfg.norms_stride == 0 {
        return Err(Error::InvalidParameter("dt must be positive, T non-negative and strides at least 1".into()));
    }
    let (u0, w0) = cfg.initial_data()?;
    let state = YState::new(u0, &w0, cfg.j, cfg.breather.mu);
    let sched = cfg.schedule(&state.u, &state.w)?;
    let n_steps = cfg.n_steps();
    check_horizon(n_steps as f64 * cfg.dt, &sched)?;
    let op = YOperator::new(cfg.grid, cfg.j, cfg.flux);
    let mut out = YRunOutput {
        last: state,
        schedule: sched,
        norms: Vec::new(),
        gauge: Vec::new(),
        energy_identity: Vec::new(),
        snapshots: Vec::new(),
        snapshots_x: Vec::new(),
    };
    let mut snap_index = 0;
    for k in 0..=n_steps {
        if k > 0 {
            let mut next = op.step(&out.last, cfg.dt)?;
            next.t = k as f64 * cfg.dt;
            out.last = next;
        }
        let s = &out.last;
        let tau = sched.tau(s.t);
        let snap = is_snapshot_step(k, n_steps, cfg.snapshot_stride);
        if snap || k % cfg.norms_stride == 0 {
            let report = y_norm_report(s.t, &s.u, &s.w, cfg.s, tau);
            obs.norms(&report)?;
            out.norms.push(report);
            let w = s.w.total();
            let (mass_left, mass_right) = half_line_masses(&s.u, s.c);
            let g = GaugeRecord {
                t: s.t,
                tau,
                c: s.c,
                mass_left,
                mass_right,
                utow_residual: utow_residual(&s.u, &w),
                v_edge_ratio: s.w.edge_ratio(),
            };
            obs.gauge(&g)?;
            out.gauge.push(g);
            out.energy_identity.push(energy_identity_sample(&op, s, &sched)?);
        }
        if snap {
            let w = s.w.total();
            let ux = inverse_map(&s.u, s.c, cfg.x_grid)?;
            obs.snapshot_y(snap_index, s.t, &s.u, &w)?;
            obs.snapshot(snap_index, s.t, &ux)?;
            out.snapshots.push((s.t, s.u.clone(), w));
            out.snapshots_x.push((s.t, ux));
            snap_index += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::NullObserver;
    use crate::spectral::lp::lp_lowpass;

    fn ygrid(n: usize) -> Grid {
        Grid::new(25.0, n).unwrap()
    }

    fn breather_state(omega: f64, j: Option<u32>, n: usize) -> YState {
        let spec = BreatherSpec::new(omega, 0.4, 1.0);
        let (u, w) = states::breather_y_exact(0.0, &spec, ygrid(n));
        YState::new(u, &w, j, 1.0)
    }

    #[test]
    fn exact_breather_is_stationary_with_derived_flux() {
        for omega in [1.0, 2.0] {
            let s = breather_state(omega, None, 1024);
            let r = rhs_y(&s, FluxVariant::Derived).unwrap();
            let res_u = r.du.zip_map(&s.u, |d, u| d + Complex64::i() * omega * u).linf_norm();
            assert!(res_u <= 1e-6, "{res_u}");
            assert!(r.dv.linf_norm() <= 1e-6, "{}", r.dv.linf_norm());
            assert_eq!(r.dc, 0.0);
        }
    }

    #[test]
    fn printed_flux_leaves_the_tanh_sech_residual() {
        for omega in [1.0, 2.0] {
            let s = breather_state(omega, None, 1024);
            let peak = rhs_y(&s, FluxVariant::Printed).unwrap().dv.linf_norm();
            let expected = 2.0 / (3.0 * 3f64.sqrt()) * omega.powf(1.5);
            assert!((peak / expected - 1.0).abs() < 5e-3, "{peak} vs {expected}");
        }
    }

    #[test]
    fn zero_u_with_background_only_w() {
        let g = ygrid(1024);
        let bg = crate::background::TanhBackground::new(1.0);
        let s = YState { t: 0.0, u: Field::zeros(g), w: SplitField { bg, v: Field::zeros(g) }, c: 0.0, j: None, mu: 1.0 };
        let r = rhs_y(&s, FluxVariant::Derived).unwrap();
        assert_eq!(r.du.linf_norm(), 0.0);
        // -i(S'' + 2 S S') = -i(2 th sech² + 2 th sech²) for ω = 1.
        let expected = Field::from_fn(g, |y| {
            let (th, se) = (y.tanh(), 1.0 / y.cosh());
            Complex64::new(0.0, -4.0 * th * se * se)
        });
        assert!(r.dv.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn real_w_freezes_the_gauge() {
        let g = ygrid(512);
        let u = Field::from_real_fn(g, |y| 1.0 / y.cosh());
        let w = Field::from_real_fn(g, |y| -y.tanh() + 0.1 / (1.0 + y * y));
        let mut s = YState::new(u, &w, Some(8), 1.0);
        s.c = 0.7;
        assert_eq!(rhs_y(&s, FluxVariant::Derived).unwrap().dc, 0.0);
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = ygrid(256);
        let s = YState::new(Field::zeros(g), &Field::zeros(g), Some(8), 1.0);
        let sched = TauSchedule::new(0.5, 1.0, 0.5).unwrap();
        let next = step_y(&s, 1e-3, &sched, FluxVariant::Derived).unwrap();
        assert_eq!(next.u.linf_norm(), 0.0);
        assert_eq!(next.w.v.linf_norm(), 0.0);
    }

    #[test]
    fn horizon_is_enforced() {
        let s = breather_state(1.0, None, 256);
        let sched = TauSchedule::new(0.5, 2.0, 0.1).unwrap();
        assert!((sched.horizon() - 0.025).abs() < 1e-15);
        assert!((sched.tau(sched.horizon()) - 0.25).abs() < 1e-15);
        assert!(matches!(step_y(&s, 0.03, &sched, FluxVariant::Derived), Err(Error::HorizonExceeded { .. })));
        assert!(TauSchedule::new(1.5, 1.0, 0.5).is_err());
        assert!(TauSchedule::new(0.5, 0.5, 0.5).is_err());
        assert!(TauSchedule::new(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn breather_modulus_is_constant_at_origin() {
        let mut s = breather_state(1.0, None, 1024);
        let sched = TauSchedule::new(0.5, 1.0, 0.5).unwrap();
        let op = YOperator::new(ygrid(1024), None, FluxVariant::Derived);
        let m0 = s.u.at(512).norm();
        for _ in 0..250 {
            check_horizon(s.t + 2e-4, &sched).unwrap();
            s = op.step(&s, 2e-4).unwrap();
            assert!((s.u.at(512).norm() - m0).abs() < 1e-5);
        }
        assert!(s.c.abs() < 1e-14);
        let phase = s.u.at(512) / m0;
        assert!((phase - Complex64::from_polar(1.0, 0.4 - 0.05)).norm() < 1e-6);
    }

    #[test]
    fn step_reverses_to_fourth_order() {
        let g = ygrid(512);
        let (u, w) = states::perturbed_y_data(&BreatherSpec::default(), &PerturbationSpec::default(), g);
        let s0 = YState::new(u, &w, Some(8), 1.0);
        let op = YOperator::new(g, Some(8), FluxVariant::Derived);
        let err = |dt: f64| {
            let back = op.step(&op.step(&s0, dt).unwrap(), -dt).unwrap();
            back.u.max_abs_diff(&s0.u) + back.w.v.max_abs_diff(&s0.w.v)
        };
        let (e1, e2) = (err(2e-4), err(1e-4));
        assert!(e1 < 1e-8, "{e1}");
        assert!(e2 < e1 / 8.0, "{e1} {e2}");
    }

    #[test]
    fn lowpassed_breather_residual_shrinks_with_cutoff() {
        let res = |j| {
            let s = breather_state(1.0, Some(j), 1024);
            let r = rhs_y(&s, FluxVariant::Derived).unwrap();
            let target = lp_lowpass(&s.u, j).scale(Complex64::new(0.0, -1.0));
            r.du.max_abs_diff(&target)
        };
        assert!(res(6) < 1e-6, "{}", res(6));
        assert!(res(0) > 1e-3);
    }

    #[test]
    fn short_breather_run_tracks_norms() {
        let cfg = YRunConfig {
            grid: ygrid(512),
            dt: 2e-4,
            t_final: 0.01,
            snapshot_stride: 25,
            norms_stride: 5,
            j: None,
            s: 0.25,
            tau0: 0.5,
            m: Some(1.0),
            delta: 0.5,
            flux: FluxVariant::Derived,
            breather: BreatherSpec::default(),
            perturbation: None,
            x_grid: Grid::new(states::default_x_half_length(), 128).unwrap(),
        };
        let out = run_y(&cfg, &mut NullObserver).unwrap();
        assert_eq!(out.snapshots.len(), 3);
        assert_eq!(out.snapshots_x.len(), 3);
        let a0 = out.norms[0].ah_s_tau;
        assert!(out.norms.iter().all(|r| r.ah_s_tau <= 1.1 * a0));
        assert!(out.gauge.iter().all(|g| g.c.abs() < 1e-14));
        let m0 = states::X0;
        assert!((out.gauge[0].mass_left - m0).abs() < 1e-6 && (out.gauge[0].mass_right - m0).abs() < 1e-6);
        let long = YRunConfig { t_final: 1.0, ..cfg };
        assert!(matches!(run_y(&long, &mut NullObserver), Err(Error::HorizonExceeded { .. })));
    }

    fn perturbed_cfg(j: Option<u32>, t_final: f64) -> YRunConfig {
        YRunConfig {
            grid: ygrid(1024),
            dt: 1e-4,
            t_final,
            snapshot_stride: usize::MAX,
            norms_stride: 1,
            j,
            s: 0.5,
            tau0: 0.5,
            m: Some(1.0),
            delta: 0.5,
            flux: FluxVariant::Derived,
            breather: BreatherSpec::default(),
            perturbation: Some(PerturbationSpec::default()),
            x_grid: Grid::new(states::default_x_half_length(), 256).unwrap(),
        }
    }

    #[test]
    fn weighted_energy_balance_holds() {
        let cfg = perturbed_cfg(None, 0.01);
        let rate = cfg.tau0 * cfg.m.unwrap() / cfg.delta;
        let e = run_y(&cfg, &mut NullObserver).unwrap().energy_identity;
        let mut checked = 0;
        for w in e.windows(3).step_by(10) {
            let ddt = (w[2].c_norm_sq - w[0].c_norm_sq) / (w[2].t - w[0].t);
            let lhs = w[1].rhs_pairing - 0.5 * ddt;
            let rhs = rate * w[1].smoothing;
            assert!(rhs > 0.0);
            assert!((lhs - rhs).abs() <= 0.1 * rhs, "t = {}: {lhs} vs {rhs}", w[1].t);
            checked += 1;
        }
        assert!(checked >= 9);
    }

    #[test]
    fn cutoff_increase_barely_moves_the_solution() {
        let a = run_y(&perturbed_cfg(Some(8), 0.05), &mut NullObserver).unwrap().last;
        let b = run_y(&perturbed_cfg(Some(10), 0.05), &mut NullObserver).unwrap().last;
        let d = (&a.u - &b.u).l2_norm() / a.u.l2_norm();
        assert!(d <= 1e-4, "{d}");
    }
}
