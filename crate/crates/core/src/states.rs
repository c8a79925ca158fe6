//! Compacton, breather and phase-perturbed data in both coordinate systems,
//! plus the conserved functionals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::spectral::{
    calculus::{diff, diff_filtered},
    Field, Grid,
};

/// Right endpoint `x_0 = π/√2` of the compacton support.
pub const X0: f64 = PI * FRAC_1_SQRT_2;

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreatherSpec {
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "one")]
    pub mu: f64,
}

impl Default for BreatherSpec {
    fn default() -> Self {
        Self { omega: 1.0, theta: 0.0, mu: 1.0 }
    }
}

impl BreatherSpec {
    pub fn new(omega: f64, theta: f64, mu: f64) -> Self {
        Self { omega, theta, mu }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {}", self.omega)));
        }
        if ![-1.0, 0.0, 1.0].contains(&self.mu) {
            return Err(Error::InvalidParameter(format!("mu must be -1, 0 or 1, got {}", self.mu)));
        }
        Ok(())
    }

    pub fn amplitude(&self) -> f64 {
        (2.0 * self.omega).sqrt()
    }

    /// `φ_ω(x) = √(2ω) cos(x/√2)` on `I`, zero elsewhere.
    pub fn profile(&self, x: f64) -> f64 {
        if x.abs() >= X0 {
            0.0
        } else {
            self.amplitude() * (x * FRAC_1_SQRT_2).cos()
        }
    }

    pub fn phase(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta - self.omega * t)
    }

    /// Closed-form `M[φ_ω] = √2 π ω`.
    pub fn mass_closed_form(&self) -> f64 {
        SQRT_2 * PI * self.omega
    }

    /// Closed-form `H[φ_ω] = -π ω²/√2` for `μ = 1` (general `μ` below).
    pub fn energy_closed_form(&self) -> f64 {
        // ∫|½(φ²)_x|² = πω²/(2√2), ∫φ⁴ = 3√2 πω²/2.
        PI * self.omega.powi(2) / (2.0 * SQRT_2) - 0.5 * self.mu * 1.5 * SQRT_2 * PI * self.omega.powi(2)
    }
}

fn default_a() -> f64 {
    0.1
}
fn default_w() -> f64 {
    20.0
}
fn default_m() -> f64 {
    1.0
}
fn default_c() -> f64 {
    16.0
}

/// Gaussian phase profile `f(x) = a e^{-w(x-x_c)²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_w")]
    pub w: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "default_m")]
    pub m_f: f64,
    #[serde(default = "default_c")]
    pub c_f: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self { a: 0.1, w: 20.0, center: 0.0, m_f: 1.0, c_f: 16.0 }
    }
}

impl PerturbationSpec {
    pub fn with_amplitude(a: f64) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!("bad perturbation a = {}, w = {}", self.a, self.w)));
        }
        if self.m_f < 1.0 || self.c_f < 1.0 {
            return Err(Error::InvalidParameter("derivative-bound constants must be ≥ 1".into()));
        }
        Ok(())
    }

    /// `∂_x^n f(x) = a (-√w)^n H_n(√w (x-x_c)) e^{-w(x-x_c)²}`.
    pub fn derivative(&self, x: f64, n: usize) -> f64 {
        let sw = self.w.sqrt();
        let t = sw * (x - self.center);
        let (mut h0, mut h1) = (1.0, 2.0 * t);
        let hn = match n {
            0 => h0,
            1 => h1,
            _ => {
                for k in 1..n {
                    let h2 = 2.0 * t * h1 - 2.0 * k as f64 * h0;
                    h0 = h1;
                    h1 = h2;
                }
                h1
            }
        };
        self.a * (-sw).powi(n as i32) * hn * (-t * t).exp()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// `(n, max_I |∂^n f|, M C^n)` for `n = 0..=n_max` on a fine sampling of `I`.
    pub fn derivative_bounds(&self, n_max: usize) -> Vec<(usize, f64, f64)> {
        let samples = 4001;
        (0..=n_max)
            .map(|n| {
                let max = (0..samples)
                    .map(|i| -X0 + 2.0 * X0 * i as f64 / (samples - 1) as f64)
                    .fold(0.0f64, |m, x| m.max(self.derivative(x, n).abs()));
                (n, max, self.m_f * self.c_f.powi(n as i32))
            })
            .collect()
    }
}

/// Analytic access to an x-space profile and its first three derivatives.
pub trait XProfile: Sync {
    /// `[u, u_x, u_xx, u_xxx]` at `x`.
    fn jet(&self, x: f64) -> [Complex64; 4];

    /// Half-width of the support.
    fn support(&self) -> f64 {
        X0
    }

    fn modulus(&self, x: f64) -> f64 {
        self.jet(x)[0].norm()
    }
}

fn cos_jet(spec: &BreatherSpec, x: f64) -> [f64; 4] {
    let a = spec.amplitude();
    let (s, c) = (x * FRAC_1_SQRT_2).sin_cos();
    [a * c, -a * s * FRAC_1_SQRT_2, -a * c * 0.5, a * s * 0.5 * FRAC_1_SQRT_2]
}

/// The breather slice `e^{-iωt+iθ} φ_ω` as an analytic profile.
#[derive(Clone, Copy, Debug)]
pub struct BreatherProfile {
    pub spec: BreatherSpec,
    pub t: f64,
}

impl XProfile for BreatherProfile {
    fn jet(&self, x: f64) -> [Complex64; 4] {
        let ph = self.spec.phase(self.t);
        let j = cos_jet(&self.spec, x);
        [ph * j[0], ph * j[1], ph * j[2], ph * j[3]]
    }
}

/// `e^{if} φ_ω` as an analytic profile.
#[derive(Clone, Copy, Debug)]
pub struct PerturbedProfile {
    pub spec: BreatherSpec,
    pub pert: PerturbationSpec,
}

impl XProfile for PerturbedProfile {
    fn jet(&self, x: f64) -> [Complex64; 4] {
        let i = Complex64::i();
        let p = &self.pert;
        let (f1, f2, f3) = (p.derivative(x, 1), p.derivative(x, 2), p.derivative(x, 3));
        let g0 = Complex64::from_polar(1.0, p.value(x)) * self.spec.phase(0.0);
        let g = [
            g0,
            i * f1 * g0,
            (i * f2 - f1 * f1) * g0,
            (i * f3 - 3.0 * f1 * f2 - i * f1.powi(3)) * g0,
        ];
        let phi = cos_jet(&self.spec, x);
        [
            g[0] * phi[0],
            g[1] * phi[0] + g[0] * phi[1],
            g[2] * phi[0] + 2.0 * g[1] * phi[1] + g[0] * phi[2],
            g[3] * phi[0] + 3.0 * g[2] * phi[1] + 3.0 * g[1] * phi[2] + g[0] * phi[3],
        ]
    }
}

fn check_padding(grid: &Grid) -> Result<()> {
    if grid.half_length() <= X0 {
        return Err(Error::SupportNotPadded { half_length: grid.half_length(), support: X0 });
    }
    Ok(())
}

fn sample_profile(p: &impl XProfile, grid: Grid) -> Field {
    Field::from_fn(grid, |x| if x.abs() >= X0 { Complex64::new(0.0, 0.0) } else { p.jet(x)[0] })
}

/// Default x-grid half-length `1.5 x_0`.
pub fn default_x_half_length() -> f64 {
    1.5 * X0
}

pub fn compacton(spec: &BreatherSpec, grid: Grid) -> Result<Field> {
    check_padding(&grid)?;
    Ok(Field::from_real_fn(grid, |x| spec.profile(x)))
}

pub fn breather_exact(t: f64, spec: &BreatherSpec, grid: Grid) -> Result<Field> {
    check_padding(&grid)?;
    Ok(sample_profile(&BreatherProfile { spec: *spec, t }, grid))
}

pub fn perturbed_data(spec: &BreatherSpec, pert: &PerturbationSpec, grid: Grid) -> Result<Field> {
    check_padding(&grid)?;
    Ok(sample_profile(&PerturbedProfile { spec: *spec, pert: *pert }, grid))
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `U = e^{-iωt+iθ}√(2ω) sech(√ω y)`, `W = -√ω tanh(√ω y)`.
pub fn breather_y_exact(t: f64, spec: &BreatherSpec, grid: Grid) -> (Field, Field) {
    let k = spec.omega.sqrt();
    let ph = spec.phase(t) * spec.amplitude();
    let u = Field::from_fn(grid, |y| ph * sech(k * y));
    let w = Field::from_real_fn(grid, |y| -k * (k * y).tanh());
    (u, w)
}

/// `x(y) = √2 arctan(sinh(√ω y))`, the inverse of the breather coordinate map.
pub fn breather_x_of_y(omega: f64, y: f64) -> f64 {
    SQRT_2 * (omega.sqrt() * y).sinh().atan()
}

/// `y_0(x) = ω^{-1/2} ln(tan(x/√2) + sec(x/√2))` for the compacton.
pub fn breather_y_of_x(omega: f64, x: f64) -> f64 {
    let s = x * FRAC_1_SQRT_2;
    (s.tan() + 1.0 / s.cos()).ln() / omega.sqrt()
}

/// The image of `e^{if}φ_ω` in y-coordinates: `U_0 = e^{iF̃}√(2ω) sech(√ω y)` and
/// `W_0 = -√ω tanh(√ω y) + i F √(2ω) sech(√ω y)`.
pub fn perturbed_y_data(spec: &BreatherSpec, pert: &PerturbationSpec, grid: Grid) -> (Field, Field) {
    let k = spec.omega.sqrt();
    let amp = spec.amplitude();
    let ph = spec.phase(0.0);
    let u = Field::from_fn(grid, |y| {
        let x = breather_x_of_y(spec.omega, y);
        ph * Complex64::from_polar(amp * sech(k * y), pert.value(x))
    });
    let w = Field::from_fn(grid, |y| {
        let x = breather_x_of_y(spec.omega, y);
        Complex64::new(-k * (k * y).tanh(), pert.derivative(x, 1) * amp * sech(k * y))
    });
    (u, w)
}

/// `M[u] = ∫|u|²`.
pub fn mass(u: &Field) -> f64 {
    u.l2_norm().powi(2)
}

/// `ū u_x`, formed as `ū² q_x / (2 max(|u|, floor)²)` with `q = u²`.
fn ubar_ux(u: &Field, floor: f64) -> Field {
    let qx = diff(&(u * u), 1);
    u.zip_map(&qx, |v, d| {
        let m = v.norm().max(floor);
        if m == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            v.conj() * v.conj() * d / (2.0 * m * m)
        }
    })
}

/// `P[u] = Im ∫ u ū_x`.
pub fn momentum(u: &Field) -> f64 {
    -ubar_ux(u, 0.0).integral().im
}

/// `H[u] = ∫|u u_x|² - μ/2 ∫|u|⁴` with `u u_x = ½(u²)_x` taken through `σ(D)^{1/2}`.
pub fn energy(u: &Field, mu: f64) -> f64 {
    let q = u * u;
    let qx = diff_filtered(&q, 1, 0.5);
    0.25 * qx.l2_norm().powi(2) - 0.5 * mu * q.l2_norm().powi(2)
}

/// Density `ρ = |u|²` and velocity `v = 2 Im(u ū_x)`.
pub fn hydro_vars(u: &Field) -> (Field, Field) {
    let rho = u.modulus_sqr();
    let v = ubar_ux(u, 0.0).map(|z| Complex64::new(-2.0 * z.im, 0.0));
    (rho, v)
}

/// `w = ū u_x / |u|` with `|u|` floored.
pub fn w_field(u: &Field, floor: f64) -> Field {
    let a = ubar_ux(u, floor);
    a.zip_map(u, |z, v| z / v.norm().max(floor))
}

/// Default floor `1e-6 √(2ω)`.
pub fn default_w_floor(omega: f64) -> f64 {
    1e-6 * (2.0 * omega).sqrt()
}

/// `w = ρ_x/(2√ρ) - i v/(2√ρ)` where `ρ > floor²`, zero elsewhere.
pub fn w_from_hydro(u: &Field, floor: f64) -> Field {
    let (rho, v) = hydro_vars(u);
    let rho_x = diff(&rho, 1);
    let out = (0..u.len())
        .map(|n| {
            let r = rho.at(n).re;
            if r > floor * floor {
                Complex64::new(rho_x.at(n).re, -v.at(n).re) / (2.0 * r.sqrt())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Field::new(*u.grid(), out).expect("grid-sized")
}

/// `W - Ū U_y / |U|²` where `|U| ≥ floor`, zero elsewhere.
pub fn u_to_w_residual(u: &Field, w: &Field, floor: f64) -> Field {
    let uy = diff(u, 1);
    let out = (0..u.len())
        .map(|n| {
            let v = u.at(n);
            if v.norm() >= floor {
                w.at(n) - v.conj() * uy.at(n) / v.norm_sqr()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Field::new(*u.grid(), out).expect("grid-sized")
}
