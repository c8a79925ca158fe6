//! The non-decaying `W = S_ref + V` split with `S_ref(y) = -√ω tanh(√ω y)`.
//!
//! `S_ref` is handled analytically (derivatives, low-pass correction, complex
//! shifts); only the decaying remainder `V` is represented on the grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::{exp_pair, h_norm};
use crate::spectral::{calculus::diff, lp, Field, Grid, MultiplierSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TanhBackground {
    pub omega: f64,
}

fn tanh_c(z: Complex64) -> Complex64 {
    if z.re > 20.0 {
        Complex64::new(1.0, 0.0)
    } else if z.re < -20.0 {
        Complex64::new(-1.0, 0.0)
    } else {
        z.tanh()
    }
}

fn sech2_c(z: Complex64) -> Complex64 {
    if z.re.abs() > 300.0 {
        Complex64::new(0.0, 0.0)
    } else {
        let c = z.cosh();
        Complex64::new(1.0, 0.0) / (c * c)
    }
}

impl TanhBackground {
    pub fn new(omega: f64) -> Self {
        Self { omega }
    }

    pub fn k(&self) -> f64 {
        self.omega.sqrt()
    }

    /// `∂_y^n S_ref` at a complex point, `n ≤ 3`.
    pub fn eval_c(&self, z: Complex64, n: u32) -> Complex64 {
        let k = self.k();
        let th = tanh_c(k * z);
        let s2 = sech2_c(k * z);
        match n {
            0 => -k * th,
            1 => -k * k * s2,
            2 => 2.0 * k.powi(3) * s2 * th,
            3 => 2.0 * k.powi(4) * s2 * (1.0 - 3.0 * th * th),
            _ => panic!("background derivative order {n} > 3"),
        }
    }

    pub fn eval(&self, y: f64, n: u32) -> f64 {
        self.eval_c(Complex64::new(y, 0.0), n).re
    }

    pub fn sample(&self, grid: Grid, n: u32) -> Field {
        Field::from_real_fn(grid, |y| self.eval(y, n))
    }

    /// `(P_{≤j} - 1) S_ref`, computed from the decaying `S_ref'` with the symbol
    /// `(φ(2^{-j}ξ) - 1)/(iξ)`.
    pub fn lowpass_correction(&self, grid: Grid, j: u32) -> Field {
        let m = MultiplierSpec::from_symbol(grid, move |xi| {
            if xi == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(lp::lowpass_symbol(xi, j) - 1.0, 0.0) / Complex64::new(0.0, xi)
            }
        });
        m.apply(&self.sample(grid, 1)).expect("bounded symbol")
    }

    /// Largest strip half-width where `tanh(√ω(y ∓ iτ))` is pole-free.
    pub fn analytic_radius(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.k()
    }
}

/// `W = S_ref + V`.
#[derive(Clone, Debug)]
pub struct SplitField {
    pub bg: TanhBackground,
    pub v: Field,
}

impl SplitField {
    /// Splits `W` using `ω_ref = ‖W‖²_{L∞}`.
    pub fn from_total(w: &Field) -> Self {
        let k = w.linf_norm();
        let bg = TanhBackground::new(k * k);
        let v = w - &bg.sample(*w.grid(), 0);
        Self { bg, v }
    }

    pub fn with_background(bg: TanhBackground, w: &Field) -> Self {
        Self { bg, v: w - &bg.sample(*w.grid(), 0) }
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    pub fn total(&self) -> Field {
        &self.bg.sample(*self.grid(), 0) + &self.v
    }

    /// `∂_y^n W` with analytic background derivatives, `n ≤ 3`.
    pub fn derivative(&self, n: u32) -> Field {
        if n == 0 {
            return self.total();
        }
        &self.bg.sample(*self.grid(), n) + &diff(&self.v, n)
    }

    /// `P_{≤j} W`; `None` means no projection.
    pub fn lowpass(&self, j: Option<u32>) -> SplitField {
        match j {
            None => self.clone(),
            Some(j) => {
                let corr = self.bg.lowpass_correction(*self.grid(), j);
                SplitField { bg: self.bg, v: &corr + &lp::lp_lowpass(&self.v, j) }
            }
        }
    }

    /// Magnitude of `V` at the grid edge relative to `‖W‖_{L∞}`.
    pub fn edge_ratio(&self) -> f64 {
        let n = self.v.len();
        let edge = self.v.at(0).norm().max(self.v.at(n - 1).norm());
        edge / self.total().linf_norm().max(f64::MIN_POSITIVE)
    }

    /// `‖W‖_{AZ^s_τ}` with the background shifted into the complex strip.
    pub fn az_norm(&self, s: f64, tau: f64) -> Result<f64> {
        if tau >= self.bg.analytic_radius() {
            return Err(Error::OutsideValidity {
                case: "AZ norm".into(),
                detail: format!("τ = {tau} reaches the pole strip {}", self.bg.analytic_radius()),
            });
        }
        let grid = *self.grid();
        let (vp, vm) = exp_pair(&self.v, tau)?;
        let mut total = 0.0;
        for (vs, sign) in [(vp, 1.0), (vm, -1.0)] {
            let shift = Complex64::new(0.0, -sign * tau);
            let vals = Field::from_fn(grid, |y| self.bg.eval_c(y + shift, 0)) + vs.clone();
            let der = Field::from_fn(grid, |y| self.bg.eval_c(y + shift, 1)) + diff(&vs, 1);
            total += vals.linf_norm() + h_norm(&der, s - 0.5);
        }
        Ok(total)
    }
}
