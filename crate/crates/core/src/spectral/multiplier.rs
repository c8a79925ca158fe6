//! Fourier multipliers `m(D)` with symbols stored in log-magnitude form.
//!
//! Exponentially growing symbols (`cosh(τξ)`, `e^{τξ}`) are applied as
//! `phase · exp(log|m| + log|f̂|)` so that a decaying spectrum can absorb a
//! growing symbol without intermediate overflow. At the Nyquist slot the even
//! part of the symbol is used, so odd symbols vanish there and real fields stay
//! real.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lp, Field, Grid};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverflowPolicy {
    #[default]
    Reject,
    Clamp,
}

/// One symbol value: `m = phase · e^{log_abs}`; `phase == 0` encodes `m = 0`.
#[derive(Clone, Copy, Debug)]
pub struct LogSymbol {
    pub log_abs: f64,
    pub phase: Complex64,
}

impl LogSymbol {
    pub const ZERO: LogSymbol = LogSymbol { log_abs: f64::NEG_INFINITY, phase: Complex64 { re: 0.0, im: 0.0 } };

    pub fn from_value(m: Complex64) -> Self {
        let a = m.norm();
        if a == 0.0 {
            Self::ZERO
        } else {
            Self { log_abs: a.ln(), phase: m / a }
        }
    }

    pub fn real(log_abs: f64, sign: f64) -> Self {
        if sign == 0.0 {
            Self::ZERO
        } else {
            Self { log_abs, phase: Complex64::new(sign.signum(), 0.0) }
        }
    }

    pub fn value(&self) -> Complex64 {
        if self.phase == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.log_abs.exp()
        }
    }
}

/// `ln cosh(x)` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln |sinh(x)|` without overflow (`-∞` at 0).
pub fn ln_abs_sinh(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return f64::NEG_INFINITY;
    }
    if a < 1e-3 {
        return (x.sinh()).abs().ln();
    }
    a + (-(-2.0 * a).exp()).ln_1p() - std::f64::consts::LN_2
}

#[derive(Clone, Debug)]
pub struct MultiplierSpec {
    grid: Grid,
    symbol: Vec<LogSymbol>,
    policy: OverflowPolicy,
}

impl MultiplierSpec {
    /// General constructor; `f(ξ, is_nyquist)` returns the symbol in log form.
    pub fn from_log_fn(grid: Grid, f: impl Fn(f64, bool) -> LogSymbol) -> Self {
        let nyq = grid.nyquist_index();
        let symbol = (0..grid.len()).map(|i| f(grid.wavenumber(i), i == nyq)).collect();
        Self { grid, symbol, policy: OverflowPolicy::Reject }
    }

    /// Builds from a plain symbol; the Nyquist slot gets the even part
    /// `(m(ξ_N) + m(-ξ_N))/2`.
    pub fn from_symbol(grid: Grid, m: impl Fn(f64) -> Complex64) -> Self {
        Self::from_log_fn(grid, |xi, nyq| {
            let v = if nyq { 0.5 * (m(xi) + m(-xi)) } else { m(xi) };
            LogSymbol::from_value(v)
        })
    }

    pub fn with_policy(mut self, policy: OverflowPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn policy(&self) -> OverflowPolicy {
        self.policy
    }

    pub fn symbol_value(&self, idx: usize) -> Complex64 {
        self.symbol[idx].value()
    }

    pub fn log_symbol(&self, idx: usize) -> LogSymbol {
        self.symbol[idx]
    }

    pub fn identity(grid: Grid) -> Self {
        Self::from_log_fn(grid, |_, _| LogSymbol::real(0.0, 1.0))
    }

    /// `(iξ)^order`; odd orders vanish at Nyquist.
    pub fn derivative(grid: Grid, order: u32) -> Self {
        Self::from_symbol(grid, move |xi| Complex64::new(0.0, xi).powu(order))
    }

    /// `C_τ = cosh(τD)`.
    pub fn cosh(grid: Grid, tau: f64) -> Self {
        Self::from_log_fn(grid, move |xi, _| LogSymbol::real(ln_cosh(tau * xi), 1.0))
    }

    /// `C_τ^{-1} = sech(τD)`.
    pub fn sech(grid: Grid, tau: f64) -> Self {
        Self::from_log_fn(grid, move |xi, _| LogSymbol::real(-ln_cosh(tau * xi), 1.0))
    }

    /// `S_τ = i sinh(τD)`.
    pub fn sinh_i(grid: Grid, tau: f64) -> Self {
        Self::from_log_fn(grid, move |xi, nyq| {
            if nyq || xi == 0.0 || tau == 0.0 {
                LogSymbol::ZERO
            } else {
                let s = (tau * xi).signum();
                LogSymbol { log_abs: ln_abs_sinh(tau * xi), phase: Complex64::new(0.0, s) }
            }
        })
    }

    /// `T_τ = i tanh(τD)`.
    pub fn tanh_i(grid: Grid, tau: f64) -> Self {
        Self::from_symbol(grid, move |xi| Complex64::new(0.0, (tau * xi).tanh()))
    }

    /// `e^{σ τ D}` with `σ = ±1`; at Nyquist this is `cosh(τξ_N)`.
    pub fn exp(grid: Grid, tau: f64, sign: f64) -> Self {
        Self::from_log_fn(grid, move |xi, nyq| {
            if nyq {
                LogSymbol::real(ln_cosh(tau * xi), 1.0)
            } else {
                LogSymbol::real(sign * tau * xi, 1.0)
            }
        })
    }

    /// `⟨D⟩^s = (1 + ξ²)^{s/2}`.
    pub fn bracket(grid: Grid, s: f64) -> Self {
        Self::from_log_fn(grid, move |xi, _| LogSymbol::real(0.5 * s * (1.0 + xi * xi).ln(), 1.0))
    }

    /// Littlewood–Paley band `P_j`.
    pub fn lp_band(grid: Grid, j: u32) -> Self {
        Self::from_symbol(grid, move |xi| Complex64::new(lp::band_symbol(xi, j), 0.0))
    }

    /// Low-pass `P_{≤j} = φ(2^{-j}D)`.
    pub fn lp_lowpass(grid: Grid, j: u32) -> Self {
        Self::from_symbol(grid, move |xi| Complex64::new(lp::lowpass_symbol(xi, j), 0.0))
    }

    /// Two-thirds dealiasing mask: zero for `|k| > N/3`.
    pub fn dealias(grid: Grid) -> Self {
        let cut = grid.len() as i64 / 3;
        let mut spec = Self::identity(grid);
        for (i, s) in spec.symbol.iter_mut().enumerate() {
            if grid.mode(i).abs() > cut {
                *s = LogSymbol::ZERO;
            }
        }
        spec
    }

    /// Smooth two-thirds filter `σ(k)^p` with `σ = e^{-36 (|k|/k_c)^8}` for
    /// `|k| ≤ k_c = N/3` and zero beyond. Unlike the sharp mask it does not
    /// ring at the compacton corners.
    pub fn smooth_dealias(grid: Grid, power: f64) -> Self {
        let cut = (grid.len() / 3) as f64;
        let mut spec = Self::identity(grid);
        for (i, s) in spec.symbol.iter_mut().enumerate() {
            let r = grid.mode(i).abs() as f64 / cut;
            *s = if r > 1.0 { LogSymbol::ZERO } else { LogSymbol::real(-36.0 * power * r.powi(8), 1.0) };
        }
        spec
    }

    /// Symbol-wise product `m1(D) m2(D)`.
    pub fn compose(&self, other: &MultiplierSpec) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let symbol = self
            .symbol
            .iter()
            .zip(&other.symbol)
            .map(|(a, b)| {
                if a.phase == Complex64::new(0.0, 0.0) || b.phase == Complex64::new(0.0, 0.0) {
                    LogSymbol::ZERO
                } else {
                    LogSymbol { log_abs: a.log_abs + b.log_abs, phase: a.phase * b.phase }
                }
            })
            .collect();
        Ok(Self { grid: self.grid, symbol, policy: self.policy })
    }

    /// Returns `m(D) f`.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        // Headroom for the inverse transform's sum over N modes.
        let limit = f64::MAX.ln() - (f.len() as f64).ln() - 1.0;
        let spec = f.spectrum();
        let mut out = Vec::with_capacity(spec.len());
        for (i, (c, m)) in spec.iter().zip(&self.symbol).enumerate() {
            let a = c.norm();
            if a == 0.0 || m.phase == Complex64::new(0.0, 0.0) {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let mut log_mag = m.log_abs + a.ln();
            if log_mag >= limit - 1.0 {
                match self.policy {
                    OverflowPolicy::Reject => {
                        return Err(Error::MultiplierOverflow { xi: self.grid.wavenumber(i) })
                    }
                    OverflowPolicy::Clamp => log_mag = limit - 1.0,
                }
            }
            out.push(m.phase * (c / a) * log_mag.exp());
        }
        Field::from_spectrum(self.grid, out)
    }
}

/// `m(D) f`.
pub fn apply_multiplier(f: &Field, m: &MultiplierSpec) -> Result<Field> {
    m.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_symbol_is_exact() {
        let grid = Grid::new(2.0, 64).unwrap();
        let f = Field::from_fn(grid, |x| Complex64::new(x.sin(), (2.0 * x).cos()));
        let g = MultiplierSpec::identity(grid).apply(&f).unwrap();
        assert!(f.max_abs_diff(&g) < 1e-14);
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let grid = Grid::new(PI, 64).unwrap();
        let f = Field::from_real_fn(grid, f64::sin);
        let g = MultiplierSpec::derivative(grid, 1).apply(&f).unwrap();
        let expect = Field::from_real_fn(grid, f64::cos);
        assert!(g.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn cosh_scales_a_single_mode() {
        let grid = Grid::new(3.0, 64).unwrap();
        let tau = 0.3;
        for k in [1i32, 5, -7] {
            let xi = PI * k as f64 / grid.half_length();
            let f = Field::from_fn(grid, |x| Complex64::new(0.0, xi * x).exp());
            let g = MultiplierSpec::cosh(grid, tau).apply(&f).unwrap();
            let expected = (tau * xi).cosh();
            for (a, b) in f.samples().iter().zip(g.samples()) {
                assert!((b - a * expected).norm() < 1e-12 * expected);
            }
        }
    }

    #[test]
    fn reject_policy_signals_overflow() {
        let grid = Grid::new(1.0, 1024).unwrap();
        let f = Field::from_real_fn(grid, |x| if x.abs() < 0.1 { 1.0 } else { 0.0 });
        let big = MultiplierSpec::exp(grid, 500.0, 1.0);
        assert!(matches!(big.apply(&f), Err(Error::MultiplierOverflow { .. })));
        let clamped = big.with_policy(OverflowPolicy::Clamp).apply(&f).unwrap();
        assert!(clamped.samples().iter().all(|v| v.re.is_finite()));
    }

    #[test]
    fn exponential_split_into_tanh_and_cosh() {
        // e^{±τD} = (1 ∓ i T_τ) C_τ symbol-wise.
        let grid = Grid::new(4.0, 128).unwrap();
        let tau = 0.4;
        let c = MultiplierSpec::cosh(grid, tau);
        let t = MultiplierSpec::tanh_i(grid, tau);
        for sign in [1.0, -1.0] {
            let e = MultiplierSpec::exp(grid, tau, sign);
            for i in 0..grid.len() {
                let rhs = (Complex64::new(1.0, 0.0) - sign * Complex64::i() * t.symbol_value(i))
                    * c.symbol_value(i);
                let lhs = e.symbol_value(i);
                assert!((lhs - rhs).norm() <= 1e-12 * c.symbol_value(i).norm());
            }
        }
    }
}
