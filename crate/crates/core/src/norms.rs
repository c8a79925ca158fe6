//! Sobolev, Zhidkov and analytic (Gevrey) norms, the smoothing pairing and
//! Sobolev commutators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{calculus::diff, ln_cosh, mul_dealiased, Field, MultiplierSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub s: f64,
    pub tau: f64,
}

impl NormParams {
    pub fn new(s: f64, tau: f64) -> Self {
        Self { s, tau }
    }

    /// Inside the standing window `0 < s ≤ 1/2`, `0 < τ ≤ 1`.
    pub fn in_window(&self) -> bool {
        self.s > 0.0 && self.s <= 0.5 && self.tau > 0.0 && self.tau <= 1.0
    }
}

/// Base space for [`a_norm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Base {
    H(f64),
    Z(f64),
    Linf,
    L2,
}

/// `‖f‖_{H^s} = (Σ ⟨ξ⟩^{2s} |f̂|² Δξ)^{1/2}`.
pub fn h_norm(f: &Field, s: f64) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xi = grid.wavenumber(i);
            (1.0 + xi * xi).powf(s) * c.norm_sqr()
        })
        .sum();
    (sum * grid.dxi()).sqrt()
}

/// `‖f‖_{Z^s} = ‖f‖_{L∞} + ‖f_y‖_{H^{s-1/2}}`.
pub fn z_norm(f: &Field, s: f64) -> f64 {
    z_norm_parts(f, &diff(f, 1), s)
}

/// Zhidkov norm from samples and an independently computed derivative.
pub fn z_norm_parts(values: &Field, derivative: &Field, s: f64) -> f64 {
    values.linf_norm() + h_norm(derivative, s - 0.5)
}

fn base_norm(f: &Field, base: Base) -> f64 {
    match base {
        Base::H(s) => h_norm(f, s),
        Base::Z(s) => z_norm(f, s),
        Base::Linf => f.linf_norm(),
        Base::L2 => f.l2_norm(),
    }
}

/// `e^{τD} f` and `e^{-τD} f`.
pub fn exp_pair(f: &Field, tau: f64) -> Result<(Field, Field)> {
    let grid = *f.grid();
    let plus = MultiplierSpec::exp(grid, tau, 1.0).apply(f)?;
    let minus = MultiplierSpec::exp(grid, tau, -1.0).apply(f)?;
    Ok((plus, minus))
}

/// `‖f‖_{AX_τ} = ‖e^{τD}f‖_X + ‖e^{-τD}f‖_X`.
///
/// Errors with `MultiplierOverflow` when the spectrum of `f` does not decay
/// fast enough for the weight `e^{τ|ξ|}`.
pub fn a_norm(f: &Field, base: Base, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(2.0 * base_norm(f, base));
    }
    let (plus, minus) = exp_pair(f, tau)?;
    Ok(base_norm(&plus, base) + base_norm(&minus, base))
}

/// `‖C_τ f‖_{H^s}`, computed in log space.
pub fn c_tau_h_norm(f: &Field, s: f64, tau: f64) -> Result<f64> {
    Ok(h_norm(&MultiplierSpec::cosh(*f.grid(), tau).apply(f)?, s))
}

/// Plancherel form of `-Re⟨∂_y S_τ z, C_τ z⟩ = ∫ ξ tanh(τξ) |cosh(τξ) ẑ|² dξ`.
pub fn smoothing_pairing(z: &Field, tau: f64) -> Result<f64> {
    let grid = z.grid();
    let limit = f64::MAX.ln() - (z.len() as f64).ln() - 1.0;
    let mut sum = 0.0;
    for (i, c) in z.spectrum().iter().enumerate() {
        let xi = grid.wavenumber(i);
        let a = c.norm();
        if a == 0.0 || xi == 0.0 || tau == 0.0 {
            continue;
        }
        let log_amp = 2.0 * (ln_cosh(tau * xi) + a.ln()) + xi.abs().ln();
        if log_amp >= limit {
            return Err(crate::Error::MultiplierOverflow { xi });
        }
        sum += (tau * xi).tanh() * xi.signum() * log_amp.exp();
    }
    Ok(sum * grid.dxi())
}

/// `[⟨D⟩^s, f] g_y = ⟨D⟩^s(f g_y) - f ⟨D⟩^s g_y`, products dealiased.
pub fn commutator_sobolev(f: &Field, g: &Field, s: f64) -> Field {
    let grid = *f.grid();
    let js = MultiplierSpec::bracket(grid, s);
    let gy = diff(g, 1);
    let a = js.apply(&mul_dealiased(f, &gy)).expect("polynomial symbol");
    let b = mul_dealiased(f, &js.apply(&gy).expect("polynomial symbol"));
    &a - &b
}

/// One row of the per-slice norm monitor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub t: f64,
    pub h_s: f64,
    pub z_s: f64,
    pub ah_s_tau: f64,
    pub az_s_tau: f64,
    pub l_inf: f64,
    pub smoothing_pairing: f64,
    pub overflow_flags: OverflowFlags,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverflowFlags {
    pub ah_s_tau: bool,
    pub az_s_tau: bool,
    pub smoothing_pairing: bool,
}

impl OverflowFlags {
    pub fn any(&self) -> bool {
        self.ah_s_tau || self.az_s_tau || self.smoothing_pairing
    }
}

impl NormReport {
    pub const CSV_HEADER: &'static str = "t,h_s,z_s,ah_s_tau,az_s_tau,l_inf,smoothing_pairing";

    /// Report for a single decaying field; overflowed entries become NaN and are flagged.
    pub fn evaluate(t: f64, f: &Field, p: NormParams) -> Self {
        let mut flags = OverflowFlags::default();
        let ah = a_norm(f, Base::H(p.s), p.tau).unwrap_or_else(|_| {
            flags.ah_s_tau = true;
            f64::NAN
        });
        let az = a_norm(f, Base::Z(p.s), p.tau).unwrap_or_else(|_| {
            flags.az_s_tau = true;
            f64::NAN
        });
        let pairing = smoothing_pairing(f, p.tau).unwrap_or_else(|_| {
            flags.smoothing_pairing = true;
            f64::NAN
        });
        Self {
            t,
            h_s: h_norm(f, p.s),
            z_s: z_norm(f, p.s),
            ah_s_tau: ah,
            az_s_tau: az,
            l_inf: f.linf_norm(),
            smoothing_pairing: pairing,
            overflow_flags: flags,
        }
    }

    pub fn csv_row(&self) -> String {
        [self.t, self.h_s, self.z_s, self.ah_s_tau, self.az_s_tau, self.l_inf, self.smoothing_pairing]
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use num_complex::Complex64;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn h_norm_basic_values() {
        let grid = Grid::new(3.0, 64).unwrap();
        assert_eq!(h_norm(&Field::zeros(grid), 0.3), 0.0);
        let a = 1.7;
        let c = Field::constant(grid, Complex64::new(a, 0.0));
        for s in [-0.5, 0.0, 0.25, 1.0] {
            assert!((h_norm(&c, s) - a * (2.0 * grid.half_length()).sqrt()).abs() < 1e-12);
        }
        let big = Grid::new(40.0, 1024).unwrap();
        let f = Field::from_real_fn(big, sech);
        assert!((h_norm(&f, 0.0) - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn z_norm_basic_values() {
        let grid = Grid::new(3.0, 64).unwrap();
        assert_eq!(z_norm(&Field::zeros(grid), 0.5), 0.0);
        let c = Field::constant(grid, Complex64::new(0.0, -2.5));
        assert!((z_norm(&c, 0.25) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn a_norm_at_zero_tau_doubles() {
        let grid = Grid::new(20.0, 256).unwrap();
        let f = Field::from_real_fn(grid, |x| sech(x) * (1.0 + 0.3 * x.sin()));
        for base in [Base::H(0.3), Base::Z(0.5), Base::Linf, Base::L2] {
            assert!((a_norm(&f, base, 0.0).unwrap() - 2.0 * base_norm(&f, base)).abs() < 1e-14);
        }
    }

    #[test]
    fn exponential_shift_of_sech_matches_complex_evaluation() {
        let omega: f64 = 1.3;
        let k = omega.sqrt();
        let tau = 0.4;
        let grid = Grid::new(40.0, 1024).unwrap();
        let f = Field::from_real_fn(grid, |y| sech(k * y));
        let (plus, minus) = exp_pair(&f, tau).unwrap();
        let exact = |sign: f64| {
            Field::from_fn(grid, move |y| Complex64::new(1.0, 0.0) / (Complex64::new(k * y, -sign * k * tau)).cosh())
        };
        // Roundoff is amplified by e^{τ ξ_max} ≈ 1e7 here.
        assert!(plus.max_abs_diff(&exact(1.0)) < 1e-8);
        assert!(minus.max_abs_diff(&exact(-1.0)) < 1e-8);
    }

    #[test]
    fn smoothing_pairing_of_zero_is_zero() {
        let grid = Grid::new(5.0, 64).unwrap();
        assert_eq!(smoothing_pairing(&Field::zeros(grid), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn commutator_trivial_cases() {
        let grid = Grid::new(10.0, 128).unwrap();
        let g = Field::from_real_fn(grid, |y| sech(y) * y.cos());
        let c = Field::constant(grid, Complex64::new(0.3, 0.2));
        assert!(commutator_sobolev(&c, &dealias_band(&g), 0.7).linf_norm() < 1e-12);
        let f = Field::from_real_fn(grid, |y| (-y * y).exp());
        assert!(commutator_sobolev(&f, &g, 0.0).linf_norm() < 1e-14);
    }

    fn dealias_band(g: &Field) -> Field {
        crate::spectral::dealias(g)
    }

    #[test]
    fn report_row_has_seven_columns() {
        let grid = Grid::new(20.0, 256).unwrap();
        let f = Field::from_real_fn(grid, sech);
        let r = NormReport::evaluate(0.5, &f, NormParams::new(0.5, 0.2));
        assert!(!r.overflow_flags.any());
        assert_eq!(r.csv_row().split(',').count(), NormReport::CSV_HEADER.split(',').count());
    }
}
