//! Transport velocities `b`, `B` and the gauge ODE right-hand side.

use num_complex::Complex64;

use crate::background::SplitField;
use crate::error::{Error, Result};
use crate::spectral::{antiderivative_from_zero, dealias, interpolate_local, AffineField, Field};

/// `-3 α β` with `α = Re W`, `β = Im W`, dealiased.
fn alpha_beta(w: &SplitField) -> Field {
    let total = w.total();
    let prod = total.zip_map(&w.v, |t, v| Complex64::new(-3.0 * t.re * v.im, 0.0));
    dealias(&prod)
}

/// `b(y) = -3 ∫_0^y α β`.
pub fn b_field(w: &SplitField) -> AffineField {
    antiderivative_from_zero(&alpha_beta(w))
}

/// `b` for a plain sampled `W` (no background split).
pub fn b_field_plain(w: &Field) -> AffineField {
    let prod = w.map(|z| Complex64::new(-3.0 * z.re * z.im, 0.0));
    antiderivative_from_zero(&dealias(&prod))
}

/// `B(y; j) = -3 sech(2^{-j} y) ∫_0^y α_{≤j} β_{≤j}`; `None` gives `b`.
pub fn big_b_field(w: &SplitField, j: Option<u32>) -> Field {
    match j {
        None => b_field(w).samples(),
        Some(j) => {
            let low = w.lowpass(Some(j));
            let b = b_field(&low).samples();
            let scale = 2f64.powi(-(j as i32));
            Field::from_real_fn(*w.grid(), |y| 1.0 / (scale * y).cosh()) * b
        }
    }
}

/// `c_t = -β(c) + b(c)`, both interpolated at the off-grid point `c`.
pub fn gauge_rhs(w: &SplitField, c: f64) -> Result<f64> {
    gauge_rhs_with(w, &b_field(w), c)
}

pub fn gauge_rhs_with(w: &SplitField, b: &AffineField, c: f64) -> Result<f64> {
    if !w.grid().contains(c) {
        return Err(Error::OutsideGrid(c));
    }
    let beta = interpolate_local(&w.v, c).im;
    Ok(-beta + b.eval(c).re)
}
