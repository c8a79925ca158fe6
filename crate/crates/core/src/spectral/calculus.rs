//! Spectral calculus: derivatives, antiderivatives, dealiasing, interpolation.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{Field, Grid, MultiplierSpec};
use crate::error::{Error, Result};

/// `∂^order f` with spectral accuracy; Nyquist is dropped for odd orders.
pub fn derivative(f: &Field, order: u32) -> Result<Field> {
    if order > 4 {
        return Err(Error::InvalidParameter(format!("derivative order {order} exceeds 4")));
    }
    if order == 0 {
        return Ok(f.clone());
    }
    Ok(diff(f, order))
}

/// Unchecked spectral derivative of any order.
pub(crate) fn diff(f: &Field, order: u32) -> Field {
    MultiplierSpec::derivative(*f.grid(), order).apply(f).expect("polynomial symbol")
}

/// `∂^order σ(D)^power f` with the smooth two-thirds filter `σ`.
pub(crate) fn diff_filtered(f: &Field, order: u32, power: f64) -> Field {
    let grid = *f.grid();
    MultiplierSpec::derivative(grid, order)
        .compose(&MultiplierSpec::smooth_dealias(grid, power))
        .and_then(|m| m.apply(f))
        .expect("polynomial symbol")
}

/// Zeroes every mode with `|k| > N/3`.
pub fn dealias(f: &Field) -> Field {
    MultiplierSpec::dealias(*f.grid()).apply(f).expect("mask symbol")
}

/// Pointwise product followed by the two-thirds mask.
pub fn mul_dealiased(a: &Field, b: &Field) -> Field {
    dealias(&(a * b))
}

/// A function `F(y) = slope·y + G(y)` with periodic `G`.
///
/// Antiderivatives of fields with nonzero mean are not periodic; the mean is
/// carried here as an explicit affine term.
#[derive(Clone, Debug)]
pub struct AffineField {
    pub slope: Complex64,
    pub periodic: Field,
}

impl AffineField {
    pub fn grid(&self) -> &Grid {
        self.periodic.grid()
    }

    /// Samples `slope·y_n + G(y_n)`.
    pub fn samples(&self) -> Field {
        let grid = *self.grid();
        Field::from_vec(
            grid,
            self.periodic
                .samples()
                .iter()
                .enumerate()
                .map(|(n, g)| g + self.slope * grid.node(n))
                .collect(),
        )
    }

    /// Value at an arbitrary `y` inside the grid.
    pub fn eval(&self, y: f64) -> Complex64 {
        self.slope * y + interpolate_local(&self.periodic, y)
    }

    /// Value at the right edge `y = L` (periodic part wraps to `G(-L)`).
    pub fn right_edge(&self) -> Complex64 {
        self.slope * self.grid().half_length() + self.periodic.at(0)
    }

    pub fn left_edge(&self) -> Complex64 {
        -self.slope * self.grid().half_length() + self.periodic.at(0)
    }

    /// `F' = slope + G'`.
    pub fn derivative(&self) -> Field {
        let g = diff(&self.periodic, 1);
        g.map(|v| v + self.slope)
    }

    pub fn scale(&self, c: Complex64) -> AffineField {
        AffineField { slope: self.slope * c, periodic: self.periodic.scale(c) }
    }
}

/// The antiderivative `F` of `f` with `F(0) = 0`.
///
/// The mean of `f` becomes the affine slope; the zero-mean part is integrated
/// spectrally (Nyquist dropped).
pub fn antiderivative_from_zero(f: &Field) -> AffineField {
    let grid = *f.grid();
    let spec = f.spectrum();
    let mean = f.samples().iter().sum::<Complex64>() / grid.len() as f64;
    let nyq = grid.nyquist_index();
    let coeffs: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 || i == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                c / Complex64::new(0.0, grid.wavenumber(i))
            }
        })
        .collect();
    let g = Field::from_spectrum(grid, coeffs).expect("grid-sized spectrum");
    let g0 = g.at(grid.origin_index());
    AffineField { slope: mean, periodic: g.map(|v| v - g0) }
}

/// Degree-6 barycentric (Lagrange) interpolation on the 7 nearest nodes,
/// with periodic wrap-around.
pub fn interpolate_local(f: &Field, y: f64) -> Complex64 {
    interpolate_local_order(f, y, 6)
}

pub fn interpolate_local_order(f: &Field, y: f64, order: usize) -> Complex64 {
    let grid = f.grid();
    let n = grid.len() as i64;
    let dx = grid.dx();
    let pos = (y + grid.half_length()) / dx;
    let base = pos.floor() as i64;
    let frac = pos - base as f64;
    if frac == 0.0 {
        return f.at(base.rem_euclid(n) as usize);
    }
    let npts = order as i64 + 1;
    let start = base - (npts - 1) / 2 + if frac > 0.5 && npts % 2 == 0 { 1 } else { 0 };
    // Equispaced barycentric weights w_i = (-1)^i C(order, i).
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    let mut binom = 1.0;
    for i in 0..npts {
        let idx = start + i;
        let t = pos - idx as f64;
        let w = if i % 2 == 0 { binom } else { -binom } / t;
        num += w * f.at(idx.rem_euclid(n) as usize);
        den += w;
        binom = binom * (order as f64 - i as f64) / (i as f64 + 1.0);
    }
    num / den
}

/// Exact trigonometric interpolant at an arbitrary `y`.
pub fn interpolate_spectral(f: &Field, y: f64) -> Complex64 {
    let grid = f.grid();
    let spec = f.spectrum();
    let n = grid.len();
    let nyq = grid.nyquist_index();
    let step = Complex64::from_polar(1.0, grid.dxi() * y);
    let mut acc = spec[0];
    let mut rot = Complex64::new(1.0, 0.0);
    for k in 1..nyq {
        rot *= step;
        acc += spec[k] * rot + spec[n - k] * rot.conj();
    }
    acc += spec[nyq] * (grid.wavenumber(nyq) * y).cos();
    acc * (grid.dxi() / (2.0 * PI).sqrt())
}

/// Spectral translate `y ↦ f(y + h)`.
pub fn shift(f: &Field, h: f64) -> Field {
    let grid = *f.grid();
    let m = MultiplierSpec::from_symbol(grid, move |xi| Complex64::new(0.0, xi * h).exp());
    m.apply(f).expect("unimodular symbol")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn constant_has_zero_derivative_and_order_zero_is_identity() {
        let grid = Grid::new(3.0, 32).unwrap();
        let c = Field::constant(grid, Complex64::new(1.5, 0.5));
        assert!(derivative(&c, 1).unwrap().linf_norm() < 1e-14);
        assert_eq!(derivative(&c, 0).unwrap(), c);
        assert!(derivative(&c, 5).is_err());
    }

    #[test]
    fn sech_second_derivative_matches_closed_form() {
        // sech'' = sech - 2 sech³.
        let grid = Grid::new(30.0, 512).unwrap();
        let f = Field::from_real_fn(grid, sech);
        let d2 = derivative(&f, 2).unwrap();
        let exact = Field::from_real_fn(grid, |x| sech(x) - 2.0 * sech(x).powi(3));
        assert!(d2.max_abs_diff(&exact) <= 1e-8);
    }

    #[test]
    fn antiderivative_of_single_mode() {
        let grid = Grid::new(2.5, 64).unwrap();
        let l = grid.half_length();
        let f = Field::from_real_fn(grid, |x| (PI * x / l).cos());
        let big_f = antiderivative_from_zero(&f);
        let exact = Field::from_real_fn(grid, |x| l / PI * (PI * x / l).sin());
        assert!(big_f.samples().max_abs_diff(&exact) <= 1e-12);
    }

    #[test]
    fn antiderivative_of_zero_and_one() {
        let grid = Grid::new(2.0, 32).unwrap();
        let zero = antiderivative_from_zero(&Field::zeros(grid));
        assert_eq!(zero.samples().linf_norm(), 0.0);
        let one = antiderivative_from_zero(&Field::constant(grid, Complex64::new(1.0, 0.0)));
        assert_eq!(one.slope, Complex64::new(1.0, 0.0));
        assert!(one.periodic.linf_norm() < 1e-15);
        let exact = Field::from_real_fn(grid, |x| x);
        assert!(one.samples().max_abs_diff(&exact) < 1e-15);
    }

    #[test]
    fn dealias_properties() {
        let grid = Grid::new(1.0, 96 / 3 * 2).unwrap();
        let band = Field::from_fn(grid, |x| Complex64::new(0.0, PI * 10.0 * x).exp());
        assert!(dealias(&band).max_abs_diff(&band) < 1e-13);
        let noise = Field::from_fn(grid, |x| Complex64::new((37.0 * x).sin() * (x * 91.0).cos(), x.exp().sin()));
        let d = dealias(&noise);
        for (i, c) in d.spectrum().iter().enumerate() {
            if grid.mode(i).abs() > grid.len() as i64 / 3 {
                assert!(c.norm() < 1e-14);
            }
        }
        assert!(dealias(&d).max_abs_diff(&d) < 1e-14);
    }

    #[test]
    fn interpolants_agree_on_smooth_data() {
        let grid = Grid::new(30.0, 512).unwrap();
        let f = Field::from_real_fn(grid, sech);
        for &y in &[0.013, -3.37, 7.91, 29.95] {
            let exact = sech(y);
            assert!((interpolate_spectral(&f, y).re - exact).abs() < 1e-10);
            assert!((interpolate_local(&f, y).re - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn shift_translates_smooth_data() {
        let grid = Grid::new(30.0, 512).unwrap();
        let f = Field::from_real_fn(grid, sech);
        let g = shift(&f, 0.37);
        let exact = Field::from_real_fn(grid, |x| sech(x + 0.37));
        assert!(g.max_abs_diff(&exact) < 1e-10);
    }
}
