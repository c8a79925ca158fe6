use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use super::{fft, Grid};
use crate::error::{Error, Result};

/// A complex function sampled on a [`Grid`].
///
/// Spectral coefficients follow the continuum convention
/// `f̂(ξ) = (2π)^{-1/2} ∫ f(x) e^{-ixξ} dx`, approximated by
/// `f̂_k = Δx (2π)^{-1/2} Σ_n f(x_n) e^{-iξ_k x_n}`, and are computed lazily.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    samples: Vec<Complex64>,
    spectrum: OnceLock<Arc<Vec<Complex64>>>,
}

impl Field {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        Ok(Self { grid, samples, spectrum: OnceLock::new() })
    }

    pub(crate) fn from_vec(grid: Grid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples, spectrum: OnceLock::new() }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_vec(grid, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn constant(grid: Grid, value: Complex64) -> Self {
        Self::from_vec(grid, vec![value; grid.len()])
    }

    pub fn from_fn(grid: Grid, f: impl FnMut(f64) -> Complex64) -> Self {
        Self::from_vec(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Builds a field from continuum-normalized spectral coefficients in FFT order.
    pub fn from_spectrum(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let scale = grid.dxi() / (2.0 * PI).sqrt();
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { *c } else { -*c })
            .collect();
        fft::inverse(&mut buf);
        for v in &mut buf {
            *v *= scale;
        }
        let field = Self::from_vec(grid, buf);
        let _ = field.spectrum.set(Arc::new(coeffs));
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let scale = self.grid.dx() / (2.0 * PI).sqrt();
            let mut buf = self.samples.clone();
            fft::forward(&mut buf);
            for (i, v) in buf.iter_mut().enumerate() {
                *v *= if i % 2 == 0 { scale } else { -scale };
            }
            Arc::new(buf)
        })
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_vec(self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Field::from_vec(
            self.grid,
            self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn scale_real(&self, c: f64) -> Field {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn re(&self) -> Field {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(&self) -> Field {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn modulus(&self) -> Field {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn modulus_sqr(&self) -> Field {
        self.map(|v| Complex64::new(v.norm_sqr(), 0.0))
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.im).collect()
    }

    /// Trapezoid (spectrally exact for periodic data) integral `Σ f_n Δx`.
    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.grid.dx()
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `⟨f, g⟩ = ∫ f ḡ`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum::<Complex64>()
            * self.grid.dx()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Max pointwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.samples.iter().zip(&other.samples).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Value at sample index.
    pub fn at(&self, n: usize) -> Complex64 {
        self.samples[n]
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.samples == other.samples
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.map(|v| -v)
    }
}

impl Add for Field {
    type Output = Field;
    fn add(self, rhs: Field) -> Field {
        &self + &rhs
    }
}

impl Sub for Field {
    type Output = Field;
    fn sub(self, rhs: Field) -> Field {
        &self - &rhs
    }
}

impl Mul for Field {
    type Output = Field;
    fn mul(self, rhs: Field) -> Field {
        &self * &rhs
    }
}
