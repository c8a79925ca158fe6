use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic sampling of `[-L, L)` with `N` nodes.
///
/// Nodes are `x_n = -L + 2Ln/N`; the dual wavenumbers are `ξ_k = πk/L` for
/// `k ∈ {-N/2, …, N/2-1}`, stored in FFT order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_length: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!("half-length must be positive, got {half_length}")));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two ≥ 16, got {n_points}"
            )));
        }
        Ok(Self { half_length, n_points })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n_points as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_length
    }

    pub fn node(&self, n: usize) -> f64 {
        -self.half_length + self.dx() * n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|n| self.node(n)).collect()
    }

    /// Signed mode index of FFT slot `idx`.
    pub fn mode(&self, idx: usize) -> i64 {
        let n = self.n_points as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber `ξ` of FFT slot `idx`.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.mode(idx) as f64 * self.dxi()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.wavenumber(i)).collect()
    }

    /// FFT slot of the Nyquist mode `k = -N/2`.
    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    /// Largest resolved |ξ|.
    pub fn xi_max(&self) -> f64 {
        self.dxi() * (self.n_points / 2) as f64
    }

    /// Index of the node at `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.n_points / 2
    }

    /// Same half-length, twice the points.
    pub fn refined(&self) -> Self {
        Self { half_length: self.half_length, n_points: 2 * self.n_points }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= -self.half_length && x <= self.half_length
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1.0, 8).is_err());
        assert!(Grid::new(1.0, 24).is_err());
        assert!(Grid::new(0.0, 32).is_err());
        assert!(Grid::new(1.0, 16).is_ok());
    }

    #[test]
    fn spacing_and_modes() {
        let g = Grid::new(PI, 64).unwrap();
        assert!((g.dx() - 2.0 * PI / 64.0).abs() < 1e-15);
        assert!((g.dxi() - 1.0).abs() < 1e-15);
        assert_eq!(g.mode(0), 0);
        assert_eq!(g.mode(31), 31);
        assert_eq!(g.mode(32), -32);
        assert_eq!(g.mode(63), -1);
        assert_eq!(g.node(g.origin_index()), 0.0);
    }
}
