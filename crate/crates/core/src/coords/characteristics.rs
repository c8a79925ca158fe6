//! Characteristic curves `Y_t = b(t, Y)` with the variational equation for `Y_y`.

use crate::error::{Error, Result};
use crate::spectral::{calculus::diff, interpolate_local, Field};

/// A real velocity field `b(t, y)` and its derivative `b_y(t, y)`.
pub trait Velocity {
    fn eval(&self, t: f64, y: f64) -> (f64, f64);
    /// Valid range of `y`.
    fn bounds(&self) -> (f64, f64);
    /// Upper bound for `‖b_y‖_{L∞}` over the run.
    fn lipschitz(&self) -> f64;
}

/// Closed-form velocity `b(y)` with derivative.
pub struct AnalyticVelocity<F: Fn(f64) -> (f64, f64)> {
    pub f: F,
    pub bounds: (f64, f64),
    pub lipschitz: f64,
}

impl<F: Fn(f64) -> (f64, f64)> Velocity for AnalyticVelocity<F> {
    fn eval(&self, _t: f64, y: f64) -> (f64, f64) {
        (self.f)(y)
    }
    fn bounds(&self) -> (f64, f64) {
        self.bounds
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Piecewise-linear-in-time sequence of sampled velocities.
pub struct SampledVelocity {
    times: Vec<f64>,
    b: Vec<Field>,
    by: Vec<Field>,
}

impl SampledVelocity {
    pub fn new(times: Vec<f64>, fields: Vec<Field>) -> Self {
        assert_eq!(times.len(), fields.len());
        assert!(!times.is_empty());
        let by = fields.iter().map(|f| diff(f, 1)).collect();
        Self { times, b: fields, by }
    }

    pub fn stationary(field: Field) -> Self {
        Self::new(vec![0.0], vec![field])
    }
}

impl Velocity for SampledVelocity {
    fn eval(&self, t: f64, y: f64) -> (f64, f64) {
        let at = |k: usize| (interpolate_local(&self.b[k], y).re, interpolate_local(&self.by[k], y).re);
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return at(0);
        }
        if t >= self.times[n - 1] {
            return at(n - 1);
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let (a, b) = (at(k), at(k + 1));
        ((1.0 - w) * a.0 + w * b.0, (1.0 - w) * a.1 + w * b.1)
    }

    fn bounds(&self) -> (f64, f64) {
        let g = self.b[0].grid();
        (-g.half_length(), g.half_length())
    }

    fn lipschitz(&self) -> f64 {
        self.by.iter().map(|f| f.linf_norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct CharacteristicPath {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub y_y: Vec<f64>,
    /// `e^{-T‖b_y‖} ≤ Y_y ≤ e^{T‖b_y‖}` held at every step.
    pub growth_bounds_hold: bool,
}

/// RK4 integration of `(Y, Y_y)` from `t0` to `t1`.
pub fn characteristics_flow(v: &impl Velocity, y0: f64, t0: f64, t1: f64, dt: f64) -> Result<CharacteristicPath> {
    let (lo, hi) = v.bounds();
    let steps = ((t1 - t0) / dt).abs().ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let lip = v.lipschitz();
    let rhs = |t: f64, y: f64, yy: f64| {
        let (b, by) = v.eval(t, y);
        (b, by * yy)
    };
    let mut path = CharacteristicPath { t: vec![t0], y: vec![y0], y_y: vec![1.0], growth_bounds_hold: true };
    let (mut t, mut y, mut yy) = (t0, y0, 1.0);
    for _ in 0..steps {
        let k1 = rhs(t, y, yy);
        let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1.0, yy + 0.5 * h * k1.1);
        let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2.0, yy + 0.5 * h * k2.1);
        let k4 = rhs(t + h, y + h * k3.0, yy + h * k3.1);
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        yy += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        t += h;
        if !(y > lo && y < hi) {
            return Err(Error::OutsideGrid(y));
        }
        let bound = (lip * (t - t0).abs()).exp() * (1.0 + 1e-9);
        if yy > bound || yy < 1.0 / bound {
            path.growth_bounds_hold = false;
        }
        path.t.push(t);
        path.y.push(y);
        path.y_y.push(yy);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_velocity_freezes() {
        let grid = Grid::new(5.0, 64).unwrap();
        let v = SampledVelocity::stationary(Field::zeros(grid));
        let p = characteristics_flow(&v, 1.3, 0.0, 1.0, 0.01).unwrap();
        assert!(p.y.iter().all(|&y| y == 1.3));
    }

    #[test]
    fn affine_velocity_is_exponential() {
        let v = AnalyticVelocity { f: |y: f64| (y, 1.0), bounds: (-100.0, 100.0), lipschitz: 1.0 };
        let p = characteristics_flow(&v, 0.7, 0.0, 1.0, 1e-3).unwrap();
        assert!((p.y.last().unwrap() - 0.7 * 1f64.exp()).abs() < 1e-8);
        assert!((p.y_y.last().unwrap() - 1f64.exp()).abs() < 1e-8);
        assert!(characteristics_flow(&v, 50.0, 0.0, 1.0, 1e-2).is_err());
    }

    #[test]
    fn variational_growth_bounds_hold_for_sine_velocity() {
        let grid = Grid::new(4.0, 128).unwrap();
        let l = grid.half_length();
        let v = SampledVelocity::stationary(Field::from_real_fn(grid, |y| (PI * y / l).sin()));
        for y0 in [-2.5, -0.4, 0.0, 1.1, 3.0] {
            let p = characteristics_flow(&v, y0, 0.0, 1.0, 1e-3).unwrap();
            assert!(p.growth_bounds_hold);
        }
    }
}
