//! Forward (x → y) and inverse (y → x) coordinate maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{antiderivative_from_zero, interpolate_spectral, AffineField, Field, Grid};
use crate::states::XProfile;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, 8 points.
const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// σ-mesh spacing; `x = x_0 tanh σ` flattens the endpoint singularity of `1/|u|`.
const SIGMA_STEP: f64 = 0.02;
/// Beyond this `x_0 - x` is below double resolution.
const SIGMA_MAX: f64 = 16.0;

/// The monotone map `y(x) = ∫_0^x dζ/|u| + c` tabulated on a σ-mesh, with
/// cubic Hermite interpolation in σ using exact slopes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoordMap {
    pub c: f64,
    pub x0: f64,
    pub sigma_step: f64,
    /// `x_i = x_0 tanh(σ_i)`, strictly inside `I`.
    pub x_nodes: Vec<f64>,
    /// `y_i = y(x_i)`, strictly increasing.
    pub y_values: Vec<f64>,
    /// `dy/dσ` at the nodes.
    pub slopes: Vec<f64>,
}

impl CoordMap {
    fn sigma0(&self) -> f64 {
        -(self.x_nodes.len() as f64 - 1.0) / 2.0 * self.sigma_step
    }

    fn hermite(&self, sigma: f64) -> (f64, f64) {
        let h = self.sigma_step;
        let n = self.x_nodes.len();
        let pos = ((sigma - self.sigma0()) / h).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let t = pos - i as f64;
        let (y0, y1) = (self.y_values[i], self.y_values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1;
        let der = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * d0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * d1) / h;
        (val, der)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y_values[0], *self.y_values.last().unwrap())
    }

    pub fn y_of_x(&self, x: f64) -> f64 {
        self.hermite((x / self.x0).atanh()).0
    }

    pub fn x_of_y(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.y_range();
        if !(lo..=hi).contains(&y) {
            return Err(Error::OutsideGrid(y));
        }
        let i = self.y_values.partition_point(|&v| v <= y).clamp(1, self.y_values.len() - 1) - 1;
        let frac = (y - self.y_values[i]) / (self.y_values[i + 1] - self.y_values[i]);
        let mut sigma = self.sigma0() + (i as f64 + frac) * self.sigma_step;
        for _ in 0..30 {
            let (v, d) = self.hermite(sigma);
            let step = (v - y) / d;
            sigma -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        Ok(self.x0 * sigma.tanh())
    }
}

/// `(U_0, W_0)` on the y-grid together with the tabulated map.
#[derive(Clone, Debug)]
pub struct ForwardImage {
    pub u: Field,
    pub w: Field,
    pub map: CoordMap,
    /// `x(y_m)` for every y-grid node.
    pub x_at_nodes: Vec<f64>,
}

fn integrand(p: &dyn XProfile, a: f64, sigma: f64) -> Result<f64> {
    let x = a * sigma.tanh();
    let m = p.modulus(x);
    if !(m > 0.0) {
        return Err(Error::MapUndefined(format!("|u| vanishes at interior point x = {x}")));
    }
    let sech = 1.0 / sigma.cosh();
    Ok(a * sech * sech / m)
}

fn panel(p: &dyn XProfile, a: f64, s0: f64, s1: f64) -> Result<f64> {
    let mid = 0.5 * (s0 + s1);
    let half = 0.5 * (s1 - s0);
    let mut acc = 0.0;
    for (xg, wg) in GL_X.iter().zip(GL_W) {
        acc += wg * integrand(p, a, mid + half * xg)?;
    }
    Ok(acc * half)
}

/// Tabulates `y(x) = ∫_0^x dζ/|u|` until `|y|` exceeds `y_extent` on both sides.
pub fn build_map(p: &dyn XProfile, y_extent: f64) -> Result<CoordMap> {
    let a = p.support();
    let h = SIGMA_STEP;
    let kmax = (SIGMA_MAX / h) as usize;
    let mut right = vec![0.0];
    let mut left = vec![0.0];
    let mut k = 0;
    while k < kmax && (right[k] < y_extent || -left[k] < y_extent) {
        let s = k as f64 * h;
        right.push(right[k] + panel(p, a, s, s + h)?);
        left.push(left[k] - panel(p, a, -s - h, -s)?);
        k += 1;
    }
    let resolved = right[k].min(-left[k]);
    if resolved < y_extent {
        return Err(Error::InsufficientCoverage { requested: y_extent, resolved });
    }
    let mut y_values: Vec<f64> = left.iter().rev().copied().collect();
    y_values.extend_from_slice(&right[1..]);
    let n = y_values.len();
    let sigma0 = -(k as f64) * h;
    let sigmas: Vec<f64> = (0..n).map(|i| sigma0 + i as f64 * h).collect();
    let slopes = sigmas.iter().map(|&s| integrand(p, a, s)).collect::<Result<Vec<_>>>()?;
    Ok(CoordMap {
        c: 0.0,
        x0: a,
        sigma_step: h,
        x_nodes: sigmas.iter().map(|s| a * s.tanh()).collect(),
        y_values,
        slopes,
    })
}

/// Maps an x-profile onto the uniform y-grid: `U(y(x)) = u(x)`, `W = ū u_x/|u|`.
pub fn forward_map(p: &dyn XProfile, yg: Grid) -> Result<ForwardImage> {
    let map = build_map(p, yg.half_length())?;
    let x_at_nodes = yg.nodes().iter().map(|&y| map.x_of_y(y)).collect::<Result<Vec<_>>>()?;
    let mut u = Vec::with_capacity(yg.len());
    let mut w = Vec::with_capacity(yg.len());
    for &x in &x_at_nodes {
        let j = p.jet(x);
        let m = j[0].norm();
        u.push(j[0]);
        w.push(j[0].conj() * j[1] / m);
    }
    Ok(ForwardImage { u: Field::new(yg, u)?, w: Field::new(yg, w)?, map, x_at_nodes })
}

/// `X(y) = ∫_c^y |U|` as an affine field minus its value at `c`.
pub struct InverseMap {
    pub anti: AffineField,
    pub modulus: Field,
    pub offset: Complex64,
}

impl InverseMap {
    pub fn new(u: &Field, c: f64) -> Self {
        let modulus = u.modulus();
        let anti = antiderivative_from_zero(&modulus);
        let offset = anti.slope * c + interpolate_spectral(&anti.periodic, c);
        Self { anti, modulus, offset }
    }

    pub fn x_of_y(&self, y: f64) -> f64 {
        (self.anti.slope * y + interpolate_spectral(&self.anti.periodic, y) - self.offset).re
    }

    pub fn image(&self) -> (f64, f64) {
        ((self.anti.left_edge() - self.offset).re, (self.anti.right_edge() - self.offset).re)
    }

    /// Solves `X(y) = x` by bracketed Newton.
    pub fn y_of_x(&self, x: f64, table: &[f64]) -> Option<f64> {
        let grid = self.anti.grid();
        let (lo, hi) = self.image();
        if !(x > lo && x < hi) {
            return None;
        }
        let n = table.len();
        let i = table.partition_point(|&v| v <= x);
        let (mut a, mut b) = if i == 0 {
            (-grid.half_length(), grid.node(0))
        } else if i >= n {
            (grid.node(n - 1), grid.half_length())
        } else {
            (grid.node(i - 1), grid.node(i))
        };
        let (fa, fb) = (
            if i == 0 { lo } else { table[i - 1] },
            if i >= n { hi } else { table[i] },
        );
        let mut y = a + (x - fa) / (fb - fa) * (b - a);
        for _ in 0..50 {
            let f = self.x_of_y(y) - x;
            if f > 0.0 {
                b = y;
            } else {
                a = y;
            }
            let d = interpolate_spectral(&self.modulus, y).re;
            let mut next = y - f / d;
            if !(next > a && next < b) || !next.is_finite() {
                next = 0.5 * (a + b);
            }
            if (next - y).abs() < 1e-14 * (1.0 + y.abs()) {
                return Some(next);
            }
            y = next;
        }
        Some(y)
    }
}

/// Maps `U` back to the x-grid; zero outside the image interval.
pub fn inverse_map(u: &Field, c: f64, xg: Grid) -> Result<Field> {
    let inv = InverseMap::new(u, c);
    let (lo, hi) = inv.image();
    if !(hi > lo) || u.samples().iter().any(|v| v.norm() == 0.0) {
        return Err(Error::MapUndefined("degenerate image interval".into()));
    }
    let table: Vec<f64> = inv.anti.samples().samples().iter().map(|v| (v - inv.offset).re).collect();
    let out = xg
        .nodes()
        .iter()
        .map(|&x| match inv.y_of_x(x, &table) {
            Some(y) => interpolate_spectral(u, y),
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    Field::new(xg, out)
}

/// An x-profile known only through samples, evaluated by trigonometric
/// interpolation. Only the region where `|u| ≥ 1e-3 max|u|` counts as resolved.
pub struct SampledProfile {
    jets: [Field; 4],
    support: f64,
}

impl SampledProfile {
    pub fn new(u: &Field) -> Result<Self> {
        let grid = *u.grid();
        let max = u.linf_norm();
        let mid = grid.origin_index();
        let thresh = 1e-3 * max;
        if !(u.at(mid).norm() >= thresh) {
            return Err(Error::MapUndefined("profile does not cover x = 0".into()));
        }
        let mut hi = mid;
        while hi + 1 < grid.len() && u.at(hi + 1).norm() >= thresh {
            hi += 1;
        }
        let mut lo = mid;
        while lo > 0 && u.at(lo - 1).norm() >= thresh {
            lo -= 1;
        }
        let support = grid.node(hi).min(-grid.node(lo));
        let d = |n| crate::spectral::calculus::diff(u, n);
        Ok(Self { jets: [u.clone(), d(1), d(2), d(3)], support })
    }
}

impl XProfile for SampledProfile {
    fn jet(&self, x: f64) -> [Complex64; 4] {
        [0, 1, 2, 3].map(|n| interpolate_spectral(&self.jets[n], x))
    }

    fn support(&self) -> f64 {
        self.support
    }
}

/// `(∫_{-L}^{c} |U|, ∫_{c}^{L} |U|)`.
pub fn half_line_masses(u: &Field, c: f64) -> (f64, f64) {
    let inv = InverseMap::new(u, c);
    let (lo, hi) = inv.image();
    (-lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, BreatherProfile, BreatherSpec, PerturbationSpec, PerturbedProfile, X0};
    use std::f64::consts::SQRT_2;

    fn breather() -> BreatherProfile {
        BreatherProfile { spec: BreatherSpec::default(), t: 0.0 }
    }

    #[test]
    fn tabulated_map_matches_closed_form() {
        for omega in [1.0, 2.3] {
            let p = BreatherProfile { spec: BreatherSpec::new(omega, 0.0, 1.0), t: 0.0 };
            let map = build_map(&p, 25.0 / omega.sqrt()).unwrap();
            assert_eq!(map.c, 0.0);
            for &x in &[-2.1, -1.0, -0.3, 0.0, 0.2, 1.7, 2.2] {
                let exact = states::breather_y_of_x(omega, x);
                assert!((map.y_of_x(x) - exact).abs() < 1e-8, "{x}: {} vs {exact}", map.y_of_x(x));
                assert!((map.x_of_y(exact).unwrap() - x).abs() < 1e-8);
                assert!((map.x_of_y(map.y_of_x(x)).unwrap() - x).abs() < 1e-12);
            }
            assert!(map.y_values.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn breather_image_is_sech() {
        let spec = BreatherSpec::default();
        let yg = Grid::new(25.0, 1024).unwrap();
        let img = forward_map(&breather(), yg).unwrap();
        let (u, w) = states::breather_y_exact(0.0, &spec, yg);
        assert!(img.u.max_abs_diff(&u) < 1e-6);
        assert!(img.w.max_abs_diff(&w) < 1e-6);
    }

    #[test]
    fn perturbed_modulus_is_f_independent() {
        let spec = BreatherSpec::default();
        let yg = Grid::new(25.0, 1024).unwrap();
        let p = PerturbedProfile { spec, pert: PerturbationSpec::default() };
        let img = forward_map(&p, yg).unwrap();
        let exact = Field::from_real_fn(yg, |y| SQRT_2 / y.cosh());
        assert!(img.u.modulus().max_abs_diff(&exact) < 1e-6);
    }

    #[test]
    fn coverage_is_enforced() {
        assert!(matches!(build_map(&breather(), 80.0), Err(Error::InsufficientCoverage { .. })));
        let xg = Grid::new(states::default_x_half_length(), 512).unwrap();
        let sampled = SampledProfile::new(&states::compacton(&BreatherSpec::default(), xg).unwrap()).unwrap();
        let yg = Grid::new(25.0, 256).unwrap();
        assert!(matches!(forward_map(&sampled, yg), Err(Error::InsufficientCoverage { .. })));
        let small = Grid::new(4.0, 256).unwrap();
        let img = forward_map(&sampled, small).unwrap();
        let exact = Field::from_real_fn(small, |y| SQRT_2 / y.cosh());
        assert!(img.u.max_abs_diff(&exact) < 1e-4);
    }

    #[test]
    fn inverse_of_breather_image() {
        let spec = BreatherSpec::default();
        let yg = Grid::new(25.0, 2048).unwrap();
        let (u, _) = states::breather_y_exact(0.0, &spec, yg);
        let xg = Grid::new(states::default_x_half_length(), 256).unwrap();
        let back = inverse_map(&u, 0.0, xg).unwrap();
        let phi = states::compacton(&spec, xg).unwrap();
        assert!(back.max_abs_diff(&phi) < 1e-6, "{}", back.max_abs_diff(&phi));
        for (x, v) in xg.nodes().iter().zip(back.samples()) {
            if x.abs() >= X0 {
                assert_eq!(v.norm(), 0.0);
            }
        }
        let (l, r) = half_line_masses(&u, 0.0);
        assert!((l - X0).abs() < 1e-6 && (r - X0).abs() < 1e-6);
    }
}
