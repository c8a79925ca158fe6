//! Orbital distance of `u²` to the orbit `{e^{2iθ} φ_ω(· - h)²}` and run diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::spectral::{calculus::diff, Field};
use crate::states::{self, BreatherSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub distance: f64,
    pub theta: f64,
    pub h: f64,
    /// Optimizer ended on the `h` search boundary.
    pub boundary_flag: bool,
}

/// Precomputed objective `J(θ, h) = ‖q - e^{2iθ}ψ_h‖_{L¹} + ‖∂_x(q - e^{2iθ}ψ_h)‖_{L²}`
/// with `q = u²`, `ψ_h = φ_ω(· - h)²`. Translating the orbit element instead of
/// `u` is equivalent on the line and avoids resampling the data.
pub struct StabilityObjective {
    q: Field,
    qx: Field,
    spec: BreatherSpec,
    pub h_max: f64,
}

impl StabilityObjective {
    pub fn new(u: &Field, omega: f64) -> Self {
        let q = u * u;
        let qx = diff(&q, 1);
        let h_max = 0.5 * u.grid().half_length();
        Self { q, qx, spec: BreatherSpec::new(omega, 0.0, 1.0), h_max }
    }

    fn orbit(&self, h: f64) -> (Field, Field) {
        let grid = *self.q.grid();
        let psi = Field::from_real_fn(grid, |x| self.spec.profile(x - h).powi(2));
        let psi_x = diff(&psi, 1);
        (psi, psi_x)
    }

    fn eval_with(&self, psi: &(Field, Field), theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, 2.0 * theta);
        let dx = self.q.grid().dx();
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for n in 0..self.q.len() {
            l1 += (self.q.at(n) - e * psi.0.at(n)).norm();
            l2 += (self.qx.at(n) - e * psi.1.at(n)).norm_sqr();
        }
        l1 * dx + (l2 * dx).sqrt()
    }

    pub fn eval(&self, theta: f64, h: f64) -> f64 {
        self.eval_with(&self.orbit(h), theta)
    }

    /// Exhaustive minimum over an `nt × nh` grid of `[0, π) × [-h_max, h_max]`.
    pub fn grid_search(&self, nt: usize, nh: usize) -> (f64, f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for ih in 0..nh {
            let h = -self.h_max + 2.0 * self.h_max * ih as f64 / (nh - 1) as f64;
            let orbit = self.orbit(h);
            for it in 0..nt {
                let theta = PI * it as f64 / nt as f64;
                let v = self.eval_with(&orbit, theta);
                if v < best.0 {
                    best = (v, theta, h);
                }
            }
        }
        best
    }
}

/// Derivative-free Nelder–Mead on `f(θ, h)` with `h` clamped to `[-h_max, h_max]`.
fn nelder_mead(f: impl Fn(f64, f64) -> f64, start: (f64, f64), scale: (f64, f64), h_max: f64) -> (f64, f64, f64) {
    let clamp = |p: [f64; 2]| [p[0], p[1].clamp(-h_max, h_max)];
    let eval = |p: [f64; 2]| f(p[0], p[1]);
    let mut s = [
        clamp([start.0, start.1]),
        clamp([start.0 + scale.0, start.1]),
        clamp([start.0, start.1 + scale.1]),
    ];
    let mut v = s.map(eval);
    for _ in 0..2000 {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        let size = (s[w][0] - s[b][0]).abs().max((s[w][1] - s[b][1]).abs()).max((s[m][0] - s[b][0]).abs()).max((s[m][1] - s[b][1]).abs());
        if size < 1e-10 {
            break;
        }
        let c = [(s[b][0] + s[m][0]) / 2.0, (s[b][1] + s[m][1]) / 2.0];
        let at = |t: f64| clamp([c[0] + t * (s[w][0] - c[0]), c[1] + t * (s[w][1] - c[1])]);
        let r = at(-1.0);
        let vr = eval(r);
        if vr < v[b] {
            let e = at(-2.0);
            let ve = eval(e);
            if ve < vr {
                s[w] = e;
                v[w] = ve;
            } else {
                s[w] = r;
                v[w] = vr;
            }
        } else if vr < v[m] {
            s[w] = r;
            v[w] = vr;
        } else {
            let k = if vr < v[w] { at(-0.5) } else { at(0.5) };
            let vk = eval(k);
            if vk < v[w].min(vr) {
                s[w] = k;
                v[w] = vk;
            } else {
                for i in [m, w] {
                    s[i] = clamp([(s[i][0] + s[b][0]) / 2.0, (s[i][1] + s[b][1]) / 2.0]);
                    v[i] = eval(s[i]);
                }
            }
        }
    }
    let b = (0..3).min_by(|&a, &c| v[a].total_cmp(&v[c])).unwrap();
    (v[b], s[b][0], s[b][1])
}

/// `inf_{θ,h} ‖u(·+h)² - e^{2iθ}φ_ω²‖_{L¹∩Ḣ¹}`, 64×64 grid search then Nelder–Mead.
pub fn stability_distance(u: &Field, omega: f64) -> StabilityResult {
    let obj = StabilityObjective::new(u, omega);
    let (_, t0, h0) = obj.grid_search(64, 64);
    let dh = 2.0 * obj.h_max / 63.0;
    let (d, theta, h) = nelder_mead(|t, h| obj.eval(t, h), (t0, h0), (PI / 64.0, dh), obj.h_max);
    let theta = theta.rem_euclid(PI);
    let boundary_flag = h.abs() >= obj.h_max * (1.0 - 1e-9);
    StabilityResult { distance: d, theta, h, boundary_flag }
}

/// `(M_q, H_q) = (∫|q|, ¼∫|q_x|² - ½∫|q|²)` with `q = u²`.
pub fn q_functionals(u: &Field) -> (f64, f64) {
    let q = u * u;
    (q.l1_norm(), states::energy(u, 1.0))
}

/// `∫_{|x| ≥ x_0} |u|²`.
pub fn support_tail_mass(u: &Field) -> f64 {
    let g = u.grid();
    u.samples()
        .iter()
        .enumerate()
        .filter(|(n, _)| g.node(*n).abs() >= states::X0)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        * g.dx()
}

/// `min_θ ‖u - e^{iθ}φ_ω‖_{L²}`.
pub fn breather_l2_distance(u: &Field, omega: f64) -> f64 {
    let phi = Field::from_real_fn(*u.grid(), |x| BreatherSpec::new(omega, 0.0, 1.0).profile(x));
    let d2 = u.l2_norm().powi(2) + phi.l2_norm().powi(2) - 2.0 * u.inner(&phi).norm();
    d2.max(0.0).sqrt()
}

/// One row of `diagnostics.csv`. Stability entries are NaN on rows where the
/// distance was not evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub support_tail_mass: f64,
    pub breather_distance: f64,
    pub stability_distance: f64,
    pub theta_star: f64,
    pub h_star: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "t,mass,momentum,energy,support_tail_mass,breather_distance,stability_distance,theta_star,h_star";

    pub fn csv_row(&self) -> String {
        [
            self.t,
            self.mass,
            self.momentum,
            self.energy,
            self.support_tail_mass,
            self.breather_distance,
            self.stability_distance,
            self.theta_star,
            self.h_star,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn parse_csv_row(line: &str) -> Option<Self> {
        let v: Vec<f64> = line.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
        if v.len() != 9 {
            return None;
        }
        Some(Self {
            t: v[0],
            mass: v[1],
            momentum: v[2],
            energy: v[3],
            support_tail_mass: v[4],
            breather_distance: v[5],
            stability_distance: v[6],
            theta_star: v[7],
            h_star: v[8],
        })
    }
}

/// Aggregates the conserved functionals and, optionally, the orbital distance.
pub fn assemble_diagnostics(t: f64, u: &Field, spec: &BreatherSpec, stability: Option<StabilityResult>) -> DiagnosticsRecord {
    let st = stability.unwrap_or(StabilityResult { distance: f64::NAN, theta: f64::NAN, h: f64::NAN, boundary_flag: false });
    DiagnosticsRecord {
        t,
        mass: states::mass(u),
        momentum: states::momentum(u),
        energy: states::energy(u, spec.mu),
        support_tail_mass: support_tail_mass(u),
        breather_distance: breather_l2_distance(u, spec.omega),
        stability_distance: st.distance,
        theta_star: st.theta,
        h_star: st.h,
    }
}

/// `stability.csv` row.
pub fn stability_csv_row(t: f64, r: &StabilityResult) -> String {
    format!("{:.16e},{:.16e},{:.16e},{:.16e},{}", t, r.distance, r.theta, r.h, r.boundary_flag as u8)
}

pub const STABILITY_CSV_HEADER: &str = "t,distance,theta_star,h_star,boundary_flag";
