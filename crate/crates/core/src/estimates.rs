//! Ensemble verification of the product, paraproduct, commutator and
//! analytic-norm estimates, plus the exact multiplier identities.
//!
//! Inequalities are checked as boundedness of `LHS / RHS` (constant 1 on the
//! right) together with stability of the maximum under `N → 2N`. Identities
//! report relative residuals.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{a_norm, c_tau_h_norm, commutator_sobolev, h_norm, smoothing_pairing, z_norm, Base};
use crate::spectral::calculus::diff;
use crate::spectral::lp::high_high_direct;
use crate::spectral::{lp_lowpass, paraproduct_hh, paraproduct_lh, Field, Grid, MultiplierSpec};
use crate::states::PerturbationSpec;

/// Seed of the shipped reference ensemble.
pub const DEFAULT_SEED: u64 = 0x51ab_1e5e_ed00_0001;
pub const DEFAULT_MEMBERS: usize = 64;
/// Verifier grid: `L = π` puts the wavenumbers on the integers.
pub const VERIFIER_HALF_LENGTH: f64 = PI;
pub const VERIFIER_N: usize = 512;
/// Highest populated mode `|k|`; kept fixed under `N → 2N` so both grids see the same functions.
pub const ENSEMBLE_BAND: usize = VERIFIER_N / 6;
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const KERNEL_TOLERANCE: f64 = 1e-6;
/// Slack for bounds that are equalities at some order (round-off in the far tail).
pub const CHAIN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimateName {
    #[serde(rename = "Symm-1")]
    Symm1,
    #[serde(rename = "Symm-2")]
    Symm2,
    #[serde(rename = "Asym-1")]
    Asym1,
    #[serde(rename = "Asym-2")]
    Asym2,
    #[serde(rename = "Asym-3")]
    Asym3,
    Trilinear,
    #[serde(rename = "Trilinear-2")]
    Trilinear2,
    Comm,
    #[serde(rename = "Comm-2")]
    Comm2,
    EquivalentNorm,
    #[serde(rename = "Z-Sobolev")]
    ZSobolev,
    #[serde(rename = "C-inverse")]
    CInverse,
    LinearGrowth,
    SmoothingEffect,
    ProductRule,
    ParaIdentity,
    MultiplierAlgebra,
    KernelMass,
    #[serde(rename = "AnalyticProd-1")]
    AnalyticProd1,
    #[serde(rename = "AnalyticProd-2")]
    AnalyticProd2,
    SechBound,
}

impl EstimateName {
    pub const ALL: [EstimateName; 21] = [
        Self::Symm1,
        Self::Symm2,
        Self::Asym1,
        Self::Asym2,
        Self::Asym3,
        Self::Trilinear,
        Self::Trilinear2,
        Self::Comm,
        Self::Comm2,
        Self::EquivalentNorm,
        Self::ZSobolev,
        Self::CInverse,
        Self::LinearGrowth,
        Self::SmoothingEffect,
        Self::ProductRule,
        Self::ParaIdentity,
        Self::MultiplierAlgebra,
        Self::KernelMass,
        Self::AnalyticProd1,
        Self::AnalyticProd2,
        Self::SechBound,
    ];

    pub const INEQUALITIES: [EstimateName; 14] = [
        Self::Symm1,
        Self::Symm2,
        Self::Asym1,
        Self::Asym2,
        Self::Asym3,
        Self::Trilinear,
        Self::Trilinear2,
        Self::Comm,
        Self::Comm2,
        Self::EquivalentNorm,
        Self::ZSobolev,
        Self::CInverse,
        Self::LinearGrowth,
        Self::SmoothingEffect,
    ];

    pub const IDENTITIES: [EstimateName; 4] = [Self::ProductRule, Self::ParaIdentity, Self::MultiplierAlgebra, Self::KernelMass];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Symm1 => "Symm-1",
            Self::Symm2 => "Symm-2",
            Self::Asym1 => "Asym-1",
            Self::Asym2 => "Asym-2",
            Self::Asym3 => "Asym-3",
            Self::Trilinear => "Trilinear",
            Self::Trilinear2 => "Trilinear-2",
            Self::Comm => "Comm",
            Self::Comm2 => "Comm-2",
            Self::EquivalentNorm => "EquivalentNorm",
            Self::ZSobolev => "Z-Sobolev",
            Self::CInverse => "C-inverse",
            Self::LinearGrowth => "LinearGrowth",
            Self::SmoothingEffect => "SmoothingEffect",
            Self::ProductRule => "ProductRule",
            Self::ParaIdentity => "ParaIdentity",
            Self::MultiplierAlgebra => "MultiplierAlgebra",
            Self::KernelMass => "KernelMass",
            Self::AnalyticProd1 => "AnalyticProd-1",
            Self::AnalyticProd2 => "AnalyticProd-2",
            Self::SechBound => "SechBound",
        }
    }

    pub fn kind(self) -> CaseKind {
        if Self::IDENTITIES.contains(&self) {
            CaseKind::Identity
        } else if matches!(self, Self::AnalyticProd1 | Self::AnalyticProd2 | Self::SechBound) {
            CaseKind::AnalyticChain
        } else {
            CaseKind::Inequality
        }
    }

    /// `(s, τ)` used when the caller does not override them.
    pub fn default_params(self) -> CaseParams {
        let tau = match self {
            Self::EquivalentNorm | Self::CInverse | Self::LinearGrowth | Self::SmoothingEffect => 0.5,
            Self::ProductRule | Self::MultiplierAlgebra | Self::KernelMass => 0.25,
            _ => 0.0,
        };
        CaseParams { s: 0.5, tau }
    }

    /// Parameter ranges under which the estimate is claimed.
    pub fn check_validity(self, p: CaseParams) -> Result<()> {
        let bad = |detail: &str| Err(Error::OutsideValidity { case: self.as_str().into(), detail: detail.into() });
        if !(p.s.is_finite() && p.tau.is_finite() && p.tau >= 0.0) {
            return bad("s and τ must be finite with τ ≥ 0");
        }
        match self {
            Self::Symm1 | Self::Symm2 | Self::Trilinear | Self::Trilinear2 if p.s < 0.0 => bad("requires s ≥ 0"),
            Self::Asym2 if !(0.0..=1.0).contains(&p.s) => bad("requires 0 ≤ s ≤ 1"),
            Self::Asym3 if !(p.s > 0.0 && p.s <= 0.5) => bad("requires 0 < s ≤ 1/2"),
            Self::Comm | Self::Comm2 if !(p.s > -0.5 && p.s <= 1.0) => bad("requires -1/2 < s ≤ 1"),
            Self::ZSobolev if p.s <= 0.0 => bad("requires s > 0"),
            Self::CInverse | Self::KernelMass if p.tau <= 0.0 => bad("requires τ > 0"),
            Self::LinearGrowth | Self::SmoothingEffect if !(p.tau > 0.0 && p.tau <= 1.0) => bad("requires 0 < τ ≤ 1"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EstimateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimateName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimate case {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Inequality,
    Identity,
    AnalyticChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub s: f64,
    pub tau: f64,
}

/// Random band-limited fields with `|f̂_k| = ⟨ξ_k⟩^{-r} e^{-τ_a|ξ_k|}` and
/// uniform phases drawn in `|k|` order. Members cycle through
/// `(r, τ_a) ∈ {1, 2} × {0, 0.1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub seed: u64,
    pub members: usize,
    pub band: usize,
}

impl Default for Ensemble {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, members: DEFAULT_MEMBERS, band: ENSEMBLE_BAND }
    }
}

impl Ensemble {
    pub fn law(member: usize) -> (f64, f64) {
        [(1.0, 0.0), (2.0, 0.0), (1.0, 0.1), (2.0, 0.1)][member % 4]
    }

    /// Field `slot` of ensemble member `member` on `grid`, normalized to unit `L²`.
    pub fn field(&self, grid: Grid, member: usize, slot: usize) -> Field {
        assert!(2 * self.band < grid.len(), "band does not fit the grid");
        let (r, tau_a) = Self::law(member);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((member * 8 + slot) as u64);
        let n = grid.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        let mut put = |k: i64, rng: &mut ChaCha8Rng| {
            let xi = PI * k as f64 / grid.half_length();
            let amp = (1.0 + xi * xi).powf(-0.5 * r) * (-tau_a * xi.abs()).exp();
            let theta: f64 = rng.gen_range(0.0..2.0 * PI);
            coeffs[k.rem_euclid(n as i64) as usize] = Complex64::from_polar(amp, theta);
        };
        put(0, &mut rng);
        for k in 1..=self.band as i64 {
            put(k, &mut rng);
            put(-k, &mut rng);
        }
        // Normalize the coefficients so the exact spectrum stays cached.
        let norm = (coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dxi()).sqrt();
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Field::from_spectrum(grid, coeffs).expect("matching length")
    }
}

/// Ratio statistics at one resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub max: f64,
    pub median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: EstimateName,
    pub kind: CaseKind,
    pub params: CaseParams,
    pub seed: u64,
    pub members: usize,
    /// Ratios for inequalities, relative residuals for identities.
    pub coarse: Stats,
    pub fine: Stats,
    /// `max(coarse) / max(fine)`.
    pub resolution_ratio: f64,
    /// Upper bound implied by an explicit constant, if the estimate has one.
    pub explicit_bound: Option<f64>,
    pub passed: bool,
}

fn stats(n: usize, mut v: Vec<f64>) -> Stats {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
    v.sort_by(f64::total_cmp);
    let median = if v.is_empty() { f64::NAN } else { v[v.len() / 2] };
    Stats { n, max, median }
}

/// `‖f‖_X` for `τ = 0`, `‖f‖_{AX_τ}` otherwise.
fn nrm(f: &Field, base: Base, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        Ok(match base {
            Base::H(s) => h_norm(f, s),
            Base::Z(s) => z_norm(f, s),
            Base::Linf => f.linf_norm(),
            Base::L2 => f.l2_norm(),
        })
    } else {
        a_norm(f, base, tau)
    }
}

fn rel(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Product by direct convolution of the spectra. Unlike a pointwise product
/// this leaves no round-off in the empty modes, which the analytic weights
/// `e^{τ|ξ|}` would otherwise amplify.
pub fn conv(f: &Field, g: &Field) -> Result<Field> {
    f.same_grid(g)?;
    let grid = *f.grid();
    let n = grid.len() as i64;
    let support = |h: &Field| -> Vec<(i64, Complex64)> {
        h.spectrum().iter().enumerate().filter(|(_, c)| c.norm() != 0.0).map(|(i, c)| (grid.mode(i), *c)).collect()
    };
    let (a, b) = (support(f), support(g));
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for &(ka, ca) in &a {
        for &(kb, cb) in &b {
            let k = ka + kb;
            if 2 * k.abs() >= n {
                return Err(Error::UnderResolved(format!("product has content at mode {k}, beyond the grid")));
            }
            out[k.rem_euclid(n) as usize] += ca * cb;
        }
    }
    let scale = grid.dxi() / (2.0 * PI).sqrt();
    out.iter_mut().for_each(|c| *c *= scale);
    Field::from_spectrum(grid, out)
}

/// Cases built on FFT-based paraproducts or commutators carry round-off in
/// every mode, so they are only meaningful with `τ = 0`.
fn require_unweighted(name: EstimateName, tau: f64) -> Result<()> {
    if tau != 0.0 {
        return Err(Error::UnderResolved(format!("{name} uses pointwise products; analytic weights need τ = 0")));
    }
    Ok(())
}

/// Periodized `K(y) = (1/2τ) sech(πy/2τ)`.
pub fn c_inverse_kernel(y: f64, tau: f64, half_length: f64) -> f64 {
    let mut sum = 0.0;
    for m in -20i32..=20 {
        let z = PI * (y + 2.0 * half_length * m as f64) / (2.0 * tau);
        if z.abs() < 700.0 {
            sum += 1.0 / z.cosh();
        }
    }
    sum / (2.0 * tau)
}

/// One ensemble member's ratio (or residual) for `name`.
pub fn evaluate_member(name: EstimateName, p: CaseParams, f: &Field, g: &Field, h: &Field) -> Result<f64> {
    let (s, tau) = (p.s, p.tau);
    let grid = *f.grid();
    let fy = diff(f, 1);
    let gy = diff(g, 1);
    Ok(match name {
        EstimateName::Symm1 => {
            let lhs = nrm(&conv(f, &gy)?, Base::H(s), tau)?;
            lhs / (nrm(f, Base::Linf, tau)? * nrm(&gy, Base::H(s), tau)? + nrm(&fy, Base::H(s), tau)? * nrm(g, Base::Linf, tau)?)
        }
        EstimateName::Symm2 => {
            let lhs = nrm(&conv(f, g)?, Base::Z(s), tau)?;
            lhs / (nrm(f, Base::Linf, tau)? * nrm(g, Base::Z(s), tau)? + nrm(f, Base::Z(s), tau)? * nrm(g, Base::Linf, tau)?)
        }
        EstimateName::Asym1 => {
            require_unweighted(name, tau)?;
            let lhs = nrm(&paraproduct_lh(f, &gy), Base::H(s - 0.5), tau)?;
            lhs / (nrm(f, Base::Linf, tau)? * nrm(&gy, Base::H(s - 0.5), tau)?)
        }
        EstimateName::Asym2 => {
            require_unweighted(name, tau)?;
            let lhs = nrm(&(&(f * &gy) - &paraproduct_lh(f, &gy)), Base::H(s), tau)?;
            lhs / ((nrm(f, Base::Linf, tau)? + nrm(&fy, Base::Linf, tau)?) * nrm(g, Base::H(s), tau)?)
        }
        EstimateName::Asym3 => {
            require_unweighted(name, tau)?;
            let lhs = nrm(&(f * &gy), Base::H(s - 0.5), tau)?;
            lhs / (nrm(f, Base::Z(0.0), tau)? * nrm(&gy, Base::H(s - 0.5), tau)?)
        }
        EstimateName::Trilinear => {
            let lhs = nrm(&conv(&conv(f, g)?, h)?, Base::H(s), tau)?;
            let n = |x: &Field, r: f64| nrm(x, Base::H(r), tau);
            lhs / (n(f, s + 0.5)? * n(g, 0.5)? * n(h, 0.0)?
                + n(f, 0.5)? * n(g, 0.0)? * n(h, s + 0.5)?
                + n(f, 0.0)? * n(g, s + 0.5)? * n(h, 0.5)?)
        }
        EstimateName::Trilinear2 => {
            let lhs = nrm(&conv(&conv(f, g)?, h)?, Base::H(s), tau)?;
            let n = |x: &Field, r: f64| nrm(x, Base::H(r), tau);
            let hinf = nrm(h, Base::Linf, tau)?;
            lhs / (n(f, s + 0.5)? * n(g, 0.0)? * hinf + n(f, 0.0)? * n(g, s + 0.5)? * hinf + n(f, 0.0)? * n(g, 0.0)? * n(&diff(h, 1), s)?)
        }
        EstimateName::Comm => {
            require_unweighted(name, tau)?;
            let lhs = nrm(&commutator_sobolev(f, g, s), Base::H(0.0), tau)?;
            lhs / (nrm(&fy, Base::Z(0.0), tau)? * nrm(g, Base::H(s), tau)?)
        }
        EstimateName::Comm2 => {
            require_unweighted(name, tau)?;
            let rhs = nrm(&fy, Base::Linf, tau)? * nrm(g, Base::Linf, tau)?;
            let top = (grid.xi_max().log2().ceil() as u32).max(4);
            let mut worst: f64 = 0.0;
            for j in 4..=top {
                let c = &lp_lowpass(&(f * &gy), j) - &(f * &lp_lowpass(&gy, j));
                worst = worst.max(nrm(&c, Base::Linf, tau)? / rhs);
            }
            worst
        }
        EstimateName::EquivalentNorm => {
            let c = c_tau_h_norm(f, s, tau)?;
            let a = nrm(f, Base::H(s), tau)?;
            let a = if tau == 0.0 { 2.0 * a } else { a };
            (c / (0.5 * a)).max(a / (4.0 * c))
        }
        EstimateName::ZSobolev => {
            let lhs = nrm(f, Base::Linf, tau)?;
            lhs / (nrm(&lp_lowpass(f, 0), Base::Linf, tau)? + nrm(&fy, Base::H(s - 0.5), tau)?)
        }
        EstimateName::CInverse => {
            if (tau * grid.xi_max()).cosh().recip() > 1e-14 {
                return Err(Error::UnderResolved(format!("sech(τ ξ_max) = {:.1e}: the C_τ^-1 kernel is not resolved", (tau * grid.xi_max()).cosh().recip())));
            }
            let cf = MultiplierSpec::sech(grid, tau).apply(f)?;
            let r1 = cf.l1_norm() / f.l1_norm();
            let r2 = cf.l2_norm() / f.l2_norm();
            let ri = cf.linf_norm() / f.linf_norm();
            r1.max(r2).max(ri)
        }
        EstimateName::LinearGrowth => {
            let cf = MultiplierSpec::cosh(grid, tau).apply(f)?;
            (&cf - f).linf_norm() / (tau * a_norm(&fy, Base::Linf, tau)?)
        }
        EstimateName::SmoothingEffect => {
            let lhs = c_tau_h_norm(f, 0.5, tau)?.powi(2);
            lhs / (smoothing_pairing(f, tau)? + c_tau_h_norm(f, 0.0, tau)?.powi(2) / tau)
        }
        EstimateName::ProductRule => {
            let c = MultiplierSpec::cosh(grid, tau);
            let sn = MultiplierSpec::sinh_i(grid, tau);
            let fg = conv(f, g)?;
            let (cf, cg, sf, sg) = (c.apply(f)?, c.apply(g)?, sn.apply(f)?, sn.apply(g)?);
            let r1 = (&c.apply(&fg)? - &(&(&cf * &cg) - &(&sf * &sg))).linf_norm();
            let r2 = (&sn.apply(&fg)? - &(&(&sf * &cg) + &(&cf * &sg))).linf_norm();
            let scale = (&cf * &cg).linf_norm() + (&sf * &sg).linf_norm() + (&sf * &cg).linf_norm() + (&cf * &sg).linf_norm();
            rel(r1 + r2, scale)
        }
        EstimateName::ParaIdentity => {
            require_unweighted(name, tau)?;
            let fg = f * g;
            let parts = &(&paraproduct_lh(f, g) + &paraproduct_lh(g, f)) + &high_high_direct(f, g);
            let r1 = (&fg - &parts).linf_norm();
            let r2 = (&paraproduct_hh(f, g) - &high_high_direct(f, g)).linf_norm();
            rel(r1 + r2, fg.linf_norm())
        }
        EstimateName::MultiplierAlgebra => {
            let cf = MultiplierSpec::cosh(grid, tau).apply(f)?;
            let tcf = MultiplierSpec::tanh_i(grid, tau).apply(&cf)?;
            let i = Complex64::i();
            let mut worst: f64 = 0.0;
            for sign in [1.0, -1.0] {
                let e = MultiplierSpec::exp(grid, tau, sign).apply(f)?;
                let rhs = cf.zip_map(&tcf, |c, t| c - sign * i * t);
                worst = worst.max(rel((&e - &rhs).linf_norm(), e.linf_norm()));
            }
            worst
        }
        EstimateName::KernelMass => {
            let mut delta = vec![Complex64::new(0.0, 0.0); grid.len()];
            delta[grid.origin_index()] = Complex64::new(1.0 / grid.dx(), 0.0);
            let k = MultiplierSpec::sech(grid, tau).apply(&Field::new(grid, delta)?)?;
            let pointwise = (0..grid.len())
                .map(|n| (k.at(n).re - c_inverse_kernel(grid.node(n), tau, grid.half_length())).abs())
                .fold(0.0, f64::max);
            let mass = (k.integral().re - 1.0).abs();
            let closed = Field::from_real_fn(grid, |y| c_inverse_kernel(y, tau, grid.half_length()));
            pointwise.max(mass).max((closed.integral().re - 1.0).abs())
        }
        EstimateName::AnalyticProd1 | EstimateName::AnalyticProd2 | EstimateName::SechBound => {
            return Err(Error::InvalidParameter(format!("{name} belongs to the analytic chain")));
        }
    })
}

/// Runs one case over the ensemble at `N` and `2N`.
pub fn run_case(name: EstimateName, params: Option<CaseParams>, ensemble: &Ensemble) -> Result<CaseReport> {
    if name.kind() == CaseKind::AnalyticChain {
        return Err(Error::InvalidParameter(format!("{name} is evaluated by run_analytic_chain")));
    }
    let p = params.unwrap_or_else(|| name.default_params());
    name.check_validity(p)?;
    let members = if name == EstimateName::KernelMass { 1 } else { ensemble.members };
    let at = |n: usize| -> Result<Stats> {
        let grid = Grid::new(VERIFIER_HALF_LENGTH, n)?;
        let v = (0..members)
            .into_par_iter()
            .map(|m| {
                let f = ensemble.field(grid, m, 0);
                let g = ensemble.field(grid, m, 1);
                let h = ensemble.field(grid, m, 2);
                evaluate_member(name, p, &f, &g, &h)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(stats(n, v))
    };
    let coarse = at(VERIFIER_N)?;
    let fine = at(2 * VERIFIER_N)?;
    let resolution_ratio = coarse.max / fine.max;
    let explicit_bound = match name {
        EstimateName::CInverse | EstimateName::EquivalentNorm => Some(1.0 + IDENTITY_TOLERANCE),
        _ => None,
    };
    let passed = match name.kind() {
        CaseKind::Identity => {
            let tol = if name == EstimateName::KernelMass { KERNEL_TOLERANCE } else { IDENTITY_TOLERANCE };
            coarse.max <= tol && fine.max <= tol
        }
        _ => {
            coarse.max.is_finite()
                && fine.max.is_finite()
                && (0.5..=2.0).contains(&resolution_ratio)
                && explicit_bound.is_none_or(|b| coarse.max <= b && fine.max <= b)
        }
    };
    Ok(CaseReport { name, kind: name.kind(), params: p, seed: ensemble.seed, members, coarse, fine, resolution_ratio, explicit_bound, passed })
}

/// Default parameters for every ensemble case.
pub fn run_all(ensemble: &Ensemble) -> Result<Vec<CaseReport>> {
    EstimateName::ALL
        .iter()
        .filter(|c| c.kind() != CaseKind::AnalyticChain)
        .map(|&c| run_case(c, None, ensemble))
        .collect()
}

/// Fixed-width summary, one line per case.
pub fn format_table(reports: &[CaseReport]) -> String {
    let mut out = format!(
        "{:<18} {:>6} {:>5} {:>12} {:>12} {:>12} {:>7}  {}\n",
        "case", "s", "tau", "max(N)", "max(2N)", "median(N)", "N/2N", "status"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<18} {:>6.3} {:>5.2} {:>12.4e} {:>12.4e} {:>12.4e} {:>7.3}  {}\n",
            r.name.as_str(),
            r.params.s,
            r.params.tau,
            r.coarse.max,
            r.fine.max,
            r.coarse.median,
            r.resolution_ratio,
            if r.passed { "ok" } else { "FAIL" }
        ));
    }
    out
}

/// One order of one bound in the analytic chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub bound: String,
    pub n: usize,
    /// `max_y LHS / RHS`; the bound holds when this is at most 1.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub rows: Vec<ChainRow>,
    /// Smallest `B` with `(1/n!)‖∂_y^n U_0‖_{L²} ≤ ‖U_0‖_{L²} Bⁿ` for `n ≤ n_max`.
    pub u0_radius_constant: f64,
    pub all_hold: bool,
}

/// Coefficients of `Pₙ` in `∂ⁿ sechᵖ = sechᵖ Pₙ(tanh)`, from
/// `P_{n+1} = (1 - T²) Pₙ' - p T Pₙ`.
fn sech_power_poly(p: u32, n: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; c.len() + 1];
        for (a, &v) in c.iter().enumerate() {
            if a > 0 {
                next[a - 1] += a as f64 * v;
            }
            next[a + 1] -= (a as f64 + p as f64) * v;
        }
        c = next;
    }
    c
}

fn eval_poly(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Spectral `∂^n f` after zeroing the round-off floor; errors if the spectral
/// tail shows the field is not resolved.
fn resolved_derivative(f: &Field, n: u32) -> Result<Field> {
    let spec = f.spectrum();
    let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let len = spec.len();
    let grid = *f.grid();
    let tail = (0..len)
        .filter(|&i| grid.mode(i).unsigned_abs() as usize > 9 * len / 20)
        .map(|i| spec[i].norm())
        .fold(0.0, f64::max);
    if tail > 1e-13 * peak {
        return Err(Error::UnderResolved(format!("spectral tail {:.1e} relative to peak", tail / peak)));
    }
    let cleaned: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.norm() < 1e-16 * peak {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, grid.wavenumber(i)).powu(n)
            }
        })
        .collect();
    Field::from_spectrum(grid, cleaned)
}

/// Numerical check of the analytic-bound chain up to order `n_max ≤ 10`:
/// the sech and tanh derivative bounds, the product bounds for `sech·sech`
/// and `sech³`, the perturbation derivative bound, and the resulting
/// `L²` derivative growth of `U_0`.
pub fn run_analytic_chain(pert: &PerturbationSpec, omega: f64, n_max: usize) -> Result<ChainReport> {
    if n_max > 10 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} > 10")));
    }
    pert.validate()?;
    let ys: Vec<f64> = (0..=4000).map(|i| -10.0 + 20.0 * i as f64 / 4000.0).collect();
    let mut rows = Vec::new();
    let mut push = |bound: &str, n: usize, ratio: f64| rows.push(ChainRow { bound: bound.into(), n, ratio });
    for n in 0..=n_max {
        let nf = factorial(n);
        let two_n = 2f64.powi(n as i32);
        let (p1, p2, p3) = (sech_power_poly(1, n), sech_power_poly(2, n), sech_power_poly(3, n));
        let mut r = [0.0f64; 4];
        for &y in &ys {
            let (t, s) = (y.tanh(), 1.0 / y.cosh());
            // ∂ⁿ sechᵖ / sechᵖ = Pₙ(tanh), so the sechᵖ weight cancels.
            r[0] = r[0].max(eval_poly(&p1, t).abs() / nf / two_n);
            r[1] = r[1].max(eval_poly(&p2, t).abs() / nf / ((n + 1) as f64 * two_n));
            r[2] = r[2].max(eval_poly(&p3, t).abs() / nf / (((n + 2) * (n + 1)) as f64 / 2.0 * two_n));
            // ∂ⁿ tanh = ∂^{n-1} sech².
            let dt = if n == 0 { t } else { s * s * eval_poly(&sech_power_poly(2, n - 1), t) };
            r[3] = r[3].max(dt.abs() / nf / two_n);
        }
        push("SechBound", n, r[0]);
        push("AnalyticProd-1", n, r[1]);
        push("AnalyticProd-2", n, r[2]);
        push("TanhBound", n, r[3]);
    }
    for (n, max, bound) in pert.derivative_bounds(n_max) {
        push("PerturbationDerivatives", n, max / bound);
    }
    let spec = crate::states::BreatherSpec::new(omega, 0.0, 1.0);
    let yg = Grid::new(40.0 / omega.sqrt(), 4096)?;
    let (u0, _) = crate::states::perturbed_y_data(&spec, pert, yg);
    let k = u0.l2_norm();
    let mut b: f64 = 0.0;
    for n in 1..=n_max {
        let d = resolved_derivative(&u0, n as u32)?;
        b = b.max((d.l2_norm() / factorial(n) / k).powf(1.0 / n as f64));
    }
    let all_hold = rows.iter().all(|r| r.ratio <= 1.0 + CHAIN_TOLERANCE);
    Ok(ChainReport { rows, u0_radius_constant: b, all_hold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Ensemble {
        Ensemble { members: 8, ..Default::default() }
    }

    #[test]
    fn names_round_trip() {
        for c in EstimateName::ALL {
            assert_eq!(c.as_str().parse::<EstimateName>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.as_str()));
        }
        assert!("Symm-9".parse::<EstimateName>().is_err());
    }

    #[test]
    fn ensemble_is_reproducible_and_resolution_independent() {
        let e = small();
        let g1 = Grid::new(VERIFIER_HALF_LENGTH, 512).unwrap();
        let g2 = Grid::new(VERIFIER_HALF_LENGTH, 1024).unwrap();
        let a = e.field(g1, 3, 1);
        assert_eq!(a, e.field(g1, 3, 1));
        assert!((a.l2_norm() - 1.0).abs() < 1e-12);
        let b = e.field(g2, 3, 1);
        for n in 0..512 {
            assert!((a.at(n) - b.at(2 * n)).norm() < 1e-12);
        }
        assert_ne!(a, e.field(g1, 4, 1));
    }

    #[test]
    fn validity_ranges_are_enforced() {
        let e = small();
        assert!(matches!(run_case(EstimateName::Comm, Some(CaseParams { s: 1.5, tau: 0.0 }), &e), Err(Error::OutsideValidity { .. })));
        assert!(matches!(run_case(EstimateName::Asym3, Some(CaseParams { s: 0.8, tau: 0.0 }), &e), Err(Error::OutsideValidity { .. })));
        assert!(run_case(EstimateName::Comm, Some(CaseParams { s: 0.75, tau: 0.0 }), &e).is_ok());
        assert!(run_case(EstimateName::SechBound, None, &e).is_err());
    }

    #[test]
    fn identities_hold_to_round_off() {
        let e = small();
        for c in EstimateName::IDENTITIES {
            let r = run_case(c, None, &e).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn c_inverse_is_a_contraction_and_rejects_unresolved_tau() {
        let r = run_case(EstimateName::CInverse, None, &small()).unwrap();
        assert!(r.passed && r.coarse.max <= 1.0 + 1e-10, "{r:?}");
        assert!(matches!(run_case(EstimateName::CInverse, Some(CaseParams { s: 0.5, tau: 0.05 }), &small()), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn symm1_is_stable_under_refinement() {
        let r = run_case(EstimateName::Symm1, None, &small()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.coarse.max > 0.0 && r.coarse.median <= r.coarse.max);
    }

    #[test]
    fn sech_bound_at_third_order() {
        let rep = run_analytic_chain(&PerturbationSpec::default(), 1.0, 10).unwrap();
        let row = rep.rows.iter().find(|r| r.bound == "SechBound" && r.n == 3).unwrap();
        // max_y |sech'''| / (6 · 8 sech) from the closed form sech·tanh·(6 sech² - 1)... evaluated on the interior.
        let exact = (0..=100000)
            .map(|i| {
                let y = -10.0 + 20.0 * i as f64 / 100000.0;
                let (t, s) = (y.tanh(), 1.0 / y.cosh());
                (t * (1.0 - 6.0 * s * s)).abs() / 48.0
            })
            .fold(0.0, f64::max);
        assert!((row.ratio - exact).abs() < 1e-3 * exact, "{} vs {exact}", row.ratio);
        for r in rep.rows.iter().filter(|r| r.n == 0) {
            assert!((r.ratio - 1.0).abs() < CHAIN_TOLERANCE || r.bound == "PerturbationDerivatives", "{r:?}");
        }
        assert!(rep.all_hold, "{:?}", rep.rows.iter().filter(|r| r.ratio > 1.0 + CHAIN_TOLERANCE).collect::<Vec<_>>());
        assert!(rep.u0_radius_constant.is_finite() && rep.u0_radius_constant > 0.0);
        assert!(run_analytic_chain(&PerturbationSpec::default(), 1.0, 11).is_err());
    }
}
