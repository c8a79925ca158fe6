//! JSON run configuration. Unknown keys are rejected; the schema document
//! shipped in `schema/simulate.schema.json` mirrors these types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver_x::XRunConfig;
use crate::solver_y::{FluxVariant, YRunConfig};
use crate::spectral::Grid;
use crate::states::{default_x_half_length, BreatherSpec, PerturbationSpec};

pub const SCHEMA_VERSION: u32 = 1;
/// Default half-length of the flattened grid.
pub const DEFAULT_Y_HALF_LENGTH: f64 = 25.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    X,
    Y,
}

/// Initial data: breather parameters plus an optional phase perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self { omega: 1.0, theta: 0.0, mu: None, perturbation: None }
    }
}

fn one() -> f64 {
    1.0
}
fn default_j() -> Option<u32> {
    Some(8)
}
fn default_half() -> f64 {
    0.5
}
fn default_delta() -> f64 {
    0.05
}
fn default_stride() -> usize {
    1
}
fn default_norms_stride() -> usize {
    10
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub schema_version: u32,
    pub coordinates: Coordinates,
    #[serde(rename = "N")]
    pub n: usize,
    /// Grid half-length; defaults to `1.5·π/√2` in x and 25 in y.
    #[serde(rename = "L", default)]
    pub l: Option<f64>,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// Steps between snapshots.
    pub snapshot_stride: usize,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub data: DataSpec,
    /// Steps between diagnostics rows (x runs).
    #[serde(default = "default_stride")]
    pub diagnostics_stride: usize,
    /// Orbital distance at every snapshot (x runs).
    #[serde(default = "yes")]
    pub stability: bool,
    /// Frequency cutoff; `null` means no projection.
    #[serde(default = "default_j")]
    pub j: Option<u32>,
    #[serde(default = "default_half")]
    pub s: f64,
    #[serde(default = "default_half")]
    pub tau0: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// `null` selects the norm-based default.
    #[serde(rename = "M", default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub flux_variant: FluxVariant,
    #[serde(default = "default_norms_stride")]
    pub norms_stride: usize,
    /// Points of the physical grid that y snapshots are mapped back onto.
    #[serde(rename = "x_N", default)]
    pub x_n: Option<usize>,
}

impl SimulateConfig {
    /// Parses and checks a config; every failure here is a schema error.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Schema(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if let (Some(a), Some(b)) = (self.mu, self.data.mu) {
            if a != b {
                return bad(format!("mu = {a} conflicts with data.mu = {b}"));
            }
        }
        if !(self.dt > 0.0 && self.t >= 0.0) {
            return bad("dt must be positive and T non-negative".into());
        }
        if self.snapshot_stride == 0 || self.diagnostics_stride == 0 || self.norms_stride == 0 {
            return bad("strides must be at least 1".into());
        }
        self.breather().validate().map_err(|e| Error::Schema(e.to_string()))?;
        if let Some(p) = &self.data.perturbation {
            p.validate().map_err(|e| Error::Schema(e.to_string()))?;
        }
        Grid::new(self.half_length(), self.n).map_err(|e| Error::Schema(e.to_string()))?;
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.mu.or(self.data.mu).unwrap_or(1.0)
    }

    pub fn breather(&self) -> BreatherSpec {
        BreatherSpec::new(self.data.omega, self.data.theta, self.mu())
    }

    pub fn half_length(&self) -> f64 {
        self.l.unwrap_or(match self.coordinates {
            Coordinates::X => default_x_half_length(),
            Coordinates::Y => DEFAULT_Y_HALF_LENGTH,
        })
    }

    pub fn x_run(&self) -> Result<XRunConfig> {
        Ok(XRunConfig {
            grid: Grid::new(self.half_length(), self.n)?,
            dt: self.dt,
            t_final: self.t,
            snapshot_stride: self.snapshot_stride,
            diagnostics_stride: self.diagnostics_stride,
            breather: self.breather(),
            perturbation: self.data.perturbation,
            stability: self.stability,
        })
    }

    pub fn y_run(&self) -> Result<YRunConfig> {
        Ok(YRunConfig {
            grid: Grid::new(self.half_length(), self.n)?,
            dt: self.dt,
            t_final: self.t,
            snapshot_stride: self.snapshot_stride,
            norms_stride: self.norms_stride,
            j: self.j,
            s: self.s,
            tau0: self.tau0,
            m: self.m,
            delta: self.delta,
            flux: self.flux_variant,
            breather: self.breather(),
            perturbation: self.data.perturbation,
            x_grid: Grid::new(default_x_half_length(), self.x_n.unwrap_or(1024))?,
        })
    }

    /// Configuration of the one-shot Figure-1 preset.
    pub fn figure1() -> Self {
        let x = crate::solver_x::figure1_config();
        Self {
            schema_version: SCHEMA_VERSION,
            coordinates: Coordinates::X,
            n: x.grid.len(),
            l: Some(x.grid.half_length()),
            dt: x.dt,
            t: x.t_final,
            snapshot_stride: x.snapshot_stride,
            mu: Some(x.breather.mu),
            data: DataSpec { omega: x.breather.omega, theta: x.breather.theta, mu: None, perturbation: x.perturbation },
            diagnostics_stride: x.diagnostics_stride,
            stability: x.stability,
            j: default_j(),
            s: 0.5,
            tau0: 0.5,
            delta: default_delta(),
            m: None,
            flux_variant: FluxVariant::Derived,
            norms_stride: default_norms_stride(),
            x_n: None,
        }
    }
}
