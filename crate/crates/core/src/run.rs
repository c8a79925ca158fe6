//! Streaming hooks shared by the time-stepping drivers.

use crate::error::Result;
use crate::norms::NormReport;
use crate::spectral::Field;
use crate::stability::{DiagnosticsRecord, StabilityResult};

/// Per-step monitors of a flattened-coordinate run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaugeRecord {
    pub t: f64,
    pub tau: f64,
    pub c: f64,
    pub mass_left: f64,
    pub mass_right: f64,
    pub utow_residual: f64,
    pub v_edge_ratio: f64,
}

impl GaugeRecord {
    pub const CSV_HEADER: &'static str = "t,tau,c,mass_left,mass_right,utow_residual,v_edge_ratio";

    pub fn csv_row(&self) -> String {
        [self.t, self.tau, self.c, self.mass_left, self.mass_right, self.utow_residual, self.v_edge_ratio]
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Receives run output as it is produced, so an aborted run still leaves
/// everything up to the failure on disk.
pub trait RunObserver {
    fn diagnostics(&mut self, _r: &DiagnosticsRecord) -> Result<()> {
        Ok(())
    }
    /// `u` is always a physical-coordinate field.
    fn snapshot(&mut self, _index: usize, _t: f64, _u: &Field) -> Result<()> {
        Ok(())
    }
    /// Flattened-coordinate `(U, W)` at snapshot `index`.
    fn snapshot_y(&mut self, _index: usize, _t: f64, _u: &Field, _w: &Field) -> Result<()> {
        Ok(())
    }
    fn stability(&mut self, _t: f64, _r: &StabilityResult) -> Result<()> {
        Ok(())
    }
    fn norms(&mut self, _r: &NormReport) -> Result<()> {
        Ok(())
    }
    fn gauge(&mut self, _r: &GaugeRecord) -> Result<()> {
        Ok(())
    }
}

/// Discards everything.
pub struct NullObserver;

impl RunObserver for NullObserver {}

/// Snapshot step indices: every `stride` steps plus the final step.
pub(crate) fn is_snapshot_step(k: usize, n_steps: usize, stride: usize) -> bool {
    k == n_steps || (stride > 0 && k % stride == 0)
}
