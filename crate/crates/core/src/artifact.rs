//! On-disk run layout:
//!
//! ```text
//! <dir>/manifest.json        config echo, code version, seed, timings, completed flag
//! <dir>/diagnostics.csv      DiagnosticsRecord rows
//! <dir>/stability.csv        t,distance,theta_star,h_star,boundary_flag
//! <dir>/norms.csv            NormReport rows (y runs)
//! <dir>/gauge.csv            GaugeRecord rows (y runs)
//! <dir>/snapshots/t_<i>.bin  physical-coordinate u, with a JSON sidecar
//! <dir>/snapshots/y/U_<i>.bin, W_<i>.bin   flattened fields (y runs)
//! ```
//!
//! The manifest is written before anything else with `completed = false` and
//! rewritten when the run ends, so an aborted run is recognizable.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Coordinates, SimulateConfig};
use crate::error::{Error, Result};
use crate::norms::NormReport;
use crate::run::{GaugeRecord, RunObserver};
use crate::solver_x::run_x;
use crate::solver_y::run_y;
use crate::spectral::io::{read_field, write_field};
use crate::spectral::Field;
use crate::stability::{stability_csv_row, stability_distance, DiagnosticsRecord, StabilityResult, STABILITY_CSV_HEADER};

pub const MANIFEST: &str = "manifest.json";
pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const STABILITY_CSV: &str = "stability.csv";
pub const NORMS_CSV: &str = "norms.csv";
pub const GAUGE_CSV: &str = "gauge.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub t: f64,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub code_version: String,
    pub seed: u64,
    /// Frequency of the reference breather, needed to recompute distances.
    pub omega: f64,
    pub config: serde_json::Value,
    pub completed: bool,
    #[serde(default)]
    pub error: Option<String>,
    pub wall_seconds: f64,
    pub snapshots: Vec<SnapshotEntry>,
}

pub fn snapshot_name(index: usize) -> String {
    format!("t_{index:04}.bin")
}

/// Streams a run to disk.
pub struct ArtifactWriter {
    dir: PathBuf,
    manifest: Manifest,
    started: Instant,
    diagnostics: BufWriter<File>,
    stability: BufWriter<File>,
    norms: Option<BufWriter<File>>,
    gauge: Option<BufWriter<File>>,
}

fn csv(path: &Path, header: &str) -> Result<BufWriter<File>> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    Ok(w)
}

impl ArtifactWriter {
    /// Creates the directory and writes the provisional manifest. `flattened`
    /// adds the y-run tables.
    pub fn create(dir: &Path, command: &str, config: serde_json::Value, seed: u64, omega: f64, flattened: bool) -> Result<Self> {
        fs::create_dir_all(dir.join(SNAPSHOT_DIR))?;
        let manifest = Manifest {
            command: command.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            omega,
            config,
            completed: false,
            error: None,
            wall_seconds: 0.0,
            snapshots: Vec::new(),
        };
        write_manifest(dir, &manifest)?;
        let (norms, gauge) = if flattened {
            fs::create_dir_all(dir.join(SNAPSHOT_DIR).join("y"))?;
            (Some(csv(&dir.join(NORMS_CSV), NormReport::CSV_HEADER)?), Some(csv(&dir.join(GAUGE_CSV), GaugeRecord::CSV_HEADER)?))
        } else {
            (None, None)
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
            started: Instant::now(),
            diagnostics: csv(&dir.join(DIAGNOSTICS_CSV), DiagnosticsRecord::CSV_HEADER)?,
            stability: csv(&dir.join(STABILITY_CSV), STABILITY_CSV_HEADER)?,
            norms,
            gauge,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Flushes every table and rewrites the manifest with the outcome.
    pub fn finish(mut self, outcome: std::result::Result<(), &Error>) -> Result<Manifest> {
        self.diagnostics.flush()?;
        self.stability.flush()?;
        for w in [self.norms.as_mut(), self.gauge.as_mut()].into_iter().flatten() {
            w.flush()?;
        }
        self.manifest.completed = outcome.is_ok();
        self.manifest.error = outcome.err().map(|e| e.to_string());
        self.manifest.wall_seconds = self.started.elapsed().as_secs_f64();
        write_manifest(&self.dir, &self.manifest)?;
        Ok(self.manifest)
    }
}

impl RunObserver for ArtifactWriter {
    fn diagnostics(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.diagnostics, "{}", r.csv_row())?;
        Ok(())
    }

    fn snapshot(&mut self, index: usize, t: f64, u: &Field) -> Result<()> {
        let name = snapshot_name(index);
        write_field(&self.dir.join(SNAPSHOT_DIR).join(&name), u, t)?;
        self.manifest.snapshots.push(SnapshotEntry { index, t, file: format!("{SNAPSHOT_DIR}/{name}") });
        Ok(())
    }

    fn snapshot_y(&mut self, index: usize, t: f64, u: &Field, w: &Field) -> Result<()> {
        let y = self.dir.join(SNAPSHOT_DIR).join("y");
        write_field(&y.join(format!("U_{index:04}.bin")), u, t)?;
        write_field(&y.join(format!("W_{index:04}.bin")), w, t)
    }

    fn stability(&mut self, t: f64, r: &StabilityResult) -> Result<()> {
        writeln!(self.stability, "{}", stability_csv_row(t, r))?;
        Ok(())
    }

    fn norms(&mut self, r: &NormReport) -> Result<()> {
        if let Some(w) = self.norms.as_mut() {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }

    fn gauge(&mut self, r: &GaugeRecord) -> Result<()> {
        if let Some(w) = self.gauge.as_mut() {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }
}

/// Runs `cfg` into `dir`. A solver failure still finalizes the artifact
/// (with `completed = false`) before the error is returned.
pub fn simulate(cfg: &SimulateConfig, dir: &Path, command: &str, seed: u64) -> Result<Manifest> {
    let echo = serde_json::to_value(cfg)?;
    let flattened = cfg.coordinates == Coordinates::Y;
    let mut w = ArtifactWriter::create(dir, command, echo, seed, cfg.data.omega, flattened)?;
    let res = match cfg.coordinates {
        Coordinates::X => cfg.x_run().and_then(|x| run_x(&x, &mut w).map(|_| ())),
        Coordinates::Y => cfg.y_run().and_then(|y| run_y(&y, &mut w).map(|_| ())),
    };
    let m = w.finish(res.as_ref().map(|_| ()))?;
    res.map(|_| m)
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    let tmp = dir.join(".manifest.json.tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(m)?)?;
    fs::rename(tmp, dir.join(MANIFEST))?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    Ok(serde_json::from_slice(&fs::read(dir.join(MANIFEST))?)?)
}

/// Physical-coordinate snapshots in index order.
pub fn read_snapshots(dir: &Path) -> Result<Vec<(f64, Field)>> {
    let m = read_manifest(dir)?;
    let mut entries = m.snapshots;
    entries.sort_by_key(|e| e.index);
    entries.iter().map(|e| read_field(&dir.join(&e.file)).map(|(f, t)| (t, f))).collect()
}

/// Recomputes the orbital distance for every stored snapshot and rewrites
/// `stability.csv`.
pub fn recompute_stability(dir: &Path) -> Result<Vec<(f64, StabilityResult)>> {
    let m = read_manifest(dir)?;
    if !m.completed {
        return Err(Error::InvalidParameter(format!("{} is an incomplete artifact", dir.display())));
    }
    let rows: Vec<(f64, StabilityResult)> = {
        use rayon::prelude::*;
        read_snapshots(dir)?.into_par_iter().map(|(t, u)| (t, stability_distance(&u, m.omega))).collect()
    };
    let mut w = csv(&dir.join(STABILITY_CSV), STABILITY_CSV_HEADER)?;
    for (t, r) in &rows {
        writeln!(w, "{}", stability_csv_row(*t, r))?;
    }
    w.flush()?;
    Ok(rows)
}
