//! Binary field dumps: interleaved little-endian `f64` re/im plus a JSON sidecar.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use super::{Field, Grid};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n_points: usize,
    pub t: f64,
}

/// `t_0003.bin` → `t_0003.json`.
pub fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

pub fn encode(field: &Field) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * field.len());
    for v in field.samples() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode(grid: Grid, bytes: &[u8]) -> Result<Field> {
    if bytes.len() != 16 * grid.len() {
        return Err(Error::InvalidGrid(format!(
            "expected {} bytes for N = {}, found {}",
            16 * grid.len(),
            grid.len(),
            bytes.len()
        )));
    }
    let samples = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Field::new(grid, samples)
}

pub fn write_field(bin: &Path, field: &Field, t: f64) -> Result<()> {
    fs::write(bin, encode(field))?;
    let meta = Sidecar { half_length: field.grid().half_length(), n_points: field.len(), t };
    fs::write(sidecar_path(bin), serde_json::to_vec_pretty(&meta)?)?;
    Ok(())
}

pub fn read_field(bin: &Path) -> Result<(Field, f64)> {
    let meta: Sidecar = serde_json::from_slice(&fs::read(sidecar_path(bin))?)?;
    let grid = Grid::new(meta.half_length, meta.n_points)?;
    let field = decode(grid, &fs::read(bin)?)?;
    Ok((field, meta.t))
}
