use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("multiplier overflow at wavenumber {xi}: |m·f̂| exceeds double precision")]
    MultiplierOverflow { xi: f64 },

    #[error("config rejected: {0}")]
    Schema(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid half-length {half_length} does not pad the support half-width {support}")]
    SupportNotPadded { half_length: f64, support: f64 },

    #[error("coordinate map undefined: {0}")]
    MapUndefined(String),

    #[error("y-grid extent {requested} exceeds the resolved extent {resolved} of the data")]
    InsufficientCoverage { requested: f64, resolved: f64 },

    #[error("point {0} lies outside the grid")]
    OutsideGrid(f64),

    #[error("non-finite value detected at t = {t}")]
    BlowUp { t: f64 },

    #[error("time {t} exceeds the analyticity schedule horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    #[error("parameter outside the validity range of {case}: {detail}")]
    OutsideValidity { case: String, detail: String },

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
