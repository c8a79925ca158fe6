//! Spectral simulation and verification lab for the degenerate quasilinear
//! Schrödinger equation `i u_t = ū (u u_x)_x + μ |u|² u`.

pub mod artifact;
pub mod background;
pub mod config;
pub mod coords;
pub mod error;
pub mod estimates;
pub mod norms;
pub mod run;
pub mod solver_x;
pub mod solver_y;
pub mod spectral;
pub mod stability;
pub mod states;

pub use error::{Error, Result};
