//! Grids, transforms, multipliers, Littlewood–Paley pieces and spectral calculus.

pub mod calculus;
mod fft;
mod field;
mod grid;
pub mod io;
pub mod lp;
mod multiplier;

pub use calculus::{
    antiderivative_from_zero, dealias, derivative, interpolate_local, interpolate_spectral,
    mul_dealiased, shift, AffineField,
};
pub use field::Field;
pub use grid::Grid;
pub use lp::{lp_lowpass, lp_project, paraproduct_hh, paraproduct_lh};
pub use multiplier::{apply_multiplier, ln_abs_sinh, ln_cosh, LogSymbol, MultiplierSpec, OverflowPolicy};
