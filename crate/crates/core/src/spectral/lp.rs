//! Littlewood–Paley projections and Bony paraproducts.

use super::{calculus::mul_dealiased, Field, MultiplierSpec};

/// Smooth transition `ψ(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})` on `[0, 1]`.
fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// The even bump `φ`: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, smooth in between.
pub fn bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        transition((2.0 - a) / ((2.0 - a) + (a - 1.0)))
    }
}

/// Symbol of `P_{≤j} = φ(2^{-j}ξ)`.
pub fn lowpass_symbol(xi: f64, j: u32) -> f64 {
    bump(xi / 2f64.powi(j as i32))
}

/// Symbol of `P_0 = φ(ξ)` and `P_j = φ(2^{-j}ξ) - φ(2^{1-j}ξ)` for `j ≥ 1`.
pub fn band_symbol(xi: f64, j: u32) -> f64 {
    if j == 0 {
        bump(xi)
    } else {
        lowpass_symbol(xi, j) - lowpass_symbol(xi, j - 1)
    }
}

/// Smallest `J` with `P_{≤J} = 1` on the grid.
pub fn top_band(field: &Field) -> u32 {
    let xi_max = field.grid().xi_max();
    let mut j = 0;
    while 2f64.powi(j as i32) < xi_max {
        j += 1;
    }
    j
}

pub fn lp_project(f: &Field, j: u32) -> Field {
    MultiplierSpec::lp_band(*f.grid(), j).apply(f).expect("bounded symbol")
}

pub fn lp_lowpass(f: &Field, j: u32) -> Field {
    MultiplierSpec::lp_lowpass(*f.grid(), j).apply(f).expect("bounded symbol")
}

/// Low-high paraproduct `T_f g = Σ_{j≥4} P_{≤j-4} f · P_j g` (products dealiased).
pub fn paraproduct_lh(f: &Field, g: &Field) -> Field {
    f.same_grid(g).expect("paraproduct operands share a grid");
    let top = top_band(g);
    let mut acc = Field::zeros(*f.grid());
    for j in 4..=top {
        let low = lp_lowpass(f, j - 4);
        let band = lp_project(g, j);
        acc = &acc + &mul_dealiased(&low, &band);
    }
    acc
}

/// High-high remainder `Π[f, g] = fg - T_f g - T_g f` (products dealiased).
pub fn paraproduct_hh(f: &Field, g: &Field) -> Field {
    let fg = mul_dealiased(f, g);
    &(&fg - &paraproduct_lh(f, g)) - &paraproduct_lh(g, f)
}

/// `Σ_{|j-k|≤3} P_j f · P_k g`, the diagonal block of the double dyadic sum.
///
/// Independent route to `Π[f, g]`.
pub fn high_high_direct(f: &Field, g: &Field) -> Field {
    let top = top_band(f).max(top_band(g));
    let fb: Vec<Field> = (0..=top).map(|j| lp_project(f, j)).collect();
    let gb: Vec<Field> = (0..=top).map(|j| lp_project(g, j)).collect();
    let mut acc = Field::zeros(*f.grid());
    for (j, fj) in fb.iter().enumerate() {
        for (k, gk) in gb.iter().enumerate() {
            if j.abs_diff(k) <= 3 {
                acc = &acc + &mul_dealiased(fj, gk);
            }
        }
    }
    acc
}
