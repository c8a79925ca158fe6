//! Pointwise checks of the x ↔ y derivative identities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::background::SplitField;
use crate::spectral::Field;
use crate::states::XProfile;

/// Which right-hand side to use for the third-derivative identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityForm {
    /// `2W³ - αW² + 5WW_y - αW_y - α_yW + W_yy`.
    #[default]
    Derived,
    /// `2W³ + 4WW_y - αW_y - α_yW + W_yy`.
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `u_x = (U/|U|) W`.
    pub first: f64,
    /// `(½u²)_xx = (U²/|U|²)(2W² - αW + W_y)`.
    pub second: f64,
    /// `[ū(½u²)_xx]_x = (U/|U|)(…)`.
    pub third: f64,
    pub w_linf: f64,
}

/// Sup-norm residuals over y-grid nodes with `|y| ≤ interior · L_y`.
///
/// `x_at_nodes[m]` is the x-preimage of y-node `m`.
pub fn appendix_identity_check(
    profile: &dyn XProfile,
    x_at_nodes: &[f64],
    u: &Field,
    w: &SplitField,
    form: IdentityForm,
    interior: f64,
) -> IdentityResiduals {
    let grid = *u.grid();
    let wt = w.total();
    let wy = w.derivative(1);
    let wyy = w.derivative(2);
    let mut r = IdentityResiduals { first: 0.0, second: 0.0, third: 0.0, w_linf: 0.0 };
    for m in 0..grid.len() {
        if grid.node(m).abs() > interior * grid.half_length() {
            continue;
        }
        let j = profile.jet(x_at_nodes[m]);
        let (u0, u1, u2, u3) = (j[0], j[1], j[2], j[3]);
        let q2 = u1 * u1 + u0 * u2;
        let lhs3 = u1.conj() * q2 + u0.conj() * (3.0 * u1 * u2 + u0 * u3);

        let big_u = u.at(m);
        let ph = big_u / big_u.norm();
        let (w0, w1, w2) = (wt.at(m), wy.at(m), wyy.at(m));
        let (a0, a1) = (w0.re, w1.re);
        let rhs1 = ph * w0;
        let rhs2 = ph * ph * (2.0 * w0 * w0 - a0 * w0 + w1);
        let inner: Complex64 = match form {
            IdentityForm::Derived => 2.0 * w0.powu(3) - a0 * w0 * w0 + 5.0 * w0 * w1 - a0 * w1 - a1 * w0 + w2,
            IdentityForm::Printed => 2.0 * w0.powu(3) + 4.0 * w0 * w1 - a0 * w1 - a1 * w0 + w2,
        };
        r.first = r.first.max((u1 - rhs1).norm());
        r.second = r.second.max((q2 - rhs2).norm());
        r.third = r.third.max((lhs3 - ph * inner).norm());
        r.w_linf = r.w_linf.max(w0.norm());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::forward_map;
    use crate::spectral::Grid;
    use crate::states::{self, BreatherProfile, BreatherSpec, PerturbationSpec, PerturbedProfile};

    #[test]
    fn breather_triple_satisfies_identities() {
        let spec = BreatherSpec::new(1.0, 0.3, 1.0);
        let p = BreatherProfile { spec, t: 0.0 };
        let yg = Grid::new(25.0, 1024).unwrap();
        let img = forward_map(&p, yg).unwrap();
        let (u, w) = states::breather_y_exact(0.0, &spec, yg);
        let split = SplitField::from_total(&w);
        let r = appendix_identity_check(&p, &img.x_at_nodes, &u, &split, IdentityForm::Derived, 0.8);
        assert!(r.first < 1e-6 && r.second < 1e-6 && r.third < 1e-6, "{r:?}");
        let bad = SplitField::from_total(&w.scale_real(1.1));
        let r = appendix_identity_check(&p, &img.x_at_nodes, &u, &bad, IdentityForm::Derived, 0.8);
        assert!(r.first >= 0.05 * w.linf_norm());
    }

    #[test]
    fn printed_third_identity_fails_for_breather() {
        let spec = BreatherSpec::default();
        let p = BreatherProfile { spec, t: 0.0 };
        let yg = Grid::new(25.0, 1024).unwrap();
        let img = forward_map(&p, yg).unwrap();
        let split = SplitField::from_total(&img.w);
        let r = appendix_identity_check(&p, &img.x_at_nodes, &img.u, &split, IdentityForm::Printed, 0.8);
        assert!(r.third > 0.1, "{r:?}");
    }

    #[test]
    fn residuals_are_small_for_perturbed_data() {
        let spec = BreatherSpec::default();
        let yg = Grid::new(25.0, 2048).unwrap();
        let mut last = None;
        for a in [0.0, 0.01, 0.1] {
            let p = PerturbedProfile { spec, pert: PerturbationSpec::with_amplitude(a) };
            let img = forward_map(&p, yg).unwrap();
            let (u, w) = states::perturbed_y_data(&spec, &PerturbationSpec::with_amplitude(a), yg);
            let split = SplitField::from_total(&w);
            let r = appendix_identity_check(&p, &img.x_at_nodes, &u, &split, IdentityForm::Derived, 0.8);
            assert!(r.first < 1e-6 && r.second < 1e-6 && r.third < 1e-5, "a = {a}: {r:?}");
            last = Some(r);
        }
        assert!(last.is_some());
    }
}
