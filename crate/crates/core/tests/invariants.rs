use num_complex::Complex64;
use proptest::prelude::*;

use qls_core::norms::{a_norm, h_norm, z_norm, Base};
use qls_core::spectral::{Field, Grid, MultiplierSpec};

/// Sum of a few complex Gaussian bumps on `[-π, π)`; analytic enough for every
/// weight used below.
fn bumps(parts: &[(f64, f64, f64, f64)]) -> Field {
    let g = Grid::new(std::f64::consts::PI, 256).unwrap();
    Field::from_fn(g, |x| {
        parts
            .iter()
            .map(|&(re, im, x0, w)| Complex64::new(re, im) * (-((x - x0) / w).powi(2)).exp())
            .sum()
    })
}

fn bump_params() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.35..0.8f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_absolutely_homogeneous(p in bump_params(), re in -3.0..3.0f64, im in -3.0..3.0f64, s in 0.0..1.5f64) {
        let f = bumps(&p);
        let lambda = Complex64::new(re, im);
        let scaled = f.map(|z| z * lambda);
        let k = lambda.norm();
        prop_assert!((h_norm(&scaled, s) - k * h_norm(&f, s)).abs() <= 1e-10 * (1.0 + k * h_norm(&f, s)));
        prop_assert!((z_norm(&scaled, s) - k * z_norm(&f, s)).abs() <= 1e-10 * (1.0 + k * z_norm(&f, s)));
    }

    #[test]
    fn sech_multiplier_contracts_l2_and_linf(p in bump_params(), tau in 0.1..1.0f64) {
        let f = bumps(&p);
        let cf = MultiplierSpec::sech(*f.grid(), tau).apply(&f).unwrap();
        prop_assert!(cf.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
        // The periodized kernel is positive with unit mass, so sup norms contract too.
        prop_assert!(cf.linf_norm() <= f.linf_norm() * (1.0 + 1e-9));
    }

    #[test]
    fn a_norm_grows_with_tau(p in bump_params(), t1 in 0.0..0.3f64, dt in 0.01..0.3f64) {
        let f = bumps(&p);
        let lo = a_norm(&f, Base::H(0.5), t1).unwrap();
        let hi = a_norm(&f, Base::H(0.5), t1 + dt).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-12), "{lo} > {hi}");
    }
}
