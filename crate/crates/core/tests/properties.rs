use dcesim::cavity::{CavityConfig, ModeClass, solve_transverse_frequencies};
use dcesim::detuning::{msa_eigenvalues, numeric_eigenvalues, DetuningParams};
use dcesim::lindblad::{generator, TruncatedDensity};
use dcesim::linalg::{max_abs, multiset_distance};
use dcesim::propagator::{full_coefficients, propagator_matrix, symplectic_defect};
use dcesim::response::{n_left_quadratic, n_right_quadratic};
use dcesim::special::{coshm1, sinhc};
use dcesim::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_solve_and_interlace(l2 in 1.1f64..2.9, gamma in 30.0f64..500.0) {
        prop_assume!((l2 - l2.round()).abs() > 0.05);
        let cav = CavityConfig::new(0.0, 1.0, 1.0 + l2, 1.0, 1.0, gamma).unwrap();
        // Nearly coincident poles of the two families are refused rather than guessed.
        let roots = match solve_transverse_frequencies(&cav, 3, ModeClass::LeftDominated) {
            Ok(r) => r,
            Err(Error::AmbiguousClass { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for (k, &w) in roots.iter().enumerate() {
            prop_assert!(cav.residual(w).abs() < 1e-8 * (1.0 + gamma / w));
            prop_assert!(w < (k as f64 + 1.0) * std::f64::consts::PI);
        }
        prop_assert!(roots.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn occupations_are_nonnegative_and_monotone_in_initial_state(
        xi in 0.01f64..2.0,
        ratio in 0.0f64..3.0,
        t in 0.0f64..5.0,
        nl in 0.0f64..10.0,
        nr in 0.0f64..10.0,
    ) {
        let chi = ratio * xi;
        let c = full_coefficients(xi, chi, t).unwrap();
        let scale = 1.0 + c.left.left.abs();
        prop_assert!(c.left.vacuum >= -1e-10 * scale && c.right.vacuum >= -1e-10 * scale);
        prop_assert!(c.left.left >= -1e-10 * scale);
        prop_assert!(c.left.right >= -1e-10 * scale);
        let lo = c.left.eval(nl, nr);
        let hi = c.left.eval(nl + 1.0, nr);
        prop_assert!(hi >= lo);
    }

    #[test]
    fn bosonic_commutators_survive(xi in 0.0f64..1.5, chi in 0.0f64..2.0, t in 0.0f64..3.0) {
        let u = propagator_matrix(xi, &[chi], t).unwrap();
        let m = u.amax().max(1.0);
        prop_assert!(symplectic_defect(&u) < 1e-12 * m * m);
    }

    #[test]
    fn quadratic_response_reduces_to_squeezing(xi in 0.01f64..2.0, t in 0.0f64..5.0, nl in 0.0f64..5.0, nr in 0.0f64..5.0) {
        let s2 = (2.0 * xi * t).sinh().powi(2);
        let l = n_left_quadratic(xi, 0.0, t, nl, nr).unwrap().value;
        let r = n_right_quadratic(xi, 0.0, t, nl, nr).unwrap().value;
        prop_assert!((l - (s2 + (1.0 + 2.0 * s2) * nl)).abs() <= 1e-12 * (1.0 + l));
        prop_assert_eq!(r, nr);
    }

    #[test]
    fn growth_eigenvalues_agree(
        xi in 0.001f64..0.05,
        chi in 0.0f64..0.05,
        d in -0.1f64..0.1,
        dd in -0.1f64..0.1,
    ) {
        let p = DetuningParams::new(d, dd, 1.0).unwrap();
        let a = msa_eigenvalues(xi, chi, &p);
        let b = numeric_eigenvalues(xi, chi, &p).unwrap();
        prop_assert!(multiset_distance(&a, &b) < 1e-9, "{:?} {:?}", a, b);
    }

    #[test]
    fn generator_is_traceless_and_hermitian(
        w in proptest::array::uniform5(0.0f64..1.0),
        n0 in 0.0f64..0.5,
    ) {
        let rho = TruncatedDensity::thermal(n0, 40).unwrap();
        let g = generator(&rho.matrix, &w);
        prop_assert!(g.trace().norm() < 1e-12);
        prop_assert!(max_abs(&(&g - g.adjoint())) < 1e-12);
    }

    #[test]
    fn special_functions_match_definitions(x in -30.0f64..30.0) {
        prop_assume!(x.abs() > 1e-3);
        prop_assert!((sinhc(x) - x.sinh() / x).abs() <= 1e-14 * sinhc(x));
        prop_assert!((coshm1(x) - (x.cosh() - 1.0)).abs() <= 1e-13 * coshm1(x).max(1e-300) + 1e-16);
    }
}
