use dcesim::linalg::{expm, spectral_exp, to_complex, max_abs};
use dcesim::propagator::{
    affine_from_u, build_a, entire_coefficients, full_coefficients, multi_mode_response,
    n_left_full, n_right_full, propagator_matrix, symplectic_defect, DEGENERATE_WINDOW,
};
use dcesim::Error;

const CASES: &[(f64, f64, f64)] = &[
    (1.0, 0.5, 1.3),
    (1.0, 11.0, 2.1),
    (0.3, 0.2, 4.0),
    (0.0, 1.0, 2.0),
    (2.0, 0.1, 3.0),
    (0.5, 0.7, 10.0),
];

#[test]
fn closed_forms_match_matrix_exponential() {
    for &(xi, chi, t) in CASES {
        let u = propagator_matrix(xi, &[chi], t).unwrap();
        let rows = affine_from_u(&u);
        let c = full_coefficients(xi, chi, t).unwrap();
        let scale = 1.0 + rows[0][1].abs();
        for (got, want) in [(c.left, &rows[0]), (c.right, &rows[1])] {
            let diffs = [got.vacuum - want[0], got.left - want[1], got.right - want[2]];
            for d in diffs {
                assert!(d.abs() < 1e-10 * scale, "({xi},{chi},{t}) {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn group_property() {
    let (xi, chis) = (0.7, [0.3]);
    let u1 = propagator_matrix(xi, &chis, 0.8).unwrap();
    let u2 = propagator_matrix(xi, &chis, 1.1).unwrap();
    let u12 = propagator_matrix(xi, &chis, 1.9).unwrap();
    assert!(max_abs(&(&u1 * &u2 - &u12)) < 1e-12 * max_abs(&u12));
}

#[test]
fn eigendecomposition_route_agrees() {
    for &(xi, chi, t) in &[(1.0, 0.5, 1.3), (1.0, 11.0, 2.1), (0.3, 0.2, 2.0)] {
        let a = build_a(xi, &[chi]).unwrap() * t;
        let direct = to_complex(&expm(&a).unwrap());
        let spectral = spectral_exp(&to_complex(&a)).unwrap();
        assert!(max_abs(&(&direct - &spectral)) < 1e-10 * max_abs(&direct));
    }
}

#[test]
fn commutators_preserved() {
    for &(xi, chi, t) in CASES {
        let u = propagator_matrix(xi, &[chi], t).unwrap();
        let scale = max_abs(&u).powi(2);
        assert!(symplectic_defect(&u) < 1e-12 * scale.max(1.0), "({xi},{chi},{t})");
    }
    let u = propagator_matrix(0.4, &[0.1, 0.2, 0.05], 3.0).unwrap();
    assert!(symplectic_defect(&u) < 1e-11 * max_abs(&u).powi(2));
}

#[test]
fn degenerate_window_is_seamless() {
    let (xi, t) = (1.0, 2.5);
    let inside = full_coefficients(xi, xi * (1.0 - 0.4 * DEGENERATE_WINDOW), t).unwrap();
    let outside = full_coefficients(xi, xi * (1.0 - 0.6 * DEGENERATE_WINDOW), t).unwrap();
    let at = full_coefficients(xi, xi, t).unwrap();
    let scale = at.left.left.abs();
    assert!(inside.left.max_abs_diff(&outside.left) < 1e-5 * scale);
    assert!(at.left.max_abs_diff(&inside.left) < 1e-5 * scale);
    let (l, r) = entire_coefficients(xi, xi, t).unwrap();
    assert_eq!((l, r), (at.left, at.right));
}

#[test]
fn residue_of_complex_arithmetic_is_small() {
    for &(xi, chi, t) in CASES {
        let n = n_left_full(xi, chi, t, 0.3, 0.1).unwrap();
        assert!(n.imag_residue < 1e-12, "({xi},{chi},{t}) {}", n.imag_residue);
    }
}

#[test]
fn pure_hopping_conserves_total_number() {
    for t in [0.3, 1.0, 7.5] {
        let l = n_left_full(0.0, 0.8, t, 2.0, 0.5).unwrap().value;
        let r = n_right_full(0.0, 0.8, t, 2.0, 0.5).unwrap().value;
        assert!((l + r - 2.5).abs() < 1e-13);
        // Full swap at χT = π/2.
    }
    let t = std::f64::consts::FRAC_PI_2 / 0.8;
    let l = n_left_full(0.0, 0.8, t, 2.0, 0.5).unwrap().value;
    assert!((l - 0.5).abs() < 1e-13);
}

#[test]
fn several_right_modes_act_as_one_bright_mode() {
    let (xi, t) = (0.6, 1.7);
    let chis = [0.2, 0.15, 0.1];
    let eff = chis.iter().map(|c| c * c).sum::<f64>().sqrt();
    // Equal right occupations make the dark combinations irrelevant for N_L.
    let occ = [0.4, 0.25, 0.25, 0.25];
    let multi = multi_mode_response(xi, &chis, t, &occ).unwrap();
    let single = n_left_full(xi, eff, t, 0.4, 0.25).unwrap().value;
    assert!((multi[0] / single - 1.0).abs() < 1e-12);
    let single_r: f64 = multi[1..].iter().sum::<f64>() - 0.5;
    let bright = n_right_full(xi, eff, t, 0.4, 0.25).unwrap().value;
    assert!((single_r / bright - 1.0).abs() < 1e-10, "{single_r} {bright}");
    assert!(multi_mode_response(xi, &chis, t, &occ[..3]).is_err());
}

#[test]
fn overflow_and_bad_input_are_errors() {
    let err = propagator_matrix(1.0, &[0.1], 1e6).unwrap_err();
    assert!(matches!(err, Error::Overflow { .. }));
    assert!(build_a(1.0, &[]).is_err());
    assert!(full_coefficients(-1.0, 0.1, 1.0).is_err());
    assert!(full_coefficients(1.0, 0.1, f64::NAN).is_err());
}

#[test]
fn large_growth_matches_matrix_exponential() {
    // 170 puts the growth exponent past the point where a common factor is removed.
    for t in [150.0, 170.0] {
        let c = full_coefficients(1.0, 0.3, t).unwrap();
        let rows = affine_from_u(&propagator_matrix(1.0, &[0.3], t).unwrap());
        let got = [
            [c.left.vacuum, c.left.left, c.left.right],
            [c.right.vacuum, c.right.left, c.right.right],
        ];
        for (g, w) in got.iter().zip(&rows) {
            for k in 0..3 {
                assert!(g[k].is_finite());
                assert!((g[k] / w[k] - 1.0).abs() < 1e-9, "T={t}: {g:?} vs {w:?}");
            }
        }
    }
}
