use std::f64::consts::PI;

use dcesim::cavity::{
    fundamental_eta, geometry_factor, mode_frequency, perturbative_frequency, quality_factor,
    solve_transverse_frequencies, CavityConfig, EtaParam, Mode, ModeClass,
};
use dcesim::quad::integrate;
use dcesim::Error;

fn sqrt2(gamma: f64) -> CavityConfig {
    CavityConfig::new(0.0, 1.0, 1.0 + 2f64.sqrt(), 1.0, 1.0, gamma).unwrap()
}

/// Plain bisection on the cotangent form, between two consecutive poles.
fn bisect_root(cav: &CavityConfig, mut lo: f64, mut hi: f64) -> f64 {
    let f = |w: f64| cav.residual(w);
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn overlap(cav: &CavityConfig, f: impl Fn(f64) -> f64) -> f64 {
    integrate(&f, cav.a0, cav.b, 1e-14, 1e-13) + integrate(&f, cav.b, cav.c, 1e-14, 1e-13)
}

#[test]
fn fundamental_root_against_bisection_and_expansion() {
    let cav = sqrt2(50.0);
    let w = solve_transverse_frequencies(&cav, 1, ModeClass::LeftDominated).unwrap()[0];
    // Between the right-family pole π/√2 and π the residual changes sign once.
    let lo = PI / 2f64.sqrt() + 1e-9;
    let oracle = bisect_root(&cav, lo, PI - 1e-12);
    assert!((w / oracle - 1.0).abs() < 1e-12, "{w} vs {oracle}");
    let p2 = perturbative_frequency(&cav, 1, ModeClass::LeftDominated, 2).unwrap();
    assert!((w / p2 - 1.0).abs() < 1e-4);
}

#[test]
fn left_and_right_roots_sit_near_their_poles() {
    let cav = sqrt2(50.0);
    let eta = fundamental_eta(&cav).unwrap();
    let l = solve_transverse_frequencies(&cav, 1, ModeClass::LeftDominated).unwrap()[0];
    let r = solve_transverse_frequencies(&cav, 1, ModeClass::RightDominated).unwrap()[0];
    assert!(l != r);
    assert!((PI - l) / PI < 2.0 * eta);
    let pole_r = PI / 2f64.sqrt();
    assert!((pole_r - r) / pole_r < 2.0 * eta);
}

#[test]
fn roots_interlace_with_own_poles() {
    let cav = sqrt2(80.0);
    for class in [ModeClass::LeftDominated, ModeClass::RightDominated] {
        let len = match class {
            ModeClass::LeftDominated => cav.left_len(),
            ModeClass::RightDominated => cav.right_len(),
        };
        let roots = solve_transverse_frequencies(&cav, 8, class).unwrap();
        for (k, &w) in roots.iter().enumerate() {
            let kf = k as f64;
            assert!(w > kf * PI / len && w < (kf + 1.0) * PI / len);
            assert!(cav.residual(w).abs() < 1e-10);
        }
    }
}

#[test]
fn first_order_self_consistent_example() {
    // γ chosen so the fixed point sits exactly at η = 0.1.
    let cav = CavityConfig::new(0.0, 1.0, 2.5, 1.0, 1.0, (PI - 0.05) / 0.1).unwrap();
    let w = perturbative_frequency(&cav, 1, ModeClass::LeftDominated, 1).unwrap();
    assert!((w - (PI - 0.05)).abs() < 1e-13);
}

#[test]
fn vanishing_eta_gives_the_pole() {
    let cav = sqrt2(1e300);
    for n in 1..4 {
        let w = perturbative_frequency(&cav, n, ModeClass::LeftDominated, 2).unwrap();
        assert_eq!(w, f64::from(n) * PI);
    }
}

#[test]
fn second_order_pole_is_reported() {
    // 2·(3/2) is an integer, so cot(2π·1.5) diverges.
    let cav = CavityConfig::new(0.0, 1.0, 2.5, 1.0, 1.0, 100.0).unwrap();
    let err = perturbative_frequency(&cav, 2, ModeClass::LeftDominated, 2).unwrap_err();
    assert!(matches!(err, Error::Pole { .. }));
}

#[test]
fn perturbative_error_is_cubic() {
    let mut errs = Vec::new();
    for g in [60.0, 180.0, 540.0] {
        let cav = sqrt2(g);
        let w = solve_transverse_frequencies(&cav, 1, ModeClass::LeftDominated).unwrap()[0];
        let p = perturbative_frequency(&cav, 1, ModeClass::LeftDominated, 2).unwrap();
        errs.push((w - p).abs());
    }
    assert!(errs[0] / errs[1] >= 20.0 && errs[1] / errs[2] >= 20.0, "{errs:?}");
}

#[test]
fn pythagorean_and_cubic_limits() {
    let cav = CavityConfig::new(0.0, 1.0, 2.5, PI, PI, 100.0).unwrap();
    let mode = Mode {
        nx: 1,
        ny: 1,
        nz: 1,
        class: ModeClass::LeftDominated,
        omega_x: 3.0,
        omega_total: 0.0,
        norm_left: 1.0,
        norm_right: 0.0,
    };
    assert!((mode_frequency(&cav, &mode) - 11f64.sqrt()).abs() < 1e-15);

    let side = 0.01;
    let cubic = CavityConfig::new(0.0, side, 2.37 * side, side, side, 1e300).unwrap();
    let ideal = Mode {
        omega_x: PI / side,
        ..mode
    };
    let w = mode_frequency(&cubic, &ideal);
    assert!((w / (3f64.sqrt() * PI / side) - 1.0).abs() < 1e-15);
    let si = w * dcesim::units::SPEED_OF_LIGHT;
    assert!((si / 150e9 - 1.0).abs() < 0.1, "{si:e}");
}

#[test]
fn solved_modes_meet_their_invariants() {
    let cav = sqrt2(40.0);
    let eta = EtaParam::new(&cav).unwrap();
    for class in [ModeClass::LeftDominated, ModeClass::RightDominated] {
        for n in 1..=4 {
            let m = Mode::solve(&cav, n, 2, 1, class).unwrap();
            let ky = 2.0 * PI / cav.dy;
            let kz = PI / cav.dz;
            let want = m.omega_x * m.omega_x + ky * ky + kz * kz;
            assert!((m.omega_total * m.omega_total / want - 1.0).abs() < 1e-12);
            let jump = m.eigenfunction(&cav, cav.b) - m.norm_right * (m.omega_x * cav.right_len()).sin();
            assert!(jump.abs() < 1e-12);
            let norm = overlap(&cav, |x| m.eigenfunction(&cav, x).powi(2));
            assert!((norm - 1.0).abs() < 1e-10);
            let per_mode = eta.for_mode(&m);
            assert!((per_mode - m.omega_x / cav.gamma).abs() < 1e-12 * per_mode);
        }
    }
}

#[test]
fn orthonormal_across_classes() {
    let cav = sqrt2(50.0);
    let mut modes = Vec::new();
    for class in [ModeClass::LeftDominated, ModeClass::RightDominated] {
        for n in 1..=4 {
            modes.push(Mode::solve(&cav, n, 1, 1, class).unwrap());
        }
    }
    for (i, a) in modes.iter().enumerate() {
        for (j, b) in modes.iter().enumerate() {
            let v = overlap(&cav, |x| a.eigenfunction(&cav, x) * b.eigenfunction(&cav, x));
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-8, "({i},{j}) {v}");
        }
    }
}

#[test]
fn ambiguous_class_and_degenerate_geometry_rejected() {
    let err = solve_transverse_frequencies(&sqrt2(3.0), 2, ModeClass::LeftDominated).unwrap_err();
    assert!(matches!(err, Error::AmbiguousClass { .. }));
    let err = CavityConfig::new(0.0, 1.0, 3.0, 1.0, 1.0, 50.0).unwrap_err();
    assert!(matches!(err, Error::DegenerateGeometry { .. }));
}

/// `∫ f_μ ∂f_ν/∂a dx` with the derivative taken by moving the wall.
fn coupling_by_quadrature(cav: &CavityConfig, mu: &Mode, nu: &Mode) -> f64 {
    let h = 1e-5;
    let plus = cav.with_wall(cav.a0 + h).unwrap();
    let minus = cav.with_wall(cav.a0 - h).unwrap();
    let nu_p = Mode::solve(&plus, nu.nx, nu.ny, nu.nz, nu.class).unwrap();
    let nu_m = Mode::solve(&minus, nu.nx, nu.ny, nu.nz, nu.class).unwrap();
    let integrand = |x: f64| {
        let d = (nu_p.eigenfunction(&plus, x) - nu_m.eigenfunction(&minus, x)) / (2.0 * h);
        mu.eigenfunction(cav, x) * d
    };
    // Split at every breakpoint of the three profiles.
    let mut pts = [cav.a0 - h, cav.a0, cav.a0 + h, cav.b, cav.c];
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| integrate(integrand, w[0], w[1], 1e-13, 1e-11)).sum()
}

#[test]
fn geometry_factor_matches_quadrature() {
    let cav = sqrt2(50.0);
    let eta = fundamental_eta(&cav).unwrap();
    let l = Mode::fundamental(&cav).unwrap();
    for nx in 1..=3 {
        let r = Mode::solve(&cav, nx, 1, 1, ModeClass::RightDominated).unwrap();
        let m = geometry_factor(&cav, &l, &r).unwrap();
        let oracle = -coupling_by_quadrature(&cav, &l, &r);
        assert!((m - oracle).abs() <= 5.0 * eta * oracle.abs(), "n={nx}: {m} vs {oracle}");
        let back = coupling_by_quadrature(&cav, &r, &l);
        assert!((oracle - back).abs() < 1e-8 * (1.0 + oracle.abs()) + 1e-7, "{oracle} {back}");
    }
}

#[test]
fn geometry_factor_selection_rules() {
    let cav = sqrt2(50.0);
    let l = Mode::fundamental(&cav).unwrap();
    let r = Mode::solve(&cav, 1, 2, 1, ModeClass::RightDominated).unwrap();
    assert_eq!(geometry_factor(&cav, &l, &r).unwrap(), 0.0);
    // The coupling through the mirror vanishes linearly with η.
    let m_of = |g: f64| {
        let c = sqrt2(g);
        let l = Mode::fundamental(&c).unwrap();
        let r = Mode::solve(&c, 1, 1, 1, ModeClass::RightDominated).unwrap();
        geometry_factor(&c, &l, &r).unwrap()
    };
    let ratio = m_of(1e4) / m_of(1e5);
    assert!((ratio - 10.0).abs() < 0.01, "{ratio}");
}

#[test]
fn quality_factor_examples() {
    for (eta, want) in [(1e-4, 2.0 * PI * 1e8), (1e-3, 6.3e6)] {
        let cav = CavityConfig::new(0.0, 1.0, 2.37, 1.0, 1.0, PI / eta).unwrap();
        let q = quality_factor(&cav).unwrap();
        assert!((q / want - 1.0).abs() < 0.01, "{q:e}");
    }
    // Nearly transparent mirror: Q → 2π.
    let cav = CavityConfig::new(0.0, 1.0, 2.37, 1.0, 1.0, 1e-9).unwrap();
    assert!((quality_factor(&cav).unwrap() / (2.0 * PI) - 1.0).abs() < 1e-6);
}
