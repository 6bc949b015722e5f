use dcesim::cavity::{fundamental_eta, CavityConfig, Mode, ModeClass};
use dcesim::effective::{
    effective_params, resonance_report, squeezing_for_mode, squeezing_parameter,
    thermal_occupation, velocity_parameter, DriveConfig, ThermalState,
};
use dcesim::units::{beta_from_kelvin, frequency_to_si};

fn cavity(l2: f64, gamma: f64) -> CavityConfig {
    CavityConfig::new(0.0, 1.0, 1.0 + l2, 2.0, 2.0, gamma).unwrap()
}

/// Right length at which the (3,1,1) right mode sits at exactly 3Ω_L.
fn tuned_l2(gamma: f64) -> f64 {
    let miss = |l2: f64| {
        let cav = cavity(l2, gamma);
        let l = Mode::fundamental(&cav).unwrap();
        let r = Mode::solve(&cav, 3, 1, 1, ModeClass::RightDominated).unwrap();
        r.omega_total - 3.0 * l.omega_total
    };
    let (mut lo, mut hi) = (0.75, 0.9);
    assert!(miss(lo) > 0.0 && miss(hi) < 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if miss(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn constructed_resonance_is_found() {
    let gamma = 200.0;
    let cav = cavity(tuned_l2(gamma), gamma);
    let drive = DriveConfig::resonant(&cav, 1e-4, 0.0, 1e5).unwrap();
    let rep = resonance_report(&cav, &drive, None).unwrap();
    let partner = rep.partner_mode().expect("partner");
    assert_eq!((partner.nx, partner.ny, partner.nz), (3, 1, 1));
    let diag = &rep.candidates[rep.partner.unwrap()];
    assert!(diag.delta_big.abs() < 1e-10);
    assert!(diag.minus_detuning < 1e-10);
    assert!(!diag.plus_resonant);
    assert!(rep.delta.abs() < 1e-15);
}

#[test]
fn detuned_drive_loses_its_partner() {
    let gamma = 200.0;
    let cav = cavity(tuned_l2(gamma), gamma);
    let drive = DriveConfig::resonant(&cav, 1e-4, 1e-2, 1e5).unwrap();
    let rep = resonance_report(&cav, &drive, None).unwrap();
    assert!(rep.partner.is_none());
}

#[test]
fn hopping_to_squeezing_ratio_tracks_eta() {
    let mut ratios = Vec::new();
    for gamma in [200.0, 400.0, 800.0, 1600.0] {
        let cav = cavity(tuned_l2(gamma), gamma);
        let drive = DriveConfig::resonant(&cav, 1e-4, 0.0, 1e5).unwrap();
        let r = Mode::solve(&cav, 3, 1, 1, ModeClass::RightDominated).unwrap();
        let p = effective_params(&cav, &drive, &r).unwrap();
        ratios.push((p.chis[0] / p.xi).abs() / fundamental_eta(&cav).unwrap());
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1.05, "{ratios:?}");
}

#[test]
fn parameters_are_linear_in_amplitude() {
    let gamma = 200.0;
    let cav = cavity(tuned_l2(gamma), gamma);
    let r = Mode::solve(&cav, 3, 1, 1, ModeClass::RightDominated).unwrap();
    let d1 = DriveConfig::resonant(&cav, 1e-5, 0.0, 1e5).unwrap();
    let d3 = DriveConfig { epsilon: 3e-5, ..d1 };
    let x1 = squeezing_parameter(&cav, &d1).unwrap();
    let x3 = squeezing_parameter(&cav, &d3).unwrap();
    assert!((x3 / x1 - 3.0).abs() < 1e-14);
    let c1 = velocity_parameter(&cav, &d1, &r).unwrap();
    let c3 = velocity_parameter(&cav, &d3, &r).unwrap();
    assert!((c3 / c1 - 3.0).abs() < 1e-14);
}

#[test]
fn squeezing_arithmetic() {
    // Pure longitudinal mode: ξ = εΩ/4.
    let mode = Mode {
        nx: 1,
        ny: 1,
        nz: 1,
        class: ModeClass::LeftDominated,
        omega_x: 2.0,
        omega_total: 2.0,
        norm_left: 1.0,
        norm_right: 0.0,
    };
    assert_eq!(squeezing_for_mode(&mode, 0.01), 0.005);
    let tilted = Mode {
        omega_total: 4.0,
        ..mode
    };
    assert!((squeezing_for_mode(&tilted, 0.01) - 0.0025).abs() < 1e-18);
}

#[test]
fn room_temperature_occupations() {
    let side = 0.01;
    let cav = CavityConfig::new(0.0, side, 2.37 * side, side, side, 1e6).unwrap();
    let l = Mode::fundamental(&cav).unwrap();
    let beta = beta_from_kelvin(300.0);
    let n = thermal_occupation(beta, l.omega_total).unwrap();
    let x = beta * l.omega_total;
    assert!(x < 1e-2);
    // High-temperature expansion 1/x − 1/2 + x/12.
    assert!((n - (1.0 / x - 0.5 + x / 12.0)).abs() < 1e-6);
    assert!(n > 200.0 && n < 300.0, "{n}");
    assert!(frequency_to_si(l.omega_total) > 1e11);

    let th = ThermalState::new(beta, l.omega_total, 3.0 * l.omega_total).unwrap();
    assert!((th.n_l0 / th.n_r0 - 3.0).abs() < 0.02);
    assert_eq!(ThermalState::vacuum().n_l0, 0.0);
    let cold = ThermalState::new(beta_from_kelvin(0.0), 1.0, 3.0).unwrap();
    assert_eq!((cold.n_l0, cold.n_r0), (0.0, 0.0));
}

#[test]
fn drive_warnings() {
    let cav = cavity(0.83, 200.0);
    let fine = DriveConfig::resonant(&cav, 1e-4, 0.0, 1e5).unwrap();
    assert!(fine.warnings().is_empty());
    let big = DriveConfig { epsilon: 0.1, ..fine };
    assert_eq!(big.warnings().len(), 1);
    let short = DriveConfig { duration: 1.0, ..fine };
    assert_eq!(short.warnings().len(), 1);
    assert!(DriveConfig::new(-1.0, 1.0, 1.0).is_err());
    assert!(DriveConfig::new(1e-3, 0.0, 1.0).is_err());
}
