//! SI constants and conversions to the natural units used internally.
//!
//! Internally lengths are metres and frequencies are inverse metres, i.e. `Ω = ω_SI / c`.

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Angular frequency in rad/s from inverse metres.
pub fn frequency_to_si(omega: f64) -> f64 {
    omega * SPEED_OF_LIGHT
}

pub fn frequency_from_si(omega_si: f64) -> f64 {
    omega_si / SPEED_OF_LIGHT
}

/// Seconds to the `c·t` length unit.
pub fn time_from_si(t: f64) -> f64 {
    t * SPEED_OF_LIGHT
}

pub fn time_to_si(t: f64) -> f64 {
    t / SPEED_OF_LIGHT
}

/// `β = ħc/(k_B T)` in metres; zero temperature maps to infinity.
pub fn beta_from_kelvin(kelvin: f64) -> f64 {
    if kelvin == 0.0 {
        f64::INFINITY
    } else {
        HBAR * SPEED_OF_LIGHT / (BOLTZMANN * kelvin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let w = 1.234e3;
        assert!((frequency_from_si(frequency_to_si(w)) / w - 1.0).abs() < 1e-15);
        assert!((time_to_si(time_from_si(2.5e-3)) / 2.5e-3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_scale() {
        // ħω/(k_B T) at ω = 1 rad/s, T = 1 K
        let b = beta_from_kelvin(1.0) * frequency_from_si(1.0);
        assert!((b / (HBAR / BOLTZMANN) - 1.0).abs() < 1e-14);
        assert!(beta_from_kelvin(0.0).is_infinite());
    }
}
