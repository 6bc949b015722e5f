//! Rotating-wave parameters ξ and χ, thermal occupations and resonance bookkeeping.

use crate::cavity::{
    geometry_factor, solve_transverse_frequencies, CavityConfig, Mode, ModeClass,
};
use crate::error::{require, Result};

/// Harmonic wall motion `a(t) = a₀ + ε(b−a₀) sin(ωt)` lasting `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub epsilon: f64,
    pub omega: f64,
    pub duration: f64,
}

impl DriveConfig {
    pub fn new(epsilon: f64, omega: f64, duration: f64) -> Result<Self> {
        require(epsilon >= 0.0 && epsilon.is_finite(), "epsilon", || {
            format!("must be non-negative, got {epsilon}")
        })?;
        require(omega > 0.0, "omega", || format!("must be positive, got {omega}"))?;
        require(duration >= 0.0, "duration", || {
            format!("must be non-negative, got {duration}")
        })?;
        Ok(Self {
            epsilon,
            omega,
            duration,
        })
    }

    /// Drive tuned to the squeezing resonance `ω = 2Ω_L⁰(1+δ)`.
    pub fn resonant(cav: &CavityConfig, epsilon: f64, delta: f64, duration: f64) -> Result<Self> {
        let omega_l = Mode::fundamental(cav)?.omega_total;
        Self::new(epsilon, 2.0 * omega_l * (1.0 + delta), duration)
    }

    /// Conditions under which the effective description is questionable.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.epsilon > 1e-2 {
            out.push(format!("epsilon = {} is not small", self.epsilon));
        }
        if self.omega * self.duration < 1e2 {
            out.push(format!(
                "omega*T = {:.3e} is too short for the rotating-wave average",
                self.omega * self.duration
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveParams {
    pub xi: f64,
    pub chis: Vec<f64>,
    pub omega_l: f64,
    pub omega_r: f64,
}

impl EffectiveParams {
    /// Combined hopping rate `√Σχᵢ²`.
    pub fn chi_eff(&self) -> f64 {
        self.chis.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Inverse temperature and the resulting occupations of L and R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    pub beta: f64,
    pub n_l0: f64,
    pub n_r0: f64,
}

impl ThermalState {
    pub fn new(beta: f64, omega_l: f64, omega_r: f64) -> Result<Self> {
        Ok(Self {
            beta,
            n_l0: thermal_occupation(beta, omega_l)?,
            n_r0: thermal_occupation(beta, omega_r)?,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            beta: f64::INFINITY,
            n_l0: 0.0,
            n_r0: 0.0,
        }
    }
}

/// ξ = (ε/4)·Ω_L⁰·(Ω_Lˣ/Ω_L⁰)².
pub fn squeezing_parameter(cav: &CavityConfig, drive: &DriveConfig) -> Result<f64> {
    let l = Mode::fundamental(cav)?;
    Ok(squeezing_for_mode(&l, drive.epsilon))
}

pub fn squeezing_for_mode(l: &Mode, epsilon: f64) -> f64 {
    let ratio = l.omega_x / l.omega_total;
    0.25 * epsilon * l.omega_total * ratio * ratio
}

/// χ = (ε/4)·Ω_L⁰·(√(Ω_R/Ω_L) + √(Ω_L/Ω_R))·(b−a₀)·m_LR.
pub fn velocity_parameter(cav: &CavityConfig, drive: &DriveConfig, right_mode: &Mode) -> Result<f64> {
    let l = Mode::fundamental(cav)?;
    let m = geometry_factor(cav, &l, right_mode)?;
    let (wl, wr) = (l.omega_total, right_mode.omega_total);
    Ok(0.25 * drive.epsilon * wl * ((wr / wl).sqrt() + (wl / wr).sqrt()) * cav.left_len() * m)
}

/// Bose–Einstein occupation `1/(e^{βΩ}−1)`; `β = ∞` gives exactly 0.
pub fn thermal_occupation(beta: f64, omega: f64) -> Result<f64> {
    require(beta > 0.0, "beta", || format!("must be positive or infinite, got {beta}"))?;
    require(omega > 0.0 && omega.is_finite(), "omega", || {
        format!("must be positive, got {omega}")
    })?;
    let x = beta * omega;
    if x.is_infinite() || x > 700.0 {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// Detuning diagnostics of one right-dominated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDiagnostic {
    pub mode: Mode,
    /// Δ = Ω_R/Ω_L − 3.
    pub delta_big: f64,
    /// |Ω_R − Ω_L − ω| / ω.
    pub minus_detuning: f64,
    /// |Ω_R + Ω_L − ω| / ω.
    pub plus_detuning: f64,
    pub minus_resonant: bool,
    pub plus_resonant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub omega_l: f64,
    /// δ = ω/(2Ω_L⁰) − 1.
    pub delta: f64,
    pub tol: f64,
    pub candidates: Vec<PairDiagnostic>,
    /// Index into `candidates` of the closest ⊖-resonant mode with `n_y = n_z = 1`.
    pub partner: Option<usize>,
}

impl ResonanceReport {
    pub fn partner_mode(&self) -> Option<&Mode> {
        self.partner.map(|k| &self.candidates[k].mode)
    }
}

/// Scan right-dominated modes up to `4Ω_L⁰` for ⊖ and ⊕ resonances with the drive.
///
/// `tol` defaults to `1/(ωT)`.
pub fn resonance_report(
    cav: &CavityConfig,
    drive: &DriveConfig,
    tol: Option<f64>,
) -> Result<ResonanceReport> {
    let l = Mode::fundamental(cav)?;
    let omega_l = l.omega_total;
    let tol = tol.unwrap_or(1.0 / (drive.omega * drive.duration));
    let cap = 4.0 * omega_l;
    let nx_max = ((cap * cav.right_len() / std::f64::consts::PI).floor() as usize).max(1);
    let roots = solve_transverse_frequencies(cav, nx_max, ModeClass::RightDominated)?;
    let mut candidates = Vec::new();
    for (i, &wx) in roots.iter().enumerate() {
        for ny in 1u32.. {
            let probe = Mode::from_root(cav, i as u32 + 1, ny, 1, ModeClass::RightDominated, wx);
            if probe.omega_total > cap {
                break;
            }
            for nz in 1u32.. {
                let mode = Mode::from_root(cav, i as u32 + 1, ny, nz, ModeClass::RightDominated, wx);
                if mode.omega_total > cap {
                    break;
                }
                let w = mode.omega_total;
                let minus = ((w - omega_l) - drive.omega).abs() / drive.omega;
                let plus = ((w + omega_l) - drive.omega).abs() / drive.omega;
                candidates.push(PairDiagnostic {
                    mode,
                    delta_big: w / omega_l - 3.0,
                    minus_detuning: minus,
                    plus_detuning: plus,
                    minus_resonant: minus < tol,
                    plus_resonant: plus < tol,
                });
            }
        }
    }
    candidates.sort_by(|a, b| a.mode.omega_total.total_cmp(&b.mode.omega_total));
    let partner = candidates
        .iter()
        .enumerate()
        .filter(|(_, d)| d.minus_resonant && d.mode.ny == 1 && d.mode.nz == 1)
        .min_by(|a, b| a.1.minus_detuning.total_cmp(&b.1.minus_detuning))
        .map(|(k, _)| k);
    Ok(ResonanceReport {
        omega_l,
        delta: drive.omega / (2.0 * omega_l) - 1.0,
        tol,
        candidates,
        partner,
    })
}

/// Complete effective description for one right partner.
pub fn effective_params(
    cav: &CavityConfig,
    drive: &DriveConfig,
    right_mode: &Mode,
) -> Result<EffectiveParams> {
    let l = Mode::fundamental(cav)?;
    Ok(EffectiveParams {
        xi: squeezing_for_mode(&l, drive.epsilon),
        chis: vec![velocity_parameter(cav, drive, right_mode)?],
        omega_l: l.omega_total,
        omega_r: right_mode.omega_total,
    })
}
