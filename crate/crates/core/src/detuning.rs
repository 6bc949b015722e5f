//! Off-resonant drive: slow-time coefficient matrices, growth rates and thresholds.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cavity::{geometry_factor, CavityConfig, Mode};
use crate::error::{require, Error, Result};
use crate::linalg::{eigenvalues, expm};
use crate::par::{map_points, Execution};

/// Drive detuning `δ` (ω = 2Ω_L⁰(1+δ)) and partner detuning `Δ` (Ω_R⁰ = Ω_L⁰(3+Δ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningParams {
    pub delta: f64,
    pub delta_big: f64,
    pub omega_l: f64,
}

impl DetuningParams {
    pub fn new(delta: f64, delta_big: f64, omega_l: f64) -> Result<Self> {
        require(delta.is_finite() && delta_big.is_finite(), "detuning", || {
            "detunings must be finite".into()
        })?;
        require(omega_l > 0.0, "omega_l", || format!("must be positive, got {omega_l}"))?;
        Ok(Self {
            delta,
            delta_big,
            omega_l,
        })
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.delta.abs() > 0.1 {
            out.push(format!("|delta| = {} is not small", self.delta.abs()));
        }
        if self.delta_big.abs() > 0.1 {
            out.push(format!("|Delta| = {} is not small", self.delta_big.abs()));
        }
        out
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficient matrix in the basis `(a_L, a_L†, a_R/√3, a_R†/√3)`.
pub fn msa_matrix(xi: f64, chi: f64, p: &DetuningParams) -> DMatrix<Complex64> {
    let w = p.omega_l;
    let s3 = 3f64.sqrt();
    let phase_r = w * (3.0 * p.delta - p.delta_big);
    let z = c(0.0, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c(0.0, w * p.delta), c(2.0 * xi, 0.0), c(s3 * chi, 0.0), z,
            c(2.0 * xi, 0.0), c(0.0, -w * p.delta), z, c(s3 * chi, 0.0),
            c(-chi / s3, 0.0), z, c(0.0, phase_r), z,
            z, c(-chi / s3, 0.0), z, c(0.0, -phase_r),
        ],
    )
}

/// The abbreviations 𝒰 and 𝒱 entering the closed-form eigenvalues.
pub fn uv_quantities(xi: f64, chi: f64, p: &DetuningParams) -> (f64, f64) {
    let (x2, c2) = (xi * xi, chi * chi);
    let w2 = p.omega_l * p.omega_l;
    let (d, dd) = (p.delta, p.delta_big);
    let u = 8.0 * x2 - 4.0 * c2 + 12.0 * w2 * d * dd - 2.0 * w2 * dd * dd - 20.0 * w2 * d * d;
    let v = 16.0 * x2 * (x2 - c2)
        + 64.0 * w2 * d * d * (x2 + c2 + w2 * d * d)
        + w2 * dd * dd * (8.0 * x2 + 4.0 * c2 + 52.0 * w2 * d * d + w2 * dd * dd)
        - 4.0 * w2 * d * dd * (12.0 * x2 + 8.0 * c2 + 24.0 * w2 * d * d + 3.0 * w2 * dd * dd);
    (u, v)
}

/// Sort eigenvalues by real, then imaginary part.
pub fn canonical_order(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// `±½√(𝒰 ± 2√𝒱)` in canonical order; the multiset does not depend on branches.
pub fn msa_eigenvalues(xi: f64, chi: f64, p: &DetuningParams) -> [Complex64; 4] {
    let (u, v) = uv_quantities(xi, chi, p);
    let sv = c(v, 0.0).sqrt();
    let lp = (c(u, 0.0) + sv * 2.0).sqrt() * 0.5;
    let lm = (c(u, 0.0) - sv * 2.0).sqrt() * 0.5;
    let mut out = [lp, -lp, lm, -lm];
    canonical_order(&mut out);
    out
}

/// Eigenvalues of `A′` from a Schur decomposition, in canonical order.
pub fn numeric_eigenvalues(xi: f64, chi: f64, p: &DetuningParams) -> Result<Vec<Complex64>> {
    let mut ev = eigenvalues(&msa_matrix(xi, chi, p))?;
    canonical_order(&mut ev);
    Ok(ev)
}

/// Largest real part of the spectrum of `A′`.
pub fn max_growth_rate(xi: f64, chi: f64, p: &DetuningParams) -> Result<f64> {
    Ok(numeric_eigenvalues(xi, chi, p)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Numerically bisected critical drive detuning.
    pub delta_c: f64,
    /// Root of the leading-order condition in χ², when one exists.
    pub analytic_bound: Option<f64>,
    /// 2ξ/Ω_L, the threshold without leakage.
    pub ideal: f64,
}

/// Solve `Ω²δ² = 4ξ² − 2χ²(4ξ² + Ω²δΔ − 4Ω²δ²)/(4ξ² − Ω²δ² + Ω²(3δ−Δ)²)` for δ > 0.
pub fn analytic_threshold_bound(xi: f64, chi: f64, omega_l: f64, delta_big: f64) -> Option<f64> {
    let w2 = omega_l * omega_l;
    let x2 = xi * xi;
    let g = |d: f64| {
        let num = 4.0 * x2 + w2 * d * delta_big - 4.0 * w2 * d * d;
        let den = 4.0 * x2 - w2 * d * d + w2 * (3.0 * d - delta_big).powi(2);
        4.0 * x2 - 2.0 * chi * chi * num / den - w2 * d * d
    };
    let d0 = 2.0 * xi / omega_l;
    let (mut lo, mut hi) = (0.5 * d0, 1.5 * d0);
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Largest δ ≥ 0 at which `A′` still has a growing eigenvalue.
pub fn growth_threshold(xi: f64, chi: f64, omega_l: f64, delta_big: f64) -> Result<Threshold> {
    require(xi > 0.0, "xi", || format!("must be positive, got {xi}"))?;
    require(omega_l > 0.0, "omega_l", || format!("must be positive, got {omega_l}"))?;
    if chi.abs() >= xi {
        return Err(Error::NoGrowth { xi, chi });
    }
    let floor = 1e-9 * xi;
    let grows = |d: f64| -> Result<bool> {
        let p = DetuningParams::new(d, delta_big, omega_l)?;
        Ok(max_growth_rate(xi, chi, &p)? > floor)
    };
    if !grows(0.0)? {
        return Err(Error::NoGrowth { xi, chi });
    }
    let ideal = 2.0 * xi / omega_l;
    let analytic_bound = analytic_threshold_bound(xi, chi, omega_l, delta_big);
    let mut lo = 0.0;
    let mut hi = analytic_bound.unwrap_or(ideal) * 1.01;
    let mut guard = 0;
    while grows(hi)? {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Eigen("growth persists at arbitrarily large detuning"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if grows(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(Threshold {
        delta_c: 0.5 * (lo + hi),
        analytic_bound,
        ideal,
    })
}

/// `growth_threshold` for each partner detuning Δ, in input order.
pub fn threshold_scan(
    xi: f64,
    chi: f64,
    omega_l: f64,
    deltas_big: &[f64],
    exec: Execution,
) -> Vec<Result<Threshold>> {
    map_points(deltas_big, exec, |&d| growth_threshold(xi, chi, omega_l, d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingCoefficients {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// The approximation 2Ω_L⁰g_LR of γ₂.
    pub gamma2_approx: f64,
    pub g_lr: f64,
}

/// γ₁, γ₂, γ₃ for the fundamental mode and `right_mode`, with frequency offsets `h`, `H`.
pub fn coupling_coefficients(
    cav: &CavityConfig,
    right_mode: &Mode,
    h: f64,
    big_h: f64,
) -> Result<CouplingCoefficients> {
    let l = Mode::fundamental(cav)?;
    let m = geometry_factor(cav, &l, right_mode)?;
    Ok(coefficients_from(l.omega_x, l.omega_total, -(cav.c - cav.a0) * m, h, big_h))
}

pub(crate) fn coefficients_from(
    omega_lx: f64,
    omega_l: f64,
    g_lr: f64,
    h: f64,
    big_h: f64,
) -> CouplingCoefficients {
    let w = omega_l;
    CouplingCoefficients {
        gamma1: -0.5 * omega_lx * omega_lx / w,
        gamma2: (2.0 * w + h) * (2.0 * w + big_h - 0.5 * h) / (2.0 * w) * g_lr,
        gamma3: (2.0 * w + h) * (2.0 * w + 0.5 * h) / (2.0 * (3.0 * w + big_h)) * g_lr,
        gamma2_approx: 2.0 * w * g_lr,
        g_lr,
    }
}

/// Slow-time matrix `M` acting on `(a_k, b_k, a_j, b_j)`.
pub fn msa_coefficient_matrix(
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    alpha: f64,
    beta: f64,
) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let pr = 0.5 * (3.0 * alpha - 2.0 * beta);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c(0.0, -0.5 * alpha), c(gamma1, 0.0), c(gamma2, 0.0), z,
            c(gamma1, 0.0), c(0.0, 0.5 * alpha), z, c(gamma2, 0.0),
            c(-gamma3, 0.0), z, c(0.0, -pr), z,
            z, c(-gamma3, 0.0), z, c(0.0, pr),
        ],
    )
}

/// Parameters of `M` that reproduce `A′/ε` up to conjugation and a sign similarity.
///
/// γ₁ = −2ξ/ε, γ₂ = √3χ/ε, γ₃ = χ/(√3ε), α = 2Ωδ/ε, β = ΩΔ/ε.
pub fn matched_coefficients(xi: f64, chi: f64, p: &DetuningParams, epsilon: f64) -> [f64; 5] {
    let s3 = 3f64.sqrt();
    [
        -2.0 * xi / epsilon,
        s3 * chi / epsilon,
        chi / (s3 * epsilon),
        2.0 * p.omega_l * p.delta / epsilon,
        p.omega_l * p.delta_big / epsilon,
    ]
}

/// Slow-time evolution `exp(Mτ)` of the amplitudes.
pub fn msa_evolution(m: &DMatrix<Complex64>, tau: f64) -> Result<DMatrix<Complex64>> {
    expm(&(m * Complex64::new(tau, 0.0)))
}
