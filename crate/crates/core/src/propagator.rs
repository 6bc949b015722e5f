//! Exact linear evolution of the ladder operators under the effective Hamiltonian.
//!
//! With `x = (a_L, a_L†, a_R, a_R†, …)` the Heisenberg equations read `ẋ = A x`,
//! so `x(T) = exp(AT) x(0)` and every occupation is bilinear in `U = exp(AT)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{require, Result};
use crate::linalg::expm;
use crate::response::Affine;
use crate::special::{coshm1, sinhc};

/// Inside `|ξ² − χ²| < DEGENERATE_WINDOW·ξ²` the pole-free form replaces the printed one.
pub const DEGENERATE_WINDOW: f64 = 1e-6;

/// Growth exponent above which the closed forms are evaluated with a common factor removed.
const SCALE_SWITCH: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    ExponentialGrowth,
    Oscillatory,
    /// χ = ξ exactly.
    OscillatoryDegenerate,
    /// ξ = 0: the modes only exchange quanta.
    PureHopping,
}

pub fn regime_classify(xi: f64, chi: f64) -> Regime {
    let chi = chi.abs();
    if xi == 0.0 {
        Regime::PureHopping
    } else if chi > xi {
        Regime::Oscillatory
    } else if chi == xi {
        Regime::OscillatoryDegenerate
    } else {
        Regime::ExponentialGrowth
    }
}

/// Coefficient matrix for one left mode coupled to `chis.len()` right modes.
pub fn build_a(xi: f64, chis: &[f64]) -> Result<DMatrix<f64>> {
    require(!chis.is_empty(), "chis", || "need at least one right mode".into())?;
    let dim = 2 * (chis.len() + 1);
    let mut a = DMatrix::zeros(dim, dim);
    a[(0, 1)] = 2.0 * xi;
    a[(1, 0)] = 2.0 * xi;
    for (i, &chi) in chis.iter().enumerate() {
        let r = 2 + 2 * i;
        a[(0, r)] = chi;
        a[(1, r + 1)] = chi;
        a[(r, 0)] = -chi;
        a[(r + 1, 1)] = -chi;
    }
    Ok(a)
}

/// ±ξ ± √(ξ² − χ²).
pub fn analytic_eigenvalues(xi: f64, chi: f64) -> [Complex64; 4] {
    let r = Complex64::new(xi * xi - chi * chi, 0.0).sqrt();
    let x = Complex64::new(xi, 0.0);
    [x + r, x - r, -x + r, -x - r]
}

/// U(T) = exp(A T).
pub fn propagator_matrix(xi: f64, chis: &[f64], t: f64) -> Result<DMatrix<f64>> {
    let a = build_a(xi, chis)? * t;
    expm(&a)
}

/// Commutator metric: one `[[0, 1], [−1, 0]]` block per mode.
pub fn commutator_metric(modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * modes, 2 * modes);
    for m in 0..modes {
        j[(2 * m, 2 * m + 1)] = 1.0;
        j[(2 * m + 1, 2 * m)] = -1.0;
    }
    j
}

/// `max |U J Uᵀ − J|`.
pub fn symplectic_defect(u: &DMatrix<f64>) -> f64 {
    let j = commutator_metric(u.nrows() / 2);
    (u * &j * u.transpose() - j).amax()
}

/// ⟨a_σ†a_σ⟩(T) for every mode from `U` and diagonal initial occupations.
pub fn occupations_from_u(u: &DMatrix<f64>, occupations: &[f64]) -> Vec<f64> {
    let modes = u.nrows() / 2;
    assert_eq!(occupations.len(), modes, "one occupation per mode");
    (0..modes)
        .map(|s| {
            let (ann, cre) = (2 * s, 2 * s + 1);
            occupations
                .iter()
                .enumerate()
                .map(|(m, &n)| {
                    let (ma, mc) = (2 * m, 2 * m + 1);
                    u[(cre, mc)] * u[(ann, ma)] * n + u[(cre, ma)] * u[(ann, mc)] * (n + 1.0)
                })
                .sum()
        })
        .collect()
}

/// Affine coefficients `[vacuum, n₀, n₁, …]` of every occupation, read off `U`.
pub fn affine_from_u(u: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let modes = u.nrows() / 2;
    (0..modes)
        .map(|s| {
            let (ann, cre) = (2 * s, 2 * s + 1);
            let vacuum = (0..modes).map(|m| u[(cre, 2 * m)] * u[(ann, 2 * m + 1)]).sum();
            let mut row = vec![vacuum];
            row.extend((0..modes).map(|m| {
                let (ma, mc) = (2 * m, 2 * m + 1);
                u[(cre, mc)] * u[(ann, ma)] + u[(cre, ma)] * u[(ann, mc)]
            }));
            row
        })
        .collect()
}

/// Closed-form occupations for one right mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullCoefficients {
    pub left: Affine,
    pub right: Affine,
    /// Largest |Im| over the assembled coefficients, relative to max(1, |Re|).
    pub imag_residue: f64,
}

/// Complex evaluation of the printed closed forms, with `e^{-scale}` removed.
fn printed(xi: f64, chi: f64, t: f64, scale: f64) -> (Affine, Affine, f64) {
    let d = Complex64::new(xi * xi - chi * chi, 0.0);
    let r = d.sqrt();
    let x = Complex64::new(xi, 0.0);
    let ch = |z: Complex64| ((z - scale).exp() + (-z - scale).exp()) * 0.5;
    let two_t = 2.0 * t;
    let cp = ch((x + r) * two_t);
    let cm = ch((x - r) * two_t);
    let c0 = ch(x * two_t);
    let unit = (-scale).exp();
    let chi2 = chi * chi;

    let plus_l = x * cp * (x + r) + x * cm * (x - r);
    let plus_r = x * cp * (x - r) + x * cm * (x + r);
    let vac_tail = c0 * (-2.0 * chi2) - d * 2.0 * unit;
    // cosh(2ξT)·cosh(2rT) as one scaled term, so e^{-scale} is not applied twice.
    let c0cr = (cp + cm) * 0.5;
    let mix = (c0cr + c0) * chi2;
    let cross = (c0cr - c0) * chi2 / (d * 2.0);

    let l_vac = (plus_l + vac_tail) / (d * 4.0);
    let l_left = (plus_l - mix) / (d * 2.0);
    let r_vac = (plus_r + vac_tail) / (d * 4.0);
    let r_right = (plus_r - mix) / (d * 2.0);

    let vals = [l_vac, l_left, cross, r_vac, r_right];
    let imag = vals
        .iter()
        .map(|z| z.im.abs() / z.re.abs().max(unit.max(f64::MIN_POSITIVE)))
        .fold(0.0, f64::max);
    (
        Affine {
            vacuum: l_vac.re,
            left: l_left.re,
            right: cross.re,
        },
        Affine {
            vacuum: r_vac.re,
            left: cross.re,
            right: r_right.re,
        },
        imag,
    )
}

/// The same closed forms rewritten in terms of entire functions of `u = ξ² − χ²`.
fn entire(xi: f64, chi: f64, t: f64, scale: f64) -> (Affine, Affine) {
    let u = xi * xi - chi * chi;
    let s = 2.0 * t;
    let a = s * xi;
    let (ca, sa, cam1) = if scale > 0.0 {
        let e = (a - scale).exp();
        let em = (-a - scale).exp();
        (0.5 * (e + em), 0.5 * (e - em), 0.5 * (e + em) - (-scale).exp())
    } else {
        (a.cosh(), a.sinh(), coshm1(a))
    };
    let y = s * u.abs().sqrt();
    let (cb, sh, cm) = if u >= 0.0 {
        let h = sinhc(0.5 * y);
        (y.cosh(), s * sinhc(y), 0.5 * s * s * h * h)
    } else {
        let h = sinc(0.5 * y);
        (y.cos(), s * sinc(y), 0.5 * s * s * h * h)
    };
    let xi2 = xi * xi;
    let common = xi2 * ca * cm;
    let left = Affine {
        vacuum: 0.5 * (common + xi * sa * sh + cam1),
        left: 0.5 * (common + 2.0 * xi * sa * sh + ca * (cb + 1.0)),
        right: 0.5 * chi * chi * ca * cm,
    };
    let right = Affine {
        vacuum: 0.5 * (common - xi * sa * sh + cam1),
        left: left.right,
        right: 0.5 * (common - 2.0 * xi * sa * sh + ca * (cb + 1.0)),
    };
    (left, right)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() / x
    }
}

fn growth_exponent(xi: f64, chi: f64, t: f64) -> f64 {
    let u = xi * xi - chi * chi;
    2.0 * t * (xi.abs() + if u > 0.0 { u.sqrt() } else { 0.0 })
}

fn restore(v: f64, scale: f64) -> f64 {
    if scale == 0.0 || v == 0.0 {
        v
    } else {
        v.signum() * (v.abs().ln() + scale).exp()
    }
}

fn restore_affine(a: Affine, scale: f64) -> Affine {
    Affine {
        vacuum: restore(a.vacuum, scale),
        left: restore(a.left, scale),
        right: restore(a.right, scale),
    }
}

fn check(xi: f64, chi: f64, t: f64) -> Result<()> {
    require(xi >= 0.0 && xi.is_finite(), "xi", || format!("must be non-negative, got {xi}"))?;
    require(chi.is_finite(), "chi", || format!("must be finite, got {chi}"))?;
    require(t >= 0.0 && t.is_finite(), "t", || format!("must be non-negative, got {t}"))
}

/// Non-perturbative affine coefficients of ⟨N_L(T)⟩ and ⟨N_R(T)⟩.
pub fn full_coefficients(xi: f64, chi: f64, t: f64) -> Result<FullCoefficients> {
    check(xi, chi, t)?;
    let e = growth_exponent(xi, chi, t);
    let scale = if e > SCALE_SWITCH { e } else { 0.0 };
    let u = xi * xi - chi * chi;
    let (left, right, imag_residue) = if u.abs() < DEGENERATE_WINDOW * xi * xi || u == 0.0 {
        let (l, r) = entire(xi, chi, t, scale);
        (l, r, 0.0)
    } else {
        printed(xi, chi, t, scale)
    };
    Ok(FullCoefficients {
        left: restore_affine(left, scale),
        right: restore_affine(right, scale),
        imag_residue,
    })
}

/// Pole-free evaluation used near χ = ξ, exposed for cross-checks.
pub fn entire_coefficients(xi: f64, chi: f64, t: f64) -> Result<(Affine, Affine)> {
    check(xi, chi, t)?;
    let e = growth_exponent(xi, chi, t);
    let scale = if e > SCALE_SWITCH { e } else { 0.0 };
    let (l, r) = entire(xi, chi, t, scale);
    Ok((restore_affine(l, scale), restore_affine(r, scale)))
}

/// An exact occupation with the imaginary residue left by the complex arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupation {
    pub value: f64,
    pub imag_residue: f64,
}

pub fn n_left_full(xi: f64, chi: f64, t: f64, n_l0: f64, n_r0: f64) -> Result<Occupation> {
    let c = full_coefficients(xi, chi, t)?;
    Ok(Occupation {
        value: c.left.eval(n_l0, n_r0),
        imag_residue: c.imag_residue,
    })
}

pub fn n_right_full(xi: f64, chi: f64, t: f64, n_l0: f64, n_r0: f64) -> Result<Occupation> {
    let c = full_coefficients(xi, chi, t)?;
    Ok(Occupation {
        value: c.right.eval(n_l0, n_r0),
        imag_residue: c.imag_residue,
    })
}

/// Coefficient of χ² in the expansion of the closed forms about χ = 0.
pub fn chi2_taylor_coefficients(xi: f64, t: f64) -> Result<(Affine, Affine)> {
    check(xi, 0.0, t)?;
    require(xi > 0.0, "xi", || "expansion about chi = 0 needs xi > 0".into())?;
    let s = 2.0 * t;
    let u = xi * xi;
    let y = s * xi;
    let (sh, cm, dsh, dcm) = if y < 2.0 {
        // Power series in u of sinh(s√u)/√u and (cosh(s√u) − 1)/u and their derivatives.
        let (mut sh, mut cm, mut dsh, mut dcm) = (0.0, 0.0, 0.0, 0.0);
        let mut odd = s; // s^{2k+1} u^k / (2k+1)!
        let mut even = 0.5 * s * s; // s^{2k} u^{k-1} / (2k)!, starting at k = 1
        for k in 0..40 {
            let kf = f64::from(k);
            sh += odd;
            if k >= 1 {
                dsh += kf * odd / u;
            }
            cm += even;
            if k >= 1 {
                dcm += kf * even / u;
            }
            odd *= s * s * u / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
            even *= s * s * u / ((2.0 * kf + 3.0) * (2.0 * kf + 4.0));
        }
        (sh, cm, dsh, dcm)
    } else {
        let r = xi;
        let sh = y.sinh() / r;
        let cm = coshm1(y) / u;
        let dsh = (s * y.cosh() - sh) / (2.0 * u);
        let dcm = (0.5 * s * sh - cm) / u;
        (sh, cm, dsh, dcm)
    };
    let a = s * xi;
    let (ca, sa) = (a.cosh(), a.sinh());
    let dcb = 0.5 * s * sh;
    let xi2 = xi * xi;
    let common = xi2 * ca * dcm;
    let left = Affine {
        vacuum: -0.5 * (common + xi * sa * dsh),
        left: -0.5 * (common + 2.0 * xi * sa * dsh + ca * dcb),
        right: 0.5 * ca * cm,
    };
    let right = Affine {
        vacuum: -0.5 * (common - xi * sa * dsh),
        left: left.right,
        right: -0.5 * (common - 2.0 * xi * sa * dsh + ca * dcb),
    };
    Ok((left, right))
}

/// Exact occupations `[N_L, N_R1, N_R2, …]` for several right modes.
pub fn multi_mode_response(xi: f64, chis: &[f64], t: f64, occupations: &[f64]) -> Result<Vec<f64>> {
    require(occupations.len() == chis.len() + 1, "occupations", || {
        format!("need {} initial occupations, got {}", chis.len() + 1, occupations.len())
    })?;
    let u = propagator_matrix(xi, chis, t)?;
    Ok(occupations_from_u(&u, occupations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_matrix() {
        let a = build_a(1.0, &[0.5]).unwrap();
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 2.0, 0.5, 0.0, 2.0, 0.0, 0.0, 0.5, -0.5, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0],
        );
        assert_eq!(a, want);
        assert_eq!(a.trace(), 0.0);
    }

    #[test]
    fn eigenvalue_example() {
        let ev = analytic_eigenvalues(1.0, 0.5);
        let r = 0.75f64.sqrt();
        let want = [1.0 + r, 1.0 - r, -1.0 + r, -1.0 - r];
        for (z, w) in ev.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(regime_classify(1.0, 11.0), Regime::Oscillatory);
        assert_eq!(regime_classify(1.0, 0.5), Regime::ExponentialGrowth);
        assert_eq!(regime_classify(0.0, 1.0), Regime::PureHopping);
        assert_eq!(regime_classify(1.0, 1.0), Regime::OscillatoryDegenerate);
    }

    #[test]
    fn closed_form_initial_value() {
        let c = full_coefficients(1.0, 0.5, 0.0).unwrap();
        assert!(c.left.vacuum.abs() < 1e-15 && (c.left.left - 1.0).abs() < 1e-15);
        assert!(c.right.vacuum.abs() < 1e-15 && (c.right.right - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entire_and_printed_agree() {
        for &(xi, chi, t) in &[(1.0, 0.5, 1.3), (1.0, 11.0, 2.1), (0.3, 0.2, 4.0), (0.0, 1.0, 2.0)] {
            let (l, r) = entire_coefficients(xi, chi, t).unwrap();
            let c = full_coefficients(xi, chi, t).unwrap();
            let scale = 1.0 + c.left.left.abs();
            assert!(l.max_abs_diff(&c.left) < 1e-11 * scale, "{l:?} {:?}", c.left);
            assert!(r.max_abs_diff(&c.right) < 1e-11 * scale);
        }
    }

    #[test]
    fn degenerate_point_is_finite() {
        let c = full_coefficients(1.0, 1.0, 1.5).unwrap();
        let near = full_coefficients(1.0, 1.0 - 1e-5, 1.5).unwrap();
        assert!(c.left.vacuum.is_finite());
        assert!((c.left.vacuum - near.left.vacuum).abs() < 1e-4 * c.left.vacuum);
    }
}
