//! Born–Markov master equation for the fundamental mode in the squeezing picture.
//!
//! The generator is
//! `f₁D[a†] + f₂D[a] + f₃(a†ρa† + aρa) − f₄(a†²ρ + ρa²) − f₅(a²ρ + ρa†²)`
//! with `D[L]ρ = 2LρL† − L†Lρ − ρL†L`. All ladder operators act on a
//! truncated Fock space; traces vanish exactly there because every term is a
//! product of the same truncated matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::linalg::max_abs;
use crate::special::{coshm1, coshm1_over_sq, odd_series, sinhc};

/// Thermal weight tolerated beyond the cutoff.
pub const DEFAULT_TAIL: f64 = 1e-8;
/// Eigenvalues below this mark a state outside the validity window.
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// `f₁…f₅` and their integrals for fixed (ξ, χ, N_R⁰).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterCoefficients {
    pub xi: f64,
    pub chi: f64,
    pub n_r0: f64,
}

impl MasterCoefficients {
    pub fn new(xi: f64, chi: f64, n_r0: f64) -> Result<Self> {
        require(xi >= 0.0 && xi.is_finite(), "xi", || format!("must be non-negative, got {xi}"))?;
        require(chi.is_finite(), "chi", || format!("must be finite, got {chi}"))?;
        require(n_r0 >= 0.0, "n_r0", || format!("must be non-negative, got {n_r0}"))?;
        Ok(Self { xi, chi, n_r0 })
    }

    /// `(f₁, …, f₅)` at time `t`.
    pub fn rates(&self, t: f64) -> [f64; 5] {
        let (xi, n) = (self.xi, self.n_r0);
        let chi2 = self.chi * self.chi;
        let x = 2.0 * xi * t;
        let c = x.cosh();
        let cm1 = coshm1(x);
        // S/(2ξ), C(C−1)/(2ξ) and S²/(2ξ), all finite at ξ = 0.
        let s_over = t * sinhc(x);
        let cc_over = 2.0 * xi * t * t * c * coshm1_over_sq(x);
        let sc = sinhc(x);
        let ss_over = 2.0 * xi * t * t * sc * sc;
        let g = cc_over + ss_over;
        [
            chi2 * s_over * (cm1 * (2.0 * n + 1.0) + n),
            chi2 * s_over * (cm1 * (2.0 * n + 1.0) + n + 1.0),
            chi2 * g * (2.0 * n + 1.0),
            chi2 * (g * n + cc_over),
            chi2 * (g * n + ss_over),
        ]
    }

    /// `(F₁, …, F₅)` with `Fᵢ(T) = ∫₀ᵀ fᵢ dt`.
    pub fn integrals(&self, t: f64) -> [f64; 5] {
        let (xi, n) = (self.xi, self.n_r0);
        let chi2 = self.chi * self.chi;
        let x = 2.0 * xi * t;
        let c = x.cosh();
        let s = x.sinh();
        let h = coshm1_over_sq(x);
        // (C−1)/(4ξ²) = T²h
        let q = t * t * h;
        // 4ξ²/x² = 1/T², so (1/2ξ)∫(C²−C) = T²·g(x)/x² and likewise for S².
        let (int_cc, int_ss) = if x == 0.0 {
            (0.0, 0.0)
        } else if x < 1.0 {
            let scale = t * t / (x * x);
            (
                scale * odd_series(x, |k| 2f64.powi(k as i32 - 2) - 1.0),
                scale * odd_series(x, |k| 2f64.powi(k as i32 - 2)),
            )
        } else {
            let scale = t * t / (x * x);
            (
                scale * (0.5 * x + 0.25 * (2.0 * x).sinh() - s),
                scale * (0.25 * (2.0 * x).sinh() - 0.5 * x),
            )
        };
        [
            chi2 * 0.5 * t * t * h * ((2.0 * n + 1.0) * c - 1.0),
            chi2 * 0.5 * t * t * h * ((2.0 * n + 1.0) * c + 1.0),
            chi2 * (2.0 * n + 1.0) * s * q,
            chi2 * (n * s * q + int_cc),
            chi2 * (n * s * q + int_ss),
        ]
    }
}

/// Rates `f₁…f₅` at one instant.
pub fn master_coefficients(xi: f64, chi: f64, n_r0: f64, t: f64) -> Result<[f64; 5]> {
    Ok(MasterCoefficients::new(xi, chi, n_r0)?.rates(t))
}

/// Single-mode density matrix in the Fock basis `|0⟩ … |cutoff−1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensity {
    pub cutoff: usize,
    pub matrix: DMatrix<Complex64>,
}

impl TruncatedDensity {
    pub fn vacuum(cutoff: usize) -> Result<Self> {
        Self::thermal(0.0, cutoff)
    }

    /// Geometric Fock mixture with mean `n0`, renormalized after truncation.
    pub fn thermal(n0: f64, cutoff: usize) -> Result<Self> {
        Self::thermal_with_tail(n0, cutoff, DEFAULT_TAIL)
    }

    pub fn thermal_with_tail(n0: f64, cutoff: usize, tail_tol: f64) -> Result<Self> {
        require(cutoff >= 2, "cutoff", || format!("must be at least 2, got {cutoff}"))?;
        require(n0 >= 0.0 && n0.is_finite(), "n0", || format!("must be non-negative, got {n0}"))?;
        let q = n0 / (n0 + 1.0);
        let tail = q.powi(cutoff as i32);
        if tail > tail_tol {
            return Err(Error::CutoffTooSmall { cutoff, tail });
        }
        let weights: Vec<f64> = (0..cutoff).map(|k| q.powi(k as i32)).collect();
        let total: f64 = weights.iter().sum();
        let mut m = DMatrix::zeros(cutoff, cutoff);
        for (k, w) in weights.iter().enumerate() {
            m[(k, k)] = Complex64::new(w / total, 0.0);
        }
        Ok(Self { cutoff, matrix: m })
    }

    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        require(matrix.is_square(), "matrix", || "density matrix must be square".into())?;
        Ok(Self {
            cutoff: matrix.nrows(),
            matrix,
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Smallest eigenvalue of the hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn number(&self) -> f64 {
        (0..self.cutoff).map(|k| k as f64 * self.matrix[(k, k)].re).sum()
    }

    /// Population of the two highest retained levels.
    pub fn top_population(&self) -> f64 {
        let d = self.cutoff;
        self.matrix[(d - 1, d - 1)].re.abs() + self.matrix[(d - 2, d - 2)].re.abs()
    }
}

/// Smallest cutoff with thermal tail below `tail` and room for the squeezing spread.
pub fn select_cutoff(n0: f64, xi: f64, t: f64, tail: f64) -> usize {
    let q = n0 / (n0 + 1.0);
    let by_tail = if q == 0.0 {
        2
    } else {
        (tail.ln() / q.ln()).ceil().max(2.0) as usize
    };
    let c = (2.0 * xi * t).cosh();
    let by_spread = (4.0 * n0.max(1.0) * c * c).ceil() as usize;
    by_tail.max(by_spread).max(4)
}

fn sq(n: usize) -> f64 {
    (n as f64).sqrt()
}

/// a·ρ
fn lower_left(r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = r.nrows();
    DMatrix::from_fn(d, d, |m, n| if m + 1 < d { r[(m + 1, n)] * sq(m + 1) } else { Complex64::new(0.0, 0.0) })
}

/// a†·ρ
fn raise_left(r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = r.nrows();
    DMatrix::from_fn(d, d, |m, n| if m >= 1 { r[(m - 1, n)] * sq(m) } else { Complex64::new(0.0, 0.0) })
}

/// ρ·a
fn lower_right(r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = r.nrows();
    DMatrix::from_fn(d, d, |m, n| if n >= 1 { r[(m, n - 1)] * sq(n) } else { Complex64::new(0.0, 0.0) })
}

/// ρ·a†
fn raise_right(r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = r.nrows();
    DMatrix::from_fn(d, d, |m, n| if n + 1 < d { r[(m, n + 1)] * sq(n + 1) } else { Complex64::new(0.0, 0.0) })
}

/// The generator applied to `r` with weights `w = (w₁, …, w₅)`.
pub fn generator(r: &DMatrix<Complex64>, w: &[f64; 5]) -> DMatrix<Complex64> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let ar = lower_left(r);
    let adr = raise_left(r);
    let ra = lower_right(r);
    let rad = raise_right(r);

    let d1 = lower_right(&adr) * c(2.0) - lower_left(&adr) - raise_right(&ra);
    let d2 = raise_right(&ar) * c(2.0) - raise_left(&ar) - lower_right(&rad);
    let d3 = raise_right(&adr) + lower_right(&ar);
    let d4 = raise_left(&adr) + lower_right(&ra);
    let d5 = lower_left(&ar) + raise_right(&rad);
    d1 * c(w[0]) + d2 * c(w[1]) + d3 * c(w[2]) - d4 * c(w[3]) - d5 * c(w[4])
}

/// One-step solution `ρ(T) ≈ ρ₀ + Σ Fᵢ(T)·(term i acting on ρ₀)`.
pub fn rho_l_approx(rho0: &TruncatedDensity, coeffs: &MasterCoefficients, t: f64) -> TruncatedDensity {
    let f = coeffs.integrals(t);
    TruncatedDensity {
        cutoff: rho0.cutoff,
        matrix: &rho0.matrix + generator(&rho0.matrix, &f),
    }
}

/// `Tr{[(1+2S²)a†a + ½sinh(4ξT)(a†² + a²) + S²] ρ}`.
pub fn squeezed_number_expectation(rho: &TruncatedDensity, xi: f64, t: f64) -> f64 {
    let x = 2.0 * xi * t;
    let s = x.sinh();
    let s2 = s * s;
    let sinh2 = (2.0 * x).sinh();
    let d = rho.cutoff;
    let mut pair = Complex64::new(0.0, 0.0);
    for k in 0..d.saturating_sub(2) {
        let w = ((k + 1) as f64 * (k + 2) as f64).sqrt();
        pair += (rho.matrix[(k, k + 2)] + rho.matrix[(k + 2, k)]) * w;
    }
    let tr = rho.trace().re;
    s2 * tr + (1.0 + 2.0 * s2) * rho.number() + 0.5 * sinh2 * pair.re
}

/// Tuning of the numerical integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Checkpoints at which positivity is examined.
    pub checkpoints: usize,
    pub check_positivity: bool,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
            checkpoints: 8,
            check_positivity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterRun {
    pub rho: TruncatedDensity,
    /// Earliest checkpoint with an eigenvalue below the positivity floor.
    pub positivity_lost_at: Option<f64>,
    pub accepted_steps: usize,
}

impl MasterRun {
    pub fn valid(&self) -> bool {
        self.positivity_lost_at.is_none()
    }
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate the master equation with time-dependent rates (Dormand–Prince 5(4)).
pub fn propagate_master_numeric(
    rho0: &TruncatedDensity,
    coeffs: &MasterCoefficients,
    t_end: f64,
    opts: &MasterOptions,
) -> Result<MasterRun> {
    require(t_end >= 0.0 && t_end.is_finite(), "t", || format!("must be non-negative, got {t_end}"))?;
    require(opts.checkpoints >= 1, "checkpoints", || "need at least one".into())?;
    let mut y = rho0.matrix.clone();
    let mut t = 0.0;
    let mut accepted = 0usize;
    let mut lost = None;
    if t_end == 0.0 {
        return Ok(MasterRun {
            rho: rho0.clone(),
            positivity_lost_at: None,
            accepted_steps: 0,
        });
    }
    let rhs = |tt: f64, r: &DMatrix<Complex64>| generator(r, &coeffs.rates(tt));
    let mut h = t_end / (10.0 * opts.checkpoints as f64);
    let min_h = 1e-14 * t_end;
    for k in 1..=opts.checkpoints {
        let target = t_end * k as f64 / opts.checkpoints as f64;
        let mut k1 = rhs(t, &y);
        while t < target {
            if h < min_h {
                return Err(Error::StepUnderflow { t });
            }
            let step = h.min(target - t);
            let mut ks: Vec<DMatrix<Complex64>> = Vec::with_capacity(7);
            ks.push(k1.clone());
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in ks.iter().enumerate() {
                    let a = DP_A[s][j];
                    if a != 0.0 {
                        ys += kj * Complex64::new(a * step, 0.0);
                    }
                }
                ks.push(rhs(t + DP_C[s] * step, &ys));
            }
            let mut y_new = y.clone();
            let mut err = DMatrix::<Complex64>::zeros(y.nrows(), y.ncols());
            for (j, kj) in ks.iter().enumerate() {
                if DP_B[j] != 0.0 {
                    y_new += kj * Complex64::new(DP_B[j] * step, 0.0);
                }
                if DP_E[j] != 0.0 {
                    err += kj * Complex64::new(DP_E[j] * step, 0.0);
                }
            }
            let scale = opts.atol + opts.rtol * max_abs(&y_new).max(max_abs(&y));
            let e = max_abs(&err) / scale;
            if e <= 1.0 {
                t += step;
                y = y_new;
                k1 = ks.pop().expect("seven stages");
                accepted += 1;
            }
            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            if step < h && e <= 1.0 {
                // The step was clipped to the checkpoint; keep the proposed size.
                h = h.max(step * factor);
            } else {
                h = step * factor;
            }
        }
        t = target;
        if opts.check_positivity && lost.is_none() {
            let probe = TruncatedDensity {
                cutoff: rho0.cutoff,
                matrix: y.clone(),
            };
            if probe.min_eigenvalue() < POSITIVITY_FLOOR {
                lost = Some(target);
            }
        }
    }
    Ok(MasterRun {
        rho: TruncatedDensity {
            cutoff: rho0.cutoff,
            matrix: y,
        },
        positivity_lost_at: lost,
        accepted_steps: accepted,
    })
}
