//! Second-order (in χ/ξ) response of the two resonance-mode occupations.

use crate::error::{require, Result};
use crate::special::{coshm1, ResponseBasis, LOG_DOMAIN_SWITCH};

pub use crate::special::HyperbolicPair;

/// An occupation estimate; `valid` is false for negative or non-finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub valid: bool,
}

impl Prediction {
    pub fn new(value: f64) -> Self {
        Self {
            value,
            valid: value.is_finite() && value >= 0.0,
        }
    }
}

/// `vacuum + left·N_L⁰ + right·N_R⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Affine {
    pub vacuum: f64,
    pub left: f64,
    pub right: f64,
}

impl Affine {
    pub fn eval(&self, n_l0: f64, n_r0: f64) -> f64 {
        self.vacuum + self.left * n_l0 + self.right * n_r0
    }

    pub fn max_abs_diff(&self, other: &Affine) -> f64 {
        (self.vacuum - other.vacuum)
            .abs()
            .max((self.left - other.left).abs())
            .max((self.right - other.right).abs())
    }
}

/// Σ_{k≥1} (α4ᵏ + β + γk4ᵏ) x^{2k}/(2k)!
fn even_series(x: f64, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let x2 = x * x;
    let mut pow = 1.0;
    let mut four = 1.0;
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = f64::from(k);
        pow *= x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
        four *= 4.0;
        let term = (alpha * four + beta + gamma * kf * four) * pow;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
    }
    sum
}

/// Brackets of the quadratic formulas, possibly divided by e^{2x}/4.
struct Brackets {
    s2: f64,
    /// 3C² − 2C − 1 − x sinh 2x
    b1: f64,
    /// 4C² − 2C − 2 − 2x sinh 2x
    b2: f64,
    /// 2C² − 2C
    b3: f64,
    /// (C − 1)²
    r0: f64,
    /// 2 − 2C
    r2: f64,
    one: f64,
    basis: Option<ResponseBasis>,
}

impl Brackets {
    fn new(x: f64) -> Self {
        if x > LOG_DOMAIN_SWITCH {
            let b = ResponseBasis::new(x);
            return Self {
                s2: b.s2,
                b1: 3.0 * b.c2 - 2.0 * b.c - b.one - b.xs2,
                b2: 4.0 * b.c2 - 2.0 * b.c - 2.0 * b.one - 2.0 * b.xs2,
                b3: 2.0 * b.c2 - 2.0 * b.c,
                r0: b.c2 - 2.0 * b.c + b.one,
                r2: 2.0 * b.one - 2.0 * b.c,
                one: b.one,
                basis: Some(b),
            };
        }
        let c = x.cosh();
        let s = x.sinh();
        let cm1 = coshm1(x);
        let (b1, b2) = if x.abs() < 1.0 {
            (even_series(x, 1.5, -2.0, -1.0), even_series(x, 2.0, -2.0, -2.0))
        } else {
            let xs2 = 2.0 * x * s * c;
            (3.0 * s * s - 2.0 * cm1 - xs2, 4.0 * s * s - 2.0 * cm1 - 2.0 * xs2)
        };
        Self {
            s2: s * s,
            b1,
            b2,
            b3: 2.0 * c * cm1,
            r0: cm1 * cm1,
            r2: -2.0 * cm1,
            one: 1.0,
            basis: None,
        }
    }

    fn restore(&self, v: f64) -> f64 {
        match &self.basis {
            Some(b) => b.restore(v),
            None => v,
        }
    }

    fn restore_affine(&self, a: Affine) -> Affine {
        Affine {
            vacuum: self.restore(a.vacuum),
            left: self.restore(a.left),
            right: self.restore(a.right),
        }
    }
}

fn check(xi: f64, t: f64) -> Result<()> {
    require(xi > 0.0 && xi.is_finite(), "xi", || format!("must be positive, got {xi}"))?;
    require(t >= 0.0 && t.is_finite(), "t", || format!("must be non-negative, got {t}"))
}

fn left_scaled(xi: f64, chi: f64, t: f64) -> (Brackets, Affine) {
    let br = Brackets::new(2.0 * xi * t);
    let k = chi * chi / (4.0 * xi * xi);
    let a = Affine {
        vacuum: br.s2 + k * br.b1,
        left: br.one + 2.0 * br.s2 + k * br.b2,
        right: k * br.b3,
    };
    (br, a)
}

/// The χ² part only; the unit coefficient of N_R⁰ is added after restoring,
/// since it would underflow in the scaled basis.
fn right_scaled(xi: f64, chi: f64, t: f64) -> (Brackets, Affine) {
    let br = Brackets::new(2.0 * xi * t);
    let k = chi * chi / (4.0 * xi * xi);
    let a = Affine {
        vacuum: k * br.r0,
        left: k * br.b3,
        right: k * br.r2,
    };
    (br, a)
}

/// Affine coefficients of the quadratic ⟨N_L(T)⟩.
pub fn left_quadratic_coefficients(xi: f64, chi: f64, t: f64) -> Result<Affine> {
    check(xi, t)?;
    let (br, a) = left_scaled(xi, chi, t);
    Ok(br.restore_affine(a))
}

/// Affine coefficients of the quadratic ⟨N_R(T)⟩.
pub fn right_quadratic_coefficients(xi: f64, chi: f64, t: f64) -> Result<Affine> {
    check(xi, t)?;
    let (br, a) = right_scaled(xi, chi, t);
    let mut out = br.restore_affine(a);
    out.right += 1.0;
    Ok(out)
}

/// Quadratic-order ⟨N_L(T)⟩.
pub fn n_left_quadratic(xi: f64, chi: f64, t: f64, n_l0: f64, n_r0: f64) -> Result<Prediction> {
    check(xi, t)?;
    let (br, a) = left_scaled(xi, chi, t);
    Ok(Prediction::new(br.restore(a.eval(n_l0, n_r0))))
}

/// Quadratic-order ⟨N_R(T)⟩. The vacuum bracket is `(C−1)²`, so `T = 0` gives `N_R⁰`.
pub fn n_right_quadratic(xi: f64, chi: f64, t: f64, n_l0: f64, n_r0: f64) -> Result<Prediction> {
    check(xi, t)?;
    let (br, a) = right_scaled(xi, chi, t);
    Ok(Prediction::new(n_r0 + br.restore(a.eval(n_l0, n_r0))))
}
