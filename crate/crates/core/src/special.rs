//! Hyperbolic helpers shared by the response and master-equation routes.

/// Above this value of 2ξT the quadratic response switches to a scaled basis.
pub const LOG_DOMAIN_SWITCH: f64 = 300.0;

/// `cosh 2ξT` and `sinh 2ξT` for one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPair {
    pub c_of_t: f64,
    pub s_of_t: f64,
}

impl HyperbolicPair {
    pub fn new(xi: f64, t: f64) -> Self {
        Self::from_arg(2.0 * xi * t)
    }

    pub fn from_arg(x: f64) -> Self {
        Self {
            c_of_t: x.cosh(),
            s_of_t: x.sinh(),
        }
    }

    /// `C² − S²`, which should be 1.
    pub fn defect(&self) -> f64 {
        (self.c_of_t - self.s_of_t) * (self.c_of_t + self.s_of_t) - 1.0
    }
}

/// sinh(x)/x without cancellation near zero.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    } else {
        x.sinh() / x
    }
}

/// cosh(x) − 1 without cancellation.
pub fn coshm1(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    2.0 * s * s
}

/// (cosh x − 1)/x², finite at zero.
pub fn coshm1_over_sq(x: f64) -> f64 {
    let s = sinhc(0.5 * x);
    0.5 * s * s
}

/// Sum of `Σ_{odd n ≥ 3} c(n) xⁿ/n!` until the terms stop mattering.
pub(crate) fn odd_series(x: f64, coeff: impl Fn(u32) -> f64) -> f64 {
    let x2 = x * x;
    // x³/3!
    let mut pow = x * x2 / 6.0;
    let mut sum = 0.0;
    let mut n = 3u32;
    loop {
        let term = coeff(n) * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || n > 200 {
            break;
        }
        pow *= x2 / f64::from((n + 1) * (n + 2));
        n += 2;
    }
    sum
}

/// Values of the quadratic-response building blocks, optionally divided by `e^{2x}/4`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ResponseBasis {
    pub c2: f64,
    pub s2: f64,
    pub c: f64,
    pub one: f64,
    /// x·sinh(2x)
    pub xs2: f64,
    /// Whether the common factor e^{2x}/4 has been removed.
    pub scaled: bool,
    pub x: f64,
}

impl ResponseBasis {
    pub fn new(x: f64) -> Self {
        if x <= LOG_DOMAIN_SWITCH {
            let c = x.cosh();
            let s = x.sinh();
            Self {
                c2: c * c,
                s2: s * s,
                c,
                one: 1.0,
                xs2: x * (2.0 * x).sinh(),
                scaled: false,
                x,
            }
        } else {
            let e2 = (-2.0 * x).exp();
            let e1 = (-x).exp();
            Self {
                c2: (1.0 + e2) * (1.0 + e2),
                s2: (1.0 - e2) * (1.0 - e2),
                c: 2.0 * (e1 + e1 * e2),
                one: 4.0 * e2,
                xs2: 2.0 * x * (1.0 - e2 * e2),
                scaled: true,
                x,
            }
        }
    }

    /// Undo the scaling of a value assembled from this basis.
    pub fn restore(&self, v: f64) -> f64 {
        if !self.scaled || v == 0.0 {
            return v;
        }
        v.signum() * (v.abs().ln() + 2.0 * self.x - 4f64.ln()).exp()
    }
}
