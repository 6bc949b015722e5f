//! Spectrum of a rectangular cavity split by a partially transmitting δ-mirror.
//!
//! The wall at `a0` oscillates; the mirror at `b` has strength `γ` and the
//! right wall sits at `c`. Along x the eigenfunctions are
//! `L sin(Ω(x−a))` on `(a, b)` and `R sin(Ω(c−x))` on `(b, c)`, and the
//! frequencies solve `−2γ/Ω = cot(Ω(b−a)) + cot(Ω(c−b))`.

use std::f64::consts::PI;

use crate::error::{require, Error, Result};

/// Tolerance on `|ratio − round(ratio)|` for rejecting commensurate geometries.
pub const DEFAULT_RATIO_TOL: f64 = 1e-6;
/// Above this η the left/right labelling is refused.
pub const AMBIGUITY_ETA: f64 = 0.2;

const SCAN_SUBDIVISIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeClass {
    LeftDominated,
    RightDominated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    pub a0: f64,
    pub b: f64,
    pub c: f64,
    pub dy: f64,
    pub dz: f64,
    pub gamma: f64,
}

impl CavityConfig {
    pub fn new(a0: f64, b: f64, c: f64, dy: f64, dz: f64, gamma: f64) -> Result<Self> {
        Self::with_tolerance(a0, b, c, dy, dz, gamma, DEFAULT_RATIO_TOL)
    }

    pub fn with_tolerance(
        a0: f64,
        b: f64,
        c: f64,
        dy: f64,
        dz: f64,
        gamma: f64,
        ratio_tol: f64,
    ) -> Result<Self> {
        let all = [a0, b, c, dy, dz, gamma];
        require(all.iter().all(|v| v.is_finite()), "cavity", || {
            "all lengths and gamma must be finite".into()
        })?;
        require(a0 < b && b < c, "cavity", || {
            format!("need a0 < b < c, got {a0}, {b}, {c}")
        })?;
        require(dy > 0.0, "dy", || format!("must be positive, got {dy}"))?;
        require(dz > 0.0, "dz", || format!("must be positive, got {dz}"))?;
        require(gamma > 0.0, "gamma", || format!("must be positive, got {gamma}"))?;
        let cav = Self {
            a0,
            b,
            c,
            dy,
            dz,
            gamma,
        };
        for ratio in [cav.left_len() / cav.right_len(), cav.right_len() / cav.left_len()] {
            if (ratio - ratio.round()).abs() < ratio_tol {
                return Err(Error::DegenerateGeometry {
                    ratio,
                    tol: ratio_tol,
                });
            }
        }
        Ok(cav)
    }

    /// Same cavity with the moving wall displaced to `a`.
    pub fn with_wall(&self, a: f64) -> Result<Self> {
        Self::new(a, self.b, self.c, self.dy, self.dz, self.gamma)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.a0, self.b, self.c, self.dy, self.dz, gamma)
    }

    pub fn left_len(&self) -> f64 {
        self.b - self.a0
    }

    pub fn right_len(&self) -> f64 {
        self.c - self.b
    }

    fn class_len(&self, class: ModeClass) -> (f64, f64) {
        match class {
            ModeClass::LeftDominated => (self.left_len(), self.right_len()),
            ModeClass::RightDominated => (self.right_len(), self.left_len()),
        }
    }

    /// `(2γ + Ω cot(Ωl₁) + Ω cot(Ωl₂)) / γ`, zero at an eigenfrequency.
    pub fn residual(&self, omega: f64) -> f64 {
        let (l1, l2) = (self.left_len(), self.right_len());
        (2.0 * self.gamma + omega / (omega * l1).tan() + omega / (omega * l2).tan()) / self.gamma
    }

    /// Pole-free multiple of the eigenvalue equation.
    fn smooth(&self, omega: f64) -> f64 {
        let (l1, l2) = (self.left_len(), self.right_len());
        2.0 * self.gamma / omega * (omega * l1).sin() * (omega * l2).sin()
            + (omega * (l1 + l2)).sin()
    }
}

/// Brent's method on a bracket with `f(a)·f(b) < 0`.
pub(crate) fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo: a, hi: b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

/// Largest pole `kπ/len` strictly below `x`, or 0.
fn largest_pole_below(x: f64, len: f64) -> f64 {
    let mut k = (x * len / PI).floor();
    while k > 0.0 && k * PI / len >= x * (1.0 - 1e-13) {
        k -= 1.0;
    }
    k.max(0.0) * PI / len
}

/// Root in the gap directly below the class pole `nπ/l`, plus the lower gap edge.
fn root_below_pole(cav: &CavityConfig, n: u32, class: ModeClass) -> Result<(f64, f64)> {
    let (l, other) = cav.class_len(class);
    let hi = f64::from(n) * PI / l;
    let lo = largest_pole_below(hi, l).max(largest_pole_below(hi, other));
    let f = |w: f64| cav.smooth(w);
    let width = (hi - lo) / SCAN_SUBDIVISIONS as f64;
    let mut x0 = lo;
    let mut f0 = if lo == 0.0 { f(width * 1e-9) } else { f(lo) };
    for k in 1..=SCAN_SUBDIVISIONS {
        let x1 = if k == SCAN_SUBDIVISIONS { hi } else { lo + width * k as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            return Ok((x1, lo));
        }
        if f0.signum() != f1.signum() {
            let root = brent(f, x0, x1, 1e-15 * hi)?;
            return Ok((root, lo));
        }
        x0 = x1;
        f0 = f1;
    }
    // The sign change can sit closer to the pole than the last grid cell resolves.
    Err(Error::BracketFailure { lo, hi })
}

/// η = Ω₁ₗˣ/γ from the numeric fundamental left root.
pub fn fundamental_eta(cav: &CavityConfig) -> Result<f64> {
    Ok(root_below_pole(cav, 1, ModeClass::LeftDominated)?.0 / cav.gamma)
}

fn checked_root(cav: &CavityConfig, n: u32, class: ModeClass, eta: f64) -> Result<f64> {
    let (l, other) = cav.class_len(class);
    let (root, lo) = root_below_pole(cav, n, class)?;
    let hi = f64::from(n) * PI / l;
    let nearest_other = {
        let k = (root * other / PI).round().max(1.0);
        k * PI / other
    };
    let pair = |own: f64, foreign: f64| match class {
        ModeClass::LeftDominated => (own, foreign),
        ModeClass::RightDominated => (foreign, own),
    };
    if eta > AMBIGUITY_ETA {
        let (left_pole, right_pole) = pair(hi, nearest_other);
        return Err(Error::AmbiguousClass {
            eta,
            left_pole,
            right_pole,
        });
    }
    // Phase distance to the own pole must beat the distance to the foreign one.
    let own_gap = (hi - root) * l / PI;
    let foreign_gap = (root - nearest_other).abs() * other / PI;
    let lower_is_foreign = lo > 0.0 && ((lo * other / PI) - (lo * other / PI).round()).abs() < 1e-9;
    if own_gap >= foreign_gap || (lower_is_foreign && root - lo < hi - root) {
        let (left_pole, right_pole) = pair(hi, nearest_other);
        return Err(Error::AmbiguousClass {
            eta,
            left_pole,
            right_pole,
        });
    }
    Ok(root)
}

/// First `k_max` eigenfrequencies Ωˣ of the requested class, increasing.
pub fn solve_transverse_frequencies(
    cav: &CavityConfig,
    k_max: usize,
    class: ModeClass,
) -> Result<Vec<f64>> {
    require(k_max >= 1, "k_max", || "must be at least 1".into())?;
    let eta = fundamental_eta(cav)?;
    (1..=k_max as u32)
        .map(|n| checked_root(cav, n, class, eta))
        .collect()
}

/// Series approximation of Ωˣ to first or second order in η_μ = Ωˣ/γ.
///
/// η_μ is evaluated at the returned frequency, so the equation is solved by
/// fixed-point iteration.
pub fn perturbative_frequency(cav: &CavityConfig, n: u32, class: ModeClass, order: u8) -> Result<f64> {
    require(n >= 1, "n", || "must be at least 1".into())?;
    require(order == 1 || order == 2, "order", || format!("must be 1 or 2, got {order}"))?;
    let (l, other) = cav.class_len(class);
    let pole = f64::from(n) * PI / l;
    let arg = f64::from(n) * PI * other / l;
    let cot = if order == 2 {
        let s = arg.sin();
        if s.abs() < 1e-9 {
            return Err(Error::Pole {
                what: "second-order cotangent",
                arg,
            });
        }
        arg.cos() / s
    } else {
        0.0
    };
    let map = |w: f64| {
        let eta = w / cav.gamma;
        pole - eta / (2.0 * l) + cot * eta * eta / (4.0 * l)
    };
    let mut w = pole;
    for _ in 0..500 {
        let next = map(w);
        if (next - w).abs() <= 1e-16 * pole {
            w = next;
            break;
        }
        w = next;
    }
    let eta = w / cav.gamma;
    require(eta < 1.0 && w > 0.0, "gamma", || {
        format!("expansion parameter {eta} is not small")
    })?;
    Ok(w)
}

/// Per-mode and fundamental expansion parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaParam {
    pub eta: f64,
    pub omega_1l: f64,
    pub gamma: f64,
}

impl EtaParam {
    pub fn new(cav: &CavityConfig) -> Result<Self> {
        let omega_1l = root_below_pole(cav, 1, ModeClass::LeftDominated)?.0;
        Ok(Self {
            eta: omega_1l / cav.gamma,
            omega_1l,
            gamma: cav.gamma,
        })
    }

    /// η_μ = (Ω_μˣ/Ω₁ₗˣ)·η.
    pub fn for_mode(&self, mode: &Mode) -> f64 {
        mode.omega_x / self.omega_1l * self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub nx: u32,
    pub ny: u32,
    pub nz: u32,
    pub class: ModeClass,
    pub omega_x: f64,
    pub omega_total: f64,
    pub norm_left: f64,
    pub norm_right: f64,
}

impl Mode {
    pub fn solve(cav: &CavityConfig, nx: u32, ny: u32, nz: u32, class: ModeClass) -> Result<Self> {
        require(nx >= 1 && ny >= 1 && nz >= 1, "mode", || {
            format!("indices must be positive, got ({nx}, {ny}, {nz})")
        })?;
        let eta = fundamental_eta(cav)?;
        let omega_x = checked_root(cav, nx, class, eta)?;
        Ok(Self::from_root(cav, nx, ny, nz, class, omega_x))
    }

    /// The fundamental left-dominated mode (1, 1, 1).
    pub fn fundamental(cav: &CavityConfig) -> Result<Self> {
        Self::solve(cav, 1, 1, 1, ModeClass::LeftDominated)
    }

    pub(crate) fn from_root(
        cav: &CavityConfig,
        nx: u32,
        ny: u32,
        nz: u32,
        class: ModeClass,
        omega_x: f64,
    ) -> Self {
        let (l1, l2) = (cav.left_len(), cav.right_len());
        let s1 = (omega_x * l1).sin();
        let s2 = (omega_x * l2).sin();
        let weight = |l: f64| 0.5 * l - (2.0 * omega_x * l).sin() / (4.0 * omega_x);
        let (w1, w2) = (weight(l1), weight(l2));
        let (norm_left, norm_right) = match class {
            ModeClass::LeftDominated => {
                let r = s1 / s2;
                let big_l = 1.0 / (w1 + r * r * w2).sqrt();
                (big_l, big_l * r)
            }
            ModeClass::RightDominated => {
                let r = s2 / s1;
                let big_r = 1.0 / (w2 + r * r * w1).sqrt();
                (big_r * r, big_r)
            }
        };
        let mut mode = Self {
            nx,
            ny,
            nz,
            class,
            omega_x,
            omega_total: 0.0,
            norm_left,
            norm_right,
        };
        mode.omega_total = mode_frequency(cav, &mode);
        mode
    }

    /// Normalized x-profile at position `x` (zero outside the cavity).
    pub fn eigenfunction(&self, cav: &CavityConfig, x: f64) -> f64 {
        if x < cav.a0 || x > cav.c {
            0.0
        } else if x <= cav.b {
            self.norm_left * (self.omega_x * (x - cav.a0)).sin()
        } else {
            self.norm_right * (self.omega_x * (cav.c - x)).sin()
        }
    }
}

/// Ω = √(Ωˣ² + (n_yπ/Δy)² + (n_zπ/Δz)²).
pub fn mode_frequency(cav: &CavityConfig, mode: &Mode) -> f64 {
    let ky = f64::from(mode.ny) * PI / cav.dy;
    let kz = f64::from(mode.nz) * PI / cav.dz;
    (mode.omega_x * mode.omega_x + ky * ky + kz * kz).sqrt()
}

/// Leading-order coupling between the fundamental left mode and a right mode.
pub fn geometry_factor(cav: &CavityConfig, left_mode: &Mode, right_mode: &Mode) -> Result<f64> {
    require(
        left_mode.class == ModeClass::LeftDominated
            && (left_mode.nx, left_mode.ny, left_mode.nz) == (1, 1, 1),
        "left_mode",
        || "must be the fundamental left-dominated mode (1, 1, 1)".into(),
    )?;
    require(
        right_mode.class == ModeClass::RightDominated,
        "right_mode",
        || "must be right-dominated".into(),
    )?;
    if right_mode.ny != 1 || right_mode.nz != 1 {
        return Ok(0.0);
    }
    let q = cav.left_len() / cav.right_len();
    let n = f64::from(right_mode.nx);
    let nq = n * q;
    if (nq - nq.round()).abs() < 1e-9 {
        return Err(Error::Pole {
            what: "geometry factor",
            arg: nq,
        });
    }
    let sign = if right_mode.nx.is_multiple_of(2) { 1.0 } else { -1.0 };
    let eta = left_mode.omega_x / cav.gamma;
    Ok(n * sign * q.sqrt() * (right_mode.omega_x / left_mode.omega_x) * eta
        / (cav.right_len() * (PI * nq).sin() * (nq * nq - 1.0)))
}

/// Q = 2π(1 + (γ/Ω_Lˣ)²).
pub fn quality_factor(cav: &CavityConfig) -> Result<f64> {
    let w = root_below_pole(cav, 1, ModeClass::LeftDominated)?.0;
    let r = cav.gamma / w;
    Ok(2.0 * PI * (1.0 + r * r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2_cavity(gamma: f64) -> CavityConfig {
        CavityConfig::new(0.0, 1.0, 1.0 + 2f64.sqrt(), 1.0, 1.0, gamma).unwrap()
    }

    #[test]
    fn rejects_integer_ratio() {
        let err = CavityConfig::new(0.0, 1.0, 3.0, 1.0, 1.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry { .. }));
        assert!(CavityConfig::new(0.0, 1.0, 0.5, 1.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn perfect_mirror_limit() {
        let cav = sqrt2_cavity(1e12);
        let w = solve_transverse_frequencies(&cav, 1, ModeClass::LeftDominated).unwrap()[0];
        assert!((w / PI - 1.0).abs() < 1e-10);
    }

    #[test]
    fn roots_increase_and_solve_equation() {
        let cav = sqrt2_cavity(50.0);
        for class in [ModeClass::LeftDominated, ModeClass::RightDominated] {
            let roots = solve_transverse_frequencies(&cav, 6, class).unwrap();
            for w in roots.windows(2) {
                assert!(w[0] < w[1]);
            }
            for &w in &roots {
                assert!(cav.residual(w).abs() < 1e-10, "residual {}", cav.residual(w));
            }
        }
    }

    #[test]
    fn first_order_example() {
        // Self-consistent η = 0.1 at b − a = 1.
        let target = PI - 0.05;
        let cav = CavityConfig::new(0.0, 1.0, 1.0 + 2f64.sqrt(), 1.0, 1.0, target / 0.1).unwrap();
        let w = perturbative_frequency(&cav, 1, ModeClass::LeftDominated, 1).unwrap();
        assert!((w - target).abs() < 1e-13);
    }

    #[test]
    fn large_eta_is_ambiguous() {
        let cav = sqrt2_cavity(3.0);
        let err = solve_transverse_frequencies(&cav, 1, ModeClass::LeftDominated).unwrap_err();
        match err {
            Error::AmbiguousClass { eta, .. } => assert!(eta > AMBIGUITY_ETA),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pythagorean_composition() {
        let cav = CavityConfig::new(0.0, 1.0, 2.5, PI, PI, 50.0).unwrap();
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
    }

    #[test]
    fn transverse_selection_kills_coupling() {
        let cav = sqrt2_cavity(50.0);
        let l = Mode::fundamental(&cav).unwrap();
        let r = Mode::solve(&cav, 1, 2, 1, ModeClass::RightDominated).unwrap();
        assert_eq!(geometry_factor(&cav, &l, &r).unwrap(), 0.0);
    }

    #[test]
    fn quality_factor_values() {
        let cav = sqrt2_cavity(50.0);
        let w = Mode::fundamental(&cav).unwrap().omega_x;
        let q = quality_factor(&cav).unwrap();
        assert!((q - 2.0 * PI * (1.0 + (50.0 / w).powi(2))).abs() < 1e-9);
    }
}
