//! Dense matrix helpers: exponential, norms and eigenvalues.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest admissible `‖A‖₁` before the exponential is refused.
pub const EXP_NORM_LIMIT: f64 = 700.0;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|x| x.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|x| x.clone().abs()).fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring around the degree-13 diagonal Padé approximant.
pub fn expm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = norm1(a);
    if !norm.is_finite() || norm > EXP_NORM_LIMIT {
        return Err(Error::Overflow { norm });
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale: T = nalgebra::convert(0.5f64.powi(s));
    let a = a * scale;
    let b = |k: usize| -> T { nalgebra::convert(PADE_13[k]) };
    let id = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &a * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let p = &v + &u;
    let q = v - u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or(Error::Eigen("singular Padé denominator"))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Eigenvalues of a complex square matrix.
///
/// nalgebra's complex Schur iteration can stall on non-normal input, so this goes through faer.
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let m = faer::Mat::<faer::c64>::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = a[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let ev = m
        .eigenvalues()
        .map_err(|_| Error::Eigen("complex eigenvalue iteration did not converge"))?;
    Ok(ev.into_iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

pub fn to_complex(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

/// `exp(A)` through Sylvester's formula; only valid for distinct eigenvalues.
pub fn spectral_exp(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let lambda = eigenvalues(a)?;
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (i, &li) in lambda.iter().enumerate() {
        let mut frob = id.clone();
        for (j, &lj) in lambda.iter().enumerate() {
            if i != j {
                let gap = li - lj;
                if gap.norm() < 1e-8 * (1.0 + li.norm()) {
                    return Err(Error::Eigen("repeated eigenvalue in spectral exponential"));
                }
                frob *= (a - &id * lj) / gap;
            }
        }
        out += frob * li.exp();
    }
    Ok(out)
}

/// Greedy matching distance between two eigenvalue multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn nilpotent_block_is_polynomial() {
        let mut a = DMatrix::<f64>::zeros(3, 3);
        a[(0, 1)] = 2.0;
        a[(1, 2)] = 3.0;
        let e = expm(&a).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0]);
        assert!((e - expect).amax() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let th = 12.5;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -th, th, 0.0]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - th.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - th.sin()).abs() < 1e-13);
    }

    #[test]
    fn overflow_refused() {
        let a = DMatrix::from_element(2, 2, 400.0);
        assert!(matches!(expm(&a), Err(Error::Overflow { .. })));
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let a = to_complex(&DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        let ev = eigenvalues(&a).unwrap();
        let want = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert!(multiset_distance(&ev, &want) < 1e-14);
    }

    #[test]
    fn sylvester_agrees_with_pade() {
        let a = DMatrix::from_row_slice(3, 3, &[0.3, 1.0, 0.0, -0.2, 0.1, 0.5, 0.7, 0.0, -0.4]);
        let p = to_complex(&expm(&a).unwrap());
        let s = spectral_exp(&to_complex(&a)).unwrap();
        assert!(max_abs(&(p - s)) < 1e-12);
    }
}
