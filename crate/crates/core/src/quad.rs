//! Adaptive Gauss–Kronrod quadrature, used as an independent check on closed forms.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Integral of `f` over `[a, b]` to the requested absolute or relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut stack = vec![(a, b, kronrod15(&f, a, b))];
    let mut total = 0.0;
    let mut segments = Vec::new();
    while let Some((lo, hi, (val, e))) = stack.pop() {
        let tol = abs_tol.max(rel_tol * val.abs()) * (hi - lo).abs() / (b - a).abs();
        if e <= tol || (hi - lo).abs() < 1e-14 * (b - a).abs() || segments.len() > 20_000 {
            segments.push(val);
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, kronrod15(&f, lo, mid)));
        stack.push((mid, hi, kronrod15(&f, mid, hi)));
    }
    segments.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    for v in segments {
        total += v;
    }
    total
}
