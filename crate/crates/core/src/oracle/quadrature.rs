//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {err:e})")]
    NoConvergence { a: f64, b: f64, err: f64 },
    #[error("non-finite integrand at x = {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 60;

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let (x1, x2) = (c - dx, c + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite(x1));
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite(x2));
        }
        kron += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    Ok((kron * h, ((kron - gauss) * h).abs()))
}

fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<f64, QuadError> {
    let (val, err) = gk15(f, a, b)?;
    if err <= abs_tol || (b - a).abs() <= 1e-15 * a.abs().max(b.abs()) {
        return Ok(val);
    }
    if depth >= MAX_DEPTH {
        return Err(QuadError::NoConvergence { a, b, err });
    }
    let m = 0.5 * (a + b);
    Ok(adapt(f, a, m, 0.5 * abs_tol, depth + 1)? + adapt(f, m, b, 0.5 * abs_tol, depth + 1)?)
}

/// ∫ f over [points[0], points[last]], split at every interior point.
///
/// The tolerance is relative to a first-pass estimate of ∫|f|, floored by
/// `abs_floor`.
pub fn integrate_breaks(
    f: impl Fn(f64) -> f64,
    points: &[f64],
    rel_tol: f64,
    abs_floor: f64,
) -> Result<f64, QuadError> {
    let mut pts: Vec<f64> = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let fabs = |x: f64| f(x).abs();
    let mut scale = 0.0;
    for w in pts.windows(2) {
        scale += gk15(&fabs, w[0], w[1])?.0;
    }
    let tol = (rel_tol * scale).max(abs_floor);
    let n = (pts.len() - 1) as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adapt(&f, w[0], w[1], tol / n, 0)?;
    }
    Ok(total)
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64, QuadError> {
    integrate_breaks(f, &[a, b], rel_tol, 0.0)
}
