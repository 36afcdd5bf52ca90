use rustfft::num_complex::Complex64;

use super::field::{Rank, SpectralField};
use super::SpectralError;

/// Relative size below which a ξ = 0 coefficient counts as zero.
const MEAN_TOL: f64 = 1e-13;

/// Multiply every component by m(ξ); `at_zero` is used at ξ = 0.
pub fn apply_multiplier(
    f: &SpectralField,
    m: impl Fn([f64; 2]) -> Complex64,
    at_zero: Complex64,
) -> Result<SpectralField, SpectralError> {
    let g = f.grid().clone();
    let mut table = Vec::with_capacity(g.len());
    for idx in 0..g.len() {
        let xi = g.xi_of(idx);
        let v = if idx == 0 { at_zero } else { m(xi) };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(SpectralError::NonFiniteMultiplier(xi[0], xi[1]));
        }
        table.push(v);
    }
    let mut out = f.clone();
    for c in out.comps_mut() {
        for (z, w) in c.iter_mut().zip(&table) {
            *z *= w;
        }
    }
    out.clear_nyquist();
    Ok(out)
}

/// Multiply every component by a real radial multiplier m(|ξ|).
pub fn apply_radial(
    f: &SpectralField,
    m: impl Fn(f64) -> f64,
    at_zero: f64,
) -> Result<SpectralField, SpectralError> {
    let g = f.grid().clone();
    let mut out = f.clone();
    let table = radial_table(&g, &m, at_zero)?;
    for c in out.comps_mut() {
        for (z, w) in c.iter_mut().zip(&table) {
            *z *= w;
        }
    }
    Ok(out)
}

pub(crate) fn radial_table(
    g: &super::Grid,
    m: impl Fn(f64) -> f64,
    at_zero: f64,
) -> Result<Vec<f64>, SpectralError> {
    let mut table = Vec::with_capacity(g.len());
    for idx in 0..g.len() {
        let v = if idx == 0 {
            at_zero
        } else if g.is_nyquist(idx) {
            0.0
        } else {
            m(g.xi_norm(idx))
        };
        if !v.is_finite() {
            let xi = g.xi_of(idx);
            return Err(SpectralError::NonFiniteMultiplier(xi[0], xi[1]));
        }
        table.push(v);
    }
    Ok(table)
}

/// True if every ξ = 0 coefficient is negligible next to the field's largest one.
pub fn mean_is_zero(f: &SpectralField) -> bool {
    let scale = f.max_abs();
    f.mean().iter().all(|z| z.norm() <= MEAN_TOL * scale)
}

/// Homogeneous power |ξ|^s with value 0 at ξ = 0; s = 0 is the identity.
fn radial_power(f: &SpectralField, s: f64) -> Result<SpectralField, SpectralError> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    apply_radial(f, |r| r.powf(s), 0.0)
}

/// (−Δ)^β, multiplier |ξ|^{2β}.
pub fn fractional_laplacian(f: &SpectralField, beta: f64) -> Result<SpectralField, SpectralError> {
    if !(0.5..1.0).contains(&beta) {
        return Err(SpectralError::InvalidBeta(beta));
    }
    radial_power(f, 2.0 * beta)
}

/// Λ^s = (−Δ)^{s/2}. Negative orders require a mean-free field.
pub fn lambda_s(f: &SpectralField, s: f64) -> Result<SpectralField, SpectralError> {
    if s < 0.0 && !mean_is_zero(f) {
        return Err(SpectralError::NonzeroMean(s));
    }
    radial_power(f, s)
}

/// Leray projection I − ξξᵀ/|ξ|²; the mean passes through.
pub fn leray_project(v: &SpectralField) -> Result<SpectralField, SpectralError> {
    if v.rank() != Rank::Vector {
        return Err(SpectralError::RankMismatch {
            expected: Rank::Vector,
            got: v.rank(),
        });
    }
    let mut out = v.clone();
    leray_in_place(&mut out);
    Ok(out)
}

pub(crate) fn leray_in_place(v: &mut SpectralField) {
    let g = v.grid().clone();
    let comps = v.comps_mut();
    let (c1, c2) = comps.split_at_mut(1);
    let (u1, u2) = (&mut c1[0], &mut c2[0]);
    for idx in 1..g.len() {
        let [x1, x2] = g.xi_of(idx);
        let r2 = x1 * x1 + x2 * x2;
        let d = (u1[idx] * x1 + u2[idx] * x2) / r2;
        u1[idx] -= d * x1;
        u2[idx] -= d * x2;
    }
}

/// Two-thirds rule: zero every mode with max(|k₁|,|k₂|) > N/3.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub(crate) fn dealias_in_place(f: &mut SpectralField) {
    let g = f.grid().clone();
    let n = g.n();
    let keep: Vec<bool> = (0..n).map(|i| 3 * g.wavenumber(i).unsigned_abs() as usize <= n).collect();
    for c in f.comps_mut() {
        for i1 in 0..n {
            let row = &mut c[i1 * n..(i1 + 1) * n];
            if !keep[i1] {
                row.fill(Complex64::default());
                continue;
            }
            for (z, &k) in row.iter_mut().zip(&keep) {
                if !k {
                    *z = Complex64::default();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, transform_forward, transform_inverse, Grid, PhysicalField};
    use std::f64::consts::PI;

    fn single_mode(g: &Grid, rank: Rank, k: [i64; 2], amp: f64) -> SpectralField {
        let mut f = SpectralField::zeros(g, rank);
        let i = g.index_of(k[0], k[1]);
        let j = g.index_of(-k[0], -k[1]);
        for c in 0..rank.components() {
            f.comp_mut(c)[i] = Complex64::new(amp, 0.0);
            f.comp_mut(c)[j] = Complex64::new(amp, 0.0);
        }
        f
    }

    #[test]
    fn unit_multiplier_is_identity() {
        let g = make_grid(8, 3.0).unwrap();
        let f = single_mode(&g, Rank::Vector, [1, 2], 0.7);
        let h = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(f, h);
    }

    #[test]
    fn fractional_power_scales_mode_of_length_two() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let f = single_mode(&g, Rank::Scalar, [2, 0], 1.0);
        let h = apply_radial(&f, |r| r.powf(1.5), 0.0).unwrap();
        let i = g.index_of(2, 0);
        assert!((h.comp(0)[i].re - 2.0_f64.powf(1.5)).abs() < 1e-14);
        assert!((h.comp(0)[i].re - 2.8284).abs() < 1e-4);
    }

    #[test]
    fn derivative_of_cosine_is_minus_sine() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let p = PhysicalField::from_fn(&g, Rank::Scalar, |x, _| vec![x.cos()]);
        let f = transform_forward(&p).unwrap();
        let d = apply_multiplier(&f, |xi| Complex64::new(0.0, xi[0]), Complex64::default()).unwrap();
        let back = transform_inverse(&d);
        for i in 0..16 {
            for j in 0..16 {
                let x = g.coordinate(i);
                assert!((back.comp(0)[i * 16 + j] + x.sin()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn non_finite_multiplier_is_rejected() {
        let g = make_grid(4, 1.0).unwrap();
        let f = SpectralField::zeros(&g, Rank::Scalar);
        let e = apply_multiplier(&f, |xi| Complex64::new(1.0 / (xi[0] - xi[0]), 0.0), Complex64::default());
        assert!(matches!(e, Err(SpectralError::NonFiniteMultiplier(..))));
    }

    #[test]
    fn fractional_laplacian_kills_constants_and_keeps_unit_modes() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let mut c = SpectralField::zeros(&g, Rank::SymTensor);
        c.comp_mut(0)[0] = Complex64::new(3.0, 0.0);
        assert_eq!(fractional_laplacian(&c, 0.75).unwrap().max_abs(), 0.0);
        let f = single_mode(&g, Rank::Scalar, [0, 1], 0.4);
        for beta in [0.5, 0.6, 0.75, 0.99] {
            let h = fractional_laplacian(&f, beta).unwrap();
            assert!(h.max_abs_diff(&f) < 1e-15);
        }
        assert!(matches!(fractional_laplacian(&f, 1.0), Err(SpectralError::InvalidBeta(_))));
        assert!(fractional_laplacian(&f, 0.49).is_err());
    }

    #[test]
    fn lambda_order_two_beta_equals_fractional_laplacian() {
        let g = make_grid(8, 5.0).unwrap();
        let mut x = 0.1_f64;
        let f = SpectralField::band_limited_from(&g, Rank::Vector, 3, || {
            x = (x * 9.7 + 0.3).fract();
            x - 0.5
        });
        let a = lambda_s(&f, 1.5).unwrap();
        let b = fractional_laplacian(&f, 0.75).unwrap();
        assert_eq!(a, b);
        assert_eq!(lambda_s(&f, 0.0).unwrap(), f);
        assert!(matches!(lambda_s(&f, -1.0), Err(SpectralError::NonzeroMean(_))));
    }

    #[test]
    fn leray_annihilates_gradients_and_fixes_solenoidal_fields() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        // ∇p with p = cos(x₁ + 2x₂)
        let grad = PhysicalField::from_fn(&g, Rank::Vector, |x, y| {
            let s = -(x + 2.0 * y).sin();
            vec![s, 2.0 * s]
        });
        let gf = transform_forward(&grad).unwrap();
        assert!(leray_project(&gf).unwrap().max_abs() < 1e-15);
        // (−∂₂ψ, ∂₁ψ) with ψ = sin(2x₁ − x₂)
        let sol = PhysicalField::from_fn(&g, Rank::Vector, |x, y| {
            let c = (2.0 * x - y).cos();
            vec![c, 2.0 * c]
        });
        let sf = transform_forward(&sol).unwrap();
        assert!(leray_project(&sf).unwrap().max_abs_diff(&sf) < 1e-15);
        let scalar = SpectralField::zeros(&g, Rank::Scalar);
        assert!(leray_project(&scalar).is_err());
    }

    #[test]
    fn dealias_boundary() {
        let g = make_grid(12, 1.0).unwrap();
        let inside = single_mode(&g, Rank::Scalar, [4, -4], 1.0);
        assert_eq!(dealias(&inside), inside);
        let outside = single_mode(&g, Rank::Scalar, [5, 0], 1.0);
        assert_eq!(dealias(&outside).max_abs(), 0.0);
        let mixed = inside.add(&outside).unwrap();
        let once = dealias(&mixed);
        assert_eq!(once, inside);
        assert_eq!(dealias(&once), once);
    }
}
