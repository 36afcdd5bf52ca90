//! Whole-plane decay laws of the linearized system by radial quadrature.
//! Integrals over ℝ² carry the angular factor 2π and no (2π)^{−2}.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::quadrature::{integrate_breaks, QuadError};
use crate::spectral::shells::smooth_step;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileShape {
    /// 1 on |ξ| ≤ radius, 0 beyond
    Flat { radius: f64 },
    /// 1 on |ξ| ≤ plateau, C^∞ decay to 0 at |ξ| = support
    Plateau { plateau: f64, support: f64 },
}

/// Radial spectral density |(û₀, τ̂₀)|²(|ξ|) = scale · shape(|ξ|).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub shape: ProfileShape,
    pub scale: f64,
}

impl Profile {
    pub fn flat(radius: f64) -> Self {
        Profile {
            shape: ProfileShape::Flat { radius },
            scale: 1.0,
        }
    }

    pub fn plateau(plateau: f64, support: f64) -> Self {
        Profile {
            shape: ProfileShape::Plateau { plateau, support },
            scale: 1.0,
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn density(&self, r: f64) -> f64 {
        let v = match self.shape {
            ProfileShape::Flat { radius } => {
                if r <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileShape::Plateau { plateau, support } => {
                1.0 - smooth_step((r - plateau) / (support - plateau))
            }
        };
        self.scale * v
    }

    /// Support radius η.
    pub fn support(&self) -> f64 {
        match self.shape {
            ProfileShape::Flat { radius } => radius,
            ProfileShape::Plateau { support, .. } => support,
        }
    }

    /// Density at ξ = 0.
    pub fn c0(&self) -> f64 {
        self.density(0.0)
    }

    fn validate(&self) -> Result<(), OracleError> {
        let ok = match self.shape {
            ProfileShape::Flat { radius } => radius > 0.0,
            ProfileShape::Plateau { plateau, support } => plateau >= 0.0 && support > plateau,
        };
        if ok && self.scale >= 0.0 && self.scale.is_finite() {
            Ok(())
        } else {
            Err(OracleError::InvalidArgument(format!("profile {self:?}")))
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self.shape {
            ProfileShape::Flat { radius } => vec![radius],
            ProfileShape::Plateau { plateau, support } => vec![plateau, support],
        }
    }
}

/// 2π ∫₀^η r·g(r)·profile(r) dr with breakpoints clustered around r_c.
fn radial_integral(profile: &Profile, rc: f64, g: impl Fn(f64) -> f64) -> Result<f64, OracleError> {
    profile.validate()?;
    let eta = profile.support();
    let mut pts = vec![0.0, eta];
    pts.extend(profile.kinks());
    if rc.is_finite() && rc > 0.0 {
        for k in -8..=10 {
            let x = rc * 2f64.powi(k);
            if x < eta {
                pts.push(x);
            }
        }
    }
    let f = |r: f64| 2.0 * PI * r * g(r) * profile.density(r);
    Ok(integrate_breaks(f, &pts, REL_TOL, 0.0)?)
}

fn critical_radius(beta: f64, t: f64) -> f64 {
    if t > 0.0 {
        t.powf(-1.0 / (2.0 * beta))
    } else {
        f64::INFINITY
    }
}

fn check_time(t: f64) -> Result<(), OracleError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(OracleError::InvalidArgument(format!("t = {t}")))
    }
}

/// ∫_{ℝ²} |ξ|^{2s₁} e^{−2|ξ|^{2β}t} profile(ξ) dξ
pub fn linear_decay_integral(profile: &Profile, s1: f64, beta: f64, t: f64) -> Result<f64, OracleError> {
    check_time(t)?;
    radial_integral(profile, critical_radius(beta, t), |r| {
        let w = if s1 == 0.0 { 1.0 } else { r.powf(2.0 * s1) };
        w * (-2.0 * r.powf(2.0 * beta) * t).exp()
    })
}

/// (∫ e^{−2at} e^{−2|ξ|^{2β}t} profile(ξ) dξ)^{1/2}
pub fn trtau_linear_decay(profile: &Profile, a: f64, beta: f64, t: f64) -> Result<f64, OracleError> {
    Ok((-a * t).exp() * linear_decay_integral(profile, 0.0, beta, t)?.sqrt())
}

/// Maximize `f` over log t ∈ [lo, hi]: coarse scan, then golden section.
fn maximize_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const SCAN: usize = 400;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        let v = f(x.exp());
        if v > best.0 {
            best = (v, x);
        }
    }
    let step = (hi - lo) / SCAN as f64;
    let (mut a, mut b) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d.exp());
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x.exp());
    if v >= best.0 {
        (v, x.exp())
    } else {
        (best.0, best.1.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// sup_{t≥1} (1−e^{−at})·‖linear profile decay at t‖
    pub value: f64,
    pub t_star: f64,
    /// sup_{t>0} (1−e^{−at}) t^{−1/(2β)}
    pub pure: f64,
    pub pure_t_star: f64,
}

/// sup_{t>0} (1−e^{−at}) t^{−1/(2β)} and its maximizer.
pub fn pure_envelope(a: f64, beta: f64) -> Result<(f64, f64), OracleError> {
    if !(a > 0.0 && a <= 1.0) || !(0.5..1.0).contains(&beta) {
        return Err(OracleError::InvalidArgument(format!("a = {a}, beta = {beta}")));
    }
    let p = 1.0 / (2.0 * beta);
    let f = |t: f64| -(-a * t).exp_m1() * t.powf(-p);
    Ok(maximize_log(f, (1e-12 / a).ln(), (1e4 / a).ln()))
}

pub fn damping_envelope(a: f64, beta: f64, profile: &Profile) -> Result<Envelope, OracleError> {
    if !(a > 0.0 && a <= 1.0) || !(beta > 0.5 && beta < 1.0) {
        return Err(OracleError::InvalidArgument(format!("a = {a}, beta = {beta}")));
    }
    profile.validate()?;
    let norm = |t: f64| linear_decay_integral(profile, 0.0, beta, t).map(f64::sqrt);
    // surface quadrature failures instead of hiding them in the search
    norm(1.0)?;
    let f = |t: f64| -(-a * t).exp_m1() * norm(t).unwrap_or(f64::NAN);
    let (value, t_star) = maximize_log(f, 0.0, (1e4 / a).ln());
    if !value.is_finite() {
        return Err(OracleError::InvalidArgument("envelope search failed".into()));
    }
    let (pure, pure_t_star) = pure_envelope(a, beta)?;
    Ok(Envelope {
        value,
        t_star,
        pure,
        pure_t_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionCheck {
    pub t: f64,
    /// ∫₀^t (1+t−t′)^{−s₁}(1+t′)^{−s₂} dt′
    pub integral: f64,
    /// (1+t)^{−s₁}, (1+t)^{−s₁}ln(1+t) or (1+t)^{1−s₁−s₂} for s₂ >, =, < 1
    pub envelope: f64,
    pub ratio: f64,
}

pub fn convolution_bound_check(s1: f64, s2: f64, t: f64) -> Result<ConvolutionCheck, OracleError> {
    if !(s1 > 0.0 && s1 <= s2) {
        return Err(OracleError::InvalidArgument(format!("need 0 < s1 <= s2, got ({s1}, {s2})")));
    }
    check_time(t)?;
    let f = |x: f64| (1.0 + t - x).powf(-s1) * (1.0 + x).powf(-s2);
    let mut pts = vec![0.0, 0.5 * t, t];
    let mut h = 1.0;
    while h < 0.5 * t {
        pts.push(h);
        pts.push(t - h);
        h *= 2.0;
    }
    let integral = integrate_breaks(f, &pts, 1e-12, 0.0)?;
    let envelope = if s2 > 1.0 {
        (1.0 + t).powf(-s1)
    } else if s2 == 1.0 {
        (1.0 + t).powf(-s1) * (1.0 + t).ln()
    } else {
        (1.0 + t).powf(1.0 - s1 - s2)
    };
    Ok(ConvolutionCheck {
        t,
        integral,
        envelope,
        ratio: integral / envelope,
    })
}
