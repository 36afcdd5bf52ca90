//! Norms, pairings and energy/dissipation functionals evaluated spectrally.
//!
//! Inhomogeneous weights are (1+|ξ|²)^s, homogeneous ones |ξ|^{2s} with the
//! convention |ξ|⁰ ≡ 1 (so order zero is the plain L² norm) and value 0 at
//! ξ = 0 otherwise. Cross pairings use
//! ⟨−∇u, τ⟩_w = L² Σ_ξ w(|ξ|) Re Σ_{jk} (−iξ_j û_k) conj(τ̂_{jk}).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{partial, ModelParams, SimState};
use crate::spectral::{
    inverse_many, mean_is_zero, shell_energies, Rank, SpectralError,
    SpectralField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error("order {0} needs a mean-free field")]
    NonzeroMean(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Homogeneous,
    Inhomogeneous,
}

/// |ξ|^s with |ξ|⁰ ≡ 1 and 0 at ξ = 0 for s ≠ 0.
#[inline]
pub fn hom(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(s)
    }
}

/// (1+|ξ|²)^s
#[inline]
pub fn inhom(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + r * r).powf(s)
    }
}

/// Per-mode energies of a state, the common input of every functional.
#[derive(Debug, Clone)]
pub struct ModalEnergies {
    /// |ξ| per retained entry
    pub r: Vec<f64>,
    /// L²·|û|²
    pub eu: Vec<f64>,
    /// L²·|τ̂|²_F
    pub etau: Vec<f64>,
    /// L²·Re Σ (−iξ_j û_k) conj τ̂_{jk}
    pub cross: Vec<f64>,
    /// L²·|tr τ̂|²
    pub etrace: Vec<f64>,
    pub mean_free: bool,
}

impl ModalEnergies {
    pub fn new(state: &SimState) -> Self {
        let g = state.grid();
        let l2 = g.length() * g.length();
        let (u, tau) = (&state.u, &state.tau);
        let mut m = ModalEnergies {
            r: Vec::new(),
            eu: Vec::new(),
            etau: Vec::new(),
            cross: Vec::new(),
            etrace: Vec::new(),
            mean_free: mean_is_zero(u) && mean_is_zero(tau),
        };
        for idx in 0..g.len() {
            let (u1, u2) = (u.comp(0)[idx], u.comp(1)[idx]);
            let (p, q, s) = (tau.comp(0)[idx], tau.comp(1)[idx], tau.comp(2)[idx]);
            let eu = u1.norm_sqr() + u2.norm_sqr();
            let et = p.norm_sqr() + 2.0 * q.norm_sqr() + s.norm_sqr();
            if eu == 0.0 && et == 0.0 {
                continue;
            }
            let [x1, x2] = g.xi_of(idx);
            // Σ_jk ξ_j û_k conj τ̂_jk, then multiply by −i and take Re
            let z = (u1 * p.conj() + u2 * q.conj()) * x1 + (u1 * q.conj() + u2 * s.conj()) * x2;
            m.r.push(x1.hypot(x2));
            m.eu.push(l2 * eu);
            m.etau.push(l2 * et);
            m.cross.push(l2 * z.im);
            m.etrace.push(l2 * (p + s).norm_sqr());
        }
        m
    }

    fn sum(&self, e: &[f64], w: impl Fn(f64) -> f64) -> f64 {
        self.r.iter().zip(e).map(|(&r, &x)| w(r) * x).sum()
    }

    pub fn u_sum(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.sum(&self.eu, w)
    }

    pub fn tau_sum(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.sum(&self.etau, w)
    }

    pub fn pair_sum(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.r
            .iter()
            .zip(self.eu.iter().zip(&self.etau))
            .map(|(&r, (a, b))| w(r) * (a + b))
            .sum()
    }

    pub fn cross_sum(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.sum(&self.cross, w)
    }

    pub fn trace_sum(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.sum(&self.etrace, w)
    }
}

pub fn sobolev_norm(f: &SpectralField, s: f64, kind: NormKind) -> Result<f64, FunctionalError> {
    let e = match kind {
        NormKind::Inhomogeneous => {
            let g = f.grid().clone();
            f.weighted_energy(|idx| inhom(g.xi_norm(idx), s))
        }
        NormKind::Homogeneous => {
            if s < 0.0 && !mean_is_zero(f) {
                return Err(FunctionalError::NonzeroMean(s));
            }
            let g = f.grid().clone();
            f.weighted_energy(|idx| hom(g.xi_norm(idx), 2.0 * s))
        }
    };
    Ok(e.sqrt())
}

/// sup_j 2^{js}‖Δ̇_j f‖_{L²}
pub fn besov_2inf_norm(f: &SpectralField, s: f64) -> Result<f64, FunctionalError> {
    besov_of(&[f], s)
}

/// Besov norm of several fields taken jointly, e.g. the pair (u, τ).
pub fn besov_of(fields: &[&SpectralField], s: f64) -> Result<f64, FunctionalError> {
    if fields.iter().any(|f| !mean_is_zero(f)) {
        return Err(FunctionalError::NonzeroMean(s));
    }
    let mut per_shell: Vec<(i32, f64)> = Vec::new();
    for f in fields {
        for (i, (j, e)) in shell_energies(f).into_iter().enumerate() {
            if i == per_shell.len() {
                per_shell.push((j, 0.0));
            }
            per_shell[i].1 += e;
        }
    }
    Ok(per_shell
        .into_iter()
        .map(|(j, e)| 2f64.powf(j as f64 * s) * e.sqrt())
        .fold(0.0, f64::max))
}

fn check_pair(u: &SpectralField, tau: &SpectralField) -> Result<(), FunctionalError> {
    if u.grid() != tau.grid() {
        return Err(FunctionalError::GridMismatch);
    }
    for (f, want) in [(u, Rank::Vector), (tau, Rank::SymTensor)] {
        if f.rank() != want {
            return Err(SpectralError::RankMismatch {
                expected: want,
                got: f.rank(),
            }
            .into());
        }
    }
    Ok(())
}

/// ⟨−∇u, τ⟩ with a radial weight w(|ξ|).
pub fn cross_inner_weighted(
    u: &SpectralField,
    tau: &SpectralField,
    w: impl Fn(f64) -> f64,
) -> Result<f64, FunctionalError> {
    check_pair(u, tau)?;
    let s = SimState {
        u: u.clone(),
        tau: tau.clone(),
        t: 0.0,
    };
    Ok(ModalEnergies::new(&s).cross_sum(w))
}

/// ⟨−∇u, τ⟩_{H^order}.
pub fn cross_inner(u: &SpectralField, tau: &SpectralField, order: f64) -> Result<f64, FunctionalError> {
    cross_inner_weighted(u, tau, |r| inhom(r, order))
}

/// ⟨τ, −Λ^{2β−2}∇u⟩.
pub fn cross_inner_low(u: &SpectralField, tau: &SpectralField, beta: f64) -> Result<f64, FunctionalError> {
    cross_inner_weighted(u, tau, |r| hom(r, 2.0 * beta - 2.0))
}

pub fn e0_from(m: &ModalEnergies, beta: f64, k: f64, s: f64) -> f64 {
    m.pair_sum(|r| inhom(r, s))
        + 2.0 * k * m.cross_sum(|r| inhom(r, s - beta) + hom(r, 2.0 * beta - 2.0))
}

pub fn d0_from(m: &ModalEnergies, beta: f64, k: f64, s: f64) -> f64 {
    0.5 * k * m.u_sum(|r| hom(r, 2.0 * beta) * inhom(r, s + 1.0 - 2.0 * beta))
        + m.tau_sum(|r| hom(r, 2.0 * beta) * inhom(r, s))
}

pub fn ebeta_from(m: &ModalEnergies, beta: f64, k: f64) -> f64 {
    m.pair_sum(|r| hom(r, 2.0 * beta) * inhom(r, beta))
        + 2.0 * k * m.cross_sum(|r| hom(r, 4.0 * beta - 2.0) * inhom(r, 1.0 - beta))
}

pub fn dbeta_from(m: &ModalEnergies, beta: f64, k: f64) -> f64 {
    0.5 * k * m.u_sum(|r| r * r * hom(r, 4.0 * beta - 2.0) * inhom(r, 1.0 - beta))
        + m.tau_sum(|r| hom(r, 4.0 * beta) * inhom(r, beta))
}

/// a′ = 2 − 1/β
pub fn time_weight_exponent(beta: f64) -> f64 {
    2.0 - 1.0 / beta
}

pub fn etilde_from(m: &ModalEnergies, beta: f64, k: f64, s: f64, t: f64) -> f64 {
    let w = (1.0 + t).powf(time_weight_exponent(beta));
    w * m.pair_sum(|r| hom(r, 2.0 * s)) + k * m.cross_sum(|r| hom(r, 2.0 * (s - beta)))
}

pub fn dtilde_from(m: &ModalEnergies, beta: f64, k: f64, s: f64, t: f64) -> f64 {
    let w = (1.0 + t).powf(time_weight_exponent(beta));
    w * m.tau_sum(|r| hom(r, 2.0 * (s + beta))) + 0.25 * k * m.u_sum(|r| r * r * hom(r, 2.0 * (s - beta)))
}

pub fn ebar_from(m: &ModalEnergies, beta: f64, k: f64, theta: f64, s: f64) -> f64 {
    m.pair_sum(|r| hom(r, 2.0 * theta) * inhom(r, s - theta))
        + 2.0 * k * m.cross_sum(|r| hom(r, 2.0 * theta) * inhom(r, s - beta - theta))
}

pub fn dbar_from(m: &ModalEnergies, beta: f64, k: f64, theta: f64, s: f64) -> f64 {
    0.5 * k * m.u_sum(|r| r * r * hom(r, 2.0 * theta) * inhom(r, s - beta - theta))
        + m.tau_sum(|r| hom(r, 2.0 * (beta + theta)) * inhom(r, s - theta))
}

/// E₀ = ‖(u,τ)‖²_{H^s} + 2k(⟨−∇u,τ⟩_{H^{s−β}} + ⟨τ,−Λ^{2β−2}∇u⟩)
pub fn energy_e0(state: &SimState, p: &ModelParams, k: f64, s: f64) -> f64 {
    e0_from(&ModalEnergies::new(state), p.beta, k, s)
}

/// D₀ = (k/2)‖Λ^βu‖²_{H^{s+1−2β}} + ‖Λ^βτ‖²_{H^s}
pub fn dissipation_d0(state: &SimState, p: &ModelParams, k: f64, s: f64) -> f64 {
    d0_from(&ModalEnergies::new(state), p.beta, k, s)
}

/// E_β = ‖Λ^β(u,τ)‖²_{H^β} + 2k⟨−Λ^{2β−1}∇u, Λ^{2β−1}τ⟩_{H^{1−β}}
pub fn energy_ebeta(state: &SimState, p: &ModelParams, k: f64) -> f64 {
    ebeta_from(&ModalEnergies::new(state), p.beta, k)
}

/// D_β = (k/2)‖∇Λ^{2β−1}u‖²_{H^{1−β}} + ‖Λ^{2β}τ‖²_{H^β}
pub fn dissipation_dbeta(state: &SimState, p: &ModelParams, k: f64) -> f64 {
    dbeta_from(&ModalEnergies::new(state), p.beta, k)
}

/// Ẽ_s = (1+t)^{a′}‖Λ^s(u,τ)‖² + k⟨Λ^{s−β}τ, −∇Λ^{s−β}u⟩
pub fn energy_etilde(state: &SimState, p: &ModelParams, k: f64, s: f64) -> f64 {
    etilde_from(&ModalEnergies::new(state), p.beta, k, s, state.t)
}

/// D̃_s = (1+t)^{a′}‖Λ^{s+β}τ‖² + (k/4)‖∇Λ^{s−β}u‖²
pub fn dissipation_dtilde(state: &SimState, p: &ModelParams, k: f64, s: f64) -> f64 {
    dtilde_from(&ModalEnergies::new(state), p.beta, k, s, state.t)
}

/// Ē_θ = ‖Λ^θ(u,τ)‖²_{H^{s−θ}} + 2k⟨−∇Λ^θu, Λ^θτ⟩_{H^{s−β−θ}}
pub fn energy_ebar(state: &SimState, p: &ModelParams, k: f64, theta: f64, s: f64) -> f64 {
    ebar_from(&ModalEnergies::new(state), p.beta, k, theta, s)
}

/// D̄_θ = (k/2)‖∇Λ^θu‖²_{H^{s−β−θ}} + ‖Λ^{β+θ}τ‖²_{H^{s−θ}}
pub fn dissipation_dbar(state: &SimState, p: &ModelParams, k: f64, theta: f64, s: f64) -> f64 {
    dbar_from(&ModalEnergies::new(state), p.beta, k, theta, s)
}

/// Radius of S₁(t) = {|ξ|^{2β} ≤ C₂(1+t)^{−1}}.
pub fn s1_radius(t: f64, beta: f64, c2: f64) -> f64 {
    (c2 / (1.0 + t)).powf(1.0 / (2.0 * beta))
}

/// Radius of S₀(t) = {|ξ|² ≤ 2C₂ f′/f}, f = ln³(e+t).
pub fn s0_radius(t: f64, c2: f64) -> f64 {
    let e_t = std::f64::consts::E + t;
    let ratio = 3.0 / (e_t * e_t.ln());
    (2.0 * c2 * ratio).sqrt()
}

/// Σ_{|ξ| ≤ R(t)} |ξ|^{2θ}(|û|² + |τ̂|²)·L², where `radius_fn` maps t to R.
pub fn lowfreq_mass(state: &SimState, radius_fn: impl Fn(f64) -> f64, theta: f64) -> f64 {
    let radius = radius_fn(state.t);
    lowfreq_from(&ModalEnergies::new(state), radius, theta)
}

pub fn lowfreq_from(m: &ModalEnergies, radius: f64, theta: f64) -> f64 {
    m.pair_sum(|r| if r <= radius { hom(r, 2.0 * theta) } else { 0.0 })
}

/// ‖tr τ‖_{L²}
pub fn trtau_l2(state: &SimState) -> f64 {
    ModalEnergies::new(state).trace_sum(|_| 1.0).sqrt()
}

/// ‖Λ^α(u_A − u_B, τ_A − τ_B)‖_{L²}
pub fn diff_norms(a: &SimState, b: &SimState, alpha: f64) -> Result<f64, FunctionalError> {
    if a.grid() != b.grid() {
        return Err(FunctionalError::GridMismatch);
    }
    let du = a.u.sub(&b.u)?;
    let dt = a.tau.sub(&b.tau)?;
    let g = a.grid().clone();
    let w = |idx: usize| hom(g.xi_norm(idx), 2.0 * alpha);
    Ok((du.weighted_energy(w) + dt.weighted_energy(w)).sqrt())
}

/// ‖tr τ_A − tr τ_B‖_{L²}
pub fn trtau_diff(a: &SimState, b: &SimState) -> Result<f64, FunctionalError> {
    if a.grid() != b.grid() {
        return Err(FunctionalError::GridMismatch);
    }
    let g = a.grid();
    let l2 = g.length() * g.length();
    let mut acc = 0.0;
    for idx in 0..g.len() {
        let ta = a.tau.comp(0)[idx] + a.tau.comp(2)[idx];
        let tb = b.tau.comp(0)[idx] + b.tau.comp(2)[idx];
        acc += (ta - tb).norm_sqr();
    }
    Ok((acc * l2).sqrt())
}

/// ‖∇u‖_{L^∞} + ‖∇τ‖_{L^∞} on the grid, with pointwise Frobenius norms.
pub fn gradient_linf(state: &SimState) -> f64 {
    let g = state.grid();
    let mut comps = Vec::with_capacity(10);
    for c in 0..2 {
        comps.push(partial(g, state.u.comp(c), 0));
        comps.push(partial(g, state.u.comp(c), 1));
    }
    for c in 0..3 {
        comps.push(partial(g, state.tau.comp(c), 0));
        comps.push(partial(g, state.tau.comp(c), 1));
    }
    let fields: Vec<SpectralField> = [(0usize, 4usize), (4, 10)]
        .iter()
        .flat_map(|&(a, b)| comps[a..b].chunks(2).map(|ch| ch.to_vec()).collect::<Vec<_>>())
        .map(|pair| SpectralField::new(g.clone(), Rank::Vector, pair).expect("shape"))
        .collect();
    let refs: Vec<&SpectralField> = fields.iter().collect();
    let phys = inverse_many(&refs).expect("same grid");
    let tau_w = [1.0, 2.0, 1.0];
    let mut gu: f64 = 0.0;
    let mut gt: f64 = 0.0;
    for i in 0..g.len() {
        let su: f64 = phys[..2].iter().map(|p| p.comp(0)[i].powi(2) + p.comp(1)[i].powi(2)).sum();
        let st: f64 = phys[2..]
            .iter()
            .zip(tau_w)
            .map(|(p, w)| w * (p.comp(0)[i].powi(2) + p.comp(1)[i].powi(2)))
            .sum();
        gu = gu.max(su);
        gt = gt.max(st);
    }
    gu.sqrt() + gt.sqrt()
}

/// Largest k for which E₀ lies within [½, 2]·‖(u,τ)‖²_{H^s}.
///
/// Cauchy–Schwarz bounds both cross terms of E₀ by
/// k·M·‖(u,τ)‖²_{H^s} with M = sup_r [r(1+r²)^{−β} + r^{2β−1}(1+r²)^{−s}].
pub fn k_max(s: f64, beta: f64) -> f64 {
    let f = |r: f64| r * (1.0 + r * r).powf(-beta) + hom(r, 2.0 * beta - 1.0) * (1.0 + r * r).powf(-s);
    let mut best: f64 = 0.0;
    let mut best_x = 0.0;
    // log-spaced scan followed by golden-section refinement
    for i in 0..=4000 {
        let x = -12.0 + 24.0 * i as f64 / 4000.0;
        let v = f(10f64.powf(x));
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut lo, mut hi) = (best_x - 0.006, best_x + 0.006);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if f(10f64.powf(a)) > f(10f64.powf(b)) {
            hi = b;
        } else {
            lo = a;
        }
    }
    best = best.max(f(10f64.powf(0.5 * (lo + hi))));
    1.0 / (2.0 * best)
}

/// Settings for [`report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalConfig {
    /// Cross-term weight k
    pub k: f64,
    /// Regularity index s of E₀, D₀, Ē_θ, D̄_θ
    pub s: f64,
    /// Order of Ẽ_s, D̃_s
    pub s_tilde: f64,
    /// Splitting constant C₂
    pub c2: f64,
    pub hs_orders: Vec<f64>,
    pub hdot_orders: Vec<f64>,
}

impl FunctionalConfig {
    /// k = 0.01, s = 1 + β + 0.1, s̃ = 2β, C₂ = 4, norms at 0, 1, s.
    pub fn for_beta(beta: f64) -> Self {
        let s = 1.0 + beta + 0.1;
        FunctionalConfig {
            k: 0.01,
            s,
            s_tilde: 2.0 * beta,
            c2: 4.0,
            hs_orders: vec![1.0, 2.0 * beta, s],
            hdot_orders: vec![0.5, 1.0, 2.0 * beta],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub t: f64,
    pub l2: f64,
    /// (order, ‖(u,τ)‖_{H^order})
    pub hs: Vec<(f64, f64)>,
    /// (order, ‖Λ^order(u,τ)‖_{L²})
    pub hdots: Vec<(f64, f64)>,
    pub besov_m1: Option<f64>,
    pub besov_mhalf: Option<f64>,
    pub e0: f64,
    pub d0: f64,
    pub e_beta: f64,
    pub d_beta: f64,
    pub etilde_s: f64,
    pub dtilde_s: f64,
    pub ebar0: f64,
    pub dbar0: f64,
    pub ebar1: f64,
    pub dbar1: f64,
    /// mass in S₁(t)
    pub lowfreq_s1: f64,
    /// mass in S₀(t)
    pub lowfreq_s0: f64,
    /// |ξ|²-weighted mass in S₀(t)
    pub lowfreq_s0_grad: f64,
    pub trtau_l2: f64,
}

fn fmt_order(s: f64) -> String {
    let t = format!("{s:.4}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

impl FunctionalReport {
    /// Named columns in their fixed CSV order.
    pub fn columns(&self) -> Vec<(String, Option<f64>)> {
        let mut c = vec![("t".to_string(), Some(self.t)), ("l2".to_string(), Some(self.l2))];
        for &(s, v) in &self.hs {
            c.push((format!("hs_{}", fmt_order(s)), Some(v)));
        }
        for &(s, v) in &self.hdots {
            c.push((format!("hdot_{}", fmt_order(s)), Some(v)));
        }
        c.push(("besov_m1".into(), self.besov_m1));
        c.push(("besov_mhalf".into(), self.besov_mhalf));
        for (name, v) in [
            ("E0", self.e0),
            ("D0", self.d0),
            ("E_beta", self.e_beta),
            ("D_beta", self.d_beta),
            ("Etilde_s", self.etilde_s),
            ("Dtilde_s", self.dtilde_s),
            ("Ebar_0", self.ebar0),
            ("Dbar_0", self.dbar0),
            ("Ebar_1", self.ebar1),
            ("Dbar_1", self.dbar1),
            ("lowfreq_s1", self.lowfreq_s1),
            ("lowfreq_s0", self.lowfreq_s0),
            ("lowfreq_s0_grad", self.lowfreq_s0_grad),
            ("trtau_l2", self.trtau_l2),
        ] {
            c.push((name.to_string(), Some(v)));
        }
        c
    }
}

/// Evaluate every monitored quantity at one state.
pub fn report(state: &SimState, p: &ModelParams, cfg: &FunctionalConfig) -> FunctionalReport {
    let m = ModalEnergies::new(state);
    let (beta, k, s) = (p.beta, cfg.k, cfg.s);
    let besov = |order: f64| {
        if m.mean_free {
            besov_of(&[&state.u, &state.tau], order).ok()
        } else {
            None
        }
    };
    let r0 = s0_radius(state.t, cfg.c2);
    FunctionalReport {
        t: state.t,
        l2: m.pair_sum(|_| 1.0).sqrt(),
        hs: cfg
            .hs_orders
            .iter()
            .map(|&o| (o, m.pair_sum(|r| inhom(r, o)).sqrt()))
            .collect(),
        hdots: cfg
            .hdot_orders
            .iter()
            .map(|&o| (o, m.pair_sum(|r| hom(r, 2.0 * o)).sqrt()))
            .collect(),
        besov_m1: besov(-1.0),
        besov_mhalf: besov(-0.5),
        e0: e0_from(&m, beta, k, s),
        d0: d0_from(&m, beta, k, s),
        e_beta: ebeta_from(&m, beta, k),
        d_beta: dbeta_from(&m, beta, k),
        etilde_s: etilde_from(&m, beta, k, cfg.s_tilde, state.t),
        dtilde_s: dtilde_from(&m, beta, k, cfg.s_tilde, state.t),
        ebar0: ebar_from(&m, beta, k, 0.0, s),
        dbar0: dbar_from(&m, beta, k, 0.0, s),
        ebar1: ebar_from(&m, beta, k, 1.0, s),
        dbar1: dbar_from(&m, beta, k, 1.0, s),
        lowfreq_s1: lowfreq_from(&m, s1_radius(state.t, beta, cfg.c2), 0.0),
        lowfreq_s0: lowfreq_from(&m, r0, 0.0),
        lowfreq_s0_grad: lowfreq_from(&m, r0, 1.0),
        trtau_l2: m.trace_sum(|_| 1.0).sqrt(),
    }
}
