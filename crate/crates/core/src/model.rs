//! Right-hand side of the Oldroyd-B system with pressure removed by Leray
//! projection. Nonlinear products are formed on the physical grid and
//! truncated by the two-thirds rule.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{
    fft::{forward_components, inverse_components},
    ops::{dealias_in_place, leray_in_place, radial_table},
    Grid, Rank, SpectralError, SpectralField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("damping a = {0} outside [0, 1]")]
    InvalidDamping(f64),
    #[error("fractional order beta = {0} outside [1/2, 1)")]
    InvalidBeta(f64),
    #[error("bilinear parameter b = {0} outside [-1, 1]")]
    InvalidB(f64),
    #[error("state does not match model: {0}")]
    StateMismatch(String),
    #[error("non-finite value in {stage} at t = {t}")]
    NonFinite { stage: &'static str, t: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Which terms of the system are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dynamics {
    #[default]
    Nonlinear,
    /// Transport and Q dropped.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub beta: f64,
    pub b: f64,
    pub grid: Grid,
    pub dynamics: Dynamics,
}

impl ModelParams {
    pub fn new(a: f64, beta: f64, b: f64, grid: Grid) -> Result<Self, ModelError> {
        let p = ModelParams {
            a,
            beta,
            b,
            grid,
            dynamics: Dynamics::Nonlinear,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_dynamics(mut self, dynamics: Dynamics) -> Self {
        self.dynamics = dynamics;
        self
    }

    pub fn with_a(mut self, a: f64) -> Result<Self, ModelError> {
        self.a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.a) {
            return Err(ModelError::InvalidDamping(self.a));
        }
        if !(0.5..1.0).contains(&self.beta) {
            return Err(ModelError::InvalidBeta(self.beta));
        }
        if !(-1.0..=1.0).contains(&self.b) {
            return Err(ModelError::InvalidB(self.b));
        }
        Ok(())
    }

    /// Per-mode stiff rate |ξ|^{2β} + a (value a at ξ = 0).
    pub fn decay_rates(&self) -> Vec<f64> {
        let two_beta = 2.0 * self.beta;
        let mut t = radial_table(&self.grid, |r| r.powf(two_beta), 0.0)
            .expect("finite powers of finite radii");
        for x in &mut t {
            *x += self.a;
        }
        t
    }
}

/// Velocity and stress at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub u: SpectralField,
    pub tau: SpectralField,
    pub t: f64,
}

/// Time derivative of a state, or any pair shaped like one.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub du: SpectralField,
    pub dtau: SpectralField,
}

impl SimState {
    pub fn new(u: SpectralField, tau: SpectralField, t: f64) -> Result<Self, ModelError> {
        if u.rank() != Rank::Vector || tau.rank() != Rank::SymTensor {
            return Err(ModelError::StateMismatch(format!(
                "expected (vector, symtensor), got ({:?}, {:?})",
                u.rank(),
                tau.rank()
            )));
        }
        if u.grid() != tau.grid() {
            return Err(ModelError::StateMismatch("u and tau on different grids".into()));
        }
        Ok(SimState { u, tau, t })
    }

    pub fn zeros(grid: &Grid) -> Self {
        SimState {
            u: SpectralField::zeros(grid, Rank::Vector),
            tau: SpectralField::zeros(grid, Rank::SymTensor),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// ‖(u, τ)‖²_{L²}.
    pub fn l2_norm_sq(&self) -> f64 {
        self.u.l2_norm_sq() + self.tau.l2_norm_sq()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Scale both fields (time unchanged).
    pub fn scaled(&self, alpha: f64) -> Self {
        SimState {
            u: self.u.scaled(alpha),
            tau: self.tau.scaled(alpha),
            t: self.t,
        }
    }

    /// max over ξ ≠ 0 of |ξ·û(ξ)|.
    pub fn divergence_defect(&self) -> f64 {
        divergence_defect(&self.u)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.tau.is_finite()
    }

    /// Re-impose ξ·û = 0 and reality symmetry.
    pub fn enforce_constraints(&mut self) {
        leray_in_place(&mut self.u);
        self.u.symmetrize();
        self.tau.symmetrize();
    }

    pub fn dealias(&mut self) {
        dealias_in_place(&mut self.u);
        dealias_in_place(&mut self.tau);
    }

    fn check(&self, p: &ModelParams) -> Result<(), ModelError> {
        if self.u.rank() != Rank::Vector || self.tau.rank() != Rank::SymTensor {
            return Err(ModelError::StateMismatch("wrong ranks".into()));
        }
        if self.u.grid() != &p.grid || self.tau.grid() != &p.grid {
            return Err(ModelError::StateMismatch("state grid differs from model grid".into()));
        }
        Ok(())
    }
}

impl Tendency {
    pub fn zeros(grid: &Grid) -> Self {
        Tendency {
            du: SpectralField::zeros(grid, Rank::Vector),
            dtau: SpectralField::zeros(grid, Rank::SymTensor),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.du.is_finite() && self.dtau.is_finite()
    }

    /// Real L² pairing ⟨(u, τ), (du, dτ)⟩.
    pub fn pair_with(&self, s: &SimState) -> f64 {
        s.u.inner(&self.du).expect("same shape") + s.tau.inner(&self.dtau).expect("same shape")
    }
}

pub fn divergence_defect(u: &SpectralField) -> f64 {
    let g = u.grid();
    let mut m: f64 = 0.0;
    for idx in 1..g.len() {
        let [x1, x2] = g.xi_of(idx);
        m = m.max((u.comp(0)[idx] * x1 + u.comp(1)[idx] * x2).norm());
    }
    m
}

fn require_rank(f: &SpectralField, rank: Rank) -> Result<(), ModelError> {
    if f.rank() != rank {
        return Err(SpectralError::RankMismatch {
            expected: rank,
            got: f.rank(),
        }
        .into());
    }
    Ok(())
}

/// i ξ_axis f̂
pub(crate) fn partial(grid: &Grid, c: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n();
    let mut out = vec![Complex64::default(); c.len()];
    for i1 in 0..n {
        for i2 in 0..n {
            let idx = i1 * n + i2;
            let x = if axis == 0 { grid.axis_xi(i1) } else { grid.axis_xi(i2) };
            out[idx] = Complex64::new(-x * c[idx].im, x * c[idx].re);
        }
    }
    out
}

/// D(u) = (∇u + ∇uᵀ)/2 as (xx, xy, yy).
pub fn deformation(u: &SpectralField) -> Result<SpectralField, ModelError> {
    require_rank(u, Rank::Vector)?;
    let g = u.grid();
    let d11 = partial(g, u.comp(0), 0);
    let d22 = partial(g, u.comp(1), 1);
    let a = partial(g, u.comp(0), 1);
    let b = partial(g, u.comp(1), 0);
    let d12 = a.iter().zip(&b).map(|(x, y)| (x + y) * 0.5).collect();
    Ok(SpectralField::new(g.clone(), Rank::SymTensor, vec![d11, d12, d22])?)
}

/// ω = (∂₁u₂ − ∂₂u₁)/2, so that Ω(u) = [[0, ω], [−ω, 0]].
pub fn vorticity(u: &SpectralField) -> Result<SpectralField, ModelError> {
    require_rank(u, Rank::Vector)?;
    let g = u.grid();
    let a = partial(g, u.comp(1), 0);
    let b = partial(g, u.comp(0), 1);
    let w = a.iter().zip(&b).map(|(x, y)| (x - y) * 0.5).collect();
    Ok(SpectralField::new(g.clone(), Rank::Scalar, vec![w])?)
}

/// div τ, with (div τ)_j = ∂_k τ_{jk}.
pub fn divergence_tensor(tau: &SpectralField) -> Result<SpectralField, ModelError> {
    require_rank(tau, Rank::SymTensor)?;
    let g = tau.grid();
    let mut out = SpectralField::zeros(g, Rank::Vector);
    for idx in 0..g.len() {
        let [x1, x2] = g.xi_of(idx);
        let (p, q, r) = (tau.comp(0)[idx], tau.comp(1)[idx], tau.comp(2)[idx]);
        let i = Complex64::i();
        out.comp_mut(0)[idx] = i * (p * x1 + q * x2);
        out.comp_mut(1)[idx] = i * (q * x1 + r * x2);
    }
    out.symmetrize();
    Ok(out)
}

/// Q = τΩ − Ωτ − b(Dτ + τD) at one point; returns (xx, xy, yy).
#[inline]
pub fn q_pointwise(tau: [f64; 3], w: f64, d: [f64; 3], b: f64) -> [f64; 3] {
    let [p, q, r] = tau;
    let [d11, d12, d22] = d;
    [
        -2.0 * q * w - 2.0 * b * (d11 * p + d12 * q),
        (p - r) * w - b * (d11 * q + d12 * r + d12 * p + d22 * q),
        2.0 * q * w - 2.0 * b * (d12 * q + d22 * r),
    ]
}

/// Q(∇u, τ) evaluated on the grid, transformed back and dealiased.
pub fn q_bilinear(u: &SpectralField, tau: &SpectralField, b: f64) -> Result<SpectralField, ModelError> {
    require_rank(u, Rank::Vector)?;
    require_rank(tau, Rank::SymTensor)?;
    if u.grid() != tau.grid() {
        return Err(SpectralError::GridMismatch.into());
    }
    let g = u.grid();
    let d = deformation(u)?;
    let w = vorticity(u)?;
    let refs: Vec<&[Complex64]> = d
        .comps()
        .iter()
        .chain(w.comps())
        .chain(tau.comps())
        .map(|c| c.as_slice())
        .collect();
    let phys = inverse_components(g, &refs);
    let mut out = vec![vec![0.0; g.len()]; 3];
    for i in 0..g.len() {
        let q = q_pointwise(
            [phys[4][i], phys[5][i], phys[6][i]],
            phys[3][i],
            [phys[0][i], phys[1][i], phys[2][i]],
            b,
        );
        for c in 0..3 {
            out[c][i] = q[c];
        }
    }
    let refs: Vec<&[f64]> = out.iter().map(|c| c.as_slice()).collect();
    let mut f = SpectralField::new(g.clone(), Rank::SymTensor, forward_components(g, &refs))?;
    dealias_in_place(&mut f);
    Ok(f)
}

/// (u·∇)u and (u·∇)τ + Q(∇u, τ), both dealiased (not projected).
pub(crate) fn nonlinear_terms(
    u: &SpectralField,
    tau: &SpectralField,
    b: f64,
    t: f64,
) -> Result<(SpectralField, SpectralField), ModelError> {
    let g = u.grid();
    let mut spec: Vec<Vec<Complex64>> = Vec::with_capacity(15);
    spec.push(u.comp(0).to_vec());
    spec.push(u.comp(1).to_vec());
    for c in 0..2 {
        spec.push(partial(g, u.comp(c), 0));
        spec.push(partial(g, u.comp(c), 1));
    }
    for c in 0..3 {
        spec.push(tau.comp(c).to_vec());
    }
    for c in 0..3 {
        spec.push(partial(g, tau.comp(c), 0));
        spec.push(partial(g, tau.comp(c), 1));
    }
    let refs: Vec<&[Complex64]> = spec.iter().map(|c| c.as_slice()).collect();
    let ph = inverse_components(g, &refs);
    drop(spec);

    let len = g.len();
    let mut out = vec![vec![0.0; len]; 5];
    let mut finite = true;
    for i in 0..len {
        let (u1, u2) = (ph[0][i], ph[1][i]);
        let (u1x, u1y, u2x, u2y) = (ph[2][i], ph[3][i], ph[4][i], ph[5][i]);
        let tau_p = [ph[6][i], ph[7][i], ph[8][i]];
        let w = 0.5 * (u2x - u1y);
        let d = [u1x, 0.5 * (u1y + u2x), u2y];
        let q = q_pointwise(tau_p, w, d, b);
        out[0][i] = u1 * u1x + u2 * u1y;
        out[1][i] = u1 * u2x + u2 * u2y;
        for c in 0..3 {
            let adv = u1 * ph[9 + 2 * c][i] + u2 * ph[10 + 2 * c][i];
            out[2 + c][i] = adv + q[c];
        }
        finite &= out.iter().all(|o| o[i].is_finite());
    }
    if !finite {
        return Err(ModelError::NonFinite {
            stage: "nonlinear products",
            t,
        });
    }
    let refs: Vec<&[f64]> = out.iter().map(|c| c.as_slice()).collect();
    let mut sp = forward_components(g, &refs).into_iter();
    let mut adv_u = SpectralField::new(g.clone(), Rank::Vector, sp.by_ref().take(2).collect())?;
    let mut tau_terms = SpectralField::new(g.clone(), Rank::SymTensor, sp.collect())?;
    dealias_in_place(&mut adv_u);
    dealias_in_place(&mut tau_terms);
    Ok((adv_u, tau_terms))
}

/// All terms except the diagonal −(a + Λ^{2β})τ; this is what the
/// integrating-factor schemes treat explicitly.
pub fn explicit_rhs(state: &SimState, p: &ModelParams) -> Result<Tendency, ModelError> {
    state.check(p)?;
    let mut du = divergence_tensor(&state.tau)?;
    let mut dtau = deformation(&state.u)?;
    if p.dynamics == Dynamics::Nonlinear {
        let (adv_u, tau_terms) = nonlinear_terms(&state.u, &state.tau, p.b, state.t)?;
        du.axpy(-1.0, &adv_u)?;
        dtau.axpy(-1.0, &tau_terms)?;
    }
    leray_in_place(&mut du);
    dealias_in_place(&mut du);
    dealias_in_place(&mut dtau);
    let out = Tendency { du, dtau };
    if !out.is_finite() {
        return Err(ModelError::NonFinite {
            stage: "explicit right-hand side",
            t: state.t,
        });
    }
    Ok(out)
}

fn add_stiff(out: &mut Tendency, state: &SimState, p: &ModelParams) {
    let rates = p.decay_rates();
    for c in 0..3 {
        let tau = state.tau.comp(c);
        for ((z, x), r) in out.dtau.comp_mut(c).iter_mut().zip(tau).zip(&rates) {
            *z -= x * r;
        }
    }
    dealias_in_place(&mut out.dtau);
}

/// Full right-hand side of the model with the configured dynamics.
pub fn rhs(state: &SimState, p: &ModelParams) -> Result<Tendency, ModelError> {
    let mut out = explicit_rhs(state, p)?;
    add_stiff(&mut out, state, p);
    Ok(out)
}

/// Right-hand side of the linearized system: du = ℙ div τ,
/// dτ = −aτ − Λ^{2β}τ + D(u).
pub fn linearize_rhs(state: &SimState, p: &ModelParams) -> Result<Tendency, ModelError> {
    let lp = p.clone().with_dynamics(Dynamics::Linear);
    rhs(state, &lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, transform_forward, transform_inverse, PhysicalField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_state(g: &Grid, kmax: i64, seed: u64, scale: f64) -> SimState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = SpectralField::band_limited_from(g, Rank::Vector, kmax, || rng.gen_range(-scale..scale));
        let tau = SpectralField::band_limited_from(g, Rank::SymTensor, kmax, || rng.gen_range(-scale..scale));
        leray_in_place(&mut u);
        u.comp_mut(0)[0] = Complex64::default();
        u.comp_mut(1)[0] = Complex64::default();
        SimState::new(u, tau, 0.0).unwrap()
    }

    fn shear(g: &Grid) -> SpectralField {
        let p = PhysicalField::from_fn(g, Rank::Vector, |_, y| vec![y.sin(), 0.0]);
        transform_forward(&p).unwrap()
    }

    #[test]
    fn params_are_validated() {
        let g = make_grid(8, 1.0).unwrap();
        assert!(ModelParams::new(0.5, 0.75, 0.0, g.clone()).is_ok());
        assert_eq!(ModelParams::new(1.5, 0.75, 0.0, g.clone()), Err(ModelError::InvalidDamping(1.5)));
        assert_eq!(ModelParams::new(0.1, 1.0, 0.0, g.clone()), Err(ModelError::InvalidBeta(1.0)));
        assert_eq!(ModelParams::new(0.1, 0.6, -1.5, g), Err(ModelError::InvalidB(-1.5)));
    }

    #[test]
    fn shear_flow_deformation_and_vorticity() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let u = shear(&g);
        let d = transform_inverse(&deformation(&u).unwrap());
        let w = transform_inverse(&vorticity(&u).unwrap());
        let n = g.n();
        for i in 0..n {
            for j in 0..n {
                let y = g.coordinate(j);
                let k = i * n + j;
                assert!(d.comp(0)[k].abs() < 1e-14);
                assert!((d.comp(1)[k] - 0.5 * y.cos()).abs() < 1e-14);
                assert!(d.comp(2)[k].abs() < 1e-14);
                assert!((w.comp(0)[k] + 0.5 * y.cos()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_velocity_has_no_gradient() {
        let g = make_grid(8, 3.0).unwrap();
        let mut u = SpectralField::zeros(&g, Rank::Vector);
        u.comp_mut(0)[0] = Complex64::new(0.3, 0.0);
        u.comp_mut(1)[0] = Complex64::new(-1.1, 0.0);
        assert_eq!(deformation(&u).unwrap().max_abs(), 0.0);
        assert_eq!(vorticity(&u).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn deformation_is_trace_free_for_solenoidal_fields() {
        let g = make_grid(16, 7.0).unwrap();
        let s = random_state(&g, 5, 2, 1.0);
        let d = transform_inverse(&deformation(&s.u).unwrap());
        for i in 0..g.len() {
            assert!((d.comp(0)[i] + d.comp(2)[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn q_vanishes_for_zero_velocity_and_isotropic_stress() {
        let g = make_grid(16, 5.0).unwrap();
        let s = random_state(&g, 4, 8, 1.0);
        let zero_u = SpectralField::zeros(&g, Rank::Vector);
        assert_eq!(q_bilinear(&zero_u, &s.tau, 0.7).unwrap().max_abs(), 0.0);
        let mut iso = SpectralField::zeros(&g, Rank::SymTensor);
        iso.comp_mut(0)[0] = Complex64::new(2.0, 0.0);
        iso.comp_mut(2)[0] = Complex64::new(2.0, 0.0);
        assert!(q_bilinear(&s.u, &iso, 0.0).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn q_pointwise_matches_matrix_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut x = || rng.gen_range(-2.0..2.0);
            let (p, q, r, w, d11, d12, d22, b) = (x(), x(), x(), x(), x(), x(), x(), x() / 2.0);
            let tau = [[p, q], [q, r]];
            let om = [[0.0, w], [-w, 0.0]];
            let dm = [[d11, d12], [d12, d22]];
            let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
                let mut c = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            c[i][j] += a[i][k] * b[k][j];
                        }
                    }
                }
                c
            };
            let (t_o, o_t, d_t, t_d) = (mul(tau, om), mul(om, tau), mul(dm, tau), mul(tau, dm));
            let want = |i: usize, j: usize| t_o[i][j] - o_t[i][j] - b * (d_t[i][j] + t_d[i][j]);
            let got = q_pointwise([p, q, r], w, [d11, d12, d22], b);
            assert!((got[0] - want(0, 0)).abs() < 1e-13);
            assert!((got[1] - want(0, 1)).abs() < 1e-13);
            assert!((got[1] - want(1, 0)).abs() < 1e-13);
            assert!((got[2] - want(1, 1)).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_state_has_zero_rhs() {
        let g = make_grid(8, 2.0).unwrap();
        let p = ModelParams::new(0.3, 0.75, 0.2, g.clone()).unwrap();
        let r = rhs(&SimState::zeros(&g), &p).unwrap();
        assert_eq!(r.du.max_abs(), 0.0);
        assert_eq!(r.dtau.max_abs(), 0.0);
    }

    #[test]
    fn trace_mode_decouples() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let p = ModelParams::new(0.2, 0.75, 0.0, g.clone()).unwrap();
        let mut tau = SpectralField::zeros(&g, Rank::SymTensor);
        let (i, j) = (g.index_of(2, 1), g.index_of(-2, -1));
        for c in [0, 2] {
            tau.comp_mut(c)[i] = Complex64::new(0.4, 0.1);
            tau.comp_mut(c)[j] = Complex64::new(0.4, -0.1);
        }
        let s = SimState::new(SpectralField::zeros(&g, Rank::Vector), tau.clone(), 0.0).unwrap();
        let r = rhs(&s, &p).unwrap();
        assert!(r.du.max_abs() < 1e-15);
        let rate = 0.2 + 5f64.powf(0.75);
        let mut want = tau.clone();
        want.scale(-rate);
        assert!(r.dtau.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn coupling_cancels_in_energy() {
        let g = make_grid(16, 9.0).unwrap();
        for seed in 0..5 {
            let s = random_state(&g, 5, seed, 0.1);
            let div = leray_project_vec(&divergence_tensor(&s.tau).unwrap());
            let d = deformation(&s.u).unwrap();
            let lhs = s.u.inner(&div).unwrap() + d.inner(&s.tau).unwrap();
            let scale = s.u.l2_norm() * s.tau.l2_norm() * g.max_xi_norm();
            assert!(lhs.abs() < 1e-12 * scale);
        }
    }

    fn leray_project_vec(v: &SpectralField) -> SpectralField {
        crate::spectral::leray_project(v).unwrap()
    }

    #[test]
    fn linear_rhs_is_additive() {
        let g = make_grid(16, 4.0).unwrap();
        let p = ModelParams::new(0.1, 0.6, 0.0, g.clone()).unwrap();
        let a = random_state(&g, 5, 1, 1.0);
        let b = random_state(&g, 5, 2, 1.0);
        let sum = SimState::new(a.u.add(&b.u).unwrap(), a.tau.add(&b.tau).unwrap(), 0.0).unwrap();
        let (ra, rb, rs) = (
            linearize_rhs(&a, &p).unwrap(),
            linearize_rhs(&b, &p).unwrap(),
            linearize_rhs(&sum, &p).unwrap(),
        );
        let du = ra.du.add(&rb.du).unwrap();
        let dt = ra.dtau.add(&rb.dtau).unwrap();
        let scale = rs.du.max_abs().max(rs.dtau.max_abs());
        assert!(rs.du.max_abs_diff(&du) < 1e-12 * scale);
        assert!(rs.dtau.max_abs_diff(&dt) < 1e-12 * scale);
    }
}
