//! Initial data. Coefficients are scaled so that L²·f̂_k approximates the
//! whole-plane transform at ξ_k, which keeps ε independent of the box.

use log::warn;
use oldroyd_core::functionals::{besov_of, inhom, ModalEnergies};
use oldroyd_core::model::SimState;
use oldroyd_core::oracle::Profile;
use oldroyd_core::spectral::{apply_radial, leray_project, Grid, Rank, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scenario::{InitKind, InitSection};
use crate::LabError;

/// Stress direction of the compact data (τxx, τxy, τyy).
const TAU_SHAPE: [f64; 3] = [1.0, 0.5, 1.0];
/// Velocity direction before projection.
const U_SHAPE: [f64; 2] = [1.0, -1.0];

fn profile(spec: &InitSection) -> Profile {
    Profile::plateau(spec.plateau, spec.support)
}

/// Scalar field with coefficient ε·ψ̂(|ξ|)/L², mean optionally kept.
fn compact_scalar(grid: &Grid, spec: &InitSection, eps: f64, keep_mean: bool) -> SpectralField {
    let p = profile(spec);
    let c = eps / grid.length().powi(2);
    let mut f = SpectralField::zeros(grid, Rank::Scalar);
    for (idx, z) in f.comp_mut(0).iter_mut().enumerate() {
        if grid.is_nyquist(idx) || (idx == 0 && !keep_mean) {
            continue;
        }
        *z = Complex64::new(c * p.density(grid.xi_norm(idx)), 0.0);
    }
    f
}

fn with_shape(grid: &Grid, base: &SpectralField, rank: Rank, shape: &[f64]) -> SpectralField {
    let comps = shape
        .iter()
        .map(|&w| base.comp(0).iter().map(|z| z * w).collect())
        .collect();
    SpectralField::new(grid.clone(), rank, comps).expect("shapes agree")
}

fn random_field(grid: &Grid, rank: Rank, spec: &InitSection, rng: &mut ChaCha8Rng) -> Result<SpectralField, LabError> {
    let kmax = (spec.support / grid.kappa()).ceil() as i64 + 1;
    let raw = SpectralField::band_limited_from(grid, rank, kmax, || rng.gen_range(-1.0..1.0));
    let p = profile(spec);
    Ok(apply_radial(&raw, |r| p.density(r), 0.0)?)
}

/// Generate (u₀, τ₀). ε = 0 gives the zero state.
pub fn gen_initial_data(kind: InitKind, eps: f64, seed: u64, grid: &Grid, spec: &InitSection) -> Result<SimState, LabError> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(LabError::Scenario(format!("epsilon = {eps}")));
    }
    let state = match kind {
        InitKind::CompactFourier | InitKind::MeanNonzero => {
            let keep_mean = kind == InitKind::MeanNonzero;
            let base = compact_scalar(grid, spec, eps, keep_mean);
            let mut u_base = base.clone();
            u_base.comp_mut(0)[0] = Complex64::default();
            let u = leray_project(&with_shape(grid, &u_base, Rank::Vector, &U_SHAPE))?;
            let tau = with_shape(grid, &base, Rank::SymTensor, &TAU_SHAPE);
            SimState::new(u, tau, 0.0)?
        }
        InitKind::RandomBesov => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = leray_project(&random_field(grid, Rank::Vector, spec, &mut rng)?)?;
            let tau = random_field(grid, Rank::SymTensor, spec, &mut rng)?;
            let b = besov_of(&[&u, &tau], -1.0)?;
            let scale = if b > 0.0 { eps / b } else { 0.0 };
            SimState::new(u.scaled(scale), tau.scaled(scale), 0.0)?
        }
    };
    let mut state = state;
    state.dealias();
    Ok(state)
}

/// Whole-plane transform value L²·f̂ of one component at grid index `idx`.
pub fn continuum_value(f: &SpectralField, comp: usize, idx: usize) -> Complex64 {
    f.comp(comp)[idx] * f.grid().length().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    /// ‖(u₀,τ₀)‖_{H^s}
    pub norm: f64,
    pub threshold: f64,
    pub exceeded: bool,
}

/// Heuristic smallness check ‖(u₀,τ₀)‖_{H^s} ≤ δ·L. Never fails, only warns.
pub fn smallness_gate(state: &SimState, s: f64, delta: f64) -> Gate {
    let norm = ModalEnergies::new(state).pair_sum(|r| inhom(r, s)).sqrt();
    let threshold = delta * state.grid().length();
    let exceeded = norm > threshold;
    if exceeded {
        warn!(
            "initial data above the smallness gate: ‖(u₀,τ₀)‖_H^{s:.3} = {norm:.4e} > {threshold:.4e}; \
             results outside the small-data regime"
        );
    }
    Gate {
        norm,
        threshold,
        exceeded,
    }
}

/// Initial data for a scenario with its gate status.
pub fn scenario_initial(sc: &crate::scenario::Scenario) -> Result<(SimState, Gate), LabError> {
    let g = sc.grid()?;
    let st = gen_initial_data(sc.init.kind, sc.init.epsilon, sc.init.seed, &g, &sc.init)?;
    let gate = smallness_gate(&st, sc.functional_config().s, sc.init.gate_delta);
    Ok((st, gate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use oldroyd_core::spectral::make_grid;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        make_grid(64, 16.0 * PI).unwrap()
    }

    #[test]
    fn zero_amplitude_gives_zero_state() {
        let g = grid();
        for kind in [InitKind::CompactFourier, InitKind::RandomBesov, InitKind::MeanNonzero] {
            let s = gen_initial_data(kind, 0.0, 3, &g, &InitSection::default()).unwrap();
            assert_eq!(s, SimState::zeros(&g));
        }
    }

    #[test]
    fn compact_data_sits_on_plateau() {
        let g = grid();
        let s = gen_initial_data(InitKind::CompactFourier, 0.3, 0, &g, &InitSection::default()).unwrap();
        // |ξ| = 0.5 is k = (4, 0) at L = 16π
        let idx = g.index_of(4, 0);
        assert!((g.xi_norm(idx) - 0.5).abs() < 1e-15);
        assert_eq!(continuum_value(&s.tau, 0, idx).re, 0.3);
        assert_eq!(continuum_value(&s.tau, 2, idx).re, 0.3);
        assert_eq!(s.tau.mean(), vec![Complex64::default(); 3]);
        assert!(s.divergence_defect() < 1e-15);
        assert_eq!(s.u.reality_defect(), 0.0);
        let far = g.index_of(13, 0);
        assert_eq!(s.tau.comp(0)[far], Complex64::default());
    }

    #[test]
    fn mean_nonzero_keeps_the_mean() {
        let g = grid();
        let s = gen_initial_data(InitKind::MeanNonzero, 0.3, 0, &g, &InitSection::default()).unwrap();
        assert!((continuum_value(&s.tau, 1, 0).re - 0.15).abs() < 1e-15);
        assert_eq!(s.u.comp(0)[0], Complex64::default());
    }

    #[test]
    fn random_besov_norm_is_prescribed_and_seeded() {
        let g = grid();
        let spec = InitSection::default();
        let a = gen_initial_data(InitKind::RandomBesov, 0.2, 11, &g, &spec).unwrap();
        let b = gen_initial_data(InitKind::RandomBesov, 0.2, 11, &g, &spec).unwrap();
        let c = gen_initial_data(InitKind::RandomBesov, 0.2, 12, &g, &spec).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let n = besov_of(&[&a.u, &a.tau], -1.0).unwrap();
        assert!((n - 0.2).abs() < 1e-12);
        assert!(a.divergence_defect() < 1e-13 * a.u.max_abs());
    }

    #[test]
    fn gate_flags_large_data() {
        let g = grid();
        let spec = InitSection::default();
        // RMS amplitude ‖·‖/L well below δ
        let s = gen_initial_data(InitKind::CompactFourier, 0.1, 0, &g, &spec).unwrap();
        let gate = smallness_gate(&s, 1.85, 1e-2);
        assert!(!gate.exceeded, "{gate:?}");
        let big = gen_initial_data(InitKind::CompactFourier, 500.0, 0, &g, &spec).unwrap();
        assert!(smallness_gate(&big, 1.85, 1e-2).exceeded);
    }
}
