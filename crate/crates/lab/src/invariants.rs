//! Seeded property battery over small random instances.

use std::f64::consts::PI;

use oldroyd_core::integrator::{integrate, DtPolicy, Scheme, Stepper, StepperConfig};
use oldroyd_core::model::{divergence_defect, explicit_rhs, ModelParams, SimState};
use oldroyd_core::oracle::mode_propagator;
use oldroyd_core::spectral::{
    dyadic_decompose, leray_project, make_grid, shell_weights, transform_forward, transform_inverse, Grid, Rank,
    SpectralField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::initial::gen_initial_data;
use crate::scenario::{InitKind, InitSection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    /// Largest observed defect
    pub worst: f64,
    pub tolerance: f64,
}

impl InvariantCheck {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

fn random_grid(rng: &mut ChaCha8Rng) -> Grid {
    let n = [8, 16, 32][rng.gen_range(0..3)];
    make_grid(n, rng.gen_range(1.0..40.0)).expect("valid grid")
}

fn random_field(g: &Grid, rank: Rank, rng: &mut ChaCha8Rng) -> SpectralField {
    let kmax = (g.n() / 3) as i64;
    SpectralField::band_limited_from(g, rank, kmax, || rng.gen_range(-1.0..1.0))
}

fn random_state(g: &Grid, amp: f64, rng: &mut ChaCha8Rng) -> SimState {
    let u = leray_project(&random_field(g, Rank::Vector, rng)).expect("vector");
    let tau = random_field(g, Rank::SymTensor, rng);
    SimState::new(u.scaled(amp), tau.scaled(amp), 0.0).expect("consistent")
}

fn rank(rng: &mut ChaCha8Rng) -> Rank {
    [Rank::Scalar, Rank::Vector, Rank::SymTensor][rng.gen_range(0..3)]
}

fn run_check(
    name: &str,
    tolerance: f64,
    instances: usize,
    seed: u64,
    mut defect: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> InvariantCheck {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let d = defect(&mut rng);
        if !(d <= tolerance) {
            failures += 1;
        }
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
    }
    InvariantCheck {
        name: name.into(),
        instances,
        failures,
        worst,
        tolerance,
    }
}

fn rel(d: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Run every property on `instances` seeded random cases.
pub fn run_battery(instances: usize, seed: u64) -> Vec<InvariantCheck> {
    let mut out = Vec::new();
    out.push(run_check("round-trip", 1e-12, instances, seed, |rng| {
        let g = random_grid(rng);
        let f = random_field(&g, rank(rng), rng);
        let back = transform_forward(&transform_inverse(&f)).expect("same grid");
        rel(back.max_abs_diff(&f), f.max_abs())
    }));
    out.push(run_check("leray-idempotence", 1e-13, instances, seed, |rng| {
        let g = random_grid(rng);
        let p = leray_project(&random_field(&g, Rank::Vector, rng)).expect("vector");
        let pp = leray_project(&p).expect("vector");
        rel(pp.max_abs_diff(&p), p.max_abs()).max(rel(divergence_defect(&p), p.l2_norm()))
    }));
    out.push(run_check("divergence-free-preservation", 1e-10, instances, seed, |rng| {
        let g = random_grid(rng);
        let s = random_state(&g, 0.1, rng);
        let p = ModelParams::new(rng.gen_range(0.0..1.0), rng.gen_range(0.5..0.99), rng.gen_range(-1.0..1.0), g)
            .expect("valid parameters");
        let mut st = Stepper::new(&p, Scheme::IfRk4).expect("stepper");
        match st.step_with_drift(&s, 0.02) {
            Ok((next, drift)) => drift
                .divergence
                .max(drift.reality)
                .max(rel(next.divergence_defect(), next.u.l2_norm())),
            Err(_) => f64::INFINITY,
        }
    }));
    out.push(run_check("partition-of-unity", 1e-12, instances, seed, |rng| {
        let g = random_grid(rng);
        let mut worst: f64 = 0.0;
        for idx in 1..g.len() {
            if g.is_nyquist(idx) {
                continue;
            }
            let w = shell_weights(g.xi_norm(idx));
            worst = worst.max((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs());
        }
        let f = random_field(&g, Rank::Scalar, rng);
        let shells = dyadic_decompose(&f);
        for j in shells.indices() {
            for k in shells.indices().filter(|&k| k >= j + 2) {
                let (a, b) = (shells.shell(j).expect("shell"), shells.shell(k).expect("shell"));
                if a.comp(0).iter().zip(b.comp(0)).any(|(x, y)| x.norm() > 0.0 && y.norm() > 0.0) {
                    worst = f64::INFINITY;
                }
            }
        }
        worst
    }));
    out.push(run_check("semigroup", 1e-12, instances, seed, |rng| {
        let xi = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        let (a, beta) = (rng.gen_range(0.0..1.0), rng.gen_range(0.5..0.99));
        let (t1, t2) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let mut y0 = [Complex64::default(); 4];
        for z in &mut y0 {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let direct = mode_propagator(xi, a, beta, t1 + t2, y0);
        let split = mode_propagator(xi, a, beta, t2, mode_propagator(xi, a, beta, t1, y0));
        let scale = y0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        rel((0..4).map(|i| (direct[i] - split[i]).norm()).fold(0.0, f64::max), scale)
    }));
    out.push(run_check("parseval", 1e-12, instances, seed, |rng| {
        let g = random_grid(rng);
        let f = random_field(&g, rank(rng), rng);
        let phys = transform_inverse(&f);
        let w: &[f64] = if f.rank() == Rank::SymTensor { &[1.0, 2.0, 1.0] } else { &[1.0, 1.0] };
        let quad: f64 = phys
            .comps()
            .iter()
            .zip(w)
            .map(|(v, w)| w * v.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            * g.dx()
            * g.dx();
        let spec = f.l2_norm_sq();
        rel((quad - spec).abs(), spec)
    }));
    out.push(run_check("transport-energy-neutrality", 1e-10, instances, seed, |rng| {
        // b = 0: transport is skew, Q is a commutator, coupling cancels
        let g = random_grid(rng);
        let s = random_state(&g, 1.0, rng);
        let p = ModelParams::new(0.0, 0.75, 0.0, g).expect("valid parameters");
        match explicit_rhs(&s, &p) {
            Ok(r) => rel(r.pair_with(&s).abs(), s.l2_norm_sq() * s.u.max_abs() * 2.0 * PI / s.grid().dx()),
            Err(_) => f64::INFINITY,
        }
    }));
    out.push(run_check("determinism", 0.0, instances, seed, |rng| {
        let g = make_grid(8, rng.gen_range(4.0..20.0)).expect("valid grid");
        let seed = rng.gen();
        let spec = InitSection::default();
        let data = || gen_initial_data(InitKind::RandomBesov, 0.05, seed, &g, &spec).expect("valid data");
        let (a, b) = (data(), data());
        let p = ModelParams::new(0.1, 0.7, 0.5, g.clone()).expect("valid parameters");
        let cfg = StepperConfig {
            scheme: Scheme::IfRk4,
            dt_policy: DtPolicy::Cfl {
                safety: 0.5,
                dt_max: 0.2,
            },
            t_end: 0.6,
            sample_times: vec![],
        };
        match (integrate(a, &p, &cfg), integrate(b, &p, &cfg)) {
            (Ok(x), Ok(y)) if x == y => 0.0,
            _ => 1.0,
        }
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_on_a_few_seeds() {
        for c in run_battery(5, 42) {
            assert!(c.pass(), "{c:?}");
        }
    }
}
