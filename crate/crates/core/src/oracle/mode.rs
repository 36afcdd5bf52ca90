//! Single-mode linear dynamics on (û_⊥, τ̂_xx, τ̂_xy, τ̂_yy), with
//! û = û_⊥ e and e = (−ξ₂, ξ₁)/|ξ|.

use rustfft::num_complex::Complex64;

use super::expm::{expm, matvec, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSystem {
    pub xi: [f64; 2],
    pub a: f64,
    pub beta: f64,
    pub generator: CMat<4>,
}

/// Unit vector e = ξ^⊥/|ξ| carrying the divergence-free velocity.
pub fn perp_unit(xi: [f64; 2]) -> [f64; 2] {
    let r = xi[0].hypot(xi[1]);
    [-xi[1] / r, xi[0] / r]
}

impl ModeSystem {
    pub fn new(xi: [f64; 2], a: f64, beta: f64) -> Self {
        let r = xi[0].hypot(xi[1]);
        let zero = Complex64::default();
        let i = Complex64::i();
        let mut g = [[zero; 4]; 4];
        let lam = if r == 0.0 { a } else { r.powf(2.0 * beta) + a };
        for k in 1..4 {
            g[k][k] = Complex64::new(-lam, 0.0);
        }
        if r > 0.0 {
            let [x1, x2] = xi;
            let [e1, e2] = perp_unit(xi);
            // û_⊥' = e·(i τ̂ ξ)
            g[0][1] = i * e1 * x1;
            g[0][2] = i * (e1 * x2 + e2 * x1);
            g[0][3] = i * e2 * x2;
            // τ̂' ⊃ D(û): (i/2)(ξ_k e_j + ξ_j e_k) û_⊥
            g[1][0] = i * x1 * e1;
            g[2][0] = i * 0.5 * (x2 * e1 + x1 * e2);
            g[3][0] = i * x2 * e2;
        }
        ModeSystem {
            xi,
            a,
            beta,
            generator: g,
        }
    }

    pub fn apply(&self, y: &[Complex64; 4]) -> [Complex64; 4] {
        matvec(&self.generator, y)
    }

    pub fn propagator(&self, t: f64) -> CMat<4> {
        let mut m = self.generator;
        for row in &mut m {
            for z in row.iter_mut() {
                *z *= t;
            }
        }
        expm(&m)
    }
}

/// exp(t·G)·y₀ for the mode ξ.
pub fn mode_propagator(
    xi: [f64; 2],
    a: f64,
    beta: f64,
    t: f64,
    initial: [Complex64; 4],
) -> [Complex64; 4] {
    if t == 0.0 {
        return initial;
    }
    matvec(&ModeSystem::new(xi, a, beta).propagator(t), &initial)
}

/// Squared mode energy |û_⊥|² + |τ̂|²_F.
pub fn mode_energy(y: &[Complex64; 4]) -> f64 {
    y[0].norm_sqr() + y[1].norm_sqr() + 2.0 * y[2].norm_sqr() + y[3].norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dormand–Prince 5(4) with step control, used as an independent check.
    fn dopri(sys: &ModeSystem, y0: [Complex64; 4], t_end: f64, tol: f64) -> [Complex64; 4] {
        const A: [[f64; 6]; 7] = [
            [0.0; 6],
            [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
        const B4: [f64; 7] = [
            5179.0 / 57600.0,
            0.0,
            7571.0 / 16695.0,
            393.0 / 640.0,
            -92097.0 / 339200.0,
            187.0 / 2100.0,
            1.0 / 40.0,
        ];
        let mut y = y0;
        let mut t = 0.0;
        let mut h: f64 = 1e-3;
        while t < t_end {
            h = h.min(t_end - t);
            let mut k = [[Complex64::default(); 4]; 7];
            for s in 0..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    for c in 0..4 {
                        ys[c] += kj[c] * (h * A[s][j]);
                    }
                }
                k[s] = sys.apply(&ys);
            }
            let mut y5 = y;
            let mut err: f64 = 0.0;
            for c in 0..4 {
                let mut e = Complex64::default();
                for s in 0..7 {
                    y5[c] += k[s][c] * (h * B5[s]);
                    e += k[s][c] * (h * (B5[s] - B4[s]));
                }
                err = err.max(e.norm() / (1.0 + y[c].norm()));
            }
            if err <= tol {
                t += h;
                y = y5;
            }
            h *= (0.9 * (tol / err.max(1e-300)).powf(0.2)).clamp(0.2, 5.0);
        }
        y
    }

    fn random4(rng: &mut ChaCha8Rng) -> [Complex64; 4] {
        let mut y = [Complex64::default(); 4];
        for z in &mut y {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        y
    }

    fn rel_diff(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        (d / mode_energy(b).max(1e-300)).sqrt()
    }

    #[test]
    fn zero_time_is_identity() {
        let y = [Complex64::new(0.3, 0.1); 4];
        assert_eq!(mode_propagator([1.0, 2.0], 0.1, 0.7, 0.0, y), y);
    }

    #[test]
    fn trace_data_decays_without_velocity() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        let (xi, a, beta, t) = ([0.7, -1.1], 0.25, 0.8, 3.0);
        let y = mode_propagator(xi, a, beta, t, [zero, one, zero, one]);
        let r: f64 = 0.7f64.hypot(1.1);
        let f = (-(r.powf(1.6) + a) * t).exp();
        assert!(y[0].norm() < 1e-15);
        assert!((y[1] - f).norm() < 1e-14 && (y[3] - f).norm() < 1e-14 && y[2].norm() < 1e-15);
    }

    #[test]
    fn zero_mode_freezes_velocity() {
        let y0 = [Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(-1.0, 0.0)];
        let y = mode_propagator([0.0, 0.0], 0.3, 0.75, 2.0, y0);
        assert_eq!(y[0], y0[0]);
        let f = (-0.6f64).exp();
        for c in 1..4 {
            assert!((y[c] - y0[c] * f).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_adaptive_ode_integration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let sys = ModeSystem::new([1.3, -0.4], 0.2, 0.6);
        for _ in 0..5 {
            let y0 = random4(&mut rng);
            let exact = mode_propagator([1.3, -0.4], 0.2, 0.6, 2.5, y0);
            let ode = dopri(&sys, y0, 2.5, 1e-14);
            assert!(rel_diff(&exact, &ode) < 1e-10, "{}", rel_diff(&exact, &ode));
        }
    }

    #[test]
    fn energy_rate_matches_dissipation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (xi, beta): ([f64; 2], f64) = ([0.9, 0.35], 0.7);
        let r: f64 = xi[0].hypot(xi[1]);
        let y0 = random4(&mut rng);
        let (t, h) = (1.3, 1e-4);
        let e = |s: f64| mode_energy(&mode_propagator(xi, 0.0, beta, s, y0));
        let de = (e(t + h) - e(t - h)) / (2.0 * h);
        let y = mode_propagator(xi, 0.0, beta, t, y0);
        let tau2 = y[1].norm_sqr() + 2.0 * y[2].norm_sqr() + y[3].norm_sqr();
        let want = -2.0 * r.powf(2.0 * beta) * tau2;
        assert!((de - want).abs() < 1e-7 * want.abs());
    }
}
