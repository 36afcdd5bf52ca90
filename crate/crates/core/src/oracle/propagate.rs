//! Exact linear evolution of a whole grid state.

use std::collections::HashMap;

use rustfft::num_complex::Complex64;

use super::expm::{expm, CMat};
use crate::model::SimState;

/// Propagator of (û_⊥, τ̂_nt) with n = ξ/|ξ|, where
/// û_⊥' = i r τ̂_nt and τ̂_nt' = −λτ̂_nt + (i/2) r û_⊥.
fn rotated_propagator(r: f64, a: f64, beta: f64, t: f64) -> CMat<2> {
    let lam = r.powf(2.0 * beta) + a;
    let i = Complex64::i();
    let m = [
        [Complex64::default(), i * (r * t)],
        [i * (0.5 * r * t), Complex64::new(-lam * t, 0.0)],
    ];
    expm(&m)
}

/// Apply the exact linear flow (damping a, order β) for time t to every
/// mode of `state`. The compressive part n·û, if any, is left unchanged,
/// as the linear flow never touches it.
pub fn linear_field_propagate(state: &SimState, a: f64, beta: f64, t: f64) -> SimState {
    let mut out = state.clone();
    out.t = state.t + t;
    if t == 0.0 {
        return out;
    }
    let g = state.grid().clone();
    let mut cache: HashMap<i64, (CMat<2>, f64)> = HashMap::new();
    let damp0 = (-a * t).exp();
    for idx in 0..g.len() {
        let u = [state.u.comp(0)[idx], state.u.comp(1)[idx]];
        let tau = [state.tau.comp(0)[idx], state.tau.comp(1)[idx], state.tau.comp(2)[idx]];
        if u.iter().chain(&tau).all(|z| z.re == 0.0 && z.im == 0.0) {
            continue;
        }
        if idx == 0 {
            for c in 0..3 {
                out.tau.comp_mut(c)[0] = tau[c] * damp0;
            }
            continue;
        }
        let [k1, k2] = g.k_of(idx);
        let r = g.xi_norm(idx);
        let (p, diag) = *cache.entry(k1 * k1 + k2 * k2).or_insert_with(|| {
            (
                rotated_propagator(r, a, beta, t),
                (-(r.powf(2.0 * beta) + a) * t).exp(),
            )
        });
        let [x1, x2] = g.xi_of(idx);
        let n = [x1 / r, x2 / r];
        let e = [-n[1], n[0]];
        let u_perp = u[0] * e[0] + u[1] * e[1];
        let u_par = u[0] * n[0] + u[1] * n[1];
        let quad = |v: [f64; 2], w: [f64; 2]| {
            tau[0] * (v[0] * w[0]) + tau[1] * (v[0] * w[1] + v[1] * w[0]) + tau[2] * (v[1] * w[1])
        };
        let (tnn, tnt, ttt) = (quad(n, n), quad(n, e), quad(e, e));
        let up = p[0][0] * u_perp + p[0][1] * tnt;
        let tnt2 = p[1][0] * u_perp + p[1][1] * tnt;
        let (tnn2, ttt2) = (tnn * diag, ttt * diag);
        out.u.comp_mut(0)[idx] = e[0] * up + n[0] * u_par;
        out.u.comp_mut(1)[idx] = e[1] * up + n[1] * u_par;
        // τ = τ_nn nnᵀ + τ_nt (neᵀ + enᵀ) + τ_tt eeᵀ
        out.tau.comp_mut(0)[idx] = tnn2 * (n[0] * n[0]) + tnt2 * (2.0 * n[0] * e[0]) + ttt2 * (e[0] * e[0]);
        out.tau.comp_mut(1)[idx] =
            tnn2 * (n[0] * n[1]) + tnt2 * (n[0] * e[1] + e[0] * n[1]) + ttt2 * (e[0] * e[1]);
        out.tau.comp_mut(2)[idx] = tnn2 * (n[1] * n[1]) + tnt2 * (2.0 * n[1] * e[1]) + ttt2 * (e[1] * e[1]);
    }
    out
}
