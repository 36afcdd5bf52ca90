//! Integrating-factor Runge–Kutta time stepping. The diagonal stiff part
//! −(|ξ|^{2β} + a)τ̂ is integrated exactly; everything else explicitly
//! (Lawson form).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{divergence_defect, explicit_rhs, ModelError, ModelParams, SimState, Tendency};
use crate::spectral::{transform_inverse, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "if-rk2")]
    IfRk2,
    #[serde(rename = "if-rk4")]
    IfRk4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::IfRk2 => 2,
            Scheme::IfRk4 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DtPolicy {
    Fixed { dt: f64 },
    Cfl { safety: f64, dt_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt_policy: DtPolicy,
    pub t_end: f64,
    /// Output times; empty means start and end only.
    #[serde(default)]
    pub sample_times: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
    #[error("step failed at t = {}: {source}", last_good.t)]
    Blowup {
        last_good: Box<SimState>,
        source: ModelError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Constraint drift measured before re-projection.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDrift {
    /// max |ξ·û| relative to max |û|
    pub divergence: f64,
    /// max |f̂(ξ) − conj f̂(−ξ)| relative to the field's max
    pub reality: f64,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<(), IntegratorError> {
        let bad = |m: String| Err(IntegratorError::InvalidConfig(m));
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end = {}", self.t_end));
        }
        match self.dt_policy {
            DtPolicy::Fixed { dt } if !(dt.is_finite() && dt > 0.0) => {
                return bad(format!("dt = {dt}"));
            }
            DtPolicy::Cfl { safety, dt_max } => {
                if !(safety > 0.0 && safety <= 1.0) {
                    return bad(format!("CFL safety = {safety}"));
                }
                if !(dt_max.is_finite() && dt_max > 0.0) {
                    return bad(format!("dt_max = {dt_max}"));
                }
            }
            _ => {}
        }
        let mut prev = f64::NEG_INFINITY;
        for &s in &self.sample_times {
            if !(0.0..=self.t_end).contains(&s) || s < prev {
                return bad(format!("sample time {s} not monotone within [0, t_end]"));
            }
            prev = s;
        }
        Ok(())
    }

    /// Sample times relative to the initial time, deduplicated.
    fn targets(&self) -> Vec<f64> {
        let mut t: Vec<f64> = if self.sample_times.is_empty() {
            vec![0.0, self.t_end]
        } else {
            self.sample_times.clone()
        };
        t.dedup();
        t
    }
}

/// CFL step safety·Δx / max(1, max|u|), capped by dt_max.
pub fn cfl_dt(state: &SimState, safety: f64, dt_max: f64) -> f64 {
    let umax = max_speed(&state.u);
    (safety * state.grid().dx() / umax.max(1.0)).min(dt_max)
}

/// Pointwise max of |u| on the grid.
pub fn max_speed(u: &SpectralField) -> f64 {
    let p = transform_inverse(u);
    p.comp(0)
        .iter()
        .zip(p.comp(1))
        .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
}

/// Reusable stepper holding the stiff decay rates and factor tables.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: ModelParams,
    scheme: Scheme,
    rates: Vec<f64>,
    cached_h: f64,
    e_full: Vec<f64>,
    e_half: Vec<f64>,
}

fn tendency_axpy(y: &mut Tendency, alpha: f64, x: &Tendency) {
    y.du.axpy(alpha, &x.du).expect("same shape");
    y.dtau.axpy(alpha, &x.dtau).expect("same shape");
}

fn apply_factor(y: &mut Tendency, table: &[f64]) {
    for c in y.dtau.comps_mut() {
        for (z, e) in c.iter_mut().zip(table) {
            *z *= *e;
        }
    }
}

impl Stepper {
    pub fn new(params: &ModelParams, scheme: Scheme) -> Result<Self, ModelError> {
        params.validate()?;
        Ok(Stepper {
            rates: params.decay_rates(),
            params: params.clone(),
            scheme,
            cached_h: f64::NAN,
            e_full: Vec::new(),
            e_half: Vec::new(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn factors(&mut self, h: f64) {
        if self.cached_h == h {
            return;
        }
        self.e_full = self.rates.iter().map(|r| (-r * h).exp()).collect();
        self.e_half = self.rates.iter().map(|r| (-r * 0.5 * h).exp()).collect();
        self.cached_h = h;
    }

    fn eval(&self, y: Tendency, t: f64) -> Result<(Tendency, Tendency), ModelError> {
        let s = SimState {
            u: y.du,
            tau: y.dtau,
            t,
        };
        let k = explicit_rhs(&s, &self.params)?;
        Ok((
            Tendency {
                du: s.u,
                dtau: s.tau,
            },
            k,
        ))
    }

    fn raw_step(&mut self, state: &SimState, h: f64) -> Result<Tendency, ModelError> {
        self.factors(h);
        let t = state.t;
        let y0 = Tendency {
            du: state.u.clone(),
            dtau: state.tau.clone(),
        };
        let (y0, k1) = self.eval(y0, t)?;
        match self.scheme {
            Scheme::IfRk2 => {
                // y* = E_h(y + h k1); y⁺ = E_h(y + h/2 k1) + h/2 N(y*)
                let mut ys = y0.clone();
                tendency_axpy(&mut ys, h, &k1);
                apply_factor(&mut ys, &self.e_full);
                let (_, k2) = self.eval(ys, t + h)?;
                let mut out = y0;
                tendency_axpy(&mut out, 0.5 * h, &k1);
                apply_factor(&mut out, &self.e_full);
                tendency_axpy(&mut out, 0.5 * h, &k2);
                Ok(out)
            }
            Scheme::IfRk4 => {
                let mut ey_half = y0.clone();
                apply_factor(&mut ey_half, &self.e_half);

                let mut y2 = y0.clone();
                tendency_axpy(&mut y2, 0.5 * h, &k1);
                apply_factor(&mut y2, &self.e_half);
                let (_, k2) = self.eval(y2, t + 0.5 * h)?;

                let mut y3 = ey_half.clone();
                tendency_axpy(&mut y3, 0.5 * h, &k2);
                let (_, k3) = self.eval(y3, t + 0.5 * h)?;

                let mut ek3 = k3.clone();
                apply_factor(&mut ek3, &self.e_half);
                let mut y4 = y0.clone();
                apply_factor(&mut y4, &self.e_full);
                tendency_axpy(&mut y4, h, &ek3);
                let (_, k4) = self.eval(y4, t + h)?;

                // y⁺ = E_h y + h/6 (E_h k1 + 2 E_{h/2}(k2 + k3) + k4)
                let mut mid = k2;
                tendency_axpy(&mut mid, 1.0, &k3);
                apply_factor(&mut mid, &self.e_half);
                let mut acc = k1;
                apply_factor(&mut acc, &self.e_full);
                tendency_axpy(&mut acc, 2.0, &mid);
                tendency_axpy(&mut acc, 1.0, &k4);
                let mut out = y0;
                apply_factor(&mut out, &self.e_full);
                tendency_axpy(&mut out, h / 6.0, &acc);
                Ok(out)
            }
        }
    }

    /// Advance by `h`, reporting constraint drift before re-projection.
    pub fn step_with_drift(
        &mut self,
        state: &SimState,
        h: f64,
    ) -> Result<(SimState, StepDrift), IntegratorError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(IntegratorError::InvalidConfig(format!("dt = {h}")));
        }
        let y = self.raw_step(state, h).map_err(|source| IntegratorError::Blowup {
            last_good: Box::new(state.clone()),
            source,
        })?;
        let mut next = SimState {
            u: y.du,
            tau: y.dtau,
            t: state.t + h,
        };
        if !next.is_finite() {
            return Err(IntegratorError::Blowup {
                last_good: Box::new(state.clone()),
                source: ModelError::NonFinite {
                    stage: "step update",
                    t: next.t,
                },
            });
        }
        let rel = |d: f64, m: f64| if m > 0.0 { d / m } else { d };
        let drift = StepDrift {
            divergence: rel(divergence_defect(&next.u), next.u.max_abs()),
            reality: rel(next.u.reality_defect(), next.u.max_abs())
                .max(rel(next.tau.reality_defect(), next.tau.max_abs())),
        };
        next.enforce_constraints();
        Ok((next, drift))
    }

    pub fn step(&mut self, state: &SimState, h: f64) -> Result<SimState, IntegratorError> {
        self.step_with_drift(state, h).map(|(s, _)| s)
    }
}

/// One IF-RK4 step of size `dt`.
pub fn step(state: &SimState, p: &ModelParams, dt: f64) -> Result<SimState, IntegratorError> {
    Stepper::new(p, Scheme::IfRk4)?.step(state, dt)
}

fn policy_dt(policy: DtPolicy, states: &[SimState]) -> f64 {
    match policy {
        DtPolicy::Fixed { dt } => dt,
        DtPolicy::Cfl { safety, dt_max } => states
            .iter()
            .map(|s| cfl_dt(s, safety, dt_max))
            .fold(dt_max, f64::min),
    }
}

/// Advance several members with identical step sizes, calling `observer`
/// with all members at each sample time. Members may carry different
/// parameters but must share a grid. Returns the final states.
pub fn integrate_lockstep(
    mut states: Vec<SimState>,
    params: &[ModelParams],
    cfg: &StepperConfig,
    mut observer: impl FnMut(&[SimState]),
) -> Result<Vec<SimState>, IntegratorError> {
    cfg.validate()?;
    if states.len() != params.len() {
        return Err(IntegratorError::InvalidConfig(format!(
            "{} states for {} parameter sets",
            states.len(),
            params.len()
        )));
    }
    let mut steppers = params
        .iter()
        .map(|p| Stepper::new(p, cfg.scheme))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(t0) = states.first().map(|s| s.t) else {
        return Ok(states);
    };
    for target in cfg.targets() {
        let abs_target = t0 + target;
        loop {
            let remaining = abs_target - states[0].t;
            if remaining <= 1e-12 * abs_target.abs().max(1.0) {
                break;
            }
            let mut h = policy_dt(cfg.dt_policy, &states);
            // shrink the last step to land on the sample; avoid a sliver step
            if h >= remaining * (1.0 - 1e-9) {
                h = remaining;
            }
            for (s, st) in states.iter_mut().zip(steppers.iter_mut()) {
                *s = st.step(s, h)?;
            }
            if h == remaining {
                for s in states.iter_mut() {
                    s.t = abs_target;
                }
            }
        }
        observer(&states);
    }
    Ok(states)
}

/// Integrate one trajectory, calling `observer` at every sample.
pub fn integrate_with(
    state: SimState,
    p: &ModelParams,
    cfg: &StepperConfig,
    mut observer: impl FnMut(&SimState),
) -> Result<SimState, IntegratorError> {
    let mut out = integrate_lockstep(vec![state], std::slice::from_ref(p), cfg, |s| observer(&s[0]))?;
    Ok(out.pop().expect("one member"))
}

/// Integrate and return the snapshots at the sample times.
pub fn integrate(
    state: SimState,
    p: &ModelParams,
    cfg: &StepperConfig,
) -> Result<Vec<SimState>, IntegratorError> {
    let mut snaps = Vec::new();
    integrate_with(state, p, cfg, |s| snaps.push(s.clone()))?;
    Ok(snaps)
}
