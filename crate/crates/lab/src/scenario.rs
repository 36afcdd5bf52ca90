//! Scenario files: one TOML document with flat tables.
//!
//! ```toml
//! name = "decay"
//! [model]
//! a = 0.0
//! beta = 0.75
//! b = 0.0
//! n = 128
//! length = 100.53        # box side L
//! dynamics = "nonlinear" # or "linear"
//! [init]
//! kind = "compact-fourier" # or "random-besov", "mean-nonzero"
//! epsilon = 0.5
//! seed = 7
//! [stepper]
//! scheme = "if-rk4"
//! cfl_safety = 0.9       # ignored when dt is set
//! t_end = 50.0
//! samples = 60
//! spacing = "log"        # or "linear"
//! ```
//!
//! Every key has a default; see the field docs below.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use oldroyd_core::functionals::FunctionalConfig;
use oldroyd_core::integrator::{DtPolicy, Scheme, StepperConfig};
use oldroyd_core::model::{Dynamics, ModelParams};
use oldroyd_core::spectral::{make_grid, Grid};
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub a: f64,
    pub beta: f64,
    pub b: f64,
    /// Grid points per side (even)
    pub n: usize,
    /// Box side L
    pub length: f64,
    pub dynamics: Dynamics,
    /// Linear runs use the exact propagator instead of time stepping.
    pub exact_linear: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            a: 0.0,
            beta: 0.75,
            b: 0.0,
            n: 128,
            length: 32.0 * PI,
            dynamics: Dynamics::Nonlinear,
            exact_linear: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    CompactFourier,
    RandomBesov,
    MeanNonzero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSection {
    pub kind: InitKind,
    /// Amplitude of the continuum transform on the plateau (compact kinds),
    /// or the prescribed Ḃ^{-1}_{2,∞} norm (random-besov)
    pub epsilon: f64,
    pub seed: u64,
    /// Profile equals 1 for |ξ| ≤ plateau
    pub plateau: f64,
    /// Profile vanishes for |ξ| ≥ support
    pub support: f64,
    /// Smallness gate: warn when ‖(u₀,τ₀)‖_{H^s} > gate_delta·L
    pub gate_delta: f64,
}

impl Default for InitSection {
    fn default() -> Self {
        InitSection {
            kind: InitKind::CompactFourier,
            epsilon: 0.5,
            seed: 0,
            plateau: 1.0,
            support: 1.5,
            gate_delta: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSection {
    pub scheme: Scheme,
    /// Fixed step; overrides the CFL policy when set
    pub dt: Option<f64>,
    pub cfl_safety: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Number of sample times including t = 0
    pub samples: usize,
    pub spacing: Spacing,
    /// First positive sample for log spacing
    pub t_first: f64,
}

impl Default for StepperSection {
    fn default() -> Self {
        StepperSection {
            scheme: Scheme::IfRk4,
            dt: None,
            cfl_safety: 0.9,
            dt_max: 1.0,
            t_end: 50.0,
            samples: 60,
            spacing: Spacing::Log,
            t_first: 0.1,
        }
    }
}

/// Functional settings; unset entries take the β-dependent defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorSection {
    /// Energy inequalities to check: "E0", "Ebar_0", "Ebar_1", "E_beta", "Etilde_s"
    pub names: Vec<String>,
    pub k: Option<f64>,
    pub s: Option<f64>,
    pub s_tilde: Option<f64>,
    pub c2: Option<f64>,
    /// Relative slack of dE/dt + D ≤ tol·(|E| + |D|)
    pub tolerance: Option<f64>,
}

pub const MONITOR_NAMES: [&str; 5] = ["E0", "Ebar_0", "Ebar_1", "E_beta", "Etilde_s"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub t_min: f64,
    /// Defaults to min(t_end, T_box)
    pub t_max: Option<f64>,
    /// Orders s₁ of the fitted ‖Λ^{s₁}(u,τ)‖ series
    pub s1_orders: Vec<f64>,
    /// Relative tolerance on fitted exponents
    pub tolerance: f64,
    /// Largest accepted max relative deviation from the fitted line
    pub residual_tol: f64,
    /// Remainder must stay below this fraction of the linear part
    pub remainder_fraction: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection {
            t_min: 10.0,
            t_max: None,
            s1_orders: vec![0.0],
            tolerance: 0.15,
            residual_tol: 0.5,
            remainder_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSection,
    pub init: InitSection,
    pub stepper: StepperSection,
    pub monitors: MonitorSection,
    pub fit: FitSection,
    pub output: OutputSection,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "scenario".into(),
            model: ModelSection::default(),
            init: InitSection::default(),
            stepper: StepperSection::default(),
            monitors: MonitorSection::default(),
            fit: FitSection::default(),
            output: OutputSection::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Scenario(msg.into())
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, LabError> {
        let s: Scenario = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), LabError> {
        self.params()?;
        let i = &self.init;
        if !(i.epsilon >= 0.0 && i.epsilon.is_finite()) {
            return Err(bad(format!("epsilon = {} must be nonnegative", i.epsilon)));
        }
        if !(i.plateau >= 0.0 && i.support > i.plateau) {
            return Err(bad(format!("profile plateau {} / support {}", i.plateau, i.support)));
        }
        if !(i.gate_delta > 0.0) {
            return Err(bad("gate_delta must be positive"));
        }
        let st = &self.stepper;
        if st.samples < 2 {
            return Err(bad("need at least 2 samples"));
        }
        if st.spacing == Spacing::Log && !(st.t_first > 0.0 && st.t_first < st.t_end) {
            return Err(bad(format!("t_first = {} outside (0, t_end)", st.t_first)));
        }
        self.stepper_config()
            .validate()
            .map_err(|e| bad(e.to_string()))?;
        for n in &self.monitors.names {
            if !MONITOR_NAMES.contains(&n.as_str()) {
                return Err(bad(format!("unknown monitor {n:?}; known: {MONITOR_NAMES:?}")));
            }
        }
        let f = &self.fit;
        if !(f.tolerance > 0.0 && f.residual_tol > 0.0 && f.remainder_fraction > 0.0) {
            return Err(bad("fit tolerances must be positive"));
        }
        if f.s1_orders.iter().any(|s| !(*s >= 0.0)) {
            return Err(bad("s1 orders must be nonnegative"));
        }
        let (lo, hi) = self.fit_window();
        if !(lo < hi) {
            return Err(bad(format!("empty fit window [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, LabError> {
        Ok(make_grid(self.model.n, self.model.length)?)
    }

    pub fn params(&self) -> Result<ModelParams, LabError> {
        let m = &self.model;
        Ok(ModelParams::new(m.a, m.beta, m.b, self.grid()?)?.with_dynamics(m.dynamics))
    }

    pub fn uses_exact_linear(&self) -> bool {
        self.model.dynamics == Dynamics::Linear && self.model.exact_linear
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let st = &self.stepper;
        let m = st.samples;
        let mut t: Vec<f64> = match st.spacing {
            Spacing::Linear => (0..m).map(|i| st.t_end * i as f64 / (m - 1) as f64).collect(),
            Spacing::Log => {
                let (l0, l1) = (st.t_first.ln(), st.t_end.ln());
                std::iter::once(0.0)
                    .chain((0..m - 1).map(|i| {
                        if m == 2 {
                            st.t_end
                        } else {
                            (l0 + (l1 - l0) * i as f64 / (m - 2) as f64).exp()
                        }
                    }))
                    .collect()
            }
        };
        if let Some(last) = t.last_mut() {
            *last = st.t_end;
        }
        t
    }

    pub fn stepper_config(&self) -> StepperConfig {
        let st = &self.stepper;
        StepperConfig {
            scheme: st.scheme,
            dt_policy: match st.dt {
                Some(dt) => DtPolicy::Fixed { dt },
                None => DtPolicy::Cfl {
                    safety: st.cfl_safety,
                    dt_max: st.dt_max,
                },
            },
            t_end: st.t_end,
            sample_times: self.sample_times(),
        }
    }

    pub fn functional_config(&self) -> FunctionalConfig {
        let mut c = FunctionalConfig::for_beta(self.model.beta);
        let m = &self.monitors;
        if let Some(k) = m.k {
            c.k = k;
        }
        if let Some(s) = m.s {
            c.s = s;
            c.hs_orders = vec![1.0, 2.0 * self.model.beta, s];
        }
        if let Some(s) = m.s_tilde {
            c.s_tilde = s;
        }
        if let Some(c2) = m.c2 {
            c.c2 = c2;
        }
        c
    }

    pub fn monitor_tolerance(&self) -> f64 {
        self.monitors.tolerance.unwrap_or(1e-6)
    }

    /// Horizon (L/(4π))^{2β} past which the box no longer mimics the plane.
    pub fn t_box(&self) -> f64 {
        (self.model.length / (4.0 * PI)).powf(2.0 * self.model.beta)
    }

    pub fn fit_window(&self) -> (f64, f64) {
        let hi = self
            .fit
            .t_max
            .unwrap_or_else(|| self.stepper.t_end.min(self.t_box()));
        (self.fit.t_min, hi)
    }
}
