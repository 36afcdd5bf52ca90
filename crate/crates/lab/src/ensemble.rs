//! Several trajectories from the same initial data, differing only in the
//! damping a, sampled at identical times.

use log::info;
use oldroyd_core::functionals::{diff_norms, gradient_linf, hom, report, trtau_diff, FunctionalReport, ModalEnergies};
use oldroyd_core::integrator::integrate_lockstep;
use oldroyd_core::model::{ModelParams, SimState};
use oldroyd_core::oracle::linear_field_propagate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::initial::{scenario_initial, Gate};
use crate::scenario::Scenario;
use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Member 0 is the reference for all differences.
    pub a_values: Vec<f64>,
    /// Orders α of ‖Λ^α(difference)‖
    pub alphas: Vec<f64>,
    /// Orders s₁ of ‖Λ^{s₁}(u,τ)‖
    pub s1_orders: Vec<f64>,
    /// Compare each member to its exact linear evolution.
    pub track_remainder: bool,
    /// Evaluate the full functional report at every sample.
    pub full_reports: bool,
}

impl EnsembleSpec {
    pub fn single(sc: &Scenario) -> Self {
        EnsembleSpec {
            a_values: vec![sc.model.a],
            alphas: vec![],
            s1_orders: sc.fit.s1_orders.clone(),
            track_remainder: false,
            full_reports: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub l2: f64,
    /// (s₁, ‖Λ^{s₁}(u,τ)‖_{L²})
    pub hdot: Vec<(f64, f64)>,
    pub trtau: f64,
    /// ‖∇u‖_{L^∞} + ‖∇τ‖_{L^∞}
    pub grad_linf: f64,
    /// (α, ‖Λ^α(member − reference)‖_{L²})
    pub diffs: Vec<(f64, f64)>,
    pub trtau_diff: f64,
    /// ‖(u,τ) − (u_L,τ_L)‖_{L²}
    pub remainder: Option<f64>,
    /// ‖(u_L,τ_L)‖_{L²}
    pub linear: Option<f64>,
    pub report: Option<FunctionalReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberTrace {
    pub a: f64,
    pub samples: Vec<Sample>,
}

impl MemberTrace {
    pub fn series(&self, f: impl Fn(&Sample) -> f64) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, f(s))).collect()
    }

    pub fn hdot_series(&self, s1: f64) -> Vec<(f64, f64)> {
        self.series(|s| {
            s.hdot
                .iter()
                .find(|p| p.0 == s1)
                .map_or(f64::NAN, |p| p.1)
        })
    }

    pub fn diff_series(&self, alpha: f64) -> Vec<(f64, f64)> {
        self.series(|s| {
            s.diffs
                .iter()
                .find(|p| p.0 == alpha)
                .map_or(f64::NAN, |p| p.1)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub scenario: String,
    pub beta: f64,
    pub gate: Gate,
    pub members: Vec<MemberTrace>,
}

fn sample(
    state: &SimState,
    reference: &SimState,
    initial: &SimState,
    p: &ModelParams,
    spec: &EnsembleSpec,
    sc: &Scenario,
) -> Result<Sample, LabError> {
    let m = ModalEnergies::new(state);
    let diffs = spec
        .alphas
        .iter()
        .map(|&al| Ok((al, diff_norms(state, reference, al)?)))
        .collect::<Result<Vec<_>, LabError>>()?;
    let (remainder, linear) = if spec.track_remainder {
        let lin = linear_field_propagate(initial, p.a, p.beta, state.t - initial.t);
        (Some(diff_norms(state, &lin, 0.0)?), Some(lin.l2_norm()))
    } else {
        (None, None)
    };
    Ok(Sample {
        t: state.t,
        l2: m.pair_sum(|_| 1.0).sqrt(),
        hdot: spec
            .s1_orders
            .iter()
            .map(|&s| (s, m.pair_sum(|r| hom(r, 2.0 * s)).sqrt()))
            .collect(),
        trtau: m.trace_sum(|_| 1.0).sqrt(),
        grad_linf: gradient_linf(state),
        diffs,
        trtau_diff: trtau_diff(state, reference)?,
        remainder,
        linear,
        report: spec.full_reports.then(|| report(state, p, &sc.functional_config())),
    })
}

/// Run every member of the ensemble and collect samples.
pub fn run_ensemble(sc: &Scenario, spec: &EnsembleSpec) -> Result<EnsembleRun, LabError> {
    sc.validate()?;
    if spec.a_values.is_empty() {
        return Err(LabError::Scenario("ensemble needs at least one member".into()));
    }
    let (initial, gate) = scenario_initial(sc)?;
    let base = sc.params()?;
    let params = spec
        .a_values
        .iter()
        .map(|&a| base.clone().with_a(a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut members: Vec<MemberTrace> = spec
        .a_values
        .iter()
        .map(|&a| MemberTrace { a, samples: vec![] })
        .collect();
    let mut record = |states: &[SimState]| -> Result<(), LabError> {
        let rows = states
            .par_iter()
            .zip(params.par_iter())
            .map(|(s, p)| sample(s, &states[0], &initial, p, spec, sc))
            .collect::<Result<Vec<_>, _>>()?;
        info!("{}: t = {:.4}, l2[0] = {:.4e}", sc.name, states[0].t, rows[0].l2);
        for (m, r) in members.iter_mut().zip(rows) {
            m.samples.push(r);
        }
        Ok(())
    };
    if sc.uses_exact_linear() {
        for t in sc.sample_times() {
            let states: Vec<SimState> = params
                .par_iter()
                .map(|p| linear_field_propagate(&initial, p.a, p.beta, t))
                .collect();
            record(&states)?;
        }
    } else {
        let mut err = None;
        let states = vec![initial.clone(); params.len()];
        integrate_lockstep(states, &params, &sc.stepper_config(), |s| {
            if err.is_none() {
                err = record(s).err();
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(EnsembleRun {
        scenario: sc.name.clone(),
        beta: sc.model.beta,
        gate,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use oldroyd_core::model::Dynamics;

    fn small() -> Scenario {
        let mut sc = Scenario::default();
        sc.model.n = 16;
        sc.model.length = 8.0 * std::f64::consts::PI;
        sc.stepper.t_end = 2.0;
        sc.stepper.samples = 5;
        sc.fit.t_min = 0.5;
        sc
    }

    #[test]
    fn reference_member_has_zero_differences() {
        let sc = small();
        let spec = EnsembleSpec {
            a_values: vec![0.0, 0.0, 0.3],
            alphas: vec![0.0, 1.0],
            s1_orders: vec![0.0],
            track_remainder: true,
            full_reports: false,
        };
        let run = run_ensemble(&sc, &spec).unwrap();
        assert_eq!(run.members.len(), 3);
        for s in &run.members[1].samples {
            assert_eq!(s.diffs, vec![(0.0, 0.0), (1.0, 0.0)]);
            assert_eq!(s.trtau_diff, 0.0);
        }
        assert!(run.members[2].samples.last().unwrap().diffs[0].1 > 0.0);
        assert_eq!(run.members[0].samples.len(), 5);
    }

    #[test]
    fn exact_linear_matches_stepping() {
        let mut sc = small();
        sc.model.dynamics = Dynamics::Linear;
        sc.stepper.dt = Some(0.01);
        let spec = EnsembleSpec {
            a_values: vec![0.2],
            alphas: vec![],
            s1_orders: vec![0.0],
            track_remainder: true,
            full_reports: false,
        };
        let exact = run_ensemble(&sc, &spec).unwrap();
        sc.model.exact_linear = false;
        let stepped = run_ensemble(&sc, &spec).unwrap();
        for (a, b) in exact.members[0].samples.iter().zip(&stepped.members[0].samples) {
            assert!((a.l2 - b.l2).abs() < 1e-8 * a.l2);
            assert!(b.remainder.unwrap() < 1e-8 * b.linear.unwrap());
        }
    }
}
