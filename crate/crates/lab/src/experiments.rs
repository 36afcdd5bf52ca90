//! Experiments built on ensemble runs: decay-rate fits, integrability of
//! ‖∇(u,τ)‖_{L^∞}, damping sweeps, the nonlinear remainder and the
//! energy-inequality monitors.

use oldroyd_core::functionals::FunctionalReport;
use serde::{Deserialize, Serialize};

use crate::ensemble::{run_ensemble, EnsembleRun, EnsembleSpec, MemberTrace};
use crate::fit::{fit_against_a, fit_power_law, Abscissa, Criterion, FitResult};
use crate::scenario::Scenario;
use crate::LabError;

fn fit_or_skip(
    name: &str,
    series: &[(f64, f64)],
    window: (f64, f64),
    fit: impl FnOnce(&[(f64, f64)], (f64, f64)) -> Result<FitResult, crate::fit::FitError>,
    abscissa: Abscissa,
) -> FitResult {
    if series.iter().all(|p| p.1 == 0.0) {
        return FitResult::skipped(name, abscissa, [window.0, window.1], "series identically zero");
    }
    match fit(series, window) {
        Ok(r) => r.named(name),
        Err(e) => FitResult::skipped(name, abscissa, [window.0, window.1], e.to_string()),
    }
}

fn judge(r: FitResult, target: f64, criterion: Criterion, tol: f64, residual_tol: f64) -> FitResult {
    if r.status == crate::fit::FitStatus::Skipped {
        let mut r = r;
        r.target = Some(target);
        r.criterion = criterion;
        r.tolerance = tol;
        return r;
    }
    r.judged(target, criterion, tol, residual_tol)
}

/// Decay fits of one member: ‖Λ^{s₁}(u,τ)‖ for each s₁ and ‖tr τ‖.
///
/// With a = 0 the targets are −(s₁+1)/(2β) and −1/(2β). With a > 0 the
/// uniform bound −(1+s₁)/2 is checked as an upper bound on the slope, and
/// tr τ must decay at least like the undamped rate.
pub fn decay_fits(trace: &MemberTrace, beta: f64, sc: &Scenario) -> Vec<FitResult> {
    let window = sc.fit_window();
    let (tol, rtol) = (sc.fit.tolerance, sc.fit.residual_tol);
    let undamped = trace.a == 0.0;
    let mut out = Vec::new();
    for &s1 in &sc.fit.s1_orders {
        let name = format!("hdot_{s1}");
        let r = fit_or_skip(&name, &trace.hdot_series(s1), window, fit_power_law, Abscissa::LogOnePlusT);
        out.push(if undamped {
            judge(r, -(s1 + 1.0) / (2.0 * beta), Criterion::Within, tol, rtol)
        } else {
            judge(r, -(1.0 + s1) / 2.0, Criterion::AtMost, tol, rtol)
        });
    }
    let r = fit_or_skip("trtau", &trace.series(|s| s.trtau), window, fit_power_law, Abscissa::LogOnePlusT);
    let target = -1.0 / (2.0 * beta);
    out.push(if undamped {
        judge(r, target, Criterion::Within, tol, rtol)
    } else {
        judge(r, target, Criterion::AtMost, tol, rtol)
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayOutcome {
    pub run: EnsembleRun,
    pub fits: Vec<FitResult>,
}

impl DecayOutcome {
    pub fn pass(&self) -> bool {
        self.fits.iter().all(|f| f.pass)
    }
}

pub fn run_decay_experiment(sc: &Scenario) -> Result<DecayOutcome, LabError> {
    let run = run_ensemble(sc, &EnsembleSpec::single(sc))?;
    let fits = decay_fits(&run.members[0], sc.model.beta, sc);
    Ok(DecayOutcome { run, fits })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityOutcome {
    /// (t, ∫₀^t ‖∇(u,τ)‖_{L^∞})
    pub cumulative: Vec<(f64, f64)>,
    pub total: f64,
    /// Increment over [t_end/10, t_end]
    pub last_decade: f64,
    pub ratio: f64,
    /// last_decade < 0.1·total
    pub flattening: bool,
}

pub const FLATTENING_FRACTION: f64 = 0.1;

/// Trapezoid accumulation of the gradient series and its tail trend.
pub fn integrability_from(trace: &MemberTrace) -> IntegrabilityOutcome {
    let s = trace.series(|x| x.grad_linf);
    let mut cumulative = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    for (i, &(t, v)) in s.iter().enumerate() {
        if i > 0 {
            let (t0, v0) = s[i - 1];
            acc += 0.5 * (t - t0) * (v + v0);
        }
        cumulative.push((t, acc));
    }
    let t_end = s.last().map_or(0.0, |p| p.0);
    let at = |t: f64| -> f64 {
        match cumulative.iter().position(|p| p.0 >= t) {
            None => acc,
            Some(0) => cumulative[0].1,
            Some(i) => {
                let (t0, c0) = cumulative[i - 1];
                let (t1, c1) = cumulative[i];
                c0 + (c1 - c0) * (t - t0) / (t1 - t0)
            }
        }
    };
    let last_decade = acc - at(t_end / 10.0);
    let ratio = if acc > 0.0 { last_decade / acc } else { 0.0 };
    IntegrabilityOutcome {
        cumulative,
        total: acc,
        last_decade,
        ratio,
        flattening: ratio < FLATTENING_FRACTION,
    }
}

pub fn run_integrability_check(sc: &Scenario) -> Result<IntegrabilityOutcome, LabError> {
    let mut spec = EnsembleSpec::single(sc);
    spec.full_reports = false;
    let run = run_ensemble(sc, &spec)?;
    Ok(integrability_from(&run.members[0]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderOutcome {
    /// (t, remainder, linear)
    pub series: Vec<(f64, f64, f64)>,
    pub max_ratio: f64,
    pub fraction: f64,
    pub remainder_fit: FitResult,
    pub linear_fit: FitResult,
    pub pass: bool,
}

/// Remainder (u,τ) − (u_L,τ_L) against the linear evolution of the same data.
pub fn remainder_from(trace: &MemberTrace, sc: &Scenario) -> RemainderOutcome {
    let series: Vec<(f64, f64, f64)> = trace
        .samples
        .iter()
        .filter_map(|s| Some((s.t, s.remainder?, s.linear?)))
        .collect();
    let max_ratio = series
        .iter()
        .filter(|p| p.2 > 0.0)
        .map(|p| p.1 / p.2)
        .fold(0.0, f64::max);
    let window = sc.fit_window();
    let rem: Vec<(f64, f64)> = series.iter().map(|p| (p.0, p.1)).collect();
    let lin: Vec<(f64, f64)> = series.iter().map(|p| (p.0, p.2)).collect();
    let fraction = sc.fit.remainder_fraction;
    RemainderOutcome {
        remainder_fit: fit_or_skip("remainder", &rem, window, fit_power_law, Abscissa::LogOnePlusT),
        linear_fit: fit_or_skip("linear", &lin, window, fit_power_law, Abscissa::LogOnePlusT),
        pass: !series.is_empty() && max_ratio < fraction,
        series,
        max_ratio,
        fraction,
    }
}

pub fn run_remainder_experiment(sc: &Scenario) -> Result<RemainderOutcome, LabError> {
    let mut spec = EnsembleSpec::single(sc);
    spec.track_remainder = true;
    spec.full_reports = false;
    let run = run_ensemble(sc, &spec)?;
    Ok(remainder_from(&run.members[0], sc))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorResult {
    pub name: String,
    /// max over samples of (dE/dt + D)/(|E| + |D|)
    pub worst: f64,
    pub at_t: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn energy_pair(r: &FunctionalReport, name: &str) -> Option<(f64, f64)> {
    Some(match name {
        "E0" => (r.e0, r.d0),
        "Ebar_0" => (r.ebar0, r.dbar0),
        "Ebar_1" => (r.ebar1, r.dbar1),
        "E_beta" => (r.e_beta, r.d_beta),
        "Etilde_s" => (r.etilde_s, r.dtilde_s),
        _ => return None,
    })
}

/// Derivative at t[i] from the quadratic through three neighbouring samples.
fn three_point_derivative(t: &[f64], y: &[f64], i: usize) -> f64 {
    let j = i.clamp(1, t.len() - 2);
    let (t0, t1, t2) = (t[j - 1], t[j], t[j + 1]);
    let x = t[i];
    let l0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
    let l1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
    let l2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
    l0 * y[j - 1] + l1 * y[j] + l2 * y[j + 1]
}

/// Finite-difference check of dE/dt + D ≤ tol·(|E| + |D|) at every sample.
pub fn energy_monitors(trace: &MemberTrace, names: &[String], tol: f64) -> Result<Vec<MonitorResult>, LabError> {
    let reports: Vec<&FunctionalReport> = trace.samples.iter().filter_map(|s| s.report.as_ref()).collect();
    if reports.len() < 3 {
        return Err(LabError::Scenario("energy monitors need full reports at 3 or more samples".into()));
    }
    let t: Vec<f64> = reports.iter().map(|r| r.t).collect();
    names
        .iter()
        .map(|name| {
            let pairs: Vec<(f64, f64)> = reports
                .iter()
                .map(|r| energy_pair(r, name).ok_or_else(|| LabError::Scenario(format!("unknown monitor {name}"))))
                .collect::<Result<_, _>>()?;
            let e: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let (mut worst, mut at_t) = (f64::NEG_INFINITY, 0.0);
            for i in 0..t.len() {
                let (ei, di) = pairs[i];
                let scale = ei.abs() + di.abs();
                let excess = three_point_derivative(&t, &e, i) + di;
                let rel = if scale > 0.0 { excess / scale } else { 0.0 };
                if rel > worst {
                    worst = rel;
                    at_t = t[i];
                }
            }
            Ok(MonitorResult {
                name: name.clone(),
                worst,
                at_t,
                tolerance: tol,
                pass: worst <= tol,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// a-values entering the exponent fits; all by default
    pub fit_range: Option<(f64, f64)>,
    pub alpha_tol: f64,
    pub trtau_tol: f64,
    pub residual_tol: f64,
    /// Also keep remainders and these decay orders for every member
    pub track_remainder: bool,
    pub s1_orders: Vec<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            fit_range: None,
            alpha_tol: 0.1,
            trtau_tol: 0.1,
            residual_tol: 0.5,
            track_remainder: false,
            s1_orders: vec![0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub a: f64,
    /// (α, sup_t ‖Λ^α(difference)‖, argmax t)
    pub sup_diff: Vec<(f64, f64, f64)>,
    pub sup_trtau_diff: f64,
    pub t_star_trtau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub beta: f64,
    pub points: Vec<SweepPoint>,
    pub fits: Vec<FitResult>,
    /// sup differences nondecreasing in a for every α
    pub monotone: bool,
    pub run: EnsembleRun,
}

impl SweepOutcome {
    pub fn fit(&self, name: &str) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.name == name)
    }

    pub fn member(&self, a: f64) -> Option<&MemberTrace> {
        self.run.members.iter().find(|m| m.a == a)
    }
}

fn sup_with_time(series: &[(f64, f64)]) -> (f64, f64) {
    series
        .iter()
        .fold((0.0, 0.0), |best, &(t, v)| if v > best.0 { (v, t) } else { best })
}

/// Predicted damping-rate exponent β(1+α)/(αβ+3β−1) of ‖Λ^α(difference)‖.
pub fn predicted_exponent(beta: f64, alpha: f64) -> f64 {
    beta * (1.0 + alpha) / (alpha * beta + 3.0 * beta - 1.0)
}

/// Paired runs at every a of `a_grid` against a = 0 on identical samples.
pub fn run_damping_sweep(
    base: &Scenario,
    a_grid: &[f64],
    alphas: &[f64],
    opts: &SweepOptions,
) -> Result<SweepOutcome, LabError> {
    let mut grid: Vec<f64> = a_grid.iter().copied().filter(|&a| a > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.iter().any(|&a| a > 1.0) {
        return Err(LabError::Scenario("damping grid must lie in (0, 1]".into()));
    }
    let mut sc = base.clone();
    sc.model.a = 0.0;
    let spec = EnsembleSpec {
        a_values: std::iter::once(0.0).chain(grid.iter().copied()).collect(),
        alphas: alphas.to_vec(),
        s1_orders: opts.s1_orders.clone(),
        track_remainder: opts.track_remainder,
        full_reports: false,
    };
    let run = run_ensemble(&sc, &spec)?;
    let beta = sc.model.beta;
    let points: Vec<SweepPoint> = run.members[1..]
        .iter()
        .map(|m| {
            let (v, t) = sup_with_time(&m.series(|s| s.trtau_diff));
            SweepPoint {
                a: m.a,
                sup_diff: alphas
                    .iter()
                    .map(|&al| {
                        let (v, t) = sup_with_time(&m.diff_series(al));
                        (al, v, t)
                    })
                    .collect(),
                sup_trtau_diff: v,
                t_star_trtau: t,
            }
        })
        .collect();
    let range = opts
        .fit_range
        .unwrap_or((grid.first().copied().unwrap_or(0.0), grid.last().copied().unwrap_or(0.0)));
    let endpoint = beta == 0.5;
    let mut fits = Vec::new();
    for (k, &al) in alphas.iter().enumerate() {
        let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.a, p.sup_diff[k].1)).collect();
        let name = format!("diff_alpha_{al}");
        let r = fit_or_skip(&name, &pts, range, fit_against_a, Abscissa::LogA);
        fits.push(judge(r, predicted_exponent(beta, al), Criterion::AtLeast, opts.alpha_tol, opts.residual_tol));
        if endpoint {
            let pts: Vec<(f64, f64)> = points
                .iter()
                .map(|p| (p.a, p.sup_diff[k].1 / p.sup_diff[k].2.ln_1p()))
                .collect();
            let name = format!("diff_alpha_{al}_log");
            let r = fit_or_skip(&name, &pts, range, fit_against_a, Abscissa::LogA)
                .with_note("sup divided by log(1+t*)");
            fits.push(judge(r, 1.0, Criterion::AtLeast, opts.alpha_tol, opts.residual_tol));
        }
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.a, p.sup_trtau_diff)).collect();
    let r = fit_or_skip("trtau_diff", &pts, range, fit_against_a, Abscissa::LogA);
    fits.push(judge(r, 1.0 / (2.0 * beta), Criterion::Within, opts.trtau_tol, opts.residual_tol));
    let monotone = (0..alphas.len()).all(|k| points.windows(2).all(|w| w[1].sup_diff[k].1 >= w[0].sup_diff[k].1))
        && points.windows(2).all(|w| w[1].sup_trtau_diff >= w[0].sup_trtau_diff);
    Ok(SweepOutcome {
        beta,
        points,
        fits,
        monotone,
        run,
    })
}

/// Everything derivable from one trajectory of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub decay: Vec<FitResult>,
    pub integrability: IntegrabilityOutcome,
    pub remainder: RemainderOutcome,
    pub monitors: Vec<MonitorResult>,
    pub run: EnsembleRun,
}

impl SimOutcome {
    /// Monitors and remainder are hard checks; decay fits count when fitted.
    pub fn pass(&self) -> bool {
        self.monitors.iter().all(|m| m.pass)
            && self.decay.iter().all(|f| f.pass || f.status == crate::fit::FitStatus::Skipped)
    }
}

pub fn simulate(sc: &Scenario) -> Result<SimOutcome, LabError> {
    let mut spec = EnsembleSpec::single(sc);
    spec.track_remainder = true;
    let run = run_ensemble(sc, &spec)?;
    let m = &run.members[0];
    Ok(SimOutcome {
        decay: decay_fits(m, sc.model.beta, sc),
        integrability: integrability_from(m),
        remainder: remainder_from(m, sc),
        monitors: energy_monitors(m, &sc.monitors.names, sc.monitor_tolerance())?,
        run,
    })
}
