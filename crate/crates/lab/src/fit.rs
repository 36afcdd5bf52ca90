//! Log-log regressions of decay and damping-rate series.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {need} points in the window, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("nonpositive value {y} at abscissa {x}")]
    NonPositive { x: f64, y: f64 },
    #[error("empty window [{0}, {1}]")]
    EmptyWindow(f64, f64),
}

/// How a fitted exponent is judged against its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// |e − target| ≤ tol·|target|
    Within,
    /// e ≥ target·(1 − tol)
    AtLeast,
    /// e ≤ target·(1 − tol), for negative targets: decay at least this fast
    AtMost,
}

impl Criterion {
    pub fn holds(self, exponent: f64, target: f64, tol: f64) -> bool {
        match self {
            Criterion::Within => (exponent - target).abs() <= tol * target.abs(),
            Criterion::AtLeast => exponent >= target * (1.0 - tol),
            Criterion::AtMost => exponent <= target * (1.0 - tol),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Fitted,
    Skipped,
}

/// Abscissa of the regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Abscissa {
    /// log(1 + t)
    LogOnePlusT,
    /// log a
    LogA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub name: String,
    pub status: FitStatus,
    pub abscissa: Abscissa,
    pub exponent: f64,
    pub intercept: f64,
    /// max |fit/y − 1| over the window
    pub residual: f64,
    pub window: [f64; 2],
    pub points: usize,
    pub target: Option<f64>,
    pub criterion: Criterion,
    pub tolerance: f64,
    pub residual_tol: f64,
    pub note: Option<String>,
    pub pass: bool,
}

impl FitResult {
    /// Pass flag as a function of the other fields.
    pub fn evaluate_pass(&self) -> bool {
        self.status == FitStatus::Fitted
            && self.residual <= self.residual_tol
            && self
                .target
                .is_none_or(|t| self.criterion.holds(self.exponent, t, self.tolerance))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attach a target and recompute the pass flag.
    pub fn judged(mut self, target: f64, criterion: Criterion, tolerance: f64, residual_tol: f64) -> Self {
        self.target = Some(target);
        self.criterion = criterion;
        self.tolerance = tolerance;
        self.residual_tol = residual_tol;
        self.pass = self.evaluate_pass();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Placeholder for a series that cannot be fitted (e.g. identically zero).
    pub fn skipped(name: impl Into<String>, abscissa: Abscissa, window: [f64; 2], reason: impl Into<String>) -> Self {
        FitResult {
            name: name.into(),
            status: FitStatus::Skipped,
            abscissa,
            exponent: 0.0,
            intercept: 0.0,
            residual: 0.0,
            window,
            points: 0,
            target: None,
            criterion: Criterion::Within,
            tolerance: 0.0,
            residual_tol: f64::MAX,
            note: Some(reason.into()),
            pass: false,
        }
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn fit_logs(
    points: &[(f64, f64)],
    window: (f64, f64),
    abscissa: Abscissa,
    min_points: usize,
) -> Result<FitResult, FitError> {
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(FitError::EmptyWindow(lo, hi));
    }
    let inside: Vec<(f64, f64)> = points.iter().copied().filter(|&(x, _)| x >= lo && x <= hi).collect();
    if inside.len() < min_points {
        return Err(FitError::TooFewPoints {
            got: inside.len(),
            need: min_points,
        });
    }
    if let Some(&(x, y)) = inside.iter().find(|&&(_, y)| !(y > 0.0)) {
        return Err(FitError::NonPositive { x, y });
    }
    let tx = |x: f64| match abscissa {
        Abscissa::LogOnePlusT => x.ln_1p(),
        Abscissa::LogA => x.ln(),
    };
    let xs: Vec<f64> = inside.iter().map(|p| tx(p.0)).collect();
    let ys: Vec<f64> = inside.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((slope * x + intercept - y).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut r = FitResult {
        name: String::new(),
        status: FitStatus::Fitted,
        abscissa,
        exponent: slope,
        intercept,
        residual,
        window: [inside[0].0, inside[inside.len() - 1].0],
        points: inside.len(),
        target: None,
        criterion: Criterion::Within,
        tolerance: 0.0,
        residual_tol: f64::MAX,
        note: None,
        pass: false,
    };
    r.pass = r.evaluate_pass();
    Ok(r)
}

pub const MIN_SERIES_POINTS: usize = 8;
pub const MIN_SWEEP_POINTS: usize = 3;

/// Slope of log y against log(1+t) over samples with t in `window`.
pub fn fit_power_law(series: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult, FitError> {
    fit_logs(series, window, Abscissa::LogOnePlusT, MIN_SERIES_POINTS)
}

/// Slope of log y against log a over a-values in `range`.
pub fn fit_against_a(points: &[(f64, f64)], range: (f64, f64)) -> Result<FitResult, FitError> {
    fit_logs(points, range, Abscissa::LogA, MIN_SWEEP_POINTS)
}
