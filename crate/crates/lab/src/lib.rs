//! Experiment layer for the Oldroyd-B decay study: scenario files, initial
//! data, ensembles of damped runs, rate fits, invariant checks and reports.

pub mod ensemble;
pub mod experiments;
pub mod fit;
pub mod initial;
pub mod invariants;
pub mod report;
pub mod scenario;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Spectral(#[from] oldroyd_core::spectral::SpectralError),
    #[error(transparent)]
    Model(#[from] oldroyd_core::model::ModelError),
    #[error(transparent)]
    Integrator(#[from] oldroyd_core::integrator::IntegratorError),
    #[error(transparent)]
    Functional(#[from] oldroyd_core::functionals::FunctionalError),
    #[error(transparent)]
    Oracle(#[from] oldroyd_core::oracle::OracleError),
    #[error(transparent)]
    Fit(#[from] fit::FitError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
