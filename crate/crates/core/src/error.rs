//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A chain specification failed validation; `field` names the offender.
    #[error("invalid chain spec: field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    /// An operation precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// State and generator live in different representations or dimensions.
    #[error("representation mismatch: generator dimension {generator} vs state dimension {state}")]
    RepresentationMismatch { generator: usize, state: usize },

    /// The adaptive integrator underflowed its step size.
    #[error("integration failed at t = {t_reached}: {reason}")]
    Integration { t_reached: f64, reason: String },

    /// A linear solve could not be trusted.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The generator is singular or too ill-conditioned to solve;
    /// fall back to trajectory integration.
    #[error(
        "generator ill-conditioned (estimate {estimate:.3e} > {limit:.1e}); \
         use time integration instead"
    )]
    IllConditioned { estimate: f64, limit: f64 },

    /// Time integration hit the horizon before the chain emptied; the
    /// accumulated value is a lower bound on the efficiency.
    #[error("integration horizon exceeded at t = {t_reached}; eta >= {eta_lower_bound}")]
    HorizonExceeded { t_reached: f64, eta_lower_bound: f64 },

    /// A full-space computation was requested beyond the supported size.
    #[error("size limit exceeded: n_sites = {n_sites}, maximum {max}")]
    SizeLimit { n_sites: usize, max: usize },

    /// The closed-form efficiency is undefined for the given rates.
    #[error("transfer efficiency undefined: {0}")]
    UndefinedEfficiency(String),

    /// No interior efficiency dip exists for the given rates.
    #[error("no dip: {0}")]
    NoDip(String),
}
