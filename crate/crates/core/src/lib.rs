//! Simulation and analytics for excitation transport in dissipative spin
//! chains.
//!
//! A single excitation hops coherently along a chain of two-level sites while
//! three incoherent processes compete with it: local dissipation at rate Γ,
//! local dephasing at rate γ, and incoherent (classically fluctuating)
//! hopping at rate γ_h. The last site feeds an absorbing sink at rate Λ, and
//! the probability that the excitation ever reaches the sink is the transfer
//! efficiency η. Everything is expressed in units of the coherent hopping
//! rate v.
//!
//! The crate provides:
//!
//! - [`model`]: chain specifications, Hamiltonians, and vectorized Lindblad
//!   generators restricted to the single-excitation manifold;
//! - [`dynamics`]: adaptive time evolution and two independent routes to the
//!   transfer efficiency (resolvent linear solve and time integration);
//! - [`analytic`]: closed-form two-site results, from the efficiency and dip location
//!   and depth, effective hopping, critical incoherent hopping, and the
//!   extrema-count region classification;
//! - [`sweep`]: parameter sweeps, extrema detection, and numeric phase
//!   diagrams for arbitrary chain lengths;
//! - [`oracle`]: brute-force validation on the full many-body Hilbert
//!   space, without the single-excitation restriction.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{ChainSpec, DensityMatrix, Liouvillian, Representation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/model.md")]
    pub struct Model;
    #[doc = include_str!("../../../book/src/efficiency.md")]
    pub struct Efficiency;
    #[doc = include_str!("../../../book/src/crossover.md")]
    pub struct Crossover;
    #[doc = include_str!("../../../book/src/chains.md")]
    pub struct Chains;
    #[doc = include_str!("../../../book/src/validation.md")]
    pub struct Validation;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
