//! Agent-based simulation of in-network content recommendation on fixed,
//! possibly homophilic, directed follow graphs.
//!
//! The numeric core (preferences, edge features, tie strengths, statistics)
//! is generic over a [`Scalar`] type; the aliases at the crate root fix it
//! to `f64`, which is what the experiment harness uses.

pub mod engine;
pub mod error;
pub mod expcli;
pub mod metrics;
pub mod netgen;
pub mod policy;
pub mod population;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use netgen::{DirectedGraph, RandomGraphParams, SbmParams};
pub use population::{GroupId, Topic};
pub use scalar::Scalar;

pub type PreferenceVector = population::PreferenceVector<f64>;
pub type GroupPreferencePrior = population::GroupPreferencePrior<f64>;
pub type PopulationConfig = population::PopulationConfig<f64>;
pub type Population = population::Population<f64>;
pub type TieStrengthParams = policy::TieStrengthParams<f64>;
pub type EmaParams = policy::EmaParams<f64>;
pub type EdgeState = policy::EdgeState<f64>;
pub type StandardizationStats = policy::StandardizationStats<f64>;
pub type Simulation<'a> = engine::Simulation<'a, f64>;

pub type Population32 = population::Population<f32>;
pub type EdgeState32 = policy::EdgeState<f32>;
