//! Airside model: taxiway lattice with shortest-path routing, stochastic
//! taxi motion, and Bernoulli-sum runway servers.

pub mod graph;
pub mod runway;
pub mod taxi;

pub use graph::{NodeId, NodeKind, TaxiwayGraph};
pub use runway::{service_mean, service_variance, RunwayServer};
pub use taxi::TaxiState;
