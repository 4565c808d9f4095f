//! Seeded, time-driven simulator of congested airport departure operations.
//!
//! Aircraft become ready at their gates, enter a collaborative virtual
//! queue that holds them while the taxiway system is saturated, then taxi
//! along a lattice to a runway queue served by a Bernoulli-sum server.
//! Airlines answer each clearance with the held aircraft maximizing a
//! tunable holding cost, trading passenger waiting time against fairness
//! between their own aircraft.
//!
//! - `sim` owns the step loop and per-day state,
//! - `airside` the lattice, taxi motion, and runway servers,
//! - `cvq` the virtual queue and runway balancing,
//! - `policy` the push-back cost function,
//! - `traffic` schedule files and synthetic demand,
//! - `calibrate` moment-matching fits for the stochastic parameters,
//! - `metrics` everything reported from the traces,
//! - `sweep` the alpha-sweep and scenario harness,
//! - `config` the TOML experiment configuration.

pub mod aircraft;
pub mod airside;
pub mod calibrate;
pub mod config;
pub mod cvq;
pub mod error;
pub mod metrics;
pub mod policy;
pub mod rng;
pub mod sim;
pub mod sweep;
pub mod trace;
pub mod traffic;

pub use aircraft::{AircraftId, AirlineId, WeightClass};
pub use airside::{NodeId, TaxiwayGraph};
pub use config::{SimConfig, TrafficPlan, Validated};
pub use error::{Error, Result};
pub use sim::{run_day, RunwayParams, SimClock, World};
pub use sweep::{
    default_alpha_grid, emit_results, parse_alpha_grid, recompute_outcomes, run_scenarios,
    sweep_alpha, SweepResult,
};
pub use trace::DayTrace;
pub use traffic::Schedule;
