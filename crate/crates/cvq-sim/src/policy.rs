//! Airline push-back choice. When an airline receives a clearance it pushes
//! back the held aircraft with the highest holding cost
//!
//! ```text
//! cost = w1 * minutes_since_ready * (1 - alpha) + w2 * passengers * alpha
//! ```
//!
//! alpha = 0 reduces to first-come-first-served, alpha = 1 to heaviest
//! plane first; intermediate values trade between the two. Only the ratio
//! w1/w2 matters for the choice.

use crate::aircraft::AircraftId;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    pub alpha: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            alpha: 0.0,
            w1: 4.0,
            w2: 1.0,
        }
    }
}

impl PolicyParams {
    pub fn with_alpha(self, alpha: f64) -> Self {
        PolicyParams { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("policy.alpha must be in [0,1], got {}", self.alpha)));
        }
        if !(self.w1 > 0.0) || !(self.w2 > 0.0) {
            return Err(Error::Config(format!(
                "policy weights must be positive, got w1={} w2={}",
                self.w1, self.w2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HoldingCostInputs {
    pub time_since_ready_min: f64,
    pub passengers: u32,
}

pub fn holding_cost(inputs: HoldingCostInputs, p: &PolicyParams) -> f64 {
    p.w1 * inputs.time_since_ready_min * (1.0 - p.alpha) + p.w2 * inputs.passengers as f64 * p.alpha
}

/// What the policy needs to know about one held aircraft.
#[derive(Clone, Copy, Debug)]
pub struct HeldAircraft {
    pub id: AircraftId,
    pub ready_step: u32,
    pub passengers: u32,
}

/// Pick the held aircraft with the highest holding cost. Ties break by
/// earliest ready step, then smallest id. Errors on an empty set: a
/// clearance for an airline with nothing held means the queue bookkeeping
/// is broken.
pub fn select_pushback(
    held: &[HeldAircraft],
    p: &PolicyParams,
    now: u32,
    step_seconds: u32,
) -> Result<AircraftId> {
    let minutes = |ready: u32| now.saturating_sub(ready) as f64 * step_seconds as f64 / 60.0;
    let mut best: Option<(f64, u32, AircraftId)> = None;
    for a in held {
        let cost = holding_cost(
            HoldingCostInputs {
                time_since_ready_min: minutes(a.ready_step),
                passengers: a.passengers,
            },
            p,
        );
        let replace = match best {
            None => true,
            Some((bc, br, bi)) => {
                cost > bc || (cost == bc && (a.ready_step, a.id) < (br, bi))
            }
        };
        if replace {
            best = Some((cost, a.ready_step, a.id));
        }
    }
    best.map(|(_, _, id)| id)
        .ok_or_else(|| Error::Runtime("push-back clearance for an airline with no held aircraft".into()))
}
