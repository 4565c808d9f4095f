//! Runway departure queue and its service process: each step the runway
//! clears the sum of two independent Bernoulli draws, capped by the queue.

use crate::aircraft::AircraftId;
use crate::airside::graph::NodeId;
use crate::rng::bernoulli;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct RunwayServer {
    pub node: NodeId,
    pub p1: f64,
    pub p2: f64,
    pub queue: VecDeque<AircraftId>,
}

impl RunwayServer {
    pub fn new(node: NodeId, p1: f64, p2: f64) -> Self {
        RunwayServer {
            node,
            p1,
            p2,
            queue: VecDeque::new(),
        }
    }

    pub fn enqueue(&mut self, id: AircraftId) {
        self.queue.push_back(id);
    }

    pub fn queue_len(&self) -> u32 {
        self.queue.len() as u32
    }

    /// One service step. Both Bernoulli variables are drawn every step,
    /// whether or not aircraft are queued, so the sequence of take-off
    /// opportunities depends only on the runway stream (common random
    /// numbers across policy settings). Returns the departing aircraft,
    /// oldest first; at most two.
    pub fn service(&mut self, rng: &mut ChaCha8Rng) -> Vec<AircraftId> {
        let opportunities = bernoulli(rng, self.p1) as u32 + bernoulli(rng, self.p2) as u32;
        let takeoffs = opportunities.min(self.queue_len());
        (0..takeoffs).map(|_| self.queue.pop_front().unwrap()).collect()
    }
}

/// Analytic mean of takeoffs per step under a saturated queue.
pub fn service_mean(p1: f64, p2: f64) -> f64 {
    p1 + p2
}

/// Analytic variance of takeoffs per step under a saturated queue.
pub fn service_variance(p1: f64, p2: f64) -> f64 {
    p1 * (1.0 - p1) + p2 * (1.0 - p2)
}
