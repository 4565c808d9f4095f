//! Stochastic taxi motion: a constant stride per step unless a Bernoulli
//! stop event holds the aircraft in place.

use crate::rng::bernoulli;
use rand_chacha::ChaCha8Rng;

/// Position of one aircraft along its gate-to-threshold path.
#[derive(Clone, Debug, PartialEq)]
pub struct TaxiState {
    pub path_length_m: f64,
    pub distance_m: f64,
    pub step_distance_m: f64,
    pub p_stop: f64,
}

impl TaxiState {
    pub fn new(path_length_m: f64, step_distance_m: f64, p_stop: f64) -> Self {
        TaxiState {
            path_length_m,
            distance_m: 0.0,
            step_distance_m,
            p_stop,
        }
    }

    pub fn at_end(&self) -> bool {
        self.distance_m >= self.path_length_m
    }

    /// Advance one simulation step. With probability `p_stop` the aircraft
    /// holds; otherwise it moves `step_distance_m`, clamped at the path end.
    /// Returns true once the threshold is reached.
    pub fn advance(&mut self, rng: &mut ChaCha8Rng) -> bool {
        if self.at_end() {
            return true;
        }
        if !bernoulli(rng, self.p_stop) {
            self.distance_m = (self.distance_m + self.step_distance_m).min(self.path_length_m);
        }
        self.at_end()
    }

    /// Moving steps needed to cover the path at full stride.
    pub fn cells(path_length_m: f64, step_distance_m: f64) -> u32 {
        (path_length_m / step_distance_m).ceil() as u32
    }
}
