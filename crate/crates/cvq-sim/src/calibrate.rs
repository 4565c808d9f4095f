//! Parameter fitting for the stochastic pieces of the model.
//!
//! The taxi stop probability is matched to the mean of unimpeded taxi-out
//! samples: covering k path cells at stop probability p takes k/(1-p)
//! steps in expectation, so p has a closed form. The runway pair (p1, p2)
//! is matched to the mean and variance of the saturated take-off rate via
//! the two moment equations of a sum of independent Bernoullis.

use crate::airside::taxi::TaxiState;
use crate::error::{Error, Result};

/// Unimpeded taxi-out durations observed under light traffic, in minutes.
#[derive(Clone, Debug)]
pub struct TaxiCalibrationTarget {
    pub samples_min: Vec<f64>,
}

impl TaxiCalibrationTarget {
    pub fn parse(text: &str) -> Result<TaxiCalibrationTarget> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v = line.parse::<f64>().map_err(|_| {
                Error::Input(format!("samples line {}: not a number: {line:?}", lineno + 1))
            })?;
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Input(format!(
                    "samples line {}: durations must be positive, got {v}",
                    lineno + 1
                )));
            }
            samples.push(v);
        }
        Ok(TaxiCalibrationTarget { samples_min: samples })
    }
}

/// Saturated take-off rate moments, in takeoffs per step.
#[derive(Clone, Copy, Debug)]
pub struct RunwayCalibrationTarget {
    pub mean_rate: f64,
    pub std_rate: f64,
}

/// Result of the taxi fit: the stop probability plus a variance diagnostic
/// (one parameter cannot match two moments, so the variance mismatch is
/// reported, not matched).
#[derive(Clone, Copy, Debug)]
pub struct TaxiFit {
    pub p_stop: f64,
    pub path_cells: u32,
    pub sample_mean_steps: f64,
    pub sample_var_steps: f64,
    pub analytic_var_steps: f64,
}

/// Fit the stop probability so the analytic mean k/(1-p) of total taxi
/// steps equals the sample mean.
pub fn fit_stop_probability(
    target: &TaxiCalibrationTarget,
    path_length_m: f64,
    step_distance_m: f64,
    step_seconds: u32,
) -> Result<TaxiFit> {
    if !(path_length_m > 0.0) || !(step_distance_m > 0.0) {
        return Err(Error::Config(
            "path length and step distance must be positive".into(),
        ));
    }
    let n = target.samples_min.len();
    if n < 30 {
        return Err(Error::Input(format!(
            "need at least 30 taxi-time samples to fit, got {n}"
        )));
    }
    let k = TaxiState::cells(path_length_m, step_distance_m);
    let to_steps = 60.0 / step_seconds as f64;
    let mean_steps: f64 =
        target.samples_min.iter().map(|m| m * to_steps).sum::<f64>() / n as f64;
    let var_steps: f64 = target
        .samples_min
        .iter()
        .map(|m| (m * to_steps - mean_steps).powi(2))
        .sum::<f64>()
        / n as f64;
    if mean_steps < k as f64 {
        return Err(Error::Input(format!(
            "sample mean {mean_steps:.3} steps is below the deterministic minimum of {k} steps \
             for this path; lower step_distance or check the samples"
        )));
    }
    let p = 1.0 - k as f64 / mean_steps;
    // negative binomial variance of the total step count
    let analytic_var = k as f64 * p / (1.0 - p).powi(2);
    Ok(TaxiFit {
        p_stop: p,
        path_cells: k,
        sample_mean_steps: mean_steps,
        sample_var_steps: var_steps,
        analytic_var_steps: analytic_var,
    })
}

/// Achievable variance interval for a Bernoulli pair with mean `s`.
pub fn runway_variance_bounds(s: f64) -> (f64, f64) {
    let max = s - s * s / 2.0;
    let min = if s <= 1.0 { s - s * s } else { 3.0 * s - s * s - 2.0 };
    (min.max(0.0), max)
}

/// Solve p1 + p2 = mean and p1(1-p1) + p2(1-p2) = variance for the pair,
/// returned with p1 >= p2. The pair are the roots of
/// x^2 - s*x + q = 0 with q = (s^2 - s + v) / 2.
pub fn fit_runway_bernoullis(target: &RunwayCalibrationTarget) -> Result<(f64, f64)> {
    let s = target.mean_rate;
    let v = target.std_rate * target.std_rate;
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::Input(format!(
            "mean take-off rate must be in [0, 2] per step, got {s}"
        )));
    }
    let q = (s * s - s + v) / 2.0;
    let mut disc = s * s - 4.0 * q;
    if (-1e-12..0.0).contains(&disc) {
        disc = 0.0; // cancellation noise at the equal-root boundary
    }
    let (lo, hi) = runway_variance_bounds(s);
    let infeasible = || {
        Error::Input(format!(
            "take-off moments infeasible: mean {s} admits variance in [{lo:.6}, {hi:.6}], got {v:.6}"
        ))
    };
    if disc < 0.0 {
        return Err(infeasible());
    }
    let root = disc.sqrt();
    let p1 = (s + root) / 2.0;
    let p2 = (s - root) / 2.0;
    let eps = 1e-12;
    if p1 > 1.0 + eps || p2 < -eps {
        return Err(infeasible());
    }
    Ok((p1.clamp(0.0, 1.0), p2.clamp(0.0, 1.0)))
}
