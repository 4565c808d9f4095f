//! Aggregation of day traces into reported quantities: passenger-weighted
//! waiting times, fairness dispersions, per-class evolutions, and the
//! congestion-conditioned curves. Pure functions of the traces — nothing
//! here touches the simulator, so persisted traces reproduce every number
//! bit for bit.

use crate::aircraft::WeightClass;
use crate::error::{Error, Result};
use crate::trace::DayTrace;
use std::collections::BTreeMap;

/// One aircraft's contribution to the day's statistics. Waiting time runs
/// from ready to wheels-off (gate holding counts); taxi-out runs from
/// push-back to wheels-off.
#[derive(Clone, Debug, PartialEq)]
pub struct WaitRecord {
    pub wait_min: f64,
    pub taxi_out_min: f64,
    pub passengers: u32,
    pub class: WeightClass,
    pub airline: String,
    pub active_planes_at_ready: u32,
    pub planes_out_at_pushback: u32,
}

pub fn wait_records(trace: &DayTrace) -> Vec<WaitRecord> {
    trace
        .planes
        .iter()
        .map(|p| WaitRecord {
            wait_min: trace.minutes(p.wheelsoff_step - p.ready_step),
            taxi_out_min: trace.minutes(p.wheelsoff_step - p.pushback_step),
            passengers: p.passengers,
            class: p.class,
            airline: p.airline.clone(),
            active_planes_at_ready: p.active_planes_at_ready,
            planes_out_at_pushback: p.planes_out_at_pushback,
        })
        .collect()
}

/// Pool records over days in day order (deterministic reduction order).
pub fn pool_records(traces: &[DayTrace]) -> Vec<WaitRecord> {
    traces.iter().flat_map(|t| wait_records(t)).collect()
}

/// Average plane wait weighted by passengers per plane.
pub fn passenger_weighted_wait(records: &[WaitRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Runtime("passenger-weighted wait of an empty set".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for r in records {
        num += r.passengers as f64 * r.wait_min;
        den += r.passengers as f64;
    }
    Ok(num / den)
}

/// Unweighted mean plane wait.
pub fn plane_wait_mean(records: &[WaitRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Runtime("mean wait of an empty set".into()));
    }
    Ok(records.iter().map(|r| r.wait_min).sum::<f64>() / records.len() as f64)
}

fn population_std(values: impl Iterator<Item = f64> + Clone, n: usize) -> f64 {
    let mean = values.clone().sum::<f64>() / n as f64;
    (values.map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
}

/// Population standard deviation of plane waits, optionally restricted to
/// one weight class. Needs at least two records after filtering.
pub fn wait_std(records: &[WaitRecord], class: Option<WeightClass>) -> Result<f64> {
    let filtered: Vec<f64> = records
        .iter()
        .filter(|r| class.is_none_or(|c| r.class == c))
        .map(|r| r.wait_min)
        .collect();
    if filtered.len() < 2 {
        return Err(Error::Runtime(format!(
            "need at least 2 records for a standard deviation, got {}",
            filtered.len()
        )));
    }
    Ok(population_std(filtered.iter().copied(), filtered.len()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassStats {
    pub wait_mean_min: f64,
    pub wait_std_min: f64,
    pub count: usize,
}

/// Aggregate of one alpha point of a sweep. Per-class entries follow
/// [`WeightClass::ALL`] order and are `None` for classes absent from the
/// pooled records.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub passenger_wait_mean_min: f64,
    pub plane_wait_mean_min: f64,
    pub plane_wait_std_min: f64,
    pub per_class: [Option<ClassStats>; 3],
    /// Filled against the alpha = 0 baseline once the sweep is complete.
    pub benefit_pct: Option<f64>,
}

pub fn sweep_point(alpha: f64, records: &[WaitRecord]) -> Result<SweepPoint> {
    let passenger = passenger_weighted_wait(records)?;
    let mean = plane_wait_mean(records)?;
    let std = wait_std(records, None)?;
    let mut per_class = [None, None, None];
    for (slot, class) in per_class.iter_mut().zip(WeightClass::ALL) {
        let waits: Vec<f64> = records
            .iter()
            .filter(|r| r.class == class)
            .map(|r| r.wait_min)
            .collect();
        if !waits.is_empty() {
            let n = waits.len();
            *slot = Some(ClassStats {
                wait_mean_min: waits.iter().sum::<f64>() / n as f64,
                wait_std_min: population_std(waits.iter().copied(), n),
                count: n,
            });
        }
    }
    Ok(SweepPoint {
        alpha,
        passenger_wait_mean_min: passenger,
        plane_wait_mean_min: mean,
        plane_wait_std_min: std,
        per_class,
        benefit_pct: None,
    })
}

/// Passenger waiting-time benefit of `current` against the FCFS baseline,
/// in percent (positive when `current` waits less).
pub fn benefit_percent(current: &SweepPoint, baseline: &SweepPoint) -> Result<f64> {
    if !(baseline.passenger_wait_mean_min > 0.0) {
        return Err(Error::Runtime("benefit undefined for a zero baseline wait".into()));
    }
    Ok(100.0 * (baseline.passenger_wait_mean_min - current.passenger_wait_mean_min)
        / baseline.passenger_wait_mean_min)
}

/// Per-class waiting-time evolution against the same class at the
/// baseline, in percent (positive when the class waits longer).
pub fn per_type_evolution(
    current: &SweepPoint,
    baseline: &SweepPoint,
) -> Result<Vec<(WeightClass, f64)>> {
    let mut out = Vec::new();
    for (i, class) in WeightClass::ALL.into_iter().enumerate() {
        match (&current.per_class[i], &baseline.per_class[i]) {
            (None, None) => continue,
            (Some(cur), Some(base)) => {
                if !(base.wait_mean_min > 0.0) {
                    return Err(Error::Runtime(format!(
                        "zero baseline wait for class {}",
                        class.name()
                    )));
                }
                out.push((class, 100.0 * (cur.wait_mean_min - base.wait_mean_min) / base.wait_mean_min));
            }
            _ => {
                return Err(Error::Runtime(format!(
                    "class {} present at only one alpha point",
                    class.name()
                )))
            }
        }
    }
    Ok(out)
}

/// One alpha point of a sweep with its congestion-conditioned curves.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaOutcome {
    pub point: SweepPoint,
    pub wait_vs_active: BinnedCurve,
    pub taxi_std_vs_out: BinnedCurve,
}

/// Bins with fewer samples than this are flagged low-confidence.
pub const LOW_CONFIDENCE_BIN: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct CurveBin {
    pub bin: u32,
    pub value_min: f64,
    pub count: usize,
    pub low_confidence: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BinnedCurve {
    pub bins: Vec<CurveBin>,
}

impl BinnedCurve {
    pub fn bin(&self, key: u32) -> Option<&CurveBin> {
        self.bins.iter().find(|b| b.bin == key)
    }

    pub fn max_bin(&self) -> Option<u32> {
        self.bins.last().map(|b| b.bin)
    }
}

/// Passenger-weighted mean wait per active-plane count at ready.
pub fn wait_vs_active_planes(records: &[WaitRecord], bin_width: u32) -> BinnedCurve {
    let width = bin_width.max(1);
    let mut groups: BTreeMap<u32, (f64, f64, usize)> = BTreeMap::new();
    for r in records {
        let key = r.active_planes_at_ready / width * width;
        let g = groups.entry(key).or_insert((0.0, 0.0, 0));
        g.0 += r.passengers as f64 * r.wait_min;
        g.1 += r.passengers as f64;
        g.2 += 1;
    }
    BinnedCurve {
        bins: groups
            .into_iter()
            .map(|(bin, (num, den, count))| CurveBin {
                bin,
                value_min: num / den,
                count,
                low_confidence: count < LOW_CONFIDENCE_BIN,
            })
            .collect(),
    }
}

/// Taxi-out time standard deviation per planes-out count at push-back.
pub fn taxi_std_vs_planes_out(records: &[WaitRecord]) -> BinnedCurve {
    let mut groups: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry(r.planes_out_at_pushback).or_default().push(r.taxi_out_min);
    }
    BinnedCurve {
        bins: groups
            .into_iter()
            .map(|(bin, taxi)| CurveBin {
                bin,
                value_min: population_std(taxi.iter().copied(), taxi.len()),
                count: taxi.len(),
                low_confidence: taxi.len() < LOW_CONFIDENCE_BIN,
            })
            .collect(),
    }
}
