//! Per-day event log: one record per aircraft plus per-step runway counts.
//! Every reported quantity is recomputed from these traces, so they only
//! carry integers and names — reading a persisted trace back reproduces
//! the originals bit for bit.

use crate::aircraft::WeightClass;
use crate::airside::graph::NodeId;
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

/// Lifecycle of one departed aircraft, all times in step indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneRecord {
    pub tag: String,
    pub airline: String,
    pub class: WeightClass,
    pub passengers: u32,
    pub ready_step: u32,
    pub pushback_step: u32,
    pub queue_entry_step: u32,
    pub wheelsoff_step: u32,
    /// Planes taxiing or queued when this aircraft pushed back (excluding itself).
    pub planes_out_at_pushback: u32,
    /// Aircraft between ready and wheels-off when this one became ready (including itself).
    pub active_planes_at_ready: u32,
}

/// Per-runway counts for one step, recorded after service.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunwayStep {
    pub planes_out: u32,
    pub takeoffs: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub step: u32,
    pub runways: Vec<RunwayStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DayTrace {
    pub step_seconds: u32,
    pub runway_nodes: Vec<NodeId>,
    pub planes: Vec<PlaneRecord>,
    pub steps: Vec<StepRecord>,
}

pub const PLANES_HEADER: &str = "tag,airline,class,passengers,ready_step,pushback_step,queue_entry_step,wheelsoff_step,planes_out_at_pushback,active_planes_at_ready";

impl DayTrace {
    pub fn minutes(&self, steps: u32) -> f64 {
        steps as f64 * self.step_seconds as f64 / 60.0
    }

    pub fn total_takeoffs(&self) -> u32 {
        self.planes.len() as u32
    }

    /// Takeoffs with wheels-off strictly before `step`.
    pub fn takeoffs_before(&self, step: u32) -> u32 {
        self.planes.iter().filter(|p| p.wheelsoff_step < step).count() as u32
    }

    pub fn max_planes_out(&self) -> u32 {
        self.steps
            .iter()
            .map(|s| s.runways.iter().map(|r| r.planes_out).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn write_planes_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{PLANES_HEADER}")?;
        for p in &self.planes {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                p.tag,
                p.airline,
                p.class.code(),
                p.passengers,
                p.ready_step,
                p.pushback_step,
                p.queue_entry_step,
                p.wheelsoff_step,
                p.planes_out_at_pushback,
                p.active_planes_at_ready
            )?;
        }
        Ok(())
    }

    pub fn write_steps_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "step")?;
        for node in &self.runway_nodes {
            write!(w, ",planes_out_r{node},takeoffs_r{node}")?;
        }
        writeln!(w)?;
        for s in &self.steps {
            write!(w, "{}", s.step)?;
            for r in &s.runways {
                write!(w, ",{},{}", r.planes_out, r.takeoffs)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Read back a planes CSV written by [`write_planes_csv`].
    pub fn read_planes_csv<R: BufRead>(reader: R, step_seconds: u32) -> Result<DayTrace> {
        let mut planes = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Runtime(format!("trace read: {e}")))?;
            if lineno == 0 {
                if line != PLANES_HEADER {
                    return Err(Error::Input(format!("unexpected trace header: {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(Error::Input(format!(
                    "trace line {}: expected 10 fields, got {}",
                    lineno + 1,
                    f.len()
                )));
            }
            let num = |s: &str| -> Result<u32> {
                s.parse::<u32>()
                    .map_err(|_| Error::Input(format!("trace line {}: bad number {s:?}", lineno + 1)))
            };
            planes.push(PlaneRecord {
                tag: f[0].to_string(),
                airline: f[1].to_string(),
                class: f[2]
                    .chars()
                    .next()
                    .and_then(WeightClass::from_code)
                    .ok_or_else(|| {
                        Error::Input(format!("trace line {}: bad class {:?}", lineno + 1, f[2]))
                    })?,
                passengers: num(f[3])?,
                ready_step: num(f[4])?,
                pushback_step: num(f[5])?,
                queue_entry_step: num(f[6])?,
                wheelsoff_step: num(f[7])?,
                planes_out_at_pushback: num(f[8])?,
                active_planes_at_ready: num(f[9])?,
            });
        }
        Ok(DayTrace {
            step_seconds,
            runway_nodes: Vec::new(),
            planes,
            steps: Vec::new(),
        })
    }

    /// Phase timestamps must be non-decreasing for every aircraft.
    pub fn check_monotone(&self) -> Result<()> {
        for p in &self.planes {
            if !(p.ready_step <= p.pushback_step
                && p.pushback_step <= p.queue_entry_step
                && p.queue_entry_step <= p.wheelsoff_step)
            {
                return Err(Error::Runtime(format!(
                    "non-monotone timestamps for {}: ready {} pushback {} queue {} wheelsoff {}",
                    p.tag, p.ready_step, p.pushback_step, p.queue_entry_step, p.wheelsoff_step
                )));
            }
        }
        Ok(())
    }
}
