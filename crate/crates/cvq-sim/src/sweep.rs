//! Experiment harness: alpha sweeps over many seeded days, scenario
//! comparisons across airline distributions, and CSV emission.
//!
//! Common random numbers: day i draws its schedule, taxi, and runway
//! streams from `derive_seed(master, "day", i)` only — the policy alpha
//! never enters seeding — so every alpha sees identical demand and
//! identical stochastic events, isolating the policy effect.

use crate::config::{SimConfig, TrafficPlan, Validated};
use crate::error::{Error, Result};
use crate::metrics::{
    benefit_percent, pool_records, sweep_point, taxi_std_vs_planes_out, wait_vs_active_planes,
    AlphaOutcome,
};
use crate::rng::derive_seed;
use crate::sim::run_day;
use crate::trace::DayTrace;
use crate::traffic::Schedule;
use rayon::prelude::*;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// The reference grid: alpha from 0 to 1 in 0.05 steps, 21 points.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).collect()
}

/// Parse an alpha grid argument: either `start:step:end` (inclusive) or a
/// comma-separated list.
pub fn parse_alpha_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Input(format!("alpha grid {spec:?}: {msg}"));
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(format!("not a number: {s:?}")))
    };
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:end".into()));
        }
        let (start, step, end) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if !(step > 0.0) || end < start {
            return Err(bad("need step > 0 and end >= start".into()));
        }
        let n = ((end - start) / step).round() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        spec.split(',')
            .map(parse)
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid".into()));
    }
    if values.iter().any(|a| !(0.0..=1.0 + 1e-12).contains(a)) {
        return Err(bad("alpha values must lie in [0, 1]".into()));
    }
    Ok(values.into_iter().map(|a| a.min(1.0)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub config_fingerprint: u64,
    pub master_seed: u64,
    pub n_days: u32,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub outcomes: Vec<AlphaOutcome>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn outcome_at(&self, alpha: f64) -> Option<&AlphaOutcome> {
        self.outcomes
            .iter()
            .find(|o| (o.point.alpha - alpha).abs() < 1e-9)
    }
}

fn day_seeds(master_seed: u64, n_days: u32) -> Vec<u64> {
    (0..n_days).map(|i| derive_seed(master_seed, "day", i as u64)).collect()
}

/// Generate (or reuse) the per-day schedules shared by every alpha.
fn schedules_for_days(v: &Validated, seeds: &[u64]) -> Result<Vec<Schedule>> {
    match &v.traffic {
        TrafficPlan::Replay { schedule, .. } => Ok(vec![schedule.clone(); seeds.len()]),
        plan => seeds
            .par_iter()
            .map(|s| plan.schedule_for_day(&v.world, *s))
            .collect(),
    }
}

fn alpha_dir_name(alpha: f64) -> String {
    format!("alpha_{alpha:.6}")
}

fn write_day_trace(dir: &Path, day: usize, trace: &DayTrace) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let planes = dir.join(format!("day_{day:05}.csv"));
    let mut f = fs::File::create(&planes).map_err(|e| Error::io(&planes, e))?;
    trace.write_planes_csv(&mut f).map_err(|e| Error::io(&planes, e))?;
    let steps = dir.join(format!("day_{day:05}.steps.csv"));
    let mut f = fs::File::create(&steps).map_err(|e| Error::io(&steps, e))?;
    trace.write_steps_csv(&mut f).map_err(|e| Error::io(&steps, e))?;
    Ok(())
}

/// Run the full day batch for every alpha on common random numbers and
/// aggregate each into an [`AlphaOutcome`]. When `trace_dir` is given,
/// per-day traces are persisted under `trace_dir/alpha_*/day_*.csv`.
pub fn sweep_alpha(v: &Validated, grid: &[f64], trace_dir: Option<&Path>) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Input("empty alpha grid".into()));
    }
    let seeds = day_seeds(v.master_seed, v.n_days);
    let schedules = schedules_for_days(v, &seeds)?;

    let mut outcomes = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let world = v.world.with_alpha(alpha);
        let traces: Vec<DayTrace> = seeds
            .par_iter()
            .zip(schedules.par_iter())
            .map(|(seed, schedule)| run_day(&world, schedule, *seed))
            .collect::<Result<_>>()
            .map_err(|e| Error::Runtime(format!("alpha {alpha:.3}: {e}")))?;
        if let Some(dir) = trace_dir {
            let adir = dir.join(alpha_dir_name(alpha));
            for (day, trace) in traces.iter().enumerate() {
                write_day_trace(&adir, day, trace)?;
            }
        }
        let records = pool_records(&traces);
        let point = sweep_point(alpha, &records)
            .map_err(|e| Error::Runtime(format!("alpha {alpha:.3}: {e}")))?;
        outcomes.push(AlphaOutcome {
            point,
            wait_vs_active: wait_vs_active_planes(&records, 1),
            taxi_std_vs_out: taxi_std_vs_planes_out(&records),
        });
    }
    fill_benefits(&mut outcomes)?;
    Ok(SweepResult {
        outcomes,
        provenance: Provenance {
            config_fingerprint: v.fingerprint,
            master_seed: v.master_seed,
            n_days: v.n_days,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

/// Fill benefit percentages against the alpha = 0 point, when present.
fn fill_benefits(outcomes: &mut [AlphaOutcome]) -> Result<()> {
    let baseline = outcomes
        .iter()
        .find(|o| o.point.alpha.abs() < 1e-9)
        .map(|o| o.point.clone());
    if let Some(baseline) = baseline {
        for o in outcomes.iter_mut() {
            o.point.benefit_pct = Some(benefit_percent(&o.point, &baseline)?);
        }
    }
    Ok(())
}

/// One sweep per airline distribution; the CLI renders the benefit
/// comparison at alpha = 1. `modes` entries are config distribution names.
pub fn run_scenarios(
    cfg: &SimConfig,
    base_dir: Option<&Path>,
    modes: &[String],
    grid: &[f64],
    out_dir: Option<&Path>,
) -> Result<Vec<(String, SweepResult)>> {
    let mut results = Vec::new();
    for mode in modes {
        let mut scenario_cfg = cfg.clone();
        scenario_cfg.traffic.distribution = mode.clone();
        let v = scenario_cfg.validate(base_dir)?;
        let trace_dir = out_dir.map(|d| d.join(mode).join("traces"));
        let result = sweep_alpha(&v, grid, trace_dir.as_deref())?;
        if let Some(dir) = out_dir {
            emit_results(&result, &dir.join(mode))?;
        }
        results.push((mode.clone(), result));
    }
    Ok(results)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// `sweep.csv`: one row per alpha with the headline means, dispersion,
/// benefit, and per-class means/stds. Fixed 6 decimal places.
pub fn write_sweep_csv<W: Write>(outcomes: &[AlphaOutcome], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "alpha,passenger_wait_mean_min,plane_wait_mean_min,plane_wait_std_min,benefit_pct,\
         heavy_wait_mean_min,heavy_wait_std_min,large_wait_mean_min,large_wait_std_min,\
         small_wait_mean_min,small_wait_std_min"
    )?;
    for o in outcomes {
        let p = &o.point;
        let class_cols: Vec<String> = p
            .per_class
            .iter()
            .flat_map(|c| {
                [
                    fmt_opt(c.as_ref().map(|s| s.wait_mean_min)),
                    fmt_opt(c.as_ref().map(|s| s.wait_std_min)),
                ]
            })
            .collect();
        writeln!(
            w,
            "{:.6},{:.6},{:.6},{:.6},{},{}",
            p.alpha,
            p.passenger_wait_mean_min,
            p.plane_wait_mean_min,
            p.plane_wait_std_min,
            fmt_opt(p.benefit_pct),
            class_cols.join(",")
        )?;
    }
    Ok(())
}

/// `curves.csv`: tidy rows for the wait-vs-active-planes and
/// taxi-std-vs-planes-out curves of every alpha.
pub fn write_curves_csv<W: Write>(outcomes: &[AlphaOutcome], mut w: W) -> std::io::Result<()> {
    writeln!(w, "curve,alpha,bin,value_min,count,low_confidence")?;
    for o in outcomes {
        for (name, curve) in [
            ("wait_vs_active_planes", &o.wait_vs_active),
            ("taxi_std_vs_planes_out", &o.taxi_std_vs_out),
        ] {
            for b in &curve.bins {
                writeln!(
                    w,
                    "{name},{:.6},{},{:.6},{},{}",
                    o.point.alpha, b.bin, b.value_min, b.count, b.low_confidence
                )?;
            }
        }
    }
    Ok(())
}

/// Write `sweep.csv`, `curves.csv`, and the provenance record into
/// `out_dir`. Per-day traces land in `out_dir/traces` when the sweep was
/// run with that trace directory. Every emitted byte except the provenance
/// timestamp is determined by (config, master seed).
pub fn emit_results(result: &SweepResult, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let sweep_path = out_dir.join("sweep.csv");
    let mut f = fs::File::create(&sweep_path).map_err(|e| Error::io(&sweep_path, e))?;
    write_sweep_csv(&result.outcomes, &mut f).map_err(|e| Error::io(&sweep_path, e))?;

    let curves_path = out_dir.join("curves.csv");
    let mut f = fs::File::create(&curves_path).map_err(|e| Error::io(&curves_path, e))?;
    write_curves_csv(&result.outcomes, &mut f).map_err(|e| Error::io(&curves_path, e))?;

    let prov_path = out_dir.join("provenance.txt");
    let unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let p = &result.provenance;
    let text = format!(
        "config_fingerprint={:016x}\nmaster_seed={}\nn_days={}\nversion={}\ngenerated_unix={}\n",
        p.config_fingerprint, p.master_seed, p.n_days, p.version, unix
    );
    fs::write(&prov_path, text).map_err(|e| Error::io(&prov_path, e))?;
    Ok(())
}

/// Re-aggregate outcomes from persisted per-day traces, in alpha order.
/// Feeding these to the CSV writers must reproduce the original files.
pub fn recompute_outcomes(traces_dir: &Path, step_seconds: u32) -> Result<Vec<AlphaOutcome>> {
    let mut alpha_dirs: Vec<(f64, PathBuf)> = Vec::new();
    let entries = fs::read_dir(traces_dir).map_err(|e| Error::io(traces_dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(traces_dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(rest) = name.strip_prefix("alpha_") {
            let alpha = rest
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("bad trace directory name {name:?}")))?;
            alpha_dirs.push((alpha, entry.path()));
        }
    }
    if alpha_dirs.is_empty() {
        return Err(Error::Input(format!(
            "no alpha_* trace directories under {}",
            traces_dir.display()
        )));
    }
    alpha_dirs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut outcomes = Vec::with_capacity(alpha_dirs.len());
    for (alpha, dir) in alpha_dirs {
        let mut day_files: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("day_") && n.ends_with(".csv") && !n.ends_with(".steps.csv"))
            })
            .collect();
        day_files.sort();
        let mut traces = Vec::with_capacity(day_files.len());
        for path in day_files {
            let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            traces.push(DayTrace::read_planes_csv(std::io::BufReader::new(file), step_seconds)?);
        }
        let records = pool_records(&traces);
        outcomes.push(AlphaOutcome {
            point: sweep_point(alpha, &records)?,
            wait_vs_active: wait_vs_active_planes(&records, 1),
            taxi_std_vs_out: taxi_std_vs_planes_out(&records),
        });
    }
    fill_benefits(&mut outcomes)?;
    Ok(outcomes)
}
