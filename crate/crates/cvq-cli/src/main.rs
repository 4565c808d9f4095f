//! Experiment harness for the departure simulator: single days, alpha
//! sweeps, airline-distribution scenarios, calibration, and config checks.
//!
//! Exit codes: 0 success, 2 configuration/input error, 3 runtime error.

use clap::{Parser, Subcommand};
use cvq_sim::calibrate::{
    fit_runway_bernoullis, fit_stop_probability, RunwayCalibrationTarget, TaxiCalibrationTarget,
};
use cvq_sim::metrics::{self, AlphaOutcome};
use cvq_sim::rng::derive_seed;
use cvq_sim::sweep;
use cvq_sim::{Error, SimConfig, Validated};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cvq", version, about = "Collaborative virtual queue departure simulator")]
struct Cli {
    /// Experiment configuration file (TOML)
    #[arg(long, global = true, default_value = "configs/boston.toml")]
    config: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one day and print a summary
    Run {
        /// Master seed override
        #[arg(long)]
        seed: Option<u64>,
        /// Policy alpha override
        #[arg(long)]
        alpha: Option<f64>,
        /// Write the day trace into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep alpha over batches of seeded days and emit result CSVs
    Sweep {
        #[arg(long)]
        seed: Option<u64>,
        /// Days per alpha
        #[arg(long)]
        days: Option<u32>,
        /// Alpha grid: "start:step:end" or comma list (default 0:0.05:1)
        #[arg(long)]
        alpha: Option<String>,
        /// Airline distribution: monopoly|top5|top10|custom:<path>
        #[arg(long)]
        distribution: Option<String>,
        /// Output directory for sweep.csv, curves.csv, traces/, provenance
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one sweep per airline distribution and compare benefits
    Scenarios {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        days: Option<u32>,
        #[arg(long)]
        alpha: Option<String>,
        /// Comma list of distributions (empty string for a no-op)
        #[arg(long, default_value = "monopoly,top5,top10")]
        distributions: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit taxi and runway parameters from observation files
    Calibrate {
        /// Unimpeded taxi-out durations, one per line, minutes
        #[arg(long)]
        taxi_samples: PathBuf,
        /// Take-off rate targets file: "runway_mean <per-step>" and "runway_std <per-step>" lines
        #[arg(long)]
        runway_targets: PathBuf,
        /// Write the fitted config fragment here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate the configuration, printing a summary
    ValidateConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<(SimConfig, Option<PathBuf>), Error> {
    let cfg = SimConfig::from_path(&cli.config)?;
    let base = cli.config.parent().map(Path::to_path_buf);
    Ok((cfg, base))
}

fn apply_distribution(cfg: &mut SimConfig, spec: &str) -> Result<(), Error> {
    match spec {
        "monopoly" | "top5" | "top10" => cfg.traffic.distribution = spec.to_string(),
        _ => match spec.strip_prefix("custom:") {
            Some(path) if !path.is_empty() => {
                cfg.traffic.distribution = "custom".to_string();
                cfg.traffic.custom_distribution_path = Some(PathBuf::from(path));
            }
            _ => {
                return Err(Error::Input(format!(
                    "bad --distribution {spec:?} (monopoly|top5|top10|custom:<path>)"
                )))
            }
        },
    }
    Ok(())
}

fn validated(cfg: &SimConfig, base: Option<&Path>) -> Result<Validated, Error> {
    let v = cfg.validate(base)?;
    for w in v.traffic.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(v)
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Run { seed, alpha, out } => {
            let (mut cfg, base) = load_config(cli)?;
            if let Some(s) = seed {
                cfg.seeds.master_seed = *s;
            }
            if let Some(a) = alpha {
                cfg.policy.alpha = *a;
            }
            let v = validated(&cfg, base.as_deref())?;
            run_one_day(&v, out.as_deref())
        }
        Command::Sweep { seed, days, alpha, distribution, out } => {
            let (mut cfg, base) = load_config(cli)?;
            if let Some(s) = seed {
                cfg.seeds.master_seed = *s;
            }
            if let Some(d) = days {
                cfg.seeds.n_days = *d;
            }
            if let Some(spec) = distribution {
                apply_distribution(&mut cfg, spec)?;
            }
            let grid = match alpha {
                Some(spec) => sweep::parse_alpha_grid(spec)?,
                None => sweep::default_alpha_grid(),
            };
            let v = validated(&cfg, base.as_deref())?;
            let trace_dir = out.as_ref().map(|d| d.join("traces"));
            let result = sweep::sweep_alpha(&v, &grid, trace_dir.as_deref())?;
            if let Some(dir) = out {
                sweep::emit_results(&result, dir)?;
                println!("wrote {}", dir.display());
            }
            print_sweep_table(&result.outcomes);
            Ok(())
        }
        Command::Scenarios { seed, days, alpha, distributions, out } => {
            let (mut cfg, base) = load_config(cli)?;
            if let Some(s) = seed {
                cfg.seeds.master_seed = *s;
            }
            if let Some(d) = days {
                cfg.seeds.n_days = *d;
            }
            let grid = match alpha {
                Some(spec) => sweep::parse_alpha_grid(spec)?,
                None => sweep::default_alpha_grid(),
            };
            let modes: Vec<String> = distributions
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            let results =
                sweep::run_scenarios(&cfg, base.as_deref(), &modes, &grid, out.as_deref())?;
            print_scenario_comparison(&results);
            Ok(())
        }
        Command::Calibrate { taxi_samples, runway_targets, out } => {
            let (cfg, base) = load_config(cli)?;
            let v = validated(&cfg, base.as_deref())?;
            calibrate(&cfg, &v, taxi_samples, runway_targets, out.as_deref())
        }
        Command::ValidateConfig => {
            let (cfg, base) = load_config(cli)?;
            let v = validated(&cfg, base.as_deref())?;
            println!("config ok: fingerprint {:016x}", v.fingerprint);
            println!(
                "  runways: {}, gates: {}, load limit: {}",
                v.world.runways.len(),
                v.world.graph.gates().len(),
                v.world
                    .load_limit
                    .map(|l| l.to_string())
                    .unwrap_or_else(|| "disabled".to_string()),
            );
            println!("  days: {}, master seed: {}", v.n_days, v.master_seed);
            Ok(())
        }
    }
}

fn run_one_day(v: &Validated, out: Option<&Path>) -> Result<(), Error> {
    let day_seed = derive_seed(v.master_seed, "day", 0);
    let schedule = v.traffic.schedule_for_day(&v.world, day_seed)?;
    let trace = cvq_sim::run_day(&v.world, &schedule, day_seed)?;
    let records = metrics::wait_records(&trace);

    println!("flights: {}", trace.planes.len());
    if !records.is_empty() {
        let taxi_mean =
            records.iter().map(|r| r.taxi_out_min).sum::<f64>() / records.len() as f64;
        println!("passenger wait mean: {:.2} min", metrics::passenger_weighted_wait(&records)?);
        println!("plane wait mean:     {:.2} min", metrics::plane_wait_mean(&records)?);
        println!("taxi-out mean:       {taxi_mean:.2} min");
        println!("max planes out:      {}", trace.max_planes_out());
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let planes = dir.join("day.csv");
        let f = std::fs::File::create(&planes).map_err(|e| Error::io(&planes, e))?;
        trace.write_planes_csv(f).map_err(|e| Error::io(&planes, e))?;
        let steps = dir.join("day.steps.csv");
        let f = std::fs::File::create(&steps).map_err(|e| Error::io(&steps, e))?;
        trace.write_steps_csv(f).map_err(|e| Error::io(&steps, e))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn print_sweep_table(outcomes: &[AlphaOutcome]) {
    println!(
        "{:>6} {:>14} {:>12} {:>11} {:>9}",
        "alpha", "pax_wait_min", "wait_min", "wait_std", "benefit%"
    );
    for o in outcomes {
        let p = &o.point;
        println!(
            "{:>6.2} {:>14.3} {:>12.3} {:>11.3} {:>9}",
            p.alpha,
            p.passenger_wait_mean_min,
            p.plane_wait_mean_min,
            p.plane_wait_std_min,
            p.benefit_pct.map(|b| format!("{b:.2}")).unwrap_or_default(),
        );
    }
}

fn print_scenario_comparison(results: &[(String, sweep::SweepResult)]) {
    if results.is_empty() {
        println!("no distributions requested");
        return;
    }
    println!("{:>10} {:>16} {:>16} {:>12}", "scenario", "pax_wait@a=0", "pax_wait@a=1", "benefit@a=1");
    for (name, result) in results {
        let base = result.outcome_at(0.0);
        let top = result.outcome_at(1.0);
        let fmt = |o: Option<&AlphaOutcome>, f: fn(&AlphaOutcome) -> Option<f64>| {
            o.and_then(f).map(|v| format!("{v:.3}")).unwrap_or_default()
        };
        println!(
            "{:>10} {:>16} {:>16} {:>12}",
            name,
            fmt(base, |o| Some(o.point.passenger_wait_mean_min)),
            fmt(top, |o| Some(o.point.passenger_wait_mean_min)),
            fmt(top, |o| o.point.benefit_pct),
        );
    }
}

fn calibrate(
    cfg: &SimConfig,
    v: &Validated,
    taxi_samples: &Path,
    runway_targets: &Path,
    out: Option<&Path>,
) -> Result<(), Error> {
    let samples_text =
        std::fs::read_to_string(taxi_samples).map_err(|e| Error::read(taxi_samples, e))?;
    let target = TaxiCalibrationTarget::parse(&samples_text)?;
    let path_length = v.world.mean_path_length();
    let taxi_fit = fit_stop_probability(
        &target,
        path_length,
        cfg.taxi.step_distance_m,
        cfg.sim.step_seconds,
    )?;

    let targets_text =
        std::fs::read_to_string(runway_targets).map_err(|e| Error::read(runway_targets, e))?;
    let mut mean = None;
    let mut std = None;
    for (lineno, line) in targets_text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let key = it.next().unwrap();
        let value = it.next().and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| {
            Error::Input(format!("targets line {}: expected <key> <number>", lineno + 1))
        })?;
        match key {
            "runway_mean" => mean = Some(value),
            "runway_std" => std = Some(value),
            _ => {
                return Err(Error::Input(format!(
                    "targets line {}: unknown key {key:?} (runway_mean|runway_std)",
                    lineno + 1
                )))
            }
        }
    }
    let mean = mean.ok_or_else(|| Error::Input("targets file missing runway_mean".into()))?;
    let std = std.ok_or_else(|| Error::Input("targets file missing runway_std".into()))?;
    let (p1, p2) = fit_runway_bernoullis(&RunwayCalibrationTarget { mean_rate: mean, std_rate: std })?;

    let fragment = format!(
        "# fitted from {} and {}\n# taxi fit: k = {} cells, sample mean {:.3} steps, \
         sample var {:.3} vs analytic var {:.3} (diagnostic)\n\n[taxi]\np_stop = {:.6}\n\
         step_distance_m = {:.1}\n\n[[runway]]\nnode = {}\np1 = {:.6}\np2 = {:.6}\n",
        taxi_samples.display(),
        runway_targets.display(),
        taxi_fit.path_cells,
        taxi_fit.sample_mean_steps,
        taxi_fit.sample_var_steps,
        taxi_fit.analytic_var_steps,
        taxi_fit.p_stop,
        cfg.taxi.step_distance_m,
        cfg.runways.first().map(|r| r.node).unwrap_or(9),
        p1,
        p2,
    );
    match out {
        Some(path) => {
            std::fs::write(path, &fragment).map_err(|e| Error::io(path, e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{fragment}"),
    }
    Ok(())
}
