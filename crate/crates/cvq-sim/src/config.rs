//! TOML experiment configuration. Every model parameter has a named key;
//! the defaults reproduce the reference scenario (load limit 9, w1/w2 = 4,
//! top-10 airline mix, the bundled lattice, 64 days). `validate` resolves
//! files and cross-checks everything into a runnable [`World`] plus a
//! traffic plan.

use crate::airside::graph::{NodeId, TaxiwayGraph};
use crate::error::{Error, Result};
use crate::policy::PolicyParams;
use crate::rng::derive_stream;
use crate::sim::{RunwayParams, World};
use crate::traffic::{
    load_schedule, synth_schedule, AirlineDistribution, ClassMix, DistributionMode, FleetMix,
    Schedule,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Bundled lattice approximating the runway-9 departure topology.
pub const DEFAULT_LATTICE: &str = include_str!("../data/lattice.txt");

/// Default hourly demand profile (relative weights): morning and late
/// afternoon peaks over a busy midday plateau.
pub const DEFAULT_RATE_PROFILE: [f64; 24] = [
    5.0, 3.0, 2.0, 2.0, 4.0, 12.0, 29.0, 45.0, 43.0, 39.0, 37.0, 37.0, 37.0, 37.0, 39.0, 41.0,
    45.0, 45.0, 41.0, 37.0, 29.0, 19.0, 11.0, 6.0,
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub step_seconds: u32,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection { step_seconds: 30 }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    /// Lattice file path; the bundled default lattice when absent.
    pub path: Option<PathBuf>,
}

/// Gate-holding threshold. Absent key or 0 disables the CVQ (infinite
/// limit); the reference scenario sets 9.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvqSection {
    pub load_limit: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaxiSection {
    pub p_stop: f64,
    pub step_distance_m: f64,
}

impl Default for TaxiSection {
    fn default() -> Self {
        TaxiSection { p_stop: 0.22, step_distance_m: 250.0 }
    }
}

fn default_runways() -> Vec<RunwaySection> {
    vec![RunwaySection { node: 9, p1: 0.165, p2: 0.165 }]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunwaySection {
    pub node: u32,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficSection {
    /// "synthetic" or "replay".
    pub mode: String,
    pub n_flights: u32,
    /// 24 hourly demand weights.
    pub rate_profile: Vec<f64>,
    /// "monopoly", "top5", "top10", or "custom".
    pub distribution: String,
    /// Shares file for distribution = "custom".
    pub custom_distribution_path: Option<PathBuf>,
    /// Schedule file for mode = "replay".
    pub schedule_path: Option<PathBuf>,
}

impl Default for TrafficSection {
    fn default() -> Self {
        TrafficSection {
            mode: "synthetic".into(),
            n_flights: 608,
            rate_profile: DEFAULT_RATE_PROFILE.to_vec(),
            distribution: "top10".into(),
            custom_distribution_path: None,
            schedule_path: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSection {
    pub share: f64,
    pub seats: u32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetSection {
    pub heavy: ClassSection,
    pub large: ClassSection,
    pub small: ClassSection,
}

impl Default for FleetSection {
    fn default() -> Self {
        FleetSection {
            heavy: ClassSection { share: 0.1673, seats: 214 },
            large: ClassSection { share: 0.7721, seats: 97 },
            small: ClassSection { share: 0.0606, seats: 4 },
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedsSection {
    pub master_seed: u64,
    pub n_days: u32,
}

impl Default for SeedsSection {
    fn default() -> Self {
        SeedsSection { master_seed: 20060101, n_days: 64 }
    }
}

/// Note the section defaults: a file that omits `[cvq]` (or its
/// `load_limit` key) runs with gate holding disabled, while the
/// programmatic [`SimConfig::default`] is the full reference scenario
/// with the limit at 9.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub cvq: CvqSection,
    #[serde(default)]
    pub policy: PolicyParams,
    #[serde(default)]
    pub taxi: TaxiSection,
    #[serde(rename = "runway", default = "default_runways")]
    pub runways: Vec<RunwaySection>,
    #[serde(default)]
    pub traffic: TrafficSection,
    #[serde(default)]
    pub fleet: FleetSection,
    #[serde(default)]
    pub seeds: SeedsSection,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            sim: SimSection::default(),
            lattice: LatticeSection::default(),
            // reference scenario: gate holding at 9 planes out
            cvq: CvqSection { load_limit: Some(9) },
            policy: PolicyParams::default(),
            taxi: TaxiSection::default(),
            runways: default_runways(),
            traffic: TrafficSection::default(),
            fleet: FleetSection::default(),
            seeds: SeedsSection::default(),
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<SimConfig> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<SimConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Stable 64-bit fingerprint of the effective configuration.
    pub fn fingerprint(&self) -> u64 {
        let text = self.to_toml_string();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    /// Resolve files (relative to `base_dir` when given), cross-check all
    /// parameters, and build the runnable pieces.
    pub fn validate(&self, base_dir: Option<&Path>) -> Result<Validated> {
        let resolve = |p: &PathBuf| -> PathBuf {
            match base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p.clone(),
            }
        };

        let lattice_text = match &self.lattice.path {
            Some(p) => {
                let p = resolve(p);
                std::fs::read_to_string(&p).map_err(|e| Error::read(&p, e))?
            }
            None => DEFAULT_LATTICE.to_string(),
        };
        let graph = TaxiwayGraph::parse(&lattice_text)?;

        let fleet = FleetMix {
            classes: [
                ClassMix { share: self.fleet.heavy.share, avg_seats: self.fleet.heavy.seats },
                ClassMix { share: self.fleet.large.share, avg_seats: self.fleet.large.seats },
                ClassMix { share: self.fleet.small.share, avg_seats: self.fleet.small.seats },
            ],
        };
        fleet.validate()?;

        let runways: Vec<RunwayParams> = self
            .runways
            .iter()
            .map(|r| RunwayParams { node: NodeId(r.node), p1: r.p1, p2: r.p2 })
            .collect();
        let load_limit = match self.cvq.load_limit {
            None | Some(0) => None,
            Some(n) => Some(n),
        };
        let world = World::new(
            graph,
            runways,
            self.taxi.step_distance_m,
            self.taxi.p_stop,
            self.policy,
            load_limit,
            self.sim.step_seconds,
        )?;

        let traffic = match self.traffic.mode.as_str() {
            "synthetic" => {
                if self.traffic.rate_profile.len() != 24 {
                    return Err(Error::Config(format!(
                        "traffic.rate_profile needs 24 hourly weights, got {}",
                        self.traffic.rate_profile.len()
                    )));
                }
                let mut rate_profile = [0.0; 24];
                rate_profile.copy_from_slice(&self.traffic.rate_profile);
                if rate_profile.iter().any(|r| !r.is_finite() || *r < 0.0) {
                    return Err(Error::Config("traffic.rate_profile weights must be non-negative".into()));
                }
                if self.traffic.n_flights > 0 && rate_profile.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::Config(
                        "traffic.rate_profile is all zero but n_flights > 0".into(),
                    ));
                }
                let distribution = match self.traffic.distribution.as_str() {
                    "monopoly" => AirlineDistribution::named(DistributionMode::Monopoly),
                    "top5" => AirlineDistribution::named(DistributionMode::Top5),
                    "top10" => AirlineDistribution::named(DistributionMode::Top10),
                    "custom" => {
                        let p = self.traffic.custom_distribution_path.as_ref().ok_or_else(|| {
                            Error::Config(
                                "traffic.distribution = custom needs traffic.custom_distribution_path"
                                    .into(),
                            )
                        })?;
                        let p = resolve(p);
                        let text = std::fs::read_to_string(&p).map_err(|e| Error::read(&p, e))?;
                        AirlineDistribution::parse_custom(&text)?
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "unknown traffic.distribution {other:?} (monopoly|top5|top10|custom)"
                        )))
                    }
                };
                TrafficPlan::Synthetic {
                    n_flights: self.traffic.n_flights,
                    rate_profile,
                    fleet,
                    distribution,
                }
            }
            "replay" => {
                let p = self.traffic.schedule_path.as_ref().ok_or_else(|| {
                    Error::Config("traffic.mode = replay needs traffic.schedule_path".into())
                })?;
                let p = resolve(p);
                let text = std::fs::read_to_string(&p).map_err(|e| Error::read(&p, e))?;
                let (schedule, warnings) =
                    load_schedule(&text, &world.graph, &fleet, self.sim.step_seconds)?;
                TrafficPlan::Replay { schedule, warnings }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown traffic.mode {other:?} (synthetic|replay)"
                )))
            }
        };

        if self.seeds.n_days == 0 {
            return Err(Error::Config("seeds.n_days must be at least 1".into()));
        }

        Ok(Validated {
            world,
            traffic,
            master_seed: self.seeds.master_seed,
            n_days: self.seeds.n_days,
            fingerprint: self.fingerprint(),
        })
    }
}

/// Where each day's demand comes from.
#[derive(Clone, Debug)]
pub enum TrafficPlan {
    Synthetic {
        n_flights: u32,
        rate_profile: [f64; 24],
        fleet: FleetMix,
        distribution: AirlineDistribution,
    },
    Replay {
        schedule: Schedule,
        warnings: Vec<String>,
    },
}

impl TrafficPlan {
    /// The schedule simulated on `day_seed`. Synthetic demand is drawn from
    /// the day's schedule stream; replay reuses the loaded file.
    pub fn schedule_for_day(&self, world: &World, day_seed: u64) -> Result<Schedule> {
        match self {
            TrafficPlan::Synthetic { n_flights, rate_profile, fleet, distribution } => {
                let mut rng = derive_stream(day_seed, "schedule", 0);
                synth_schedule(
                    *n_flights,
                    rate_profile,
                    fleet,
                    distribution,
                    &world.graph,
                    world.step_seconds,
                    &mut rng,
                )
            }
            TrafficPlan::Replay { schedule, .. } => Ok(schedule.clone()),
        }
    }

    pub fn warnings(&self) -> &[String] {
        match self {
            TrafficPlan::Replay { warnings, .. } => warnings,
            _ => &[],
        }
    }
}

/// A validated, runnable configuration.
#[derive(Clone, Debug)]
pub struct Validated {
    pub world: World,
    pub traffic: TrafficPlan,
    pub master_seed: u64,
    pub n_days: u32,
    pub fingerprint: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        let cfg = SimConfig::default();
        let v = cfg.validate(None).unwrap();
        assert_eq!(v.world.load_limit, Some(9));
        assert_eq!(v.world.step_seconds, 30);
        assert_eq!(v.n_days, 64);
        match &v.traffic {
            TrafficPlan::Synthetic { distribution, .. } => {
                assert_eq!(distribution.entries.len(), 10);
            }
            _ => panic!("default traffic should be synthetic"),
        }
    }

    #[test]
    fn default_config_toml_roundtrip() {
        let cfg = SimConfig::default();
        let text = cfg.to_toml_string();
        let back = SimConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.fingerprint(), back.fingerprint());
    }

    #[test]
    fn load_limit_zero_or_absent_disables_holding() {
        let mut cfg = SimConfig::default();
        cfg.cvq.load_limit = Some(0);
        assert_eq!(cfg.validate(None).unwrap().world.load_limit, None);

        // key absent from the file
        let cfg = SimConfig::from_toml_str("[traffic]\nn_flights = 10\n").unwrap();
        assert_eq!(cfg.cvq.load_limit, None);
        assert_eq!(cfg.validate(None).unwrap().world.load_limit, None);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let mut cfg = SimConfig::default();
        cfg.taxi.p_stop = 1.0;
        assert!(matches!(cfg.validate(None), Err(Error::Config(_))));

        let mut cfg = SimConfig::default();
        cfg.policy.alpha = 1.5;
        assert!(cfg.validate(None).is_err());

        let mut cfg = SimConfig::default();
        cfg.traffic.rate_profile = vec![1.0; 10];
        assert!(cfg.validate(None).is_err());

        let mut cfg = SimConfig::default();
        cfg.traffic.distribution = "duopoly".into();
        assert!(cfg.validate(None).is_err());

        let mut cfg = SimConfig::default();
        cfg.runways[0].p1 = 0.0;
        cfg.runways[0].p2 = 0.0;
        assert!(cfg.validate(None).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = SimConfig::from_toml_str("[cvq]\nload_limit = 9\nload_limti = 3\n").unwrap_err();
        assert!(err.to_string().contains("load_limti"), "{err}");
    }

    #[test]
    fn synthetic_days_are_seed_deterministic() {
        let cfg = SimConfig::default();
        let v = cfg.validate(None).unwrap();
        let s1 = v.traffic.schedule_for_day(&v.world, 7).unwrap();
        let s2 = v.traffic.schedule_for_day(&v.world, 7).unwrap();
        let s3 = v.traffic.schedule_for_day(&v.world, 8).unwrap();
        assert_eq!(s1, s2);
        assert_ne!(s1, s3);
        assert_eq!(s1.flights.len(), 608);
    }
}
