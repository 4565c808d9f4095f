//! Departure schedules: replay from a schedule file or synthesis from an
//! hourly demand profile, a fleet mix, and an airline share distribution.
//!
//! Schedule file format (line oriented, `#` comments):
//!
//! ```text
//! flight <id> <airline> <class:H|L|S> <gate_node> <ready_minute>
//! ```

use crate::aircraft::{AirlineId, WeightClass};
use crate::airside::graph::{NodeId, TaxiwayGraph};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Boston Logan top-10 airline departure shares (percent), largest first.
pub const TOP_AIRLINE_SHARES: [(&str, f64); 10] = [
    ("AA", 10.60),
    ("AB", 9.27),
    ("AC", 9.04),
    ("AD", 8.95),
    ("AE", 8.14),
    ("AF", 6.77),
    ("AG", 5.93),
    ("AH", 5.87),
    ("AI", 5.87),
    ("AJ", 3.73),
];

/// Per-class departure share and average seat count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassMix {
    pub share: f64,
    pub avg_seats: u32,
}

/// Fleet composition, indexed by [`WeightClass::ALL`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FleetMix {
    pub classes: [ClassMix; 3],
}

impl Default for FleetMix {
    fn default() -> Self {
        FleetMix {
            classes: [
                ClassMix { share: 0.1673, avg_seats: 214 }, // heavy
                ClassMix { share: 0.7721, avg_seats: 97 },  // large
                ClassMix { share: 0.0606, avg_seats: 4 },   // small
            ],
        }
    }
}

impl FleetMix {
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.classes.iter().map(|c| c.share).sum();
        if self.classes.iter().any(|c| c.share < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "fleet shares must be non-negative and sum to 1 (got {sum})"
            )));
        }
        Ok(())
    }

    pub fn seats(&self, class: WeightClass) -> u32 {
        self.classes[class_index(class)].avg_seats
    }
}

fn class_index(class: WeightClass) -> usize {
    WeightClass::ALL.iter().position(|c| *c == class).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistributionMode {
    Monopoly,
    Top5,
    Top10,
    Custom,
}

impl DistributionMode {
    pub fn name(self) -> &'static str {
        match self {
            DistributionMode::Monopoly => "monopoly",
            DistributionMode::Top5 => "top5",
            DistributionMode::Top10 => "top10",
            DistributionMode::Custom => "custom",
        }
    }
}

/// Airline names with normalized departure shares.
#[derive(Clone, Debug, PartialEq)]
pub struct AirlineDistribution {
    pub mode: DistributionMode,
    pub entries: Vec<(String, f64)>,
}

impl AirlineDistribution {
    /// The named distributions: a monopoly assigns one airline to every
    /// departure; top-k takes the first k airlines of the share table and
    /// spreads the residual mass proportionally (i.e. renormalizes).
    pub fn named(mode: DistributionMode) -> AirlineDistribution {
        let take = |k: usize| -> Vec<(String, f64)> {
            let total: f64 = TOP_AIRLINE_SHARES.iter().take(k).map(|(_, s)| s).sum();
            TOP_AIRLINE_SHARES
                .iter()
                .take(k)
                .map(|(name, s)| (name.to_string(), s / total))
                .collect()
        };
        match mode {
            DistributionMode::Monopoly => AirlineDistribution {
                mode,
                entries: vec![("AA".to_string(), 1.0)],
            },
            DistributionMode::Top5 => AirlineDistribution { mode, entries: take(5) },
            DistributionMode::Top10 => AirlineDistribution { mode, entries: take(10) },
            DistributionMode::Custom => {
                panic!("custom distributions are built from explicit shares")
            }
        }
    }

    /// A custom distribution from raw (name, weight) pairs; weights are
    /// normalized and must be non-negative with a positive sum.
    pub fn custom(raw: Vec<(String, f64)>) -> Result<AirlineDistribution> {
        if raw.is_empty() {
            return Err(Error::Input("airline distribution has no entries".into()));
        }
        let sum: f64 = raw.iter().map(|(_, s)| s).sum();
        if raw.iter().any(|(_, s)| !s.is_finite() || *s < 0.0) || !(sum > 0.0) {
            return Err(Error::Input(
                "airline shares must be non-negative with a positive sum".into(),
            ));
        }
        let entries = raw.into_iter().map(|(n, s)| (n, s / sum)).collect();
        Ok(AirlineDistribution {
            mode: DistributionMode::Custom,
            entries,
        })
    }

    /// `k` airlines with equal shares, named X1..Xk.
    pub fn equal(k: usize) -> AirlineDistribution {
        AirlineDistribution {
            mode: DistributionMode::Custom,
            entries: (1..=k).map(|i| (format!("X{i}"), 1.0 / k as f64)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.entries.iter().map(|(_, s)| s).sum();
        if self.entries.is_empty() || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "airline distribution shares must sum to 1 (got {sum})"
            )));
        }
        Ok(())
    }

    /// Parse a custom shares file: one `<airline> <share>` pair per line.
    pub fn parse_custom(text: &str) -> Result<AirlineDistribution> {
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let name = it.next().unwrap().to_string();
            let share = it
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Input(format!("shares line {}: expected <airline> <share>", lineno + 1))
                })?;
            raw.push((name, share));
        }
        AirlineDistribution::custom(raw)
    }
}

/// One scheduled departure.
#[derive(Clone, Debug, PartialEq)]
pub struct Flight {
    pub tag: String,
    pub airline: AirlineId,
    pub class: WeightClass,
    pub passengers: u32,
    pub gate: NodeId,
    pub ready_step: u32,
}

/// A day's departure demand, sorted by ready step.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub airlines: Vec<String>,
    pub flights: Vec<Flight>,
}

impl Schedule {
    pub fn airline_name(&self, id: AirlineId) -> &str {
        &self.airlines[id.0 as usize]
    }

    pub fn last_ready_step(&self) -> u32 {
        self.flights.last().map(|f| f.ready_step).unwrap_or(0)
    }

    /// Serialize in the schedule file format.
    pub fn to_file_text(&self, step_seconds: u32) -> String {
        let mut out = String::new();
        for f in &self.flights {
            let minute = f.ready_step as f64 * step_seconds as f64 / 60.0;
            out.push_str(&format!(
                "flight {} {} {} {} {}\n",
                f.tag,
                self.airline_name(f.airline),
                f.class.code(),
                f.gate,
                format_minutes(minute),
            ));
        }
        out
    }
}

fn format_minutes(m: f64) -> String {
    // exact for half-minute resolutions, compact otherwise
    if m == m.trunc() {
        format!("{}", m as u64)
    } else {
        format!("{m:.6}")
    }
}

fn steps_from_minutes(minute: f64, step_seconds: u32) -> u32 {
    (minute * 60.0 / step_seconds as f64).round() as u32
}

/// Parse and validate a schedule file. Out-of-order ready times are
/// re-sorted with a warning; unknown classes, unknown gates, and negative
/// times are rejected with their line number.
pub fn load_schedule(
    text: &str,
    graph: &TaxiwayGraph,
    fleet: &FleetMix,
    step_seconds: u32,
) -> Result<(Schedule, Vec<String>)> {
    let gates = graph.gates();
    let mut airlines: Vec<String> = Vec::new();
    let mut flights: Vec<Flight> = Vec::new();
    let mut warnings = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| Error::Input(format!("schedule line {}: {}", lineno + 1, msg));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "flight" {
            return Err(at("expected: flight <id> <airline> <class:H|L|S> <gate> <ready_minute>".into()));
        }
        let tag = fields[1].to_string();
        let airline_name = fields[2];
        let class = fields[3]
            .chars()
            .next()
            .filter(|_| fields[3].len() == 1)
            .and_then(WeightClass::from_code)
            .ok_or_else(|| at(format!("unknown weight class {:?}", fields[3])))?;
        let gate = NodeId(
            fields[4]
                .parse::<u32>()
                .map_err(|_| at(format!("bad gate node {:?}", fields[4])))?,
        );
        if !gates.contains(&gate) {
            return Err(at(format!("node {gate} is not a gate in the lattice")));
        }
        let minute = fields[5]
            .parse::<f64>()
            .map_err(|_| at(format!("bad ready minute {:?}", fields[5])))?;
        if !minute.is_finite() || minute < 0.0 {
            return Err(at(format!("ready minute must be non-negative, got {minute}")));
        }
        let airline = match airlines.iter().position(|a| a == airline_name) {
            Some(i) => AirlineId(i as u16),
            None => {
                airlines.push(airline_name.to_string());
                AirlineId((airlines.len() - 1) as u16)
            }
        };
        flights.push(Flight {
            tag,
            airline,
            class,
            passengers: fleet.seats(class),
            gate,
            ready_step: steps_from_minutes(minute, step_seconds),
        });
    }
    if !flights.is_sorted_by_key(|f| f.ready_step) {
        warnings.push("schedule ready times out of order; records re-sorted".to_string());
        flights.sort_by_key(|f| f.ready_step);
    }
    Ok((Schedule { airlines, flights }, warnings))
}

/// Draw an index from normalized `weights` using one uniform.
fn sample_categorical(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Synthesize a day of departures.
///
/// Ready times are i.i.d. from the piecewise-constant hourly density given
/// by `rate_profile` (the conditional law of a non-homogeneous arrival
/// process given the day's total); class, airline, and gate are i.i.d.
/// from the fleet mix, the airline distribution, and the uniform law over
/// gate nodes. Flights are then sorted by ready step and tagged F000….
pub fn synth_schedule(
    n_flights: u32,
    rate_profile: &[f64; 24],
    fleet: &FleetMix,
    dist: &AirlineDistribution,
    graph: &TaxiwayGraph,
    step_seconds: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Schedule> {
    fleet.validate()?;
    dist.validate()?;
    let airlines: Vec<String> = dist.entries.iter().map(|(n, _)| n.clone()).collect();
    if n_flights == 0 {
        return Ok(Schedule { airlines, flights: Vec::new() });
    }
    let total_rate: f64 = rate_profile.iter().sum();
    if rate_profile.iter().any(|r| *r < 0.0) || !(total_rate > 0.0) {
        return Err(Error::Input(
            "rate profile must be non-negative with a positive sum".into(),
        ));
    }
    let gates = graph.gates();
    if gates.is_empty() {
        return Err(Error::Config("lattice has no gate nodes".into()));
    }
    let hour_weights: Vec<f64> = rate_profile.iter().map(|r| r / total_rate).collect();
    let class_weights: Vec<f64> = fleet.classes.iter().map(|c| c.share).collect();
    let airline_weights: Vec<f64> = dist.entries.iter().map(|(_, s)| *s).collect();

    let mut flights = Vec::with_capacity(n_flights as usize);
    for _ in 0..n_flights {
        // fixed draw order per flight: time, class, airline, gate
        let hour = sample_categorical(&hour_weights, rng.random::<f64>());
        let minute = (hour as f64 + rng.random::<f64>()) * 60.0;
        let class = WeightClass::ALL[sample_categorical(&class_weights, rng.random::<f64>())];
        let airline = AirlineId(sample_categorical(&airline_weights, rng.random::<f64>()) as u16);
        let gate = gates[rng.random_range(0..gates.len())];
        flights.push(Flight {
            tag: String::new(),
            airline,
            class,
            passengers: fleet.seats(class),
            gate,
            ready_step: steps_from_minutes(minute, step_seconds),
        });
    }
    flights.sort_by_key(|f| f.ready_step);
    for (i, f) in flights.iter_mut().enumerate() {
        f.tag = format!("F{i:03}");
    }
    Ok(Schedule { airlines, flights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airside::graph::NodeKind;
    use crate::rng::derive_stream;

    fn tiny_graph() -> TaxiwayGraph {
        let mut g = TaxiwayGraph::new();
        g.add_node(NodeId(1), 0.0, 0.0, NodeKind::Gate).unwrap();
        g.add_node(NodeId(2), 500.0, 0.0, NodeKind::Gate).unwrap();
        g.add_node(NodeId(9), 1000.0, 0.0, NodeKind::Threshold).unwrap();
        g.add_edge(NodeId(1), NodeId(2), None).unwrap();
        g.add_edge(NodeId(2), NodeId(9), None).unwrap();
        g
    }

    fn flat_profile() -> [f64; 24] {
        [1.0; 24]
    }

    #[test]
    fn monopoly_is_one_airline() {
        let d = AirlineDistribution::named(DistributionMode::Monopoly);
        assert_eq!(d.entries, vec![("AA".to_string(), 1.0)]);
        d.validate().unwrap();
    }

    #[test]
    fn top10_renormalizes_proportionally() {
        let d = AirlineDistribution::named(DistributionMode::Top10);
        assert_eq!(d.entries.len(), 10);
        let sum: f64 = d.entries.iter().map(|(_, s)| s).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        // AA's raw 10.60% of a 74.17% total
        assert!((d.entries[0].1 - 10.60 / 74.17).abs() < 1e-12);
        d.validate().unwrap();
    }

    #[test]
    fn top5_renormalizes_to_one() {
        let d = AirlineDistribution::named(DistributionMode::Top5);
        assert_eq!(d.entries.len(), 5);
        let sum: f64 = d.entries.iter().map(|(_, s)| s).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        d.validate().unwrap();
    }

    #[test]
    fn custom_rejects_bad_shares() {
        assert!(AirlineDistribution::custom(vec![]).is_err());
        assert!(AirlineDistribution::custom(vec![("A".into(), -1.0)]).is_err());
        assert!(AirlineDistribution::custom(vec![("A".into(), 0.0)]).is_err());
        let d = AirlineDistribution::custom(vec![("A".into(), 2.0), ("B".into(), 2.0)]).unwrap();
        assert_eq!(d.entries[0].1, 0.5);
    }

    #[test]
    fn load_well_formed_schedule() {
        let g = tiny_graph();
        let text = "flight F1 AA H 1 10\nflight F2 AB L 2 20\nflight F3 AA S 1 30.5\n";
        let (s, warnings) = load_schedule(text, &g, &FleetMix::default(), 30).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(s.flights.len(), 3);
        assert_eq!(s.flights[0].ready_step, 20);
        assert_eq!(s.flights[2].ready_step, 61);
        assert_eq!(s.flights[0].passengers, 214);
        assert_eq!(s.airline_name(s.flights[1].airline), "AB");
    }

    #[test]
    fn out_of_order_times_resort_with_warning() {
        let g = tiny_graph();
        let text = "flight F1 AA H 1 30\nflight F2 AB L 2 10\n";
        let (s, warnings) = load_schedule(text, &g, &FleetMix::default(), 30).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(s.flights[0].tag, "F2");
    }

    #[test]
    fn unknown_class_names_the_line() {
        let g = tiny_graph();
        let err = load_schedule(
            "flight F1 AA H 1 10\nflight F2 AA MEDIUM-HEAVY 1 12\n",
            &g,
            &FleetMix::default(),
            30,
        )
        .unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_gate_and_negative_time_are_rejected() {
        let g = tiny_graph();
        assert!(load_schedule("flight F1 AA H 9 10\n", &g, &FleetMix::default(), 30).is_err());
        assert!(load_schedule("flight F1 AA H 77 10\n", &g, &FleetMix::default(), 30).is_err());
        assert!(load_schedule("flight F1 AA H 1 -3\n", &g, &FleetMix::default(), 30).is_err());
    }

    #[test]
    fn empty_synth_schedule() {
        let g = tiny_graph();
        let mut rng = derive_stream(1, "schedule", 0);
        let s = synth_schedule(
            0,
            &flat_profile(),
            &FleetMix::default(),
            &AirlineDistribution::named(DistributionMode::Monopoly),
            &g,
            30,
            &mut rng,
        )
        .unwrap();
        assert!(s.flights.is_empty());
    }

    #[test]
    fn all_zero_profile_with_flights_is_an_error() {
        let g = tiny_graph();
        let mut rng = derive_stream(1, "schedule", 0);
        let r = synth_schedule(
            5,
            &[0.0; 24],
            &FleetMix::default(),
            &AirlineDistribution::named(DistributionMode::Monopoly),
            &g,
            30,
            &mut rng,
        );
        assert!(r.is_err());
    }

    #[test]
    fn synth_is_reproducible_and_sorted() {
        let g = tiny_graph();
        let d = AirlineDistribution::named(DistributionMode::Top10);
        let make = || {
            let mut rng = derive_stream(77, "schedule", 4);
            synth_schedule(200, &flat_profile(), &FleetMix::default(), &d, &g, 30, &mut rng).unwrap()
        };
        let a = make();
        let b = make();
        assert_eq!(a, b);
        assert!(a.flights.is_sorted_by_key(|f| f.ready_step));
    }

    #[test]
    fn schedule_file_roundtrip() {
        let g = tiny_graph();
        let d = AirlineDistribution::named(DistributionMode::Top5);
        let mut rng = derive_stream(8, "schedule", 0);
        let s =
            synth_schedule(150, &flat_profile(), &FleetMix::default(), &d, &g, 30, &mut rng).unwrap();
        let text = s.to_file_text(30);
        let (reloaded, warnings) = load_schedule(&text, &g, &FleetMix::default(), 30).unwrap();
        assert!(warnings.is_empty());
        let key = |s: &Schedule| -> Vec<(String, String, WeightClass, NodeId, u32)> {
            s.flights
                .iter()
                .map(|f| {
                    (
                        f.tag.clone(),
                        s.airline_name(f.airline).to_string(),
                        f.class,
                        f.gate,
                        f.ready_step,
                    )
                })
                .collect()
        };
        assert_eq!(key(&s), key(&reloaded));
    }

    #[test]
    fn class_frequencies_match_fleet_mix() {
        let g = tiny_graph();
        let fleet = FleetMix::default();
        let d = AirlineDistribution::named(DistributionMode::Top10);
        let mut rng = derive_stream(2024, "schedule", 0);
        let n = 100_000u32;
        let s = synth_schedule(n, &flat_profile(), &fleet, &d, &g, 30, &mut rng).unwrap();
        // chi-square over the three classes; df = 2, 1% critical value 9.21
        let mut counts = [0f64; 3];
        for f in &s.flights {
            counts[WeightClass::ALL.iter().position(|c| *c == f.class).unwrap()] += 1.0;
        }
        let chi2: f64 = counts
            .iter()
            .zip(fleet.classes.iter())
            .map(|(obs, c)| {
                let exp = c.share * n as f64;
                (obs - exp).powi(2) / exp
            })
            .sum();
        assert!(chi2 < 9.210, "class chi-square too large: {chi2}");

        // each airline frequency within 3 sigma of its renormalized share
        let mut airline_counts = vec![0f64; d.entries.len()];
        for f in &s.flights {
            airline_counts[f.airline.0 as usize] += 1.0;
        }
        for (i, (_, share)) in d.entries.iter().enumerate() {
            let exp = share * n as f64;
            let sigma = (n as f64 * share * (1.0 - share)).sqrt();
            assert!(
                (airline_counts[i] - exp).abs() < 3.0 * sigma,
                "airline {i}: {} vs {exp}",
                airline_counts[i]
            );
        }
    }
}
