//! Acceptance suite: one test per criterion, each printing a pass line.
//! Quantitative targets run on the default configuration with its frozen
//! master seed, so every asserted number is reproducible bit for bit.

use cvq_sim::calibrate::{fit_runway_bernoullis, RunwayCalibrationTarget};
use cvq_sim::config::SimConfig;
use cvq_sim::metrics::{per_type_evolution, pool_records};
use cvq_sim::policy::{holding_cost, select_pushback, HeldAircraft, HoldingCostInputs, PolicyParams};
use cvq_sim::rng::{derive_seed, derive_stream};
use cvq_sim::sweep::{self, SweepResult};
use cvq_sim::trace::DayTrace;
use cvq_sim::airside::graph::{NodeId, NodeKind, TaxiwayGraph};
use cvq_sim::airside::taxi::TaxiState;
use cvq_sim::{AircraftId, WeightClass};
use rand::Rng;
use std::sync::OnceLock;

const DAY_STEPS: u32 = 2880; // 24 h of 30 s steps

fn run_days(cfg: &SimConfig, days: u32) -> Vec<DayTrace> {
    let mut cfg = cfg.clone();
    cfg.seeds.n_days = days;
    let v = cfg.validate(None).unwrap();
    (0..days)
        .map(|i| {
            let seed = derive_seed(v.master_seed, "day", i as u64);
            let schedule = v.traffic.schedule_for_day(&v.world, seed).unwrap();
            cvq_sim::run_day(&v.world, &schedule, seed).unwrap()
        })
        .collect()
}

/// Default scenario restricted to demand far below the load limit.
fn low_demand_config() -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.traffic.n_flights = 60;
    cfg.traffic.rate_profile = vec![1.0; 24];
    cfg
}

/// The 3-airline scenario of the trade-off study: equal shares.
fn three_airline_config() -> SimConfig {
    let mut cfg = SimConfig::default();
    let path = std::env::temp_dir().join("cvq_acceptance_three_airlines.txt");
    std::fs::write(&path, "X1 1\nX2 1\nX3 1\n").unwrap();
    cfg.traffic.distribution = "custom".into();
    cfg.traffic.custom_distribution_path = Some(path);
    cfg
}

/// The 21-point, 64-day sweep shared by criteria 4, 5, and 6.
fn three_airline_sweep() -> &'static SweepResult {
    static SWEEP: OnceLock<SweepResult> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let v = three_airline_config().validate(None).unwrap();
        sweep::sweep_alpha(&v, &sweep::default_alpha_grid(), None).unwrap()
    })
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut ranks = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                ranks[k] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let (rx, ry) = (rank(xs), rank(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..xs.len() {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx).powi(2);
        dy += (ry[i] - my).powi(2);
    }
    num / (dx.sqrt() * dy.sqrt())
}

#[test]
fn criterion_1_cvq_transparency_below_saturation() {
    let days = 4;
    let enabled = run_days(&low_demand_config(), days);
    let mut disabled_cfg = low_demand_config();
    disabled_cfg.cvq.load_limit = None;
    let disabled = run_days(&disabled_cfg, days);

    for (e, d) in enabled.iter().zip(&disabled) {
        assert!(
            d.max_planes_out() < 9,
            "premise violated: demand reached the load limit ({} planes out)",
            d.max_planes_out()
        );
        assert_eq!(e, d, "traces differ although the limit never binds");
    }
    println!("[PASS] criterion 1: CVQ transparent below saturation ({days} bit-equal days)");
}

#[test]
fn criterion_2_throughput_preserved_at_limit_9() {
    let days = 64;
    let limited = run_days(&SimConfig::default(), days);
    let mut unlimited_cfg = SimConfig::default();
    unlimited_cfg.cvq.load_limit = None;
    let unlimited = run_days(&unlimited_cfg, days);

    // Day extension drains every flight eventually, so raw totals are equal
    // by construction; throughput preservation is measured as take-offs
    // inside the 24 h day window.
    let l: u32 = limited.iter().map(|t| t.takeoffs_before(DAY_STEPS)).sum();
    let u: u32 = unlimited.iter().map(|t| t.takeoffs_before(DAY_STEPS)).sum();
    let ratio = l as f64 / u as f64;
    assert!(
        ratio >= 0.99,
        "24h take-offs at limit 9: {l} vs unlimited {u} (ratio {ratio:.4} < 0.99)"
    );
    println!(
        "[PASS] criterion 2: throughput preserved at limit 9 ({l}/{u} = {:.2}% over {days} days)",
        100.0 * ratio
    );
}

#[test]
fn criterion_3_taxi_out_summary_under_cvq_9() {
    let traces = run_days(&SimConfig::default(), 64);
    let records = pool_records(&traces);
    let n = records.len() as f64;
    let taxi_mean = records.iter().map(|r| r.taxi_out_min).sum::<f64>() / n;
    let taxi_var =
        records.iter().map(|r| (r.taxi_out_min - taxi_mean).powi(2)).sum::<f64>() / n;
    let taxi_std = taxi_var.sqrt();
    let po_mean = records.iter().map(|r| r.planes_out_at_pushback as f64).sum::<f64>() / n;

    assert!(
        (taxi_mean - 13.0).abs() <= 2.0,
        "taxi-out mean {taxi_mean:.2} min outside 13 +/- 2"
    );
    assert!(
        (taxi_std - 5.0).abs() <= 1.5,
        "taxi-out std {taxi_std:.2} min outside 5 +/- 1.5"
    );
    assert!(
        (po_mean - 7.0).abs() <= 1.0,
        "mean planes out at push-back {po_mean:.2} outside 7 +/- 1"
    );
    println!(
        "[PASS] criterion 3: taxi-out {taxi_mean:.2} +/- {taxi_std:.2} min, \
         planes out at push-back {po_mean:.2}"
    );
}

#[test]
fn criterion_4_mean_wait_neutrality_across_alpha() {
    let sweep = three_airline_sweep();
    let means: Vec<f64> = sweep.outcomes.iter().map(|o| o.point.plane_wait_mean_min).collect();
    let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo;
    assert!(
        spread < 0.02,
        "plane wait mean varies {:.2}% across the sweep (lo {lo:.3}, hi {hi:.3})",
        100.0 * spread
    );
    println!(
        "[PASS] criterion 4: plane wait mean varies {:.2}% < 2% over 21 alphas x 64 days",
        100.0 * spread
    );
}

#[test]
fn criterion_5_tradeoff_direction_and_magnitude() {
    let sweep = three_airline_sweep();
    let alphas: Vec<f64> = sweep.outcomes.iter().map(|o| o.point.alpha).collect();
    let pax: Vec<f64> =
        sweep.outcomes.iter().map(|o| o.point.passenger_wait_mean_min).collect();
    let stds: Vec<f64> = sweep.outcomes.iter().map(|o| o.point.plane_wait_std_min).collect();

    let benefit = sweep.outcome_at(1.0).unwrap().point.benefit_pct.unwrap();
    assert!(
        (8.0..=20.0).contains(&benefit),
        "3-airline benefit at alpha=1 is {benefit:.2}%, outside [8, 20]"
    );
    let rho_mean = spearman(&alphas, &pax);
    assert!(rho_mean <= -0.9, "Spearman(alpha, passenger wait) = {rho_mean:.3} > -0.9");
    let rho_std = spearman(&alphas, &stds);
    assert!(rho_std >= 0.9, "Spearman(alpha, wait std) = {rho_std:.3} < 0.9");
    println!(
        "[PASS] criterion 5: benefit {benefit:.2}% in [8, 20], \
         Spearman mean {rho_mean:.3} <= -0.9, std {rho_std:.3} >= 0.9"
    );
}

#[test]
fn criterion_6_per_type_signs_at_high_alpha() {
    let sweep = three_airline_sweep();
    let baseline = &sweep.outcome_at(0.0).unwrap().point;
    let top = &sweep.outcome_at(1.0).unwrap().point;
    let evo = per_type_evolution(top, baseline).unwrap();
    let get = |class: WeightClass| evo.iter().find(|(c, _)| *c == class).unwrap().1;
    let (heavy, large, small) =
        (get(WeightClass::Heavy), get(WeightClass::Large), get(WeightClass::Small));

    assert!(small > 0.0, "small evolution {small:.1}% not positive");
    assert!(heavy < 0.0, "heavy evolution {heavy:.1}% not negative");
    assert!(
        large.abs() < small.abs().min(heavy.abs()),
        "large evolution {large:.1}% not the smallest in magnitude \
         (small {small:.1}%, heavy {heavy:.1}%)"
    );
    println!(
        "[PASS] criterion 6: per-type evolution at alpha=1: small {small:+.1}%, \
         large {large:+.1}%, heavy {heavy:+.1}%"
    );
}

#[test]
fn criterion_7_ten_airline_benefit_band() {
    let grid = [0.0, 1.0];
    let v = SimConfig::default().validate(None).unwrap();
    let top10 = sweep::sweep_alpha(&v, &grid, None).unwrap();
    let b10 = top10.outcome_at(1.0).unwrap().point.benefit_pct.unwrap();

    let mut mono_cfg = SimConfig::default();
    mono_cfg.traffic.distribution = "monopoly".into();
    let v = mono_cfg.validate(None).unwrap();
    let mono = sweep::sweep_alpha(&v, &grid, None).unwrap();
    let bm = mono.outcome_at(1.0).unwrap().point.benefit_pct.unwrap();

    assert!(b10 > 0.0, "top-10 benefit {b10:.2}% not positive");
    assert!(
        (6.0..=18.0).contains(&b10),
        "top-10 benefit at alpha=1 is {b10:.2}%, outside [6, 18]"
    );
    assert!(b10 <= bm, "top-10 benefit {b10:.2}% exceeds monopoly benefit {bm:.2}%");
    println!("[PASS] criterion 7: top-10 benefit {b10:.2}% in [6, 18], monopoly {bm:.2}%");
}

// Criterion 8: oracle suites.

/// Exhaustive enumeration of simple paths; minimum by (length, sequence).
fn brute_force_shortest(
    g: &TaxiwayGraph,
    from: NodeId,
    to: NodeId,
) -> Option<(f64, Vec<NodeId>)> {
    fn dfs(
        g: &TaxiwayGraph,
        at: NodeId,
        to: NodeId,
        length: f64,
        path: &mut Vec<NodeId>,
        best: &mut Option<(f64, Vec<NodeId>)>,
    ) {
        if at == to {
            let better = match best {
                None => true,
                Some((bl, bp)) => {
                    length < *bl || (length == *bl && path.as_slice() < bp.as_slice())
                }
            };
            if better {
                *best = Some((length, path.clone()));
            }
            return;
        }
        for &(next, w) in g.neighbors(at) {
            if !path.contains(&next) {
                path.push(next);
                dfs(g, next, to, length + w, path, best);
                path.pop();
            }
        }
    }
    let mut best = None;
    let mut path = vec![from];
    dfs(g, from, to, 0.0, &mut path, &mut best);
    best
}

#[test]
fn criterion_8a_shortest_path_oracle() {
    let mut rng = derive_stream(0xACCE97, "graph-oracle", 0);
    let mut checked_paths = 0;
    for case in 0..200u32 {
        let n = rng.random_range(2..=8u32);
        let mut g = TaxiwayGraph::new();
        for id in 1..=n {
            g.add_node(NodeId(id), id as f64, 0.0, NodeKind::Plain).unwrap();
        }
        for a in 1..=n {
            for b in (a + 1)..=n {
                if rng.random::<f64>() < 0.45 {
                    // integer lengths keep equal-length ties exact in f64
                    let w = rng.random_range(1..=20u32) as f64;
                    g.add_edge(NodeId(a), NodeId(b), Some(w)).unwrap();
                }
            }
        }
        let from = NodeId(rng.random_range(1..=n));
        let to = NodeId(rng.random_range(1..=n));
        if from == to {
            continue;
        }
        match brute_force_shortest(&g, from, to) {
            None => {
                assert!(
                    g.shortest_path(from, to).is_err(),
                    "case {case}: oracle found no path but shortest_path returned one"
                );
            }
            Some((length, oracle_path)) => {
                let path = g.shortest_path(from, to).unwrap();
                assert_eq!(
                    path, oracle_path,
                    "case {case}: path mismatch (oracle length {length})"
                );
                assert_eq!(g.path_length(&path).unwrap(), length, "case {case}");
                checked_paths += 1;
            }
        }
    }
    println!(
        "[PASS] criterion 8a: shortest path matches brute force on 200 random graphs \
         ({checked_paths} reachable pairs, exact)"
    );
}

#[test]
fn criterion_8b_runway_fit_roundtrip() {
    let mut rng = derive_stream(0xACCE97, "fit-oracle", 0);
    for case in 0..1000u32 {
        let mut p1: f64 = rng.random_range(0.02..0.98);
        let mut p2: f64 = rng.random_range(0.02..0.98);
        if p1 < p2 {
            std::mem::swap(&mut p1, &mut p2);
        }
        let mean = p1 + p2;
        let var = p1 * (1.0 - p1) + p2 * (1.0 - p2);
        let (f1, f2) = fit_runway_bernoullis(&RunwayCalibrationTarget {
            mean_rate: mean,
            std_rate: var.sqrt(),
        })
        .unwrap_or_else(|e| panic!("case {case}: feasible pair ({p1}, {p2}) rejected: {e}"));
        assert!(
            (f1 - p1).abs() < 1e-9 && (f2 - p2).abs() < 1e-9,
            "case {case}: ({p1}, {p2}) round-tripped to ({f1}, {f2})"
        );
    }
    println!("[PASS] criterion 8b: runway fit round-trips 1000 moment pairs to 1e-9");
}

#[test]
fn criterion_8c_taxi_time_negative_binomial() {
    // default stride over the longest default gate path: 4600 m / 250 m
    let (length, stride, p) = (4600.0, 250.0, 0.22);
    let k = TaxiState::cells(length, stride);
    let n = 100_000u32;
    let mut total = 0u64;
    for i in 0..n {
        let mut rng = derive_stream(0xACCE97, "taxi-oracle", i as u64);
        let mut taxi = TaxiState::new(length, stride, p);
        let mut steps = 1u64;
        while !taxi.advance(&mut rng) {
            steps += 1;
        }
        total += steps;
    }
    let mean = total as f64 / n as f64;
    let expected = k as f64 / (1.0 - p);
    let se = (k as f64 * p).sqrt() / (1.0 - p) / (n as f64).sqrt();
    assert!(
        (mean - expected).abs() < 3.0 * se,
        "taxi mean {mean:.4} vs negative-binomial {expected:.4} (3se {:.4})",
        3.0 * se
    );
    println!(
        "[PASS] criterion 8c: taxi steps mean {mean:.3} matches k/(1-p) = {expected:.3} \
         within 3 standard errors over 1e5 samples"
    );
}

#[test]
fn criterion_8d_policy_argmax_oracle() {
    let mut rng = derive_stream(0xACCE97, "policy-oracle", 0);
    for case in 0..1000u32 {
        let n = rng.random_range(1..=15usize);
        let now = 500u32;
        let held: Vec<HeldAircraft> = (0..n)
            .map(|i| HeldAircraft {
                id: AircraftId(i as u32),
                ready_step: rng.random_range(0..=now),
                passengers: *[4u32, 97, 214, rng.random_range(1..300)]
                    .get(rng.random_range(0..4usize))
                    .unwrap(),
            })
            .collect();
        let params = PolicyParams {
            alpha: rng.random::<f64>(),
            w1: 4.0,
            w2: 1.0,
        };
        // independent exhaustive evaluation with the documented tie-break
        let oracle = held
            .iter()
            .map(|a| {
                let cost = holding_cost(
                    HoldingCostInputs {
                        time_since_ready_min: (now - a.ready_step) as f64 * 0.5,
                        passengers: a.passengers,
                    },
                    &params,
                );
                (cost, a)
            })
            .max_by(|(ca, a), (cb, b)| {
                ca.total_cmp(cb)
                    .then_with(|| (b.ready_step, b.id).cmp(&(a.ready_step, a.id)))
            })
            .map(|(_, a)| a.id)
            .unwrap();
        let chosen = select_pushback(&held, &params, now, 30).unwrap();
        assert_eq!(chosen, oracle, "case {case}: held set {held:?} alpha {}", params.alpha);
    }
    println!("[PASS] criterion 8d: policy argmax matches exhaustive evaluation on 1000 sets");
}

#[test]
fn criterion_9_sweep_determinism() {
    let mut cfg = SimConfig::default();
    cfg.seeds.n_days = 6;
    let grid = [0.0, 0.5, 1.0];

    let run = |dir: &std::path::Path| {
        let v = cfg.validate(None).unwrap();
        let result = sweep::sweep_alpha(&v, &grid, Some(&dir.join("traces"))).unwrap();
        sweep::emit_results(&result, dir).unwrap();
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(a.path());
    run(b.path());

    let mut compared = 0usize;
    let mut stack = vec![std::path::PathBuf::new()];
    while let Some(rel) = stack.pop() {
        let mut entries: Vec<_> = std::fs::read_dir(a.path().join(&rel))
            .unwrap()
            .map(|e| e.unwrap())
            .collect();
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let rel = rel.join(entry.file_name());
            if entry.file_type().unwrap().is_dir() {
                stack.push(rel);
            } else {
                let xa = std::fs::read(a.path().join(&rel)).unwrap();
                let xb = std::fs::read(b.path().join(&rel)).unwrap();
                if rel.file_name().unwrap() == "provenance.txt" {
                    // identical except the generated_unix timestamp line
                    let strip = |bytes: &[u8]| -> Vec<String> {
                        String::from_utf8_lossy(bytes)
                            .lines()
                            .filter(|l| !l.starts_with("generated_unix="))
                            .map(str::to_string)
                            .collect()
                    };
                    assert_eq!(strip(&xa), strip(&xb), "{}", rel.display());
                } else {
                    assert_eq!(xa, xb, "file {} differs between runs", rel.display());
                }
                compared += 1;
            }
        }
    }
    assert!(compared > 3, "walked only {compared} files");
    println!(
        "[PASS] criterion 9: two sweep runs emitted {compared} byte-identical files \
         (provenance timestamp excluded)"
    );
}
