use varbonus_harness::config::{AgentKind, Benchmark, ExperimentConfig, PriorKind};
use varbonus_harness::experiment::{mean_and_std_error, run_experiment, run_one, run_sweep, select_best, wumpus_layout};
use varbonus_harness::output::{parse_runs_csv, parse_summary, runs_csv, summary};
use varbonus_harness::trajectory::{parse_log, write_log, TrajectoryLog};

fn small_chain(agent: AgentKind) -> ExperimentConfig {
    ExperimentConfig { agent, runs: 12, horizon: 200, beta_p: 5.0, beta: 5.0, seed: 3, ..ExperimentConfig::chain() }
}

fn small_wumpus(agent: AgentKind) -> ExperimentConfig {
    ExperimentConfig { agent, runs: 16, beta_p: 0.24, beta: 0.012, k: 5, seed: 9, ..ExperimentConfig::wumpus() }
}

#[test]
fn parallel_and_serial_runs_agree() {
    for cfg in [small_chain(AgentKind::Variance), small_wumpus(AgentKind::Boss), small_wumpus(AgentKind::Variance)] {
        let serial = run_experiment(&ExperimentConfig { jobs: 1, ..cfg.clone() }).unwrap();
        let parallel = run_experiment(&ExperimentConfig { jobs: 3, ..cfg }).unwrap();
        assert_eq!(serial.runs, parallel.runs);
        assert_eq!(serial.mean.to_bits(), parallel.mean.to_bits());
        assert_eq!(serial.std_error.to_bits(), parallel.std_error.to_bits());
    }
}

#[test]
fn results_reproduce_from_config_and_seed() {
    let cfg = small_chain(AgentKind::InverseSqrt);
    let first = run_experiment(&cfg).unwrap();
    let stored = parse_runs_csv(&runs_csv(&first)).unwrap();
    let again = run_experiment(&cfg).unwrap();
    assert_eq!(stored, again.returns());
    let other_seed = run_experiment(&ExperimentConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(first.returns(), other_seed.returns());
}

#[test]
fn reported_std_error_matches_raw_returns() {
    let result = run_experiment(&small_wumpus(AgentKind::Mean)).unwrap();
    let xs = result.returns();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((result.std_error - sd / n.sqrt()).abs() < 1e-12);
    assert!((result.mean - mean).abs() < 1e-12);
    let pairs = parse_summary(&summary(&result)).unwrap();
    let get = |k: &str| pairs.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone()).unwrap();
    assert_eq!(get("gamma"), "0.95");
    assert_eq!(get("mean").parse::<f64>().unwrap(), result.mean);
    assert_eq!(get("count"), "16");
    assert_eq!(mean_and_std_error(&xs), (result.mean, result.std_error));
}

#[test]
fn zero_coefficient_is_the_mean_agent() {
    for make in [small_chain as fn(AgentKind) -> ExperimentConfig, small_wumpus] {
        let mean = run_experiment(&make(AgentKind::Mean)).unwrap();
        for agent in [AgentKind::Variance, AgentKind::InverseCount, AgentKind::InverseSqrt] {
            let sweep = run_sweep(&make(agent), &[0.0]).unwrap();
            let bits = |r: &[f64]| r.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&sweep[0].returns()), bits(&mean.returns()), "{agent}");
        }
    }
}

#[test]
fn sweep_varies_the_right_coefficient_and_selects_the_best() {
    let results = run_sweep(&small_wumpus(AgentKind::Boss), &[1.0, 3.0]).unwrap();
    assert_eq!(results.iter().map(|r| r.config.k).collect::<Vec<_>>(), [1, 3]);
    let best = select_best(&results).unwrap();
    assert!(results.iter().all(|r| r.mean <= results[best].mean));
    assert!(run_sweep(&small_wumpus(AgentKind::Boss), &[]).is_err());
}

#[test]
fn agents_face_the_same_hidden_layouts() {
    let a = small_wumpus(AgentKind::Mean);
    let layouts: Vec<_> = (0..a.runs).map(|i| wumpus_layout(a.seed, i)).collect();
    assert_eq!(layouts, (0..a.runs).map(|i| wumpus_layout(a.seed, i)).collect::<Vec<_>>());
    assert!(layouts.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn oracle_ends_every_episode_quickly() {
    let result = run_experiment(&small_wumpus(AgentKind::Oracle)).unwrap();
    for r in &result.runs {
        // either a kill or, with the wumpus out of safe reach, a deliberate miss
        assert!(r.terminated && r.length < 40, "{r:?}");
    }
    assert!(result.mean > 0.5);
}

#[test]
fn trajectory_log_round_trips() {
    for (cfg, index) in [(small_chain(AgentKind::Variance), 2), (small_wumpus(AgentKind::Variance), 5)] {
        let record = run_one(&cfg, index, true).unwrap();
        let log = TrajectoryLog::from_record(cfg.benchmark, vec![("run".into(), index.to_string())], &record);
        let parsed = parse_log(&write_log(&log)).unwrap();
        assert_eq!(parsed, log);
        assert!((parsed.total_reward() - record.total_reward).abs() < 1e-9);
    }
}

#[test]
fn golden_wumpus_trajectory() {
    let cfg = ExperimentConfig { agent: AgentKind::Variance, beta_p: 0.24, seed: 0, ..ExperimentConfig::wumpus() };
    let record = run_one(&cfg, 0, true).unwrap();
    let meta = [("agent", "variance"), ("prior", "default"), ("coefficient", "0.24"), ("seed", "0"), ("run", "0")]
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .to_vec();
    let body = write_log(&TrajectoryLog::from_record(Benchmark::Wumpus, meta, &record));
    let golden = include_str!("golden/wumpus_variance_seed0_run0.log");
    assert_eq!(body, golden);
}

#[test]
fn config_validation_catches_mismatched_prior() {
    let cfg = ExperimentConfig { prior: PriorKind::Tied, ..ExperimentConfig::wumpus() };
    assert!(run_experiment(&cfg).is_err());
}
