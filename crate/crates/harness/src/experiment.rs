//! Running configured experiments: one isolated run per index, in parallel,
//! reduced in index order.

use std::time::Instant;

use rayon::prelude::*;

use varbonus_core::agent::{
    Agent, BonusStrategy, BossAgent, BossConfig, KnownThresholds, MeanMdpAgent, PlannerConfig, ReplanSchedule,
};
use varbonus_core::belief::{Belief, DirichletBelief, PointMassBelief, SlipBelief, SlipTying, WumpusBelief};
use varbonus_core::env::chain::{ChainEnv, ChainSpec};
use varbonus_core::env::wumpus::{WumpusConfig, PIT_PRIOR};
use varbonus_core::rollout::{run_chain, run_wumpus, EpisodeRecord};

use crate::config::{AgentKind, Benchmark, ExperimentConfig, PriorKind};
use crate::error::HarnessError;
use crate::seed::run_streams;

/// Summary of one run (chain) or episode (wumpus).
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub index: usize,
    pub total_reward: f64,
    pub length: usize,
    pub terminated: bool,
    pub planning_events: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub runs: Vec<RunOutcome>,
    pub mean: f64,
    pub std_error: f64,
    pub wall_clock_secs: f64,
}

impl ExperimentResult {
    pub fn returns(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.total_reward).collect()
    }
}

/// Sample mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

type BoxedAgent = Box<dyn Agent + Send>;

fn planner(cfg: &ExperimentConfig) -> PlannerConfig {
    PlannerConfig { tolerance: cfg.tolerance, ..PlannerConfig::default() }
}

/// Wraps a belief in the configured decision rule.
pub fn agent_with_belief<B: Belief + Send + 'static>(cfg: &ExperimentConfig, belief: B) -> Result<BoxedAgent, HarnessError> {
    let every = ReplanSchedule::EveryStep;
    let agent: BoxedAgent = match cfg.agent {
        AgentKind::Mean | AgentKind::Oracle => Box::new(MeanMdpAgent::new(belief, BonusStrategy::None, planner(cfg), every)?),
        AgentKind::Variance => {
            let bonus = BonusStrategy::Variance { beta_r: cfg.beta_r, beta_p: cfg.beta_p };
            Box::new(MeanMdpAgent::new(belief, bonus, planner(cfg), every)?)
        }
        AgentKind::InverseCount => {
            Box::new(MeanMdpAgent::new(belief, BonusStrategy::InverseCount { beta: cfg.beta }, planner(cfg), every)?)
        }
        AgentKind::InverseSqrt => {
            Box::new(MeanMdpAgent::new(belief, BonusStrategy::InverseSqrtCount { beta: cfg.beta }, planner(cfg), every)?)
        }
        AgentKind::Algorithm1 => {
            let c = KnownThresholds::uniform(belief.num_states(), belief.num_actions(), cfg.c);
            let bonus = BonusStrategy::Variance { beta_r: cfg.beta_r, beta_p: cfg.beta_p };
            Box::new(MeanMdpAgent::new(belief, bonus, planner(cfg), ReplanSchedule::KnownGated(c))?)
        }
        AgentKind::Boss => Box::new(BossAgent::new(
            belief,
            BossConfig { samples: cfg.k, knownness: cfg.knownness, planner: planner(cfg) },
        )?),
    };
    Ok(agent)
}

/// Dirichlet prior over the chain with the chain's known outcome rewards.
pub fn chain_full_prior(spec: &ChainSpec, alpha: f64, gamma: f64) -> Result<DirichletBelief, HarnessError> {
    let n = spec.num_states;
    let a = ChainSpec::NUM_ACTIONS;
    let rewards: Vec<f64> =
        (0..n).flat_map(|s| (0..a).flat_map(move |_| (0..n).map(move |next| (s, next)))).map(|(s, next)| spec.outcome_reward(s, next)).collect();
    Ok(DirichletBelief::symmetric(n, a, alpha, rewards, gamma)?)
}

pub fn chain_agent(cfg: &ExperimentConfig) -> Result<BoxedAgent, HarnessError> {
    let spec = ChainSpec::default();
    if cfg.agent == AgentKind::Oracle {
        return agent_with_belief(cfg, PointMassBelief::new(spec.true_mdp(cfg.gamma)?));
    }
    let (a, b) = cfg.slip_prior;
    match cfg.prior {
        PriorKind::Full => agent_with_belief(cfg, chain_full_prior(&spec, cfg.alpha, cfg.gamma)?),
        PriorKind::Tied => agent_with_belief(cfg, SlipBelief::new(spec, SlipTying::Tied, a, b, cfg.gamma)?),
        PriorKind::Semi => agent_with_belief(cfg, SlipBelief::new(spec, SlipTying::SemiTied, a, b, cfg.gamma)?),
        PriorKind::Default => Err(HarnessError::Config("chain needs prior tied, semi or full".into())),
    }
}

pub fn wumpus_agent(cfg: &ExperimentConfig, layout: &WumpusConfig) -> Result<BoxedAgent, HarnessError> {
    if cfg.agent == AgentKind::Oracle {
        return agent_with_belief(cfg, PointMassBelief::new(layout.world_mdp(cfg.gamma)?));
    }
    agent_with_belief(cfg, WumpusBelief::prior(cfg.gamma)?)
}

/// Run `index` of `cfg`, optionally keeping its trajectory.
pub fn run_one(cfg: &ExperimentConfig, index: usize, record_steps: bool) -> Result<EpisodeRecord, HarnessError> {
    let (mut env_rng, mut agent_rng) = run_streams(cfg.seed, index as u64);
    let record = match cfg.benchmark {
        Benchmark::Chain => {
            let mut agent = chain_agent(cfg)?;
            let mut env = ChainEnv::new(ChainSpec::default());
            run_chain(agent.as_mut(), &mut env, cfg.horizon, &mut env_rng, &mut agent_rng, record_steps)?
        }
        Benchmark::Wumpus => {
            let layout = WumpusConfig::sample(&mut env_rng, PIT_PRIOR);
            let mut agent = wumpus_agent(cfg, &layout)?;
            run_wumpus(agent.as_mut(), layout, cfg.horizon, &mut agent_rng, record_steps)?
        }
    };
    Ok(record)
}

/// The hidden layout of Wumpus episode `index` under master seed `seed`.
pub fn wumpus_layout(seed: u64, index: usize) -> WumpusConfig {
    let (mut env_rng, _) = run_streams(seed, index as u64);
    WumpusConfig::sample(&mut env_rng, PIT_PRIOR)
}

fn outcome(index: usize, record: EpisodeRecord) -> RunOutcome {
    RunOutcome {
        index,
        total_reward: record.total_reward,
        length: record.length,
        terminated: record.terminated,
        planning_events: record.planning_events,
    }
}

/// Runs every run/episode of `cfg` and aggregates in index order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let work = |i: usize| run_one(cfg, i, false).map(|r| outcome(i, r));
    let runs: Vec<RunOutcome> = if cfg.jobs == 1 {
        (0..cfg.runs).map(work).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
        pool.install(|| (0..cfg.runs).into_par_iter().map(work).collect::<Result<_, _>>())?
    };
    let (mean, std_error) = mean_and_std_error(&runs.iter().map(|r| r.total_reward).collect::<Vec<_>>());
    Ok(ExperimentResult { config: cfg.clone(), runs, mean, std_error, wall_clock_secs: start.elapsed().as_secs_f64() })
}

pub fn run_chain_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    if cfg.benchmark != Benchmark::Chain {
        return Err(HarnessError::Config("run_chain_experiment needs benchmark = chain".into()));
    }
    run_experiment(cfg)
}

pub fn run_wumpus_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    if cfg.benchmark != Benchmark::Wumpus {
        return Err(HarnessError::Config("run_wumpus_experiment needs benchmark = wumpus".into()));
    }
    run_experiment(cfg)
}

/// One experiment per grid value of the agent's sweep coefficient
/// (β_P for the variance agents, β for count bonuses, K for BOSS).
pub fn run_sweep(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<ExperimentResult>, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config("sweep grid is empty".into()));
    }
    grid.iter()
        .map(|&v| {
            let mut point = cfg.clone();
            point.set_sweep_coefficient(v);
            run_experiment(&point)
        })
        .collect()
}

/// Index of the best mean; the first one wins ties.
pub fn select_best(results: &[ExperimentResult]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if best.is_none_or(|b| r.mean > results[b].mean) {
            best = Some(i);
        }
    }
    best
}

/// Bonus coefficients searched on Hunt the Wumpus: 0 to 0.04 in steps of
/// 0.002, then 0.04 to 1 in steps of 0.04.
pub fn wumpus_beta_grid() -> Vec<f64> {
    let fine = (0..=20).map(|i| i as f64 * 2.0 / 1000.0);
    let coarse = (2..=25).map(|i| i as f64 * 4.0 / 100.0);
    fine.chain(coarse).collect()
}

/// BOSS sample sizes searched on Hunt the Wumpus.
pub fn boss_k_grid() -> Vec<f64> {
    vec![1.0, 5.0, 10.0, 20.0, 40.0, 80.0]
}

/// Default bonus grid for the Chain, scaled to its 10/2 rewards.
pub fn chain_beta_grid() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0, 30.0]
}

/// The default grid for `cfg`'s benchmark and agent.
pub fn default_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    match (cfg.benchmark, cfg.agent) {
        (_, AgentKind::Boss) => boss_k_grid(),
        (Benchmark::Chain, _) => chain_beta_grid(),
        (Benchmark::Wumpus, _) => wumpus_beta_grid(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_error_formula() {
        let (m, se) = mean_and_std_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std_error(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn wumpus_grid_shape() {
        let g = wumpus_beta_grid();
        assert_eq!(g.len(), 45);
        assert_eq!(g[0], 0.0);
        assert!((g[20] - 0.04).abs() < 1e-15 && (g[21] - 0.08).abs() < 1e-15);
        assert!((g[44] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_prefers_first_on_ties() {
        let base = ExperimentResult { config: ExperimentConfig::chain(), runs: vec![], mean: 1.0, std_error: 0.0, wall_clock_secs: 0.0 };
        let results = vec![base.clone(), ExperimentResult { mean: 2.0, ..base.clone() }, ExperimentResult { mean: 2.0, ..base }];
        assert_eq!(select_best(&results), Some(1));
    }
}
