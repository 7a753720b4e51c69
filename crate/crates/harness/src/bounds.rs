//! The plain-text bounds report for a prior belief.

use std::fmt::Write as _;

use rand::RngCore;
use varbonus_core::analysis::{
    dirichlet_sample_complexity, empirical_sample_complexity, eta_p, eta_r, lemma3_bonus, theorem1_bound, BoundParams,
    EmpiricalSettings, SampleComplexity,
};
use varbonus_core::belief::{Belief, SlipBelief, SlipTying, WumpusBelief};
use varbonus_core::env::chain::ChainSpec;
use varbonus_core::env::wumpus::{Orientation, WumpusState, START_CELL};

use crate::config::{Benchmark, ExperimentConfig, PriorKind};
use crate::experiment::chain_full_prior;
use crate::seed::seed_for;
use crate::trajectory::{format_action, format_state};
use crate::HarnessError;

/// Accuracy settings of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportSettings {
    pub rho: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub empirical: EmpiricalSettings,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self { rho: 0.1, epsilon: 0.1, delta: 0.1, empirical: EmpiricalSettings { trials: 50, cap: 10_000 } }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub state: usize,
    pub action: usize,
    pub eta_p: f64,
    pub eta_r: f64,
    pub bonus: f64,
    /// Closed-form Dirichlet complexity, where it applies.
    pub closed_form: Option<f64>,
    pub empirical: SampleComplexity,
}

fn rows<B: Belief + Clone>(
    belief: &B,
    pairs: &[(usize, usize)],
    settings: &ReportSettings,
    gamma: f64,
    closed_form: Option<f64>,
    rng: &mut dyn RngCore,
) -> Result<Vec<BoundRow>, HarnessError> {
    let s = belief.num_states();
    let ReportSettings { rho, epsilon, delta, empirical } = *settings;
    pairs
        .iter()
        .map(|&(state, action)| {
            Ok(BoundRow {
                state,
                action,
                eta_p: eta_p(belief, state, action, rho)?,
                eta_r: eta_r(belief, state, action, rho)?,
                bonus: lemma3_bonus(belief, state, action, rho, gamma, s)?,
                closed_form,
                empirical: empirical_sample_complexity(belief, state, action, epsilon, delta, rho, gamma, empirical, rng)?,
            })
        })
        .collect()
}

fn all_pairs(s: usize, a: usize) -> Vec<(usize, usize)> {
    (0..s).flat_map(|state| (0..a).map(move |action| (state, action))).collect()
}

/// Rows of the report for `cfg`'s prior. The Wumpus rows cover the start
/// cell after its (calm) percepts are observed.
pub fn bound_rows(cfg: &ExperimentConfig, settings: &ReportSettings) -> Result<Vec<BoundRow>, HarnessError> {
    let mut rng = seed_for(cfg.seed, 0);
    let spec = ChainSpec::default();
    let (a, b) = cfg.slip_prior;
    let chain_pairs = all_pairs(spec.num_states, ChainSpec::NUM_ACTIONS);
    match (cfg.benchmark, cfg.prior) {
        (Benchmark::Chain, PriorKind::Full) => {
            let closed = dirichlet_sample_complexity(spec.num_states, cfg.gamma, settings.epsilon, settings.rho)?;
            rows(&chain_full_prior(&spec, cfg.alpha, cfg.gamma)?, &chain_pairs, settings, cfg.gamma, Some(closed), &mut rng)
        }
        (Benchmark::Chain, PriorKind::Tied) => {
            rows(&SlipBelief::new(spec, SlipTying::Tied, a, b, cfg.gamma)?, &chain_pairs, settings, cfg.gamma, None, &mut rng)
        }
        (Benchmark::Chain, PriorKind::Semi) => {
            let belief = SlipBelief::new(spec, SlipTying::SemiTied, a, b, cfg.gamma)?;
            rows(&belief, &chain_pairs, settings, cfg.gamma, None, &mut rng)
        }
        (Benchmark::Wumpus, _) => {
            let mut belief = WumpusBelief::prior(cfg.gamma)?;
            let start = |orientation| WumpusState::Alive { cell: START_CELL, orientation, stench: false, breeze: false }.index();
            belief.observe_initial(start(Orientation::East))?;
            let pairs: Vec<(usize, usize)> = Orientation::ALL
                .iter()
                .flat_map(|&o| (0..belief.num_actions()).map(move |action| (start(o), action)))
                .collect();
            rows(&belief, &pairs, settings, cfg.gamma, None, &mut rng)
        }
        (Benchmark::Chain, PriorKind::Default) => Err(HarnessError::Config("chain needs prior tied, semi or full".into())),
    }
}

fn complexity_text(c: SampleComplexity, cap: u64) -> String {
    match c {
        SampleComplexity::Reached(n) => n.to_string(),
        SampleComplexity::NotReached => format!(">{cap}"),
    }
}

/// The report as aligned text.
pub fn report(cfg: &ExperimentConfig, settings: &ReportSettings) -> Result<String, HarnessError> {
    cfg.validate()?;
    let params = BoundParams {
        rho: settings.rho,
        epsilon: settings.epsilon,
        delta: settings.delta,
        gamma: cfg.gamma,
        num_states: match cfg.benchmark {
            Benchmark::Chain => ChainSpec::default().num_states,
            Benchmark::Wumpus => varbonus_core::env::wumpus::NUM_STATES,
        },
        num_actions: match cfg.benchmark {
            Benchmark::Chain => ChainSpec::NUM_ACTIONS,
            Benchmark::Wumpus => varbonus_core::env::wumpus::NUM_ACTIONS,
        },
    };
    params.validate()?;
    let table = bound_rows(cfg, settings)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "bounds report: benchmark={} prior={} gamma={} rho={} epsilon={} delta={} trials={} cap={}",
        cfg.benchmark, cfg.prior, cfg.gamma, settings.rho, settings.epsilon, settings.delta, settings.empirical.trials,
        settings.empirical.cap
    );
    let _ = writeln!(
        out,
        "{:<14} {:<8} {:>12} {:>12} {:>14} {:>14} {:>12}",
        "state", "action", "eta_p", "eta_r", "bonus", "closed_form", "empirical"
    );
    for r in &table {
        let closed = r.closed_form.map_or("-".to_string(), |c| format!("{c:.4e}"));
        let _ = writeln!(
            out,
            "{:<14} {:<8} {:>12.6} {:>12.6} {:>14.6} {:>14} {:>12}",
            format_state(cfg.benchmark, r.state),
            format_action(cfg.benchmark, r.action),
            r.eta_p,
            r.eta_r,
            r.bonus,
            closed,
            complexity_text(r.empirical, settings.empirical.cap)
        );
    }
    let (eps_pair, delta_pair, rho_pair) = params.per_pair();
    let _ = writeln!(out, "per-pair parameters: epsilon'={eps_pair:.6e} delta'={delta_pair:.6e} rho'={rho_pair:.6e}");
    let pairs = (params.num_states * params.num_actions) as f64;
    let per_pair_c = match (cfg.benchmark, cfg.prior) {
        (Benchmark::Chain, PriorKind::Full) => Some(dirichlet_sample_complexity(params.num_states, cfg.gamma, eps_pair, rho_pair)?),
        (Benchmark::Wumpus, _) => Some(1.0),
        _ => None,
    };
    match per_pair_c {
        Some(c) => {
            let bound = theorem1_bound(c * pairs, settings.epsilon, cfg.gamma, settings.delta)?;
            let _ = writeln!(out, "C(s,a)={c:.6e} sum C={:.6e} non-optimal step bound={bound:.6e} (up to constants)", c * pairs);
        }
        None => {
            let _ = writeln!(out, "no closed-form C(s,a) for this prior");
        }
    }
    Ok(out)
}
