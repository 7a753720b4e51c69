//! Brute-force posterior over every hidden Wumpus layout.

use varbonus_core::belief::{Belief, WumpusBelief};
use varbonus_core::env::wumpus::{WumpusAction, WumpusConfig, WumpusState, NUM_ACTIONS, NUM_CELLS, NUM_STATES, PIT_PRIOR, START_CELL};
use varbonus_core::Transition;

pub struct Joint {
    hyps: Vec<(WumpusConfig, f64)>,
}

impl Joint {
    pub fn prior() -> Self {
        let mut hyps = Vec::new();
        for pits in 0u32..(1 << NUM_CELLS) {
            let pits = pits as u16;
            if pits & (1 << START_CELL) != 0 {
                continue;
            }
            let k = pits.count_ones() as i32;
            let w_pits = PIT_PRIOR.powi(k) * (1.0 - PIT_PRIOR).powi(NUM_CELLS as i32 - 1 - k);
            for wumpus in (0..NUM_CELLS).filter(|&c| c != START_CELL) {
                hyps.push((WumpusConfig::new(wumpus, pits).unwrap(), w_pits / (NUM_CELLS - 1) as f64));
            }
        }
        Self { hyps }
    }

    pub fn keep(&mut self, f: impl Fn(&WumpusConfig) -> bool) {
        self.hyps.retain(|(h, _)| f(h));
        let total: f64 = self.hyps.iter().map(|(_, w)| w).sum();
        assert!(total > 0.0, "observation has zero probability under the joint");
        for (_, w) in &mut self.hyps {
            *w /= total;
        }
    }

    pub fn observe_start(&mut self, start: WumpusState) {
        self.keep(|h| h.start_state() == start);
    }

    pub fn observe(&mut self, t: &Transition) {
        let state = WumpusState::from_index(t.state).unwrap();
        let action = WumpusAction::from_index(t.action).unwrap();
        self.keep(|h| h.transition(state, action).unwrap().0.index() == t.next_state);
    }

    pub fn pit_marginal(&self, cell: usize) -> f64 {
        self.hyps.iter().filter(|(h, _)| h.pits & (1 << cell) != 0).map(|(_, w)| w).sum()
    }

    pub fn wumpus_marginal(&self, cell: usize) -> f64 {
        self.hyps.iter().filter(|(h, _)| h.wumpus == cell).map(|(_, w)| w).sum()
    }

    pub fn predictive(&self, state: usize, action: usize) -> (Vec<f64>, f64) {
        let (s, a) = (WumpusState::from_index(state).unwrap(), WumpusAction::from_index(action).unwrap());
        let mut row = vec![0.0; NUM_STATES];
        let mut reward = 0.0;
        for (h, w) in &self.hyps {
            let (next, r) = h.transition(s, a).unwrap();
            row[next.index()] += w;
            reward += w * r;
        }
        (row, reward)
    }
}

/// Largest absolute gap between the factorised belief and the joint, over
/// cell marginals and (when `state` is live) every predictive row, mean
/// reward and variance sum.
pub fn discrepancy(belief: &WumpusBelief, joint: &Joint, state: usize) -> f64 {
    let mut gap: f64 = 0.0;
    for c in 0..NUM_CELLS {
        gap = gap.max((belief.pit_marginal(c) - joint.pit_marginal(c)).abs());
        gap = gap.max((belief.wumpus_marginal(c) - joint.wumpus_marginal(c)).abs());
    }
    if WumpusState::from_index(state).is_some_and(|s| s.is_terminal()) {
        return gap;
    }
    for a in 0..NUM_ACTIONS {
        let (row, reward) = joint.predictive(state, a);
        for (x, y) in belief.mean_transition(state, a).iter().zip(&row) {
            gap = gap.max((x - y).abs());
        }
        gap = gap.max((belief.mean_reward(state, a) - reward).abs());
        let var: f64 = row.iter().map(|p| p * (1.0 - p)).sum();
        gap = gap.max((belief.transition_variance_sum(state, a) - var).abs());
    }
    gap
}
