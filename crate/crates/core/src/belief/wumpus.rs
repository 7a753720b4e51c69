use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{bernoulli_variance_sum, check_pair, Belief, VisitCounts};
use crate::env::wumpus::{
    ahead, line_mask, neighbor_mask, Orientation, WumpusAction, WumpusConfig, WumpusState, DEATH_STATE, KILL_REWARD,
    KILL_STATE, NON_START_MASK, NUM_ACTIONS, NUM_CELLS, NUM_STATES, PIT_PRIOR, START_CELL, STEP_REWARD,
};
use crate::error::Error;
use crate::mdp::{MdpBuilder, TabularMdp, Transition};

/// Weighted table of pit layouts (bitmasks over cells).
#[derive(Debug, Clone, PartialEq)]
struct PitFactor {
    masks: Vec<u16>,
    weights: Vec<f64>,
}

impl PitFactor {
    fn prior(pit_probability: f64) -> Self {
        let free: Vec<usize> = (0..NUM_CELLS).filter(|&c| NON_START_MASK & (1 << c) != 0).collect();
        let count = 1usize << free.len();
        let mut masks = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for bits in 0..count {
            let mut mask = 0u16;
            let mut w = 1.0;
            for (i, &c) in free.iter().enumerate() {
                if bits & (1 << i) != 0 {
                    mask |= 1 << c;
                    w *= pit_probability;
                } else {
                    w *= 1.0 - pit_probability;
                }
            }
            if w > 0.0 {
                masks.push(mask);
                weights.push(w);
            }
        }
        let mut f = Self { masks, weights };
        f.normalize();
        f
    }

    fn normalize(&mut self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 {
            self.weights.iter_mut().for_each(|w| *w /= total);
        }
        total
    }

    fn mass(&self, keep: impl Fn(u16) -> bool) -> f64 {
        self.masks.iter().zip(&self.weights).filter(|(m, _)| keep(**m)).map(|(_, w)| w).sum()
    }

    fn condition(&mut self, keep: impl Fn(u16) -> bool) {
        let mut i = 0;
        while i < self.masks.len() {
            if keep(self.masks[i]) {
                i += 1;
            } else {
                self.masks.swap_remove(i);
                self.weights.swap_remove(i);
            }
        }
        self.normalize();
    }
}

/// Weights over the wumpus cell.
#[derive(Debug, Clone, PartialEq)]
struct WumpusFactor {
    weights: [f64; NUM_CELLS],
}

impl WumpusFactor {
    fn uniform() -> Self {
        let mut weights = [0.0; NUM_CELLS];
        let n = (NUM_CELLS - 1) as f64;
        for (c, w) in weights.iter_mut().enumerate() {
            if c != START_CELL {
                *w = 1.0 / n;
            }
        }
        Self { weights }
    }

    fn mass(&self, keep: impl Fn(usize) -> bool) -> f64 {
        self.weights.iter().enumerate().filter(|(c, _)| keep(*c)).map(|(_, w)| w).sum()
    }

    fn condition(&mut self, keep: impl Fn(usize) -> bool) {
        for (c, w) in self.weights.iter_mut().enumerate() {
            if !keep(c) {
                *w = 0.0;
            }
        }
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 {
            self.weights.iter_mut().for_each(|w| *w /= total);
        }
    }
}

/// One product term `weight · pits × wumpus` of the posterior.
#[derive(Debug, Clone, PartialEq)]
struct Component {
    weight: f64,
    pits: PitFactor,
    wumpus: WumpusFactor,
}

/// Cell-level summaries of the posterior that determine the mean model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WumpusCellStats {
    pub pit_marginal: [f64; NUM_CELLS],
    pub wumpus_marginal: [f64; NUM_CELLS],
    /// Probability that entering the cell is lethal.
    pub death: [f64; NUM_CELLS],
    /// Probability of surviving entry and sensing `(stench, breeze)`, indexed
    /// by `2 * stench + breeze`.
    pub percept: [[f64; 4]; NUM_CELLS],
}

/// Exact posterior over Wumpus layouts.
///
/// Percepts and survival factor across pits and the wumpus, so the posterior
/// is kept as a product of a pit table (all 2^15 layouts of the non-start cells)
/// and a wumpus table. Observing a death at a cell is a disjunction (pit or
/// wumpus), which splits the posterior into a mixture of two product terms.
#[derive(Debug, Clone, PartialEq)]
pub struct WumpusBelief {
    components: Vec<Component>,
    counts: VisitCounts,
    discount: f64,
    /// Cells whose percepts have been sensed, with the sensed `2 * stench + breeze`.
    sensed: [Option<u8>; NUM_CELLS],
    stats: WumpusCellStats,
}

/// At most five outcomes per `(s, a)`: death plus four percept combinations.
#[derive(Debug, Clone, Copy)]
struct MeanRow {
    reward: f64,
    len: usize,
    outcomes: [(usize, f64); 5],
}

impl MeanRow {
    fn single(next: usize, reward: f64) -> Self {
        let mut outcomes = [(0, 0.0); 5];
        outcomes[0] = (next, 1.0);
        Self { reward, len: 1, outcomes }
    }

    fn entries(&self) -> &[(usize, f64)] {
        &self.outcomes[..self.len]
    }
}

fn alive(cell: usize, orientation: Orientation, percept: usize) -> WumpusState {
    WumpusState::Alive { cell, orientation, stench: percept & 2 != 0, breeze: percept & 1 != 0 }
}

fn percept_code(stench: bool, breeze: bool) -> u8 {
    (stench as u8) << 1 | breeze as u8
}

impl WumpusBelief {
    /// The prior: wumpus uniform over the 15 non-start cells, independent
    /// pits with probability 0.2 on each non-start cell.
    pub fn prior(discount: f64) -> Result<Self, Error> {
        Self::with_pit_probability(PIT_PRIOR, discount)
    }

    pub fn with_pit_probability(pit_probability: f64, discount: f64) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&pit_probability) {
            return Err(Error::InvalidParameter(format!("pit probability {pit_probability} outside [0, 1)")));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidParameter(format!("discount {discount} outside [0, 1)")));
        }
        let components =
            vec![Component { weight: 1.0, pits: PitFactor::prior(pit_probability), wumpus: WumpusFactor::uniform() }];
        let stats = compute_stats(&components);
        Ok(Self { components, counts: VisitCounts::new(NUM_STATES, NUM_ACTIONS), discount, sensed: [None; NUM_CELLS], stats })
    }

    pub fn stats(&self) -> &WumpusCellStats {
        &self.stats
    }

    pub fn pit_marginal(&self, cell: usize) -> f64 {
        self.stats.pit_marginal[cell]
    }

    pub fn wumpus_marginal(&self, cell: usize) -> f64 {
        self.stats.wumpus_marginal[cell]
    }

    /// Number of product terms in the posterior (1 unless a death was observed).
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Number of pit layouts still carrying weight, summed over components.
    pub fn live_pit_layouts(&self) -> usize {
        self.components.iter().map(|c| c.pits.masks.len()).sum()
    }

    /// Draws a hidden layout from the posterior.
    pub fn sample_config<R: RngCore + ?Sized>(&self, rng: &mut R) -> WumpusConfig {
        let pick = |weights: &mut dyn Iterator<Item = f64>, u: f64| {
            let mut acc = 0.0;
            let mut last = 0;
            for (i, w) in weights.enumerate() {
                if w > 0.0 {
                    last = i;
                    acc += w;
                    if u < acc {
                        return i;
                    }
                }
            }
            last
        };
        let k = pick(&mut self.components.iter().map(|c| c.weight), rng.random::<f64>());
        let comp = &self.components[k];
        let p = pick(&mut comp.pits.weights.iter().copied(), rng.random::<f64>());
        let w = pick(&mut comp.wumpus.weights.iter().copied(), rng.random::<f64>());
        WumpusConfig { wumpus: w, pits: comp.pits.masks[p] }
    }

    /// Conditions on having survived entry into `cell` and sensed the given percepts.
    pub fn observe_cell(&mut self, cell: usize, stench: bool, breeze: bool) -> Result<(), Error> {
        let code = percept_code(stench, breeze);
        if let Some(previous) = self.sensed[cell] {
            if previous == code {
                return Ok(());
            }
            return Err(Error::BeliefContradiction(format!("cell {cell} sensed {code} after {previous}")));
        }
        let nb = neighbor_mask(cell);
        let bit = 1u16 << cell;
        self.condition(
            move |pits: u16| pits & bit == 0 && (pits & nb != 0) == breeze,
            move |w: usize| w != cell && (nb & (1 << w) != 0) == stench,
        )?;
        self.sensed[cell] = Some(code);
        Ok(())
    }

    fn condition<P, W>(&mut self, keep_pits: P, keep_wumpus: W) -> Result<(), Error>
    where
        P: Fn(u16) -> bool + Copy,
        W: Fn(usize) -> bool + Copy,
    {
        let masses: Vec<f64> =
            self.components.iter().map(|c| c.weight * c.pits.mass(keep_pits) * c.wumpus.mass(keep_wumpus)).collect();
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::BeliefContradiction("observation has zero probability under the belief".into()));
        }
        let mut kept = Vec::with_capacity(self.components.len());
        for (mut c, m) in core::mem::take(&mut self.components).into_iter().zip(masses) {
            if m > 0.0 {
                c.pits.condition(keep_pits);
                c.wumpus.condition(keep_wumpus);
                c.weight = m / total;
                kept.push(c);
            }
        }
        self.components = kept;
        self.stats = compute_stats(&self.components);
        Ok(())
    }

    /// Conditions on dying when entering `cell`: a pit there, or no pit and
    /// the wumpus there.
    fn observe_death_at(&mut self, cell: usize) -> Result<(), Error> {
        let bit = 1u16 << cell;
        let mut terms = Vec::new();
        for c in &self.components {
            let pit = c.pits.mass(|m| m & bit != 0);
            let w = c.wumpus.weights[cell];
            if pit > 0.0 {
                let mut t = c.clone();
                t.pits.condition(|m| m & bit != 0);
                t.weight = c.weight * pit;
                terms.push(t);
            }
            if (1.0 - pit) > 0.0 && w > 0.0 {
                let mut t = c.clone();
                t.pits.condition(|m| m & bit == 0);
                t.wumpus.condition(|x| x == cell);
                t.weight = c.weight * (1.0 - pit) * w;
                terms.push(t);
            }
        }
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if !(total > 0.0) {
            return Err(Error::BeliefContradiction(format!("death at cell {cell} has zero probability")));
        }
        terms.iter_mut().for_each(|t| t.weight /= total);
        self.components = terms;
        self.stats = compute_stats(&self.components);
        Ok(())
    }

    fn mean_row(&self, state: usize, action: usize) -> MeanRow {
        let Some(WumpusState::Alive { cell, orientation, stench, breeze }) = WumpusState::from_index(state) else {
            return MeanRow::single(state, 0.0);
        };
        let action = WumpusAction::from_index(action).expect("action index in range");
        match action {
            WumpusAction::Left => {
                let next = WumpusState::Alive { cell, orientation: orientation.left(), stench, breeze };
                MeanRow::single(next.index(), STEP_REWARD)
            }
            WumpusAction::Right => {
                let next = WumpusState::Alive { cell, orientation: orientation.right(), stench, breeze };
                MeanRow::single(next.index(), STEP_REWARD)
            }
            WumpusAction::Forward => match ahead(cell, orientation) {
                None => MeanRow::single(state, STEP_REWARD),
                Some(target) => {
                    let mut row = MeanRow { reward: STEP_REWARD, len: 0, outcomes: [(0, 0.0); 5] };
                    let mut push = |next: usize, p: f64| {
                        if p > 0.0 {
                            row.outcomes[row.len] = (next, p.min(1.0));
                            row.len += 1;
                        }
                    };
                    push(DEATH_STATE, self.stats.death[target]);
                    for (k, &p) in self.stats.percept[target].iter().enumerate() {
                        push(alive(target, orientation, k).index(), p);
                    }
                    row
                }
            },
            WumpusAction::Shoot => {
                let line = line_mask(cell, orientation);
                let kill: f64 = (0..NUM_CELLS).filter(|c| line & (1 << c) != 0).map(|c| self.stats.wumpus_marginal[c]).sum();
                let kill = kill.clamp(0.0, 1.0);
                let mut row = MeanRow { reward: kill * KILL_REWARD, len: 0, outcomes: [(0, 0.0); 5] };
                for (next, p) in [(KILL_STATE, kill), (DEATH_STATE, 1.0 - kill)] {
                    if p > 0.0 {
                        row.outcomes[row.len] = (next, p);
                        row.len += 1;
                    }
                }
                row
            }
        }
    }
}

fn compute_stats(components: &[Component]) -> WumpusCellStats {
    let mut stats = WumpusCellStats {
        pit_marginal: [0.0; NUM_CELLS],
        wumpus_marginal: [0.0; NUM_CELLS],
        death: [0.0; NUM_CELLS],
        percept: [[0.0; 4]; NUM_CELLS],
    };
    let neighbors: [u16; NUM_CELLS] = core::array::from_fn(neighbor_mask);
    for comp in components {
        // Per cell: P(pit), P(no pit ∧ breeze), P(no pit ∧ no breeze).
        let mut pit = [[0.0f64; 3]; NUM_CELLS];
        for (&mask, &w) in comp.pits.masks.iter().zip(&comp.pits.weights) {
            for c in 0..NUM_CELLS {
                let slot = if mask & (1 << c) != 0 {
                    0
                } else if mask & neighbors[c] != 0 {
                    1
                } else {
                    2
                };
                pit[c][slot] += w;
            }
        }
        for c in 0..NUM_CELLS {
            let here = comp.wumpus.weights[c];
            let smelly: f64 = (0..NUM_CELLS).filter(|&x| neighbors[c] & (1 << x) != 0).map(|x| comp.wumpus.weights[x]).sum();
            let clear = (1.0 - here - smelly).max(0.0);
            let [p_pit, p_breeze, p_calm] = pit[c];
            let k = comp.weight;
            stats.pit_marginal[c] += k * p_pit;
            stats.wumpus_marginal[c] += k * here;
            stats.death[c] += k * (1.0 - (1.0 - p_pit) * (1.0 - here)).clamp(0.0, 1.0);
            stats.percept[c][0] += k * clear * p_calm;
            stats.percept[c][1] += k * clear * p_breeze;
            stats.percept[c][2] += k * smelly * p_calm;
            stats.percept[c][3] += k * smelly * p_breeze;
        }
    }
    stats
}

impl Belief for WumpusBelief {
    fn num_states(&self) -> usize {
        NUM_STATES
    }

    fn num_actions(&self) -> usize {
        NUM_ACTIONS
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn is_terminal(&self, state: usize) -> bool {
        state == KILL_STATE || state == DEATH_STATE
    }

    fn mean_reward(&self, state: usize, action: usize) -> f64 {
        self.mean_row(state, action).reward
    }

    fn mean_transition(&self, state: usize, action: usize) -> Vec<f64> {
        let mut out = vec![0.0; NUM_STATES];
        for &(n, p) in self.mean_row(state, action).entries() {
            out[n] += p;
        }
        out
    }

    fn transition_variance_sum(&self, state: usize, action: usize) -> f64 {
        // Every hypothesis is a deterministic world, so E[P²] = E[P] entrywise.
        bernoulli_variance_sum(self.mean_row(state, action).entries().iter().map(|e| e.1))
    }

    fn visit_count(&self, state: usize, action: usize) -> u64 {
        self.counts.get(state, action)
    }

    fn observe_initial(&mut self, state: usize) -> Result<(), Error> {
        match WumpusState::from_index(state) {
            Some(WumpusState::Alive { cell, stench, breeze, .. }) => self.observe_cell(cell, stench, breeze),
            _ => Err(Error::TerminalState(state)),
        }
    }

    fn update(&mut self, t: &Transition) -> Result<(), Error> {
        check_pair(NUM_STATES, NUM_ACTIONS, t)?;
        let Some(WumpusState::Alive { cell, orientation, stench, breeze }) = WumpusState::from_index(t.state) else {
            return Err(Error::TerminalState(t.state));
        };
        let next = WumpusState::from_index(t.next_state).expect("checked range");
        let action = WumpusAction::from_index(t.action).expect("checked range");
        let mismatch =
            || Error::InconsistentObservation(format!("{:?} --{}--> {:?} is impossible", t.state, action.name(), next));
        match action {
            WumpusAction::Left | WumpusAction::Right => {
                let turned = if action == WumpusAction::Left { orientation.left() } else { orientation.right() };
                if next != (WumpusState::Alive { cell, orientation: turned, stench, breeze }) {
                    return Err(mismatch());
                }
            }
            WumpusAction::Forward => match (ahead(cell, orientation), next) {
                (None, n) if n.index() == t.state => {}
                (Some(target), WumpusState::Dead) => self.observe_death_at(target)?,
                (Some(target), WumpusState::Alive { cell: c, orientation: o, stench: s, breeze: b })
                    if c == target && o == orientation =>
                {
                    self.observe_cell(target, s, b)?
                }
                _ => return Err(mismatch()),
            },
            WumpusAction::Shoot => {
                let line = line_mask(cell, orientation);
                match next {
                    WumpusState::Killed => self.condition(|_| true, move |w| line & (1 << w) != 0)?,
                    WumpusState::Dead => self.condition(|_| true, move |w| line & (1 << w) == 0)?,
                    _ => return Err(mismatch()),
                }
            }
        }
        self.counts.increment(t.state, t.action);
        Ok(())
    }

    fn sample_mdp(&self, rng: &mut dyn RngCore) -> Result<TabularMdp, Error> {
        self.sample_config(rng).world_mdp(self.discount)
    }

    fn mean_mdp(&self) -> Result<TabularMdp, Error> {
        let mut b = MdpBuilder::new(NUM_STATES, NUM_ACTIONS, self.discount);
        for s in 0..NUM_STATES {
            if self.is_terminal(s) {
                b.set_terminal(s);
                continue;
            }
            for a in 0..NUM_ACTIONS {
                let row = self.mean_row(s, a);
                b.set_row(s, a, row.reward, row.entries());
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::wumpus::START_ORIENTATION;

    #[test]
    fn prior_marginals() {
        let b = WumpusBelief::prior(0.95).unwrap();
        assert_eq!(b.pit_marginal(START_CELL), 0.0);
        assert_eq!(b.wumpus_marginal(START_CELL), 0.0);
        for c in 1..NUM_CELLS {
            assert!((b.pit_marginal(c) - 0.2).abs() < 1e-12);
            assert!((b.wumpus_marginal(c) - 1.0 / 15.0).abs() < 1e-12);
        }
    }

    #[test]
    fn no_breeze_at_start_clears_neighbours() {
        let mut b = WumpusBelief::prior(0.95).unwrap();
        b.observe_cell(START_CELL, false, false).unwrap();
        assert_eq!(b.pit_marginal(1), 0.0);
        assert_eq!(b.pit_marginal(4), 0.0);
        assert_eq!(b.wumpus_marginal(1), 0.0);
        assert!((b.wumpus_marginal(2) - 1.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn prior_forward_death_probability() {
        let b = WumpusBelief::prior(0.95).unwrap();
        let start = WumpusState::Alive { cell: START_CELL, orientation: START_ORIENTATION, stench: false, breeze: false };
        let row = b.mean_transition(start.index(), WumpusAction::Forward as usize);
        let expected = 0.2 + 1.0 / 15.0 - 0.2 / 15.0;
        assert!((row[DEATH_STATE] - expected).abs() < 1e-12);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradiction_is_reported() {
        let mut b = WumpusBelief::prior(0.95).unwrap();
        b.observe_cell(START_CELL, false, false).unwrap();
        // the start cell was already sensed calm
        assert!(matches!(b.observe_cell(START_CELL, false, true), Err(Error::BeliefContradiction(_))));
    }

    #[test]
    fn death_splits_into_mixture() {
        let mut b = WumpusBelief::prior(0.95).unwrap();
        b.observe_death_at(1).unwrap();
        assert_eq!(b.num_components(), 2);
        let start = WumpusState::Alive { cell: START_CELL, orientation: START_ORIENTATION, stench: false, breeze: false };
        let row = b.mean_transition(start.index(), WumpusAction::Forward as usize);
        assert!((row[DEATH_STATE] - 1.0).abs() < 1e-12);
        assert!(b.transition_variance_sum(start.index(), WumpusAction::Forward as usize) < 1e-12);
    }
}
