//! Hunt the Wumpus on a 4×4 cave.
//!
//! Cells are numbered row-major from the top-left corner (`cell = row * 4 + col`),
//! where the agent starts facing east. The planning state is the observable
//! tuple `(cell, orientation, stench, breeze)`, plus two terminal states.
//!
//! Dynamics given a hidden [`WumpusConfig`]:
//! - turning changes orientation and keeps the percept bits of the state,
//! - `forward` into a wall leaves the state unchanged,
//! - `forward` into a pit or the wumpus ends the episode in [`DEATH_STATE`],
//!   otherwise the new cell's percepts are sensed,
//! - `shoot` ends the episode: [`KILL_STATE`] if the wumpus is anywhere ahead,
//!   [`DEATH_STATE`] otherwise.
//!
//! Every step costs [`STEP_REWARD`] except `shoot`, which pays [`KILL_REWARD`]
//! on a hit and nothing on a miss.

use alloc::format;

use rand::{Rng, RngCore};

use crate::error::Error;
use crate::mdp::{MdpBuilder, TabularMdp};

pub const SIDE: usize = 4;
pub const NUM_CELLS: usize = SIDE * SIDE;
pub const START_CELL: usize = 0;
pub const START_ORIENTATION: Orientation = Orientation::East;
pub const PIT_PRIOR: f64 = 0.2;

pub const NUM_ACTIONS: usize = 4;
pub const NUM_ALIVE_STATES: usize = NUM_CELLS * 4 * 2 * 2;
pub const KILL_STATE: usize = NUM_ALIVE_STATES;
pub const DEATH_STATE: usize = NUM_ALIVE_STATES + 1;
pub const NUM_STATES: usize = NUM_ALIVE_STATES + 2;

pub const STEP_REWARD: f64 = -0.01;
pub const KILL_REWARD: f64 = 1.0;

/// Mask of all non-start cells.
pub const NON_START_MASK: u16 = !(1u16 << START_CELL);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [Orientation::North, Orientation::East, Orientation::South, Orientation::West];

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    pub fn left(self) -> Self {
        Self::from_index(self as usize + 3)
    }

    pub fn right(self) -> Self {
        Self::from_index(self as usize + 1)
    }

    pub fn symbol(self) -> char {
        match self {
            Orientation::North => 'N',
            Orientation::East => 'E',
            Orientation::South => 'S',
            Orientation::West => 'W',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.symbol() == c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WumpusAction {
    Left = 0,
    Right = 1,
    Forward = 2,
    Shoot = 3,
}

impl WumpusAction {
    pub const ALL: [WumpusAction; 4] = [WumpusAction::Left, WumpusAction::Right, WumpusAction::Forward, WumpusAction::Shoot];

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            WumpusAction::Left => "left",
            WumpusAction::Right => "right",
            WumpusAction::Forward => "forward",
            WumpusAction::Shoot => "shoot",
        }
    }
}

/// Decoded planning state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WumpusState {
    Alive { cell: usize, orientation: Orientation, stench: bool, breeze: bool },
    Killed,
    Dead,
}

impl WumpusState {
    pub fn index(self) -> usize {
        match self {
            WumpusState::Alive { cell, orientation, stench, breeze } => {
                ((cell * 4 + orientation as usize) * 2 + stench as usize) * 2 + breeze as usize
            }
            WumpusState::Killed => KILL_STATE,
            WumpusState::Dead => DEATH_STATE,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            KILL_STATE => Some(WumpusState::Killed),
            DEATH_STATE => Some(WumpusState::Dead),
            i if i < NUM_ALIVE_STATES => Some(WumpusState::Alive {
                cell: i / 16,
                orientation: Orientation::from_index((i / 4) % 4),
                stench: (i / 2) % 2 == 1,
                breeze: i % 2 == 1,
            }),
            _ => None,
        }
    }

    pub fn is_terminal(self) -> bool {
        !matches!(self, WumpusState::Alive { .. })
    }
}

pub fn is_terminal_index(i: usize) -> bool {
    i == KILL_STATE || i == DEATH_STATE
}

/// The cell one step ahead, or `None` at a wall.
pub fn ahead(cell: usize, orientation: Orientation) -> Option<usize> {
    let (row, col) = (cell / SIDE, cell % SIDE);
    match orientation {
        Orientation::North if row > 0 => Some(cell - SIDE),
        Orientation::South if row + 1 < SIDE => Some(cell + SIDE),
        Orientation::East if col + 1 < SIDE => Some(cell + 1),
        Orientation::West if col > 0 => Some(cell - 1),
        _ => None,
    }
}

/// Cardinal neighbours of `cell` as a bitmask.
pub fn neighbor_mask(cell: usize) -> u16 {
    Orientation::ALL.into_iter().filter_map(|o| ahead(cell, o)).fold(0, |m, c| m | 1 << c)
}

/// Every cell strictly ahead of `cell` in the facing direction.
pub fn line_mask(cell: usize, orientation: Orientation) -> u16 {
    let mut mask = 0;
    let mut cur = cell;
    while let Some(next) = ahead(cur, orientation) {
        mask |= 1 << next;
        cur = next;
    }
    mask
}

/// Hidden layout of one episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WumpusConfig {
    pub wumpus: usize,
    /// Bit `c` set iff cell `c` holds a pit.
    pub pits: u16,
}

impl WumpusConfig {
    pub fn new(wumpus: usize, pits: u16) -> Result<Self, Error> {
        if wumpus >= NUM_CELLS || wumpus == START_CELL {
            return Err(Error::InvalidParameter(format!("wumpus cell {wumpus} invalid")));
        }
        if pits & !NON_START_MASK != 0 {
            return Err(Error::InvalidParameter("start cell cannot hold a pit".into()));
        }
        Ok(Self { wumpus, pits })
    }

    /// Draws a layout from the prior: wumpus uniform over non-start cells,
    /// each non-start cell a pit independently with `pit_probability`.
    pub fn sample<R: RngCore + ?Sized>(rng: &mut R, pit_probability: f64) -> Self {
        let wumpus = rng.random_range(1..NUM_CELLS);
        let mut pits = 0u16;
        for c in (0..NUM_CELLS).filter(|&c| c != START_CELL) {
            if rng.random::<f64>() < pit_probability {
                pits |= 1 << c;
            }
        }
        Self { wumpus, pits }
    }

    pub fn stench(&self, cell: usize) -> bool {
        neighbor_mask(cell) & (1 << self.wumpus) != 0
    }

    pub fn breeze(&self, cell: usize) -> bool {
        neighbor_mask(cell) & self.pits != 0
    }

    pub fn lethal(&self, cell: usize) -> bool {
        cell == self.wumpus || self.pits & (1 << cell) != 0
    }

    pub fn sensed(&self, cell: usize, orientation: Orientation) -> WumpusState {
        WumpusState::Alive { cell, orientation, stench: self.stench(cell), breeze: self.breeze(cell) }
    }

    pub fn start_state(&self) -> WumpusState {
        self.sensed(START_CELL, START_ORIENTATION)
    }

    /// Deterministic transition of the world defined by this layout.
    pub fn transition(&self, state: WumpusState, action: WumpusAction) -> Result<(WumpusState, f64), Error> {
        let WumpusState::Alive { cell, orientation, stench, breeze } = state else {
            return Err(Error::TerminalState(state.index()));
        };
        let next = match action {
            WumpusAction::Left => WumpusState::Alive { cell, orientation: orientation.left(), stench, breeze },
            WumpusAction::Right => WumpusState::Alive { cell, orientation: orientation.right(), stench, breeze },
            WumpusAction::Forward => match ahead(cell, orientation) {
                None => state,
                Some(c) if self.lethal(c) => WumpusState::Dead,
                Some(c) => self.sensed(c, orientation),
            },
            WumpusAction::Shoot => {
                if line_mask(cell, orientation) & (1 << self.wumpus) != 0 {
                    WumpusState::Killed
                } else {
                    WumpusState::Dead
                }
            }
        };
        Ok((next, transition_reward(action, next)))
    }

    /// Compiles this layout into its deterministic MDP over all 258 states.
    pub fn world_mdp(&self, discount: f64) -> Result<TabularMdp, Error> {
        let mut b = MdpBuilder::new(NUM_STATES, NUM_ACTIONS, discount);
        for i in 0..NUM_ALIVE_STATES {
            let state = WumpusState::from_index(i).expect("alive index");
            for action in WumpusAction::ALL {
                let (next, reward) = self.transition(state, action)?;
                b.set_row(i, action as usize, reward, &[(next.index(), 1.0)]);
            }
        }
        b.set_terminal(KILL_STATE);
        b.set_terminal(DEATH_STATE);
        b.build()
    }
}

/// The known reward of a transition, as a function of the action and outcome.
pub fn transition_reward(action: WumpusAction, next: WumpusState) -> f64 {
    match (action, next) {
        (WumpusAction::Shoot, WumpusState::Killed) => KILL_REWARD,
        (WumpusAction::Shoot, _) => 0.0,
        _ => STEP_REWARD,
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WumpusStep {
    pub state: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// A running episode.
#[derive(Debug, Clone)]
pub struct WumpusEnv {
    config: WumpusConfig,
    state: WumpusState,
}

impl WumpusEnv {
    pub fn new(config: WumpusConfig) -> Self {
        Self { config, state: config.start_state() }
    }

    pub fn config(&self) -> &WumpusConfig {
        &self.config
    }

    pub fn state(&self) -> WumpusState {
        self.state
    }

    pub fn step(&mut self, action: usize) -> Result<WumpusStep, Error> {
        let action = WumpusAction::from_index(action)
            .ok_or_else(|| Error::InvalidParameter(format!("wumpus action {action} out of range")))?;
        let (next, reward) = self.config.transition(self.state, action)?;
        self.state = next;
        Ok(WumpusStep { state: next.index(), reward, terminal: next.is_terminal() })
    }
}
