//! Text trajectory logs.
//!
//! ```text
//! # varbonus trajectory benchmark=wumpus agent=variance seed=0 run=0
//! t	state	action	reward	next	percepts
//! 0	(0,0,E,0,0)	forward	-0.01	(0,1,E,0,1)	stench=0,breeze=1
//! 1	(0,1,E,0,1)	shoot	1	KILL	-
//! ```
//!
//! Wumpus states are `(row,col,orientation,stench,breeze)` or `KILL`/`DEAD`;
//! chain states are `node=<1..5>` and actions `A`/`B`. Fields are tab-separated.

use std::fmt::Write as _;

use varbonus_core::env::chain::{ACTION_A, ACTION_B};
use varbonus_core::env::wumpus::{Orientation, WumpusAction, WumpusState, SIDE};
use varbonus_core::rollout::EpisodeRecord;
use varbonus_core::Transition;

use crate::config::Benchmark;
use crate::HarnessError;

const MAGIC: &str = "# varbonus trajectory";
const COLUMNS: &str = "t\tstate\taction\treward\tnext\tpercepts";

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub benchmark: Benchmark,
    /// Extra `key=value` header fields after the benchmark.
    pub meta: Vec<(String, String)>,
    pub steps: Vec<(usize, Transition)>,
}

impl TrajectoryLog {
    pub fn from_record(benchmark: Benchmark, meta: Vec<(String, String)>, record: &EpisodeRecord) -> Self {
        Self { benchmark, meta, steps: record.steps.iter().map(|s| (s.t, s.transition)).collect() }
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|(_, t)| t.reward).sum()
    }
}

pub fn format_state(benchmark: Benchmark, state: usize) -> String {
    match benchmark {
        Benchmark::Chain => format!("node={}", state + 1),
        Benchmark::Wumpus => match WumpusState::from_index(state) {
            Some(WumpusState::Alive { cell, orientation, stench, breeze }) => format!(
                "({},{},{},{},{})",
                cell / SIDE,
                cell % SIDE,
                orientation.symbol(),
                stench as u8,
                breeze as u8
            ),
            Some(WumpusState::Killed) => "KILL".into(),
            _ => "DEAD".into(),
        },
    }
}

pub fn parse_state(benchmark: Benchmark, text: &str) -> Result<usize, HarnessError> {
    let bad = || HarnessError::Format(format!("bad {benchmark} state '{text}'"));
    match benchmark {
        Benchmark::Chain => {
            let node: usize = text.strip_prefix("node=").and_then(|n| n.parse().ok()).ok_or_else(bad)?;
            if (1..=5).contains(&node) {
                Ok(node - 1)
            } else {
                Err(bad())
            }
        }
        Benchmark::Wumpus => match text {
            "KILL" => Ok(WumpusState::Killed.index()),
            "DEAD" => Ok(WumpusState::Dead.index()),
            _ => {
                let inner = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
                let parts: Vec<&str> = inner.split(',').collect();
                if parts.len() != 5 {
                    return Err(bad());
                }
                let row: usize = parts[0].parse().map_err(|_| bad())?;
                let col: usize = parts[1].parse().map_err(|_| bad())?;
                let orientation = parts[2].chars().next().and_then(Orientation::from_symbol).ok_or_else(bad)?;
                let flag = |s: &str| match s {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(bad()),
                };
                if row >= SIDE || col >= SIDE {
                    return Err(bad());
                }
                let state =
                    WumpusState::Alive { cell: row * SIDE + col, orientation, stench: flag(parts[3])?, breeze: flag(parts[4])? };
                Ok(state.index())
            }
        },
    }
}

pub fn format_action(benchmark: Benchmark, action: usize) -> String {
    match benchmark {
        Benchmark::Chain => if action == ACTION_A { "A" } else { "B" }.into(),
        Benchmark::Wumpus => WumpusAction::from_index(action).map_or("?", |a| a.name()).into(),
    }
}

pub fn parse_action(benchmark: Benchmark, text: &str) -> Result<usize, HarnessError> {
    let found = match benchmark {
        Benchmark::Chain => match text {
            "A" => Some(ACTION_A),
            "B" => Some(ACTION_B),
            _ => None,
        },
        Benchmark::Wumpus => WumpusAction::ALL.into_iter().find(|a| a.name() == text).map(|a| a as usize),
    };
    found.ok_or_else(|| HarnessError::Format(format!("bad {benchmark} action '{text}'")))
}

fn format_percepts(benchmark: Benchmark, state: usize) -> String {
    match (benchmark, WumpusState::from_index(state)) {
        (Benchmark::Wumpus, Some(WumpusState::Alive { stench, breeze, .. })) => {
            format!("stench={},breeze={}", stench as u8, breeze as u8)
        }
        _ => "-".into(),
    }
}

pub fn write_log(log: &TrajectoryLog) -> String {
    let mut out = format!("{MAGIC} benchmark={}", log.benchmark);
    for (k, v) in &log.meta {
        let _ = write!(out, " {k}={v}");
    }
    out.push('\n');
    out.push_str(COLUMNS);
    out.push('\n');
    for (t, tr) in &log.steps {
        let b = log.benchmark;
        let _ = writeln!(
            out,
            "{t}\t{}\t{}\t{}\t{}\t{}",
            format_state(b, tr.state),
            format_action(b, tr.action),
            tr.reward,
            format_state(b, tr.next_state),
            format_percepts(b, tr.next_state)
        );
    }
    out
}

pub fn parse_log(body: &str) -> Result<TrajectoryLog, HarnessError> {
    let mut lines = body.lines();
    let header = lines.next().ok_or_else(|| HarnessError::Format("empty trajectory log".into()))?;
    let fields = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| HarnessError::Format("missing trajectory header".into()))?;
    let mut benchmark = None;
    let mut meta = Vec::new();
    for kv in fields.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| HarnessError::Format(format!("bad header field '{kv}'")))?;
        if k == "benchmark" {
            benchmark = Some(v.parse::<Benchmark>().map_err(|e| HarnessError::Format(e.to_string()))?);
        } else {
            meta.push((k.to_string(), v.to_string()));
        }
    }
    let benchmark = benchmark.ok_or_else(|| HarnessError::Format("header lacks benchmark".into()))?;
    if lines.next() != Some(COLUMNS) {
        return Err(HarnessError::Format("missing column line".into()));
    }
    let mut steps = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(HarnessError::Format(format!("expected 6 fields in '{line}'")));
        }
        let t = cols[0].parse().map_err(|_| HarnessError::Format(format!("bad step index '{}'", cols[0])))?;
        let reward = cols[3].parse().map_err(|_| HarnessError::Format(format!("bad reward '{}'", cols[3])))?;
        let transition = Transition {
            state: parse_state(benchmark, cols[1])?,
            action: parse_action(benchmark, cols[2])?,
            reward,
            next_state: parse_state(benchmark, cols[4])?,
        };
        if let Some((_, prev)) = steps.last() {
            let prev: &Transition = prev;
            if prev.next_state != transition.state {
                return Err(HarnessError::Format(format!("step {t} does not continue from the previous step")));
            }
        }
        steps.push((t, transition));
    }
    Ok(TrajectoryLog { benchmark, meta, steps })
}

/// Human-readable replay: one line per step, with a cave map for Wumpus.
pub fn render(log: &TrajectoryLog) -> String {
    let mut out = String::new();
    let b = log.benchmark;
    let meta: Vec<String> = log.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "{b} trajectory {}", meta.join(" "));
    let mut visited = [false; SIDE * SIDE];
    let mut total = 0.0;
    for (t, tr) in &log.steps {
        total += tr.reward;
        let _ = writeln!(
            out,
            "t={t:<4} {:<14} {:<8} r={:<6} -> {:<14} {}  (return {:.2})",
            format_state(b, tr.state),
            format_action(b, tr.action),
            tr.reward,
            format_state(b, tr.next_state),
            format_percepts(b, tr.next_state),
            total
        );
        if b == Benchmark::Wumpus {
            for s in [tr.state, tr.next_state] {
                if let Some(WumpusState::Alive { cell, .. }) = WumpusState::from_index(s) {
                    visited[cell] = true;
                }
            }
        }
    }
    if b == Benchmark::Wumpus {
        let last = log.steps.last().map(|(_, t)| t.next_state);
        let _ = writeln!(out, "cave (visited '.', unvisited '?', agent arrow):");
        for row in 0..SIDE {
            let line: String = (0..SIDE)
                .map(|col| {
                    let cell = row * SIDE + col;
                    match last.and_then(WumpusState::from_index) {
                        Some(WumpusState::Alive { cell: c, orientation, .. }) if c == cell => match orientation {
                            Orientation::North => '^',
                            Orientation::East => '>',
                            Orientation::South => 'v',
                            Orientation::West => '<',
                        },
                        _ if visited[cell] => '.',
                        _ => '?',
                    }
                })
                .collect();
            let _ = writeln!(out, "  {line}");
        }
    }
    let ending = match log.steps.last().map(|(_, t)| t.next_state).and_then(|s| WumpusState::from_index(s).filter(|_| b == Benchmark::Wumpus)) {
        Some(WumpusState::Killed) => " (wumpus killed)",
        Some(WumpusState::Dead) => " (episode lost)",
        _ => "",
    };
    let _ = writeln!(out, "steps={} return={}{ending}", log.steps.len(), log.total_reward());
    out
}
