//! Experiment configuration and its flat `key = value` file format.
//!
//! Every key mirrors a CLI flag (hyphens or underscores both accepted):
//!
//! ```text
//! # chain, Full prior, variance bonus
//! benchmark = chain
//! prior = full
//! agent = variance
//! beta-p = 4
//! runs = 500
//! horizon = 1000
//! seed = 7
//! ```
//!
//! Keys: `benchmark`, `prior`, `agent`, `beta`, `beta-r`, `beta-p`, `k`,
//! `knownness`, `c`, `gamma`, `runs`, `horizon`, `seed`, `out`, `jobs`,
//! `alpha` (Dirichlet concentration), `slip-prior` (`a,b` Beta pseudo-counts
//! over the slip probability), `tolerance`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Chain,
    Wumpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Tied,
    Semi,
    Full,
    /// The Wumpus layout prior.
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    Mean,
    Variance,
    InverseCount,
    InverseSqrt,
    Boss,
    Algorithm1,
    /// Plans in the true model (knows the hidden parameters).
    Oracle,
}

macro_rules! named_enum {
    ($t:ty { $($v:ident => $($name:literal)|+),+ $(,)? }) => {
        impl FromStr for $t {
            type Err = HarnessError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($($name)|+ => Ok(<$t>::$v),)+
                    other => Err(HarnessError::Config(format!(concat!("unknown ", stringify!($t), " '{}'"), other))),
                }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = match self { $(<$t>::$v => [$($name),+][0],)+ };
                f.write_str(name)
            }
        }
    };
}

named_enum!(Benchmark { Chain => "chain", Wumpus => "wumpus" });
named_enum!(PriorKind { Tied => "tied", Semi => "semi" | "semi-tied" | "semi_tied", Full => "full" | "dirichlet", Default => "default" });
named_enum!(AgentKind {
    Mean => "mean" | "mean-mdp",
    Variance => "variance",
    InverseCount => "inverse-count" | "inverse_count" | "1/n",
    InverseSqrt => "inverse-sqrt" | "inverse_sqrt" | "1/sqrt(n)",
    Boss => "boss",
    Algorithm1 => "algorithm1" | "bounded-variance",
    Oracle => "oracle",
});

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    pub prior: PriorKind,
    pub agent: AgentKind,
    /// Coefficient of the count-based bonuses.
    pub beta: f64,
    pub beta_r: f64,
    pub beta_p: f64,
    /// BOSS sample count.
    pub k: usize,
    /// BOSS resampling threshold on visit counts.
    pub knownness: u64,
    /// Uniform knownness threshold for the gated agent.
    pub c: u64,
    pub gamma: f64,
    /// Chain runs or Wumpus episodes.
    pub runs: usize,
    /// Steps per chain run, or the Wumpus episode cap.
    pub horizon: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    pub alpha: f64,
    pub slip_prior: (f64, f64),
    pub tolerance: f64,
}

impl ExperimentConfig {
    pub fn chain() -> Self {
        Self {
            benchmark: Benchmark::Chain,
            prior: PriorKind::Full,
            agent: AgentKind::Variance,
            beta: 0.0,
            beta_r: 0.0,
            beta_p: 0.0,
            k: 20,
            knownness: 1,
            c: 10,
            gamma: 0.95,
            runs: 500,
            horizon: 1000,
            seed: 0,
            out: None,
            jobs: 0,
            alpha: 1.0,
            slip_prior: (1.0, 1.0),
            tolerance: varbonus_core::mdp::DEFAULT_TOLERANCE,
        }
    }

    pub fn wumpus() -> Self {
        Self { benchmark: Benchmark::Wumpus, prior: PriorKind::Default, runs: 500, horizon: 1000, ..Self::chain() }
    }

    pub fn for_benchmark(benchmark: Benchmark) -> Self {
        match benchmark {
            Benchmark::Chain => Self::chain(),
            Benchmark::Wumpus => Self::wumpus(),
        }
    }

    /// The coefficient a sweep varies for this agent.
    pub fn sweep_coefficient(&self) -> f64 {
        match self.agent {
            AgentKind::Variance | AgentKind::Algorithm1 => self.beta_p,
            AgentKind::Boss => self.k as f64,
            _ => self.beta,
        }
    }

    pub fn set_sweep_coefficient(&mut self, value: f64) {
        match self.agent {
            AgentKind::Variance | AgentKind::Algorithm1 => self.beta_p = value,
            AgentKind::Boss => self.k = value.round().max(1.0) as usize,
            _ => self.beta = value,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        match (self.benchmark, self.prior) {
            (Benchmark::Chain, PriorKind::Default) => return bad("chain needs prior tied, semi or full".into()),
            (Benchmark::Wumpus, p) if p != PriorKind::Default => return bad(format!("wumpus has only the default prior, got {p}")),
            _ => {}
        }
        for (name, v) in [("beta", self.beta), ("beta-r", self.beta_r), ("beta-p", self.beta_p)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1), got {}", self.gamma));
        }
        if self.runs == 0 || self.horizon == 0 {
            return bad("runs and horizon must be positive".into());
        }
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        let (a, b) = self.slip_prior;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return bad(format!("slip-prior must be two positive numbers, got {a},{b}"));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        let value = value.trim();
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
            v.parse().map_err(|_| HarnessError::Config(format!("bad value '{v}' for {key}")))
        }
        match key.as_str() {
            "benchmark" => self.benchmark = value.parse()?,
            "prior" => self.prior = value.parse()?,
            "agent" => self.agent = value.parse()?,
            "beta" => self.beta = num(&key, value)?,
            "beta-r" => self.beta_r = num(&key, value)?,
            "beta-p" => self.beta_p = num(&key, value)?,
            "k" => self.k = num(&key, value)?,
            "knownness" => self.knownness = num(&key, value)?,
            "c" => self.c = if value == "inf" { u64::MAX } else { num(&key, value)? },
            "gamma" => self.gamma = num(&key, value)?,
            "runs" | "episodes" => self.runs = num(&key, value)?,
            "horizon" => self.horizon = num(&key, value)?,
            "seed" => self.seed = num(&key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "jobs" => self.jobs = num(&key, value)?,
            "alpha" => self.alpha = num(&key, value)?,
            "slip-prior" => {
                let (a, b) = value
                    .split_once(',')
                    .ok_or_else(|| HarnessError::Config(format!("slip-prior expects 'a,b', got '{value}'")))?;
                self.slip_prior = (num(&key, a.trim())?, num(&key, b.trim())?);
            }
            "tolerance" => self.tolerance = num(&key, value)?,
            other => return Err(HarnessError::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies every setting of a config file body.
    pub fn apply_file(&mut self, contents: &str) -> Result<(), HarnessError> {
        for (key, value) in parse_file(contents)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Key/value pairs describing this config, in file order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let c = if self.c == u64::MAX { "inf".to_string() } else { self.c.to_string() };
        vec![
            ("benchmark", self.benchmark.to_string()),
            ("prior", self.prior.to_string()),
            ("agent", self.agent.to_string()),
            ("beta", self.beta.to_string()),
            ("beta-r", self.beta_r.to_string()),
            ("beta-p", self.beta_p.to_string()),
            ("k", self.k.to_string()),
            ("knownness", self.knownness.to_string()),
            ("c", c),
            ("gamma", self.gamma.to_string()),
            ("runs", self.runs.to_string()),
            ("horizon", self.horizon.to_string()),
            ("seed", self.seed.to_string()),
            ("alpha", self.alpha.to_string()),
            ("slip-prior", format!("{},{}", self.slip_prior.0, self.slip_prior.1)),
            ("tolerance", self.tolerance.to_string()),
        ]
    }
}

/// The `(key, value)` lines of a config file body, in order, with keys
/// normalised to lowercase and hyphens. `#` starts a comment.
pub fn parse_file(contents: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut pairs = Vec::new();
    for (line_no, raw) in contents.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", line_no + 1)))?;
        pairs.push((key.trim().to_ascii_lowercase().replace('_', "-"), value.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::chain();
        assert_eq!((c.runs, c.horizon, c.gamma), (500, 1000, 0.95));
        let w = ExperimentConfig::wumpus();
        assert_eq!((w.runs, w.horizon, w.prior), (500, 1000, PriorKind::Default));
    }

    #[test]
    fn file_round_trip() {
        let mut c = ExperimentConfig::wumpus();
        c.agent = AgentKind::Boss;
        c.k = 40;
        c.c = u64::MAX;
        let body: String = c.to_pairs().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let mut parsed = ExperimentConfig::chain();
        parsed.apply_file(&body).unwrap();
        assert_eq!(parsed, c);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ExperimentConfig::chain();
        assert!(c.set("nope", "1").is_err());
        assert!(c.set("gamma", "abc").is_err());
        assert!(c.apply_file("gamma 0.9").is_err());
        c.set("gamma", "1.5").unwrap();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::chain();
        c.prior = PriorKind::Default;
        assert!(c.validate().is_err());
    }
}
