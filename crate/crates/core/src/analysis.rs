//! Computable quantities behind the sample-complexity analysis: Chebyshev
//! deviation bounds on the mean model, the optimism bonus, sample-complexity
//! functions and the polynomial bound on non-optimal steps.
//!
//! The constants assume rewards normalised to `[0, 1]`.

use alloc::format;
use alloc::vec::Vec;

use rand::RngCore;

use crate::belief::Belief;
use crate::error::Error;
use crate::math::{ceil, ln, sqrt};
use crate::mdp::Transition;

/// Accuracy and confidence parameters for the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub rho: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub num_states: usize,
    pub num_actions: usize,
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), Error> {
        check_unit("rho", self.rho)?;
        check_unit("epsilon", self.epsilon)?;
        check_unit("delta", self.delta)?;
        check_discount(self.gamma)?;
        if self.num_states == 0 || self.num_actions == 0 {
            return Err(Error::InvalidParameter("state and action counts must be positive".into()));
        }
        Ok(())
    }

    /// Per-pair parameters used to size the knownness thresholds:
    /// `(ε', δ', ρ') = (ε(1−γ)²/4, δ/(SA), δ/(2S²A²))`.
    pub fn per_pair(&self) -> (f64, f64, f64) {
        let (s, a) = (self.num_states as f64, self.num_actions as f64);
        let slack = 1.0 - self.gamma;
        (0.25 * self.epsilon * slack * slack, self.delta / (s * a), self.delta / (2.0 * s * s * a * a))
    }
}

fn check_unit(name: &str, x: f64) -> Result<(), Error> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {x} must lie in (0, 1)")))
    }
}

fn check_discount(gamma: f64) -> Result<(), Error> {
    if (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma = {gamma} must lie in [0, 1)")))
    }
}

/// `η_P = sqrt(Σ σ²_P) / sqrt(ρ)`: with probability at least `1 − ρ` the true
/// transition row is within `η_P` of the mean row in max norm.
pub fn eta_p<B: Belief + ?Sized>(belief: &B, state: usize, action: usize, rho: f64) -> Result<f64, Error> {
    check_unit("rho", rho)?;
    Ok(sqrt(belief.transition_variance_sum(state, action)) / sqrt(rho))
}

/// `η_R = σ_R / sqrt(ρ)`.
pub fn eta_r<B: Belief + ?Sized>(belief: &B, state: usize, action: usize, rho: f64) -> Result<f64, Error> {
    check_unit("rho", rho)?;
    Ok(belief.reward_stddev(state, action) / sqrt(rho))
}

/// The optimism bonus `(σ_R + γS/(1−γ) · sqrt(Σ σ²_P)) / sqrt(ρ)`.
pub fn lemma3_bonus<B: Belief + ?Sized>(
    belief: &B,
    state: usize,
    action: usize,
    rho: f64,
    gamma: f64,
    num_states: usize,
) -> Result<f64, Error> {
    check_unit("rho", rho)?;
    check_discount(gamma)?;
    let scale = gamma * num_states as f64 / (1.0 - gamma);
    Ok((belief.reward_stddev(state, action) + scale * sqrt(belief.transition_variance_sum(state, action))) / sqrt(rho))
}

/// Closed-form sample complexity for independent Dirichlet priors with known
/// rewards: `γ²S² / (ρ ε² (1−γ)²)`.
pub fn dirichlet_sample_complexity(num_states: usize, gamma: f64, epsilon: f64, rho: f64) -> Result<f64, Error> {
    check_discount(gamma)?;
    check_unit("epsilon", epsilon)?;
    check_unit("rho", rho)?;
    let s = num_states as f64;
    Ok(gamma * gamma * s * s / (rho * epsilon * epsilon * (1.0 - gamma) * (1.0 - gamma)))
}

/// Outcome of [`empirical_sample_complexity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleComplexity {
    Reached(u64),
    /// Some trial needed more than the cap.
    NotReached,
}

/// Settings for [`empirical_sample_complexity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalSettings {
    pub trials: usize,
    /// Maximum observations fed per trial.
    pub cap: u64,
}

impl Default for EmpiricalSettings {
    fn default() -> Self {
        Self { trials: 200, cap: 1_000_000 }
    }
}

/// Monte-Carlo estimate of the sample complexity of `(state, action)`.
///
/// Each trial draws a true model from `prior`, feeds transitions sampled from
/// it at `(state, action)` into a copy of the prior, and records the first
/// count at which [`lemma3_bonus`] drops below `epsilon`. Returns the
/// `(1 − δ)`-quantile of those counts, or [`SampleComplexity::NotReached`] if
/// a trial hit the cap before that quantile was secured.
pub fn empirical_sample_complexity<B: Belief + Clone>(
    prior: &B,
    state: usize,
    action: usize,
    epsilon: f64,
    delta: f64,
    rho: f64,
    gamma: f64,
    settings: EmpiricalSettings,
    rng: &mut dyn RngCore,
) -> Result<SampleComplexity, Error> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    if settings.trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let num_states = prior.num_states();
    let mut firsts: Vec<Option<u64>> = Vec::with_capacity(settings.trials);
    for _ in 0..settings.trials {
        let truth = prior.sample_mdp(rng)?;
        let mut belief = prior.clone();
        let mut count = 0;
        let reached = loop {
            if lemma3_bonus(&belief, state, action, rho, gamma, num_states)? < epsilon {
                break Some(count);
            }
            if count >= settings.cap {
                break None;
            }
            let u = rand::Rng::random::<f64>(rng);
            let next_state = truth.sample_next(state, action, u);
            belief.update(&Transition { state, action, reward: truth.reward(state, action), next_state })?;
            count += 1;
        };
        firsts.push(reached);
    }
    // Unreached trials sort last.
    firsts.sort_by_key(|d| d.unwrap_or(u64::MAX));
    let rank = (ceil((1.0 - delta) * settings.trials as f64) as usize).clamp(1, settings.trials);
    Ok(match firsts[rank - 1] {
        Some(d) => SampleComplexity::Reached(d),
        None => SampleComplexity::NotReached,
    })
}

/// The polynomial bound on non-near-optimal steps, with its hidden constant
/// set to 1 (the value is meaningful only up to constants):
/// `ΣC / (ε(1−γ)²) · ln(1/δ) · ln(1/(ε(1−γ)))`.
pub fn theorem1_bound(total_known_threshold: f64, epsilon: f64, gamma: f64, delta: f64) -> Result<f64, Error> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    check_discount(gamma)?;
    if !(total_known_threshold >= 0.0 && total_known_threshold.is_finite()) {
        return Err(Error::InvalidParameter(format!("sum of thresholds {total_known_threshold} must be finite and >= 0")));
    }
    let slack = 1.0 - gamma;
    Ok(total_known_threshold / (epsilon * slack * slack) * ln(1.0 / delta) * ln(1.0 / (epsilon * slack)))
}
