//! Finite tabular MDPs and exact planning.
//!
//! Transition rows are stored sparsely (compressed rows over `(state, action)`),
//! which keeps the 258-state Wumpus models cheap to plan in while still exposing
//! the dense `P(s'|s,a)` view through [`TabularMdp::transition`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::abs;

/// Row-sum tolerance enforced on every transition row.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Default value-iteration tolerance on the value error.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Default sweep cap for value iteration.
pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// One observed step `(s, a, r, s')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

/// A finite MDP with explicit transition probabilities and expected rewards.
///
/// Terminal states self-loop with zero reward under every action.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    // offsets[s * A + a]..offsets[s * A + a + 1] indexes `next` / `prob`.
    offsets: Vec<usize>,
    next: Vec<usize>,
    prob: Vec<f64>,
    reward: Vec<f64>,
    discount: f64,
    terminal: Vec<bool>,
}

/// Incremental constructor for [`TabularMdp`].
#[derive(Debug, Clone)]
pub struct MdpBuilder {
    num_states: usize,
    num_actions: usize,
    discount: f64,
    rows: Vec<Vec<(usize, f64)>>,
    reward: Vec<f64>,
    terminal: Vec<bool>,
}

impl MdpBuilder {
    pub fn new(num_states: usize, num_actions: usize, discount: f64) -> Self {
        Self {
            num_states,
            num_actions,
            discount,
            rows: vec![Vec::new(); num_states * num_actions],
            reward: vec![0.0; num_states * num_actions],
            terminal: vec![false; num_states],
        }
    }

    /// Sets the outcome distribution and expected reward of `(s, a)`.
    /// Repeated next states are summed.
    pub fn set_row(&mut self, s: usize, a: usize, reward: f64, outcomes: &[(usize, f64)]) -> &mut Self {
        let i = s * self.num_actions + a;
        let row = &mut self.rows[i];
        row.clear();
        for &(next, p) in outcomes {
            match row.iter_mut().find(|(n, _)| *n == next) {
                Some(entry) => entry.1 += p,
                None => row.push((next, p)),
            }
        }
        self.reward[i] = reward;
        self
    }

    /// Marks `s` terminal and installs its zero-reward self-loops.
    pub fn set_terminal(&mut self, s: usize) -> &mut Self {
        self.terminal[s] = true;
        for a in 0..self.num_actions {
            self.set_row(s, a, 0.0, &[(s, 1.0)]);
        }
        self
    }

    pub fn build(self) -> Result<TabularMdp, Error> {
        let MdpBuilder { num_states, num_actions, discount, rows, reward, terminal } = self;
        if num_states == 0 || num_actions == 0 {
            return Err(Error::InvalidModel(format!("empty model: S={num_states}, A={num_actions}")));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidModel(format!("discount {discount} outside [0, 1)")));
        }
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut next = Vec::with_capacity(total);
        let mut prob = Vec::with_capacity(total);
        offsets.push(0);
        for (i, row) in rows.iter().enumerate() {
            let (s, a) = (i / num_actions, i % num_actions);
            let mut sum = 0.0;
            for &(n, p) in row {
                if n >= num_states {
                    return Err(Error::InvalidModel(format!("({s},{a}) leads to out-of-range state {n}")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidModel(format!("P({n}|{s},{a}) = {p} outside [0, 1]")));
                }
                sum += p;
                if p > 0.0 {
                    next.push(n);
                    prob.push(p);
                }
            }
            if abs(sum - 1.0) > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidModel(format!("row ({s},{a}) sums to {sum}")));
            }
            if !reward[i].is_finite() {
                return Err(Error::InvalidModel(format!("reward ({s},{a}) is not finite")));
            }
            offsets.push(next.len());
        }
        let mdp = TabularMdp { num_states, num_actions, offsets, next, prob, reward, discount, terminal };
        for s in (0..num_states).filter(|&s| mdp.terminal[s]) {
            for a in 0..num_actions {
                if mdp.transition(s, a, s) != 1.0 || mdp.reward(s, a) != 0.0 {
                    return Err(Error::InvalidModel(format!("terminal state {s} is not a zero-reward self-loop")));
                }
            }
        }
        Ok(mdp)
    }
}

impl TabularMdp {
    /// Builds from a dense `S×A×S` transition array and an `S×A` reward array.
    pub fn from_dense(
        num_states: usize,
        num_actions: usize,
        transition: &[f64],
        reward: &[f64],
        discount: f64,
        terminal: &[bool],
    ) -> Result<Self, Error> {
        if transition.len() != num_states * num_actions * num_states
            || reward.len() != num_states * num_actions
            || terminal.len() != num_states
        {
            return Err(Error::InvalidModel(format!("array shapes do not match S={num_states}, A={num_actions}")));
        }
        let mut builder = MdpBuilder::new(num_states, num_actions, discount);
        let mut row = Vec::with_capacity(num_states);
        for s in 0..num_states {
            for a in 0..num_actions {
                row.clear();
                let base = (s * num_actions + a) * num_states;
                row.extend((0..num_states).map(|n| (n, transition[base + n])));
                builder.set_row(s, a, reward[s * num_actions + a], &row);
            }
            builder.terminal[s] = terminal[s];
        }
        builder.build()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    pub fn terminal_mask(&self) -> &[bool] {
        &self.terminal
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.num_actions + a]
    }

    /// The `S×A` reward table in row-major order.
    pub fn rewards(&self) -> &[f64] {
        &self.reward
    }

    /// Nonzero entries of the outcome distribution of `(s, a)`.
    pub fn row(&self, s: usize, a: usize) -> (&[usize], &[f64]) {
        let i = s * self.num_actions + a;
        let range = self.offsets[i]..self.offsets[i + 1];
        (&self.next[range.clone()], &self.prob[range])
    }

    /// `P(next | s, a)`.
    pub fn transition(&self, s: usize, a: usize, next: usize) -> f64 {
        let (states, probs) = self.row(s, a);
        states.iter().zip(probs).filter(|(n, _)| **n == next).map(|(_, p)| *p).sum()
    }

    /// Dense copy of the outcome distribution of `(s, a)`.
    pub fn dense_row(&self, s: usize, a: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.num_states];
        let (states, probs) = self.row(s, a);
        for (&n, &p) in states.iter().zip(probs) {
            out[n] += p;
        }
        out
    }

    /// Same transitions with a new `S×A` reward table. Terminal rewards are
    /// forced to zero.
    pub fn with_rewards(&self, reward: Vec<f64>) -> Result<Self, Error> {
        if reward.len() != self.reward.len() {
            return Err(Error::InvalidModel(format!("reward table has {} entries", reward.len())));
        }
        if let Some(i) = reward.iter().position(|r| !r.is_finite()) {
            return Err(Error::InvalidModel(format!("reward entry {i} is not finite")));
        }
        let mut mdp = Self { reward, ..self.clone() };
        for s in (0..mdp.num_states).filter(|&s| mdp.terminal[s]) {
            for a in 0..mdp.num_actions {
                mdp.reward[s * mdp.num_actions + a] = 0.0;
            }
        }
        Ok(mdp)
    }

    /// Same model with a different discount.
    pub fn with_discount(&self, discount: f64) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidModel(format!("discount {discount} outside [0, 1)")));
        }
        Ok(Self { discount, ..self.clone() })
    }

    /// Samples a next state from `(s, a)` given a uniform draw in `[0, 1)`.
    pub fn sample_next(&self, s: usize, a: usize, u: f64) -> usize {
        let (states, probs) = self.row(s, a);
        let mut acc = 0.0;
        for (&n, &p) in states.iter().zip(probs) {
            acc += p;
            if u < acc {
                return n;
            }
        }
        *states.last().expect("rows are nonempty")
    }

    /// The MDP whose action set is the disjoint union of the samples' action
    /// sets: action `k * A + a` follows sample `k`'s row for `a`.
    pub fn merge(samples: &[TabularMdp]) -> Result<Self, Error> {
        let first = samples.first().ok_or_else(|| Error::InvalidParameter("no samples to merge".into()))?;
        let (s_count, a_count) = (first.num_states, first.num_actions);
        if samples.iter().any(|m| m.num_states != s_count || m.num_actions != a_count) {
            return Err(Error::InvalidModel("merged samples disagree on shape".into()));
        }
        let merged_actions = a_count * samples.len();
        let mut offsets = Vec::with_capacity(s_count * merged_actions + 1);
        let mut next = Vec::new();
        let mut prob = Vec::new();
        let mut reward = Vec::with_capacity(s_count * merged_actions);
        offsets.push(0);
        for s in 0..s_count {
            for m in samples {
                for a in 0..a_count {
                    let (ns, ps) = m.row(s, a);
                    next.extend_from_slice(ns);
                    prob.extend_from_slice(ps);
                    offsets.push(next.len());
                    reward.push(m.reward(s, a));
                }
            }
        }
        Ok(Self {
            num_states: s_count,
            num_actions: merged_actions,
            offsets,
            next,
            prob,
            reward,
            discount: first.discount,
            terminal: first.terminal.clone(),
        })
    }
}

/// State values and action values; `values[s] = max_a q_values[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    pub values: Vec<f64>,
    /// Row-major `S×A`.
    pub q_values: Vec<f64>,
    pub num_actions: usize,
    /// Sweeps performed.
    pub iterations: usize,
    /// Max-norm difference of the last sweep.
    pub residual: f64,
}

impl ValueFunction {
    pub fn q(&self, s: usize, a: usize) -> f64 {
        self.q_values[s * self.num_actions + a]
    }

    pub fn q_row(&self, s: usize) -> &[f64] {
        &self.q_values[s * self.num_actions..(s + 1) * self.num_actions]
    }

    /// Lowest-index maximiser of `q(s, ·)`.
    pub fn greedy_action(&self, s: usize) -> usize {
        argmax(self.q_row(s))
    }
}

/// A deterministic stationary policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub action: Vec<usize>,
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (a, &q) in row.iter().enumerate().skip(1) {
        if q > row[best] {
            best = a;
        }
    }
    best
}

/// One Jacobi Bellman optimality sweep: fills `q_out` from `values_in`, writes
/// the action maxima to `values_out`, and returns `‖values_out − values_in‖∞`.
pub fn bellman_sweep(mdp: &TabularMdp, values_in: &[f64], values_out: &mut [f64], q_out: &mut [f64]) -> f64 {
    let a_count = mdp.num_actions;
    let gamma = mdp.discount;
    let mut residual: f64 = 0.0;
    for s in 0..mdp.num_states {
        let mut best = f64::NEG_INFINITY;
        for a in 0..a_count {
            let i = s * a_count + a;
            let range = mdp.offsets[i]..mdp.offsets[i + 1];
            let mut expect = 0.0;
            for (&n, &p) in mdp.next[range.clone()].iter().zip(&mdp.prob[range]) {
                expect += p * values_in[n];
            }
            let q = mdp.reward[i] + gamma * expect;
            q_out[i] = q;
            if q > best {
                best = q;
            }
        }
        values_out[s] = best;
        residual = residual.max(abs(best - values_in[s]));
    }
    residual
}

/// Value iteration from zero.
pub fn value_iteration(mdp: &TabularMdp, tolerance: f64, max_iters: usize) -> Result<ValueFunction, Error> {
    value_iteration_from(mdp, &vec![0.0; mdp.num_states], tolerance, max_iters)
}

/// Value iteration warm-started from `initial`.
///
/// Stops once a sweep changes values by at most `tolerance·(1−γ)/γ`, which
/// bounds the value error of the result by `tolerance`, or after `max_iters`
/// sweeps.
pub fn value_iteration_from(
    mdp: &TabularMdp,
    initial: &[f64],
    tolerance: f64,
    max_iters: usize,
) -> Result<ValueFunction, Error> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be positive".into()));
    }
    if initial.len() != mdp.num_states {
        return Err(Error::InvalidParameter(format!("warm start has {} values", initial.len())));
    }
    let gamma = mdp.discount;
    let threshold = if gamma > 0.0 { tolerance * (1.0 - gamma) / gamma } else { f64::INFINITY };
    let mut current = initial.to_vec();
    let mut next = vec![0.0; mdp.num_states];
    let mut q = vec![0.0; mdp.num_states * mdp.num_actions];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iters {
        residual = bellman_sweep(mdp, &current, &mut next, &mut q);
        iterations += 1;
        core::mem::swap(&mut current, &mut next);
        if residual <= threshold {
            break;
        }
    }
    Ok(ValueFunction { values: current, q_values: q, num_actions: mdp.num_actions, iterations, residual })
}

/// Greedy policy with lowest-index tie-breaking.
pub fn greedy_policy(vf: &ValueFunction) -> Policy {
    Policy { action: (0..vf.values.len()).map(|s| vf.greedy_action(s)).collect() }
}

/// Exact value of a deterministic policy: solves `(I − γP_π) v = r_π`.
pub fn policy_value(mdp: &TabularMdp, policy: &Policy) -> Result<Vec<f64>, Error> {
    let n = mdp.num_states;
    if policy.action.len() != n {
        return Err(Error::InvalidParameter(format!("policy has {} entries for {n} states", policy.action.len())));
    }
    if let Some(s) = policy.action.iter().position(|&a| a >= mdp.num_actions) {
        return Err(Error::InvalidParameter(format!("policy action {} at state {s} out of range", policy.action[s])));
    }
    let gamma = mdp.discount;
    let mut matrix = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for s in 0..n {
        let a = policy.action[s];
        matrix[s * n + s] += 1.0;
        let (states, probs) = mdp.row(s, a);
        for (&t, &p) in states.iter().zip(probs) {
            matrix[s * n + t] -= gamma * p;
        }
        rhs[s] = mdp.reward(s, a);
    }
    let mut v = solve_dense(matrix.clone(), rhs.clone(), n)?;
    // One round of iterative refinement.
    let residual: Vec<f64> = (0..n)
        .map(|i| rhs[i] - (0..n).map(|j| matrix[i * n + j] * v[j]).sum::<f64>())
        .collect();
    let correction = solve_dense(matrix, residual, n)?;
    for (x, c) in v.iter_mut().zip(correction) {
        *x += c;
    }
    Ok(v)
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut m: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>, Error> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| abs(m[i * n + col]).total_cmp(&abs(m[j * n + col])))
            .expect("nonempty range");
        if abs(m[pivot * n + col]) < 1e-300 {
            return Err(Error::InvalidModel("singular policy-evaluation system".into()));
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / m[row * n + row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_state(reward: f64, gamma: f64) -> TabularMdp {
        let mut b = MdpBuilder::new(1, 1, gamma);
        b.set_row(0, 0, reward, &[(0, 1.0)]);
        b.build().unwrap()
    }

    #[test]
    fn geometric_series_self_loop() {
        let vf = value_iteration(&single_state(1.0, 0.9), DEFAULT_TOLERANCE, DEFAULT_MAX_ITERS).unwrap();
        assert!((vf.values[0] - 10.0).abs() <= DEFAULT_TOLERANCE);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut b = MdpBuilder::new(2, 1, 0.9);
        b.set_row(0, 0, 0.0, &[(0, 0.5), (1, 0.4)]);
        b.set_row(1, 0, 0.0, &[(1, 1.0)]);
        assert!(matches!(b.build(), Err(Error::InvalidModel(_))));

        let mut b = MdpBuilder::new(1, 1, 0.9);
        b.set_row(0, 0, 0.0, &[(0, 1.5), (0, -0.5)]);
        // duplicates are summed before validation, so this row is fine
        assert!(b.build().is_ok());

        let mut b = MdpBuilder::new(1, 1, 1.0);
        b.set_row(0, 0, 0.0, &[(0, 1.0)]);
        assert!(b.build().is_err());
    }

    #[test]
    fn terminal_must_self_loop() {
        let mut b = MdpBuilder::new(2, 1, 0.9);
        b.set_row(0, 0, 0.0, &[(1, 1.0)]);
        b.set_terminal(1);
        let mdp = b.build().unwrap();
        assert!(mdp.is_terminal(1));

        let mut b = MdpBuilder::new(2, 1, 0.9);
        b.set_row(0, 0, 0.0, &[(1, 1.0)]);
        b.set_terminal(1);
        b.set_row(1, 0, 1.0, &[(1, 1.0)]);
        assert!(b.build().is_err());
    }

    #[test]
    fn tie_break_lowest_index() {
        let vf = ValueFunction {
            values: vec![0.5, 0.7],
            q_values: vec![0.5, 0.5, 0.1, 0.7],
            num_actions: 2,
            iterations: 0,
            residual: 0.0,
        };
        assert_eq!(greedy_policy(&vf).action, vec![0, 1]);
    }

    #[test]
    fn hand_computed_policy_value() {
        // 0 -> 1 (reward 0), 1 -> terminal 2 (reward 1); γ = 0.5.
        let mut b = MdpBuilder::new(3, 1, 0.5);
        b.set_row(0, 0, 0.0, &[(1, 1.0)]);
        b.set_row(1, 0, 1.0, &[(2, 1.0)]);
        b.set_terminal(2);
        let mdp = b.build().unwrap();
        let v = policy_value(&mdp, &Policy { action: vec![0, 0, 0] }).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn zero_discount_is_one_step() {
        let vf = value_iteration(&single_state(3.0, 0.0), DEFAULT_TOLERANCE, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(vf.values[0], 3.0);
        assert_eq!(vf.iterations, 1);
    }

    #[test]
    fn merge_copies_rows() {
        let a = single_state(1.0, 0.9);
        let b = single_state(2.0, 0.9);
        let m = TabularMdp::merge(&[a, b]).unwrap();
        assert_eq!(m.num_actions(), 2);
        assert_eq!(m.reward(0, 1), 2.0);
        assert_eq!(m.row(0, 1), (&[0usize][..], &[1.0][..]));
    }
}
