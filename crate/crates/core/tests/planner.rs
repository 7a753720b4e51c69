use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varbonus_core::mdp::{bellman_sweep, greedy_policy, policy_value, value_iteration, MdpBuilder, Policy, TabularMdp};

/// Random MDP with `s` states, `a` actions and the last state optionally terminal.
fn random_mdp(s: usize, a: usize, gamma: f64, terminal: bool, seed: u64) -> TabularMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = MdpBuilder::new(s, a, gamma);
    let live = if terminal { s - 1 } else { s };
    for state in 0..live {
        for action in 0..a {
            let raw: Vec<f64> = (0..s).map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random::<f64>() }).collect();
            let total: f64 = raw.iter().sum();
            let row: Vec<(usize, f64)> = if total == 0.0 {
                vec![(rng.random_range(0..s), 1.0)]
            } else {
                raw.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(n, p)| (n, p / total)).collect()
            };
            b.set_row(state, action, rng.random_range(-1.0..1.0), &row);
        }
    }
    if terminal {
        b.set_terminal(s - 1);
    }
    b.build().unwrap()
}

/// Policy evaluation by plain fixed-point iteration, run far past convergence.
fn evaluate_iteratively(mdp: &TabularMdp, policy: &[usize]) -> Vec<f64> {
    let s = mdp.num_states();
    let mut v = vec![0.0; s];
    let sweeps = if mdp.discount() == 0.0 { 1 } else { (40.0 / (1.0 - mdp.discount())) as usize * 20 };
    for _ in 0..sweeps {
        let next: Vec<f64> = (0..s)
            .map(|state| {
                if mdp.is_terminal(state) {
                    return 0.0;
                }
                let a = policy[state];
                let (ns, ps) = mdp.row(state, a);
                mdp.reward(state, a) + mdp.discount() * ns.iter().zip(ps).map(|(&n, &p)| p * v[n]).sum::<f64>()
            })
            .collect();
        v = next;
    }
    v
}

fn all_policies(s: usize, a: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..s {
        out = out.into_iter().flat_map(|p| (0..a).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

fn mdp_params() -> impl Strategy<Value = (usize, usize, f64, bool, u64)> {
    (2usize..=4, 2usize..=3, prop_oneof![Just(0.0), 0.0f64..0.9], any::<bool>(), any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn value_iteration_matches_policy_enumeration((s, a, gamma, terminal, seed) in mdp_params()) {
        let mdp = random_mdp(s, a, gamma, terminal, seed);
        let vf = value_iteration(&mdp, 1e-10, 100_000).unwrap();
        let mut best = vec![f64::NEG_INFINITY; s];
        for p in all_policies(s, a) {
            for (b, v) in best.iter_mut().zip(evaluate_iteratively(&mdp, &p)) {
                *b = b.max(v);
            }
        }
        for state in 0..s {
            prop_assert!((vf.values[state] - best[state]).abs() < 1e-6, "{} vs {}", vf.values[state], best[state]);
        }
        let greedy = policy_value(&mdp, &greedy_policy(&vf)).unwrap();
        for state in 0..s {
            prop_assert!((greedy[state] - best[state]).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_policy_value_matches_iteration((s, a, gamma, terminal, seed) in mdp_params(), pick in any::<u64>()) {
        let mdp = random_mdp(s, a, gamma, terminal, seed);
        let policies = all_policies(s, a);
        let p = &policies[(pick % policies.len() as u64) as usize];
        let exact = policy_value(&mdp, &Policy { action: p.clone() }).unwrap();
        for (x, y) in exact.iter().zip(evaluate_iteratively(&mdp, p)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn bellman_operator_contracts((s, a, gamma, terminal, seed) in mdp_params(), v1 in prop::collection::vec(-10.0f64..10.0, 4), v2 in prop::collection::vec(-10.0f64..10.0, 4)) {
        let mdp = random_mdp(s, a, gamma, terminal, seed);
        let (v1, v2) = (&v1[..s], &v2[..s]);
        let (mut t1, mut t2) = (vec![0.0; s], vec![0.0; s]);
        let (mut q1, mut q2) = (vec![0.0; s * a], vec![0.0; s * a]);
        bellman_sweep(&mdp, v1, &mut t1, &mut q1);
        bellman_sweep(&mdp, v2, &mut t2, &mut q2);
        let gap_in = v1.iter().zip(v2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let gap_out = t1.iter().zip(&t2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(gap_out <= gamma * gap_in + 1e-12);
    }

    #[test]
    fn constant_reward_shift_keeps_greedy_policy((s, a, gamma, _t, seed) in mdp_params(), shift in -5.0f64..5.0) {
        let mdp = random_mdp(s, a, gamma, false, seed);
        let shifted = mdp.with_rewards(mdp.rewards().iter().map(|r| r + shift).collect()).unwrap();
        let v = value_iteration(&mdp, 1e-10, 100_000).unwrap();
        let w = value_iteration(&shifted, 1e-10, 100_000).unwrap();
        for state in 0..s {
            for action in 0..a {
                let moved = w.q(state, action) - shift / (1.0 - gamma);
                prop_assert!((moved - v.q(state, action)).abs() < 1e-6);
            }
            // argmax agrees unless the original top two are numerically tied
            let row = v.q_row(state);
            let top = row[v.greedy_action(state)];
            let second = row.iter().enumerate().filter(|(i, _)| *i != v.greedy_action(state)).map(|(_, q)| *q).fold(f64::NEG_INFINITY, f64::max);
            if top - second > 1e-6 {
                prop_assert_eq!(v.greedy_action(state), w.greedy_action(state));
            }
        }
    }
}

#[test]
fn monte_carlo_returns_match_policy_value() {
    let mdp = random_mdp(4, 2, 0.8, true, 11);
    let policy = Policy { action: vec![1, 0, 1, 0] };
    let exact = policy_value(&mdp, &policy).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let episodes = 20_000;
    let mut returns = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let (mut state, mut discount, mut total) = (0usize, 1.0, 0.0);
        for _ in 0..200 {
            if mdp.is_terminal(state) {
                break;
            }
            let a = policy.action[state];
            total += discount * mdp.reward(state, a);
            discount *= mdp.discount();
            state = mdp.sample_next(state, a, rng.random());
        }
        returns.push(total);
    }
    let mean = returns.iter().sum::<f64>() / episodes as f64;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (episodes - 1) as f64;
    let se = (var / episodes as f64).sqrt();
    assert!((mean - exact[0]).abs() < 4.0 * se + 1e-9, "{mean} vs {} (se {se})", exact[0]);
}
