//! Finite Markov decision processes: environments, rewards, policies,
//! trajectories, and exact expected returns.
//!
//! An environment is the tuple `(S, A, σ, τ)` with dense integer state and
//! action indices: `σ` is the initial-state distribution and `τ(s′|s,a)` a
//! sparse transition table. Rewards live in a separate [`RewardTable`] whose
//! entries are either finite or exactly `−∞` (the masking sentinel used by
//! constrained re-planning); `NaN` and `+∞` are rejected. Policies are rows
//! `π(·|s) ∈ Δ(A)`.
//!
//! The expected discounted return of a policy,
//! `E[Σ_{t≥0} γ^t · r(s_t, a_t)]` truncated at a finite horizon, is computed
//! exactly by propagating the state distribution — no sampling — so tests can
//! assert returns to machine precision. If a `−∞`-masked decision carries
//! nonzero probability mass, the return is `−∞` by the absorbing arithmetic
//! rule `−∞ + finite = −∞`.

use crate::error::{Error, Result};
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Absolute tolerance for "sums to one" checks on probability vectors.
pub const PROB_TOL: f64 = 1e-9;

/// A finite environment `(S, A, σ, τ)`.
///
/// `transitions` is indexed by `s * action_count + a` and stores each row as
/// a sparse list of `(next_state, probability)` pairs. Fields are public so
/// that callers (and tests) can build arbitrary — even invalid — instances;
/// [`Environment::new`] validates and should be preferred.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    /// Number of states `|S|` (states are `0..state_count`).
    pub state_count: usize,
    /// Number of actions `|A|` (actions are `0..action_count`).
    pub action_count: usize,
    /// Initial-state distribution `σ`, length `state_count`.
    pub initial_dist: Vec<f64>,
    /// Sparse transition rows `τ(·|s,a)`, indexed by `s * action_count + a`.
    pub transitions: Vec<Vec<(usize, f64)>>,
    /// Optional human-readable state names, length `state_count` when given.
    pub state_labels: Option<Vec<String>>,
    /// Optional human-readable action names, length `action_count` when given.
    pub action_labels: Option<Vec<String>>,
}

impl Environment {
    /// Builds an environment and checks every structural invariant, returning
    /// the full list of violations on failure.
    pub fn new(
        state_count: usize,
        action_count: usize,
        initial_dist: Vec<f64>,
        transitions: Vec<Vec<(usize, f64)>>,
    ) -> Result<Self> {
        let env = Self {
            state_count,
            action_count,
            initial_dist,
            transitions,
            state_labels: None,
            action_labels: None,
        };
        let problems = validate_environment(&env);
        if problems.is_empty() {
            Ok(env)
        } else {
            Err(Error::InvalidEnvironment(problems.join("; ")))
        }
    }

    /// Attaches state labels (must match `state_count`).
    pub fn with_state_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.state_count {
            return Err(Error::InvalidEnvironment(format!(
                "expected {} state labels, got {}",
                self.state_count,
                labels.len()
            )));
        }
        self.state_labels = Some(labels);
        Ok(self)
    }

    /// Attaches action labels (must match `action_count`).
    pub fn with_action_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.action_count {
            return Err(Error::InvalidEnvironment(format!(
                "expected {} action labels, got {}",
                self.action_count,
                labels.len()
            )));
        }
        self.action_labels = Some(labels);
        Ok(self)
    }

    /// Row index of `(s, a)` into `transitions` and flat tables.
    #[inline]
    pub fn index(&self, state: usize, action: usize) -> usize {
        debug_assert!(state < self.state_count && action < self.action_count);
        state * self.action_count + action
    }

    /// Sparse transition row `τ(·|s,a)`.
    #[inline]
    pub fn transition(&self, state: usize, action: usize) -> &[(usize, f64)] {
        &self.transitions[self.index(state, action)]
    }

    /// Human-readable name of a state: its label when present, otherwise
    /// `None` (error messages then fall back to the bare index).
    pub fn state_label(&self, state: usize) -> Option<String> {
        self.state_labels
            .as_ref()
            .and_then(|labels| labels.get(state).cloned())
    }

    /// True when every action in `s` self-loops with probability one, i.e.
    /// the state can never be left.
    pub fn is_absorbing(&self, state: usize) -> bool {
        (0..self.action_count).all(|a| {
            let row = self.transition(state, a);
            row.len() == 1 && row[0] == (state, 1.0)
        })
    }

    /// States reachable from the support of `σ` by following transitions of
    /// any action (breadth-first over the support of `τ`).
    pub fn reachable_states(&self) -> Vec<bool> {
        let mut reachable = vec![false; self.state_count];
        let mut queue: Vec<usize> = (0..self.state_count)
            .filter(|&s| self.initial_dist[s] > 0.0)
            .collect();
        for &s in &queue {
            reachable[s] = true;
        }
        while let Some(s) = queue.pop() {
            for a in 0..self.action_count {
                for &(next, p) in self.transition(s, a) {
                    if p > 0.0 && !reachable[next] {
                        reachable[next] = true;
                        queue.push(next);
                    }
                }
            }
        }
        reachable
    }
}

/// Checks every [`Environment`] invariant and returns a description of each
/// violation (empty means valid). Never mutates or fails.
pub fn validate_environment(env: &Environment) -> Vec<String> {
    let mut problems = Vec::new();
    if env.state_count == 0 {
        problems.push("state_count must be positive".to_string());
    }
    if env.action_count == 0 {
        problems.push("action_count must be positive".to_string());
    }
    if env.initial_dist.len() != env.state_count {
        problems.push(format!(
            "initial_dist has length {}, expected {}",
            env.initial_dist.len(),
            env.state_count
        ));
    } else {
        if let Some(p) = env.initial_dist.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            problems.push(format!("initial_dist entry {p} outside [0, 1]"));
        }
        let total: f64 = env.initial_dist.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            problems.push(format!("initial_dist sums to {total}, expected 1"));
        }
    }
    let expected_rows = env.state_count * env.action_count;
    if env.transitions.len() != expected_rows {
        problems.push(format!(
            "transition table has {} rows, expected {expected_rows}",
            env.transitions.len()
        ));
        return problems;
    }
    for s in 0..env.state_count {
        for a in 0..env.action_count {
            let row = env.transition(s, a);
            let mut total = 0.0;
            for &(next, p) in row {
                if next >= env.state_count {
                    problems.push(format!(
                        "transition ({s}, {a}) targets out-of-range state {next}"
                    ));
                }
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    problems.push(format!(
                        "transition ({s}, {a}) has probability {p} outside [0, 1]"
                    ));
                }
                total += p;
            }
            if (total - 1.0).abs() > PROB_TOL {
                problems.push(format!(
                    "transition row ({s}, {a}) sums to {total}, expected 1"
                ));
            }
        }
    }
    if let Some(labels) = &env.state_labels {
        if labels.len() != env.state_count {
            problems.push(format!(
                "state_labels has length {}, expected {}",
                labels.len(),
                env.state_count
            ));
        }
    }
    if let Some(labels) = &env.action_labels {
        if labels.len() != env.action_count {
            problems.push(format!(
                "action_labels has length {}, expected {}",
                labels.len(),
                env.action_count
            ));
        }
    }
    problems
}

/// A state×action reward table `r(s, a)` with an explicit `−∞` sentinel.
///
/// Entries are finite or [`f64::NEG_INFINITY`]; `NaN` and `+∞` are rejected
/// at construction. `−∞` marks forbidden decisions for constrained
/// re-planning and is absorbing under addition.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    /// Number of states the table covers.
    pub state_count: usize,
    /// Number of actions the table covers.
    pub action_count: usize,
    /// Flat values, indexed by `s * action_count + a`.
    pub values: Vec<f64>,
}

impl RewardTable {
    /// Builds a table from flat values (indexed `s * action_count + a`),
    /// rejecting `NaN` and `+∞`.
    pub fn new(state_count: usize, action_count: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != state_count * action_count {
            return Err(Error::InvalidReward(format!(
                "expected {} values, got {}",
                state_count * action_count,
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v == f64::INFINITY)
        {
            return Err(Error::InvalidReward(format!(
                "entry ({}, {}) is {v}; values must be finite or -inf",
                i / action_count.max(1),
                i % action_count.max(1)
            )));
        }
        Ok(Self {
            state_count,
            action_count,
            values,
        })
    }

    /// All-zero table of the given shape.
    pub fn zeros(state_count: usize, action_count: usize) -> Self {
        Self {
            state_count,
            action_count,
            values: vec![0.0; state_count * action_count],
        }
    }

    /// Builds a table from per-state rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let state_count = rows.len();
        let action_count = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != action_count) {
            return Err(Error::InvalidReward("ragged reward rows".to_string()));
        }
        Self::new(state_count, action_count, rows.concat())
    }

    /// Reward of taking `a` in `s`.
    #[inline]
    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.action_count + action]
    }

    /// Overwrites the reward of `(s, a)`.
    #[inline]
    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        debug_assert!(!value.is_nan() && value != f64::INFINITY);
        self.values[state * self.action_count + action] = value;
    }

    /// True when the table's shape matches the environment's.
    pub fn matches(&self, env: &Environment) -> bool {
        self.state_count == env.state_count && self.action_count == env.action_count
    }
}

/// A stochastic policy: one probability row `π(·|s)` per state.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    /// Number of states the policy covers.
    pub state_count: usize,
    /// Number of actions the policy covers.
    pub action_count: usize,
    /// Flat probabilities, indexed by `s * action_count + a`.
    pub probs: Vec<f64>,
}

impl Policy {
    /// Builds a policy and validates every row as a probability
    /// distribution.
    pub fn new(state_count: usize, action_count: usize, probs: Vec<f64>) -> Result<Self> {
        let policy = Self {
            state_count,
            action_count,
            probs,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Uniform policy over all actions.
    pub fn uniform(state_count: usize, action_count: usize) -> Self {
        Self {
            state_count,
            action_count,
            probs: vec![1.0 / action_count as f64; state_count * action_count],
        }
    }

    /// Checks that every row is a distribution (entries in `[0,1]`, sum 1
    /// within [`PROB_TOL`]).
    pub fn validate(&self) -> Result<()> {
        if self.probs.len() != self.state_count * self.action_count {
            return Err(Error::InvalidPolicy(format!(
                "expected {} probabilities, got {}",
                self.state_count * self.action_count,
                self.probs.len()
            )));
        }
        for s in 0..self.state_count {
            let row = self.row(s);
            if let Some(p) = row.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidPolicy(format!(
                    "state {s} has probability {p} outside [0, 1]"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidPolicy(format!(
                    "state {s} row sums to {total}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// Probability `π(a|s)`.
    #[inline]
    pub fn prob(&self, state: usize, action: usize) -> f64 {
        self.probs[state * self.action_count + action]
    }

    /// The probability row `π(·|s)`.
    #[inline]
    pub fn row(&self, state: usize) -> &[f64] {
        let start = state * self.action_count;
        &self.probs[start..start + self.action_count]
    }

    /// Deterministic view: the most likely action in `s`, ties broken by the
    /// lowest action index.
    pub fn argmax(&self, state: usize) -> usize {
        let row = self.row(state);
        let mut best = 0;
        for (a, &p) in row.iter().enumerate().skip(1) {
            if p > row[best] {
                best = a;
            }
        }
        best
    }
}

/// An ordered sequence of `(state, action)` decisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    /// The decisions, in execution order.
    pub decisions: Vec<(usize, usize)>,
    /// True when the trajectory was cut off by a horizon cap before reaching
    /// a terminal state (greedy extraction flags this; fixed-length rollouts
    /// never do).
    pub truncated: bool,
}

impl Trajectory {
    /// Number of decisions `T`.
    pub fn horizon(&self) -> usize {
        self.decisions.len()
    }

    /// Checks that consecutive states are consistent with a transition of
    /// nonzero probability under `env`, and that the first state has nonzero
    /// initial probability.
    pub fn validate(&self, env: &Environment) -> Result<()> {
        for (t, &(s, a)) in self.decisions.iter().enumerate() {
            if s >= env.state_count || a >= env.action_count {
                return Err(Error::InvalidEnvironment(format!(
                    "decision {t} = ({s}, {a}) out of range"
                )));
            }
            if t == 0 {
                if env.initial_dist[s] <= 0.0 {
                    return Err(Error::InvalidEnvironment(format!(
                        "trajectory starts at state {s} with zero initial probability"
                    )));
                }
            } else {
                let (prev_s, prev_a) = self.decisions[t - 1];
                let supported = env
                    .transition(prev_s, prev_a)
                    .iter()
                    .any(|&(next, p)| next == s && p > 0.0);
                if !supported {
                    return Err(Error::InvalidEnvironment(format!(
                        "step {t}: state {s} unreachable from ({prev_s}, {prev_a})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Planner behaviour switch: Boltzmann policy vs. deterministic argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    /// Log-sum-exp value backup; policy `π(a|s) ∝ exp(β·Q(s,a))`.
    Soft,
    /// Max value backup; one-hot policy, ties to the lowest action index.
    Hard,
}

/// Hyperparameters shared by all planners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Discount `γ`, strictly inside `(0, 1)`.
    pub gamma: f64,
    /// Inverse temperature `β > 0` (soft mode only, but always validated).
    pub beta: f64,
    /// Number of Bellman sweeps (`≥ 1`), starting from `V ≡ 0`.
    pub iterations: usize,
    /// Soft or hard backup.
    pub mode: PlanMode,
}

impl PlannerConfig {
    /// Validates `γ ∈ (0,1)`, `β > 0`, `iterations ≥ 1`.
    pub fn new(gamma: f64, beta: f64, iterations: usize, mode: PlanMode) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie strictly in (0, 1), got {gamma}"
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        if iterations == 0 {
            return Err(Error::InvalidConfig(
                "iterations must be at least 1".to_string(),
            ));
        }
        Ok(Self {
            gamma,
            beta,
            iterations,
            mode,
        })
    }

    /// Same configuration with the other backup mode.
    pub fn with_mode(self, mode: PlanMode) -> Self {
        Self { mode, ..self }
    }
}

/// Samples a trajectory of exactly `horizon` decisions by executing `policy`
/// from `σ`. Identical `(inputs, seed)` give identical trajectories.
pub fn rollout(
    env: &Environment,
    policy: &Policy,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(Error::InvalidConfig(
            "rollout horizon must be positive".to_string(),
        ));
    }
    if policy.state_count != env.state_count || policy.action_count != env.action_count {
        return Err(Error::InvalidPolicy(format!(
            "policy shape {}x{} does not match environment {}x{}",
            policy.state_count, policy.action_count, env.state_count, env.action_count
        )));
    }
    policy.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = sample_index(&env.initial_dist, &mut rng).ok_or_else(|| {
        Error::InvalidEnvironment("initial distribution has empty support".to_string())
    })?;
    let mut decisions = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let action = sample_index(policy.row(state), &mut rng).ok_or_else(|| {
            Error::InvalidPolicy(format!("policy row {state} has empty support"))
        })?;
        decisions.push((state, action));
        state = sample_transition(env.transition(state, action), &mut rng).ok_or_else(|| {
            Error::InvalidEnvironment(format!("transition row ({state}, {action}) is empty"))
        })?;
    }
    Ok(Trajectory {
        decisions,
        truncated: false,
    })
}

fn sample_index(weights: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    let dist = rand::distributions::WeightedIndex::new(weights).ok()?;
    Some(dist.sample(rng))
}

fn sample_transition(row: &[(usize, f64)], rng: &mut ChaCha8Rng) -> Option<usize> {
    if row.is_empty() {
        return None;
    }
    if row.len() == 1 {
        return Some(row[0].0);
    }
    let weights: Vec<f64> = row.iter().map(|&(_, p)| p).collect();
    let dist = rand::distributions::WeightedIndex::new(weights).ok()?;
    Some(row[dist.sample(rng)].0)
}

/// Exact expected discounted return `E[Σ_{t<horizon} γ^t r(s_t, a_t)]` of
/// executing `policy`, computed by propagating the state distribution.
///
/// `gamma` may be any value in `(0, 1]` — undiscounted evaluation is allowed
/// here even though planners require `γ < 1`. If a `−∞` reward entry is hit
/// with nonzero probability the result is exactly `−∞`.
pub fn expected_return(
    env: &Environment,
    policy: &Policy,
    reward: &RewardTable,
    gamma: f64,
    horizon: usize,
) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidConfig(
            "expected_return horizon must be positive".to_string(),
        ));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "evaluation gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if !reward.matches(env) {
        return Err(Error::ShapeMismatch(format!(
            "reward shape {}x{} does not match environment {}x{}",
            reward.state_count, reward.action_count, env.state_count, env.action_count
        )));
    }
    if policy.state_count != env.state_count || policy.action_count != env.action_count {
        return Err(Error::ShapeMismatch(
            "policy shape does not match environment".to_string(),
        ));
    }
    policy.validate()?;

    let mut dist = env.initial_dist.clone();
    let mut next = vec![0.0; env.state_count];
    let mut total = 0.0;
    let mut discount = 1.0;
    for _ in 0..horizon {
        for s in 0..env.state_count {
            let mass = dist[s];
            if mass == 0.0 {
                continue;
            }
            for a in 0..env.action_count {
                let p = policy.prob(s, a);
                if p == 0.0 {
                    continue;
                }
                let r = reward.get(s, a);
                if r == f64::NEG_INFINITY {
                    return Ok(f64::NEG_INFINITY);
                }
                total += discount * mass * p * r;
                for &(succ, tp) in env.transition(s, a) {
                    next[succ] += mass * p * tp;
                }
            }
        }
        std::mem::swap(&mut dist, &mut next);
        next.iter_mut().for_each(|x| *x = 0.0);
        discount *= gamma;
    }
    Ok(total)
}

/// The two-state, two-action environment used throughout the tests: a set-up
/// action hands control from state 0 to the absorbing-dynamics state 1, where
/// a pay-off action may or may not be the only source of value.
///
/// Dynamics: action 0 self-loops in state 0; action 1 moves to state 1; both
/// actions self-loop in state 1. Under [`TwoStateExample::linked_reward`] the
/// hand-off is worth taking *only* because of the pay-off action `(1, 1)`
/// (link score 1). Under [`TwoStateExample::unlinked_reward`] state 1 is
/// equally valuable through either of its actions, so forbidding the pay-off
/// changes nothing (link score 0).
#[derive(Debug, Clone)]
pub struct TwoStateExample {
    /// The shared 2×2 deterministic environment.
    pub env: Environment,
    /// Reward making the pay-off action essential: rows `[[1.0, 0.5], [1.0, 2.5]]`.
    pub linked_reward: RewardTable,
    /// Reward making the pay-off action replaceable: rows `[[1.0, 1.5], [1.0, 1.5]]`.
    pub unlinked_reward: RewardTable,
}

/// Builds [`TwoStateExample`].
pub fn two_state_example() -> TwoStateExample {
    let env = Environment::new(
        2,
        2,
        vec![1.0, 0.0],
        vec![
            vec![(0, 1.0)], // (S1, A1) -> S1
            vec![(1, 1.0)], // (S1, A2) -> S2
            vec![(1, 1.0)], // (S2, A1) -> S2
            vec![(1, 1.0)], // (S2, A2) -> S2
        ],
    )
    .expect("two-state dynamics are valid")
    .with_state_labels(vec!["S1".to_string(), "S2".to_string()])
    .expect("two labels")
    .with_action_labels(vec!["A1".to_string(), "A2".to_string()])
    .expect("two labels");
    let linked_reward =
        RewardTable::from_rows(&[vec![1.0, 0.5], vec![1.0, 2.5]]).expect("finite rewards");
    let unlinked_reward =
        RewardTable::from_rows(&[vec![1.0, 1.5], vec![1.0, 1.5]]).expect("finite rewards");
    TwoStateExample {
        env,
        linked_reward,
        unlinked_reward,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corridor_env() -> Environment {
        // Three cells in a row, "start, middle, target": action 0 moves right,
        // action 1 stays. The target (state 2) is absorbing.
        Environment::new(
            3,
            2,
            vec![1.0, 0.0, 0.0],
            vec![
                vec![(1, 1.0)],
                vec![(0, 1.0)],
                vec![(2, 1.0)],
                vec![(1, 1.0)],
                vec![(2, 1.0)],
                vec![(2, 1.0)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn validate_accepts_the_two_state_example() {
        let example = two_state_example();
        assert!(validate_environment(&example.env).is_empty());
    }

    #[test]
    fn validate_names_a_bad_transition_row() {
        let mut env = two_state_example().env;
        env.transitions[2] = vec![(1, 0.9)];
        let problems = validate_environment(&env);
        assert_eq!(problems.len(), 1, "{problems:?}");
        assert!(problems[0].contains("(1, 0)"), "{problems:?}");
        assert!(problems[0].contains("0.9"), "{problems:?}");
    }

    #[test]
    fn validate_accepts_a_spread_initial_distribution() {
        let mut env = two_state_example().env;
        env.initial_dist = vec![0.5, 0.5];
        assert!(validate_environment(&env).is_empty());
    }

    #[test]
    fn reward_table_rejects_nan_and_positive_infinity() {
        assert!(RewardTable::from_rows(&[vec![f64::NAN, 0.0]]).is_err());
        assert!(RewardTable::from_rows(&[vec![f64::INFINITY, 0.0]]).is_err());
        let masked = RewardTable::from_rows(&[vec![f64::NEG_INFINITY, 0.0]]).unwrap();
        assert_eq!(masked.get(0, 0), f64::NEG_INFINITY);
    }

    #[test]
    fn policy_rows_must_normalize() {
        assert!(Policy::new(1, 2, vec![0.7, 0.2]).is_err());
        assert!(Policy::new(1, 2, vec![0.7, 0.3]).is_ok());
        assert!(Policy::new(1, 2, vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_toward_the_lowest_index() {
        let policy = Policy::new(1, 3, vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(policy.argmax(0), 0);
    }

    #[test]
    fn rollout_forced_path_reaches_the_target() {
        let env = corridor_env();
        let right = Policy::new(3, 2, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let traj = rollout(&env, &right, 2, 0).unwrap();
        assert_eq!(traj.decisions, vec![(0, 0), (1, 0)]);
        assert!(!traj.truncated);
        traj.validate(&env).unwrap();
    }

    #[test]
    fn rollout_of_the_handoff_policy_matches_the_worked_example() {
        let example = two_state_example();
        // Deterministic policy: take the hand-off action (index 1) everywhere.
        let policy = Policy::new(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let traj = rollout(&example.env, &policy, 2, 7).unwrap();
        assert_eq!(traj.decisions, vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn rollout_is_deterministic_in_the_seed() {
        let env = corridor_env();
        let mixed = Policy::new(3, 2, vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5]).unwrap();
        let a = rollout(&env, &mixed, 50, 1234).unwrap();
        let b = rollout(&env, &mixed, 50, 1234).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.horizon(), 50);
    }

    #[test]
    fn rollout_rejects_zero_horizon() {
        let env = corridor_env();
        let policy = Policy::uniform(3, 2);
        assert!(matches!(
            rollout(&env, &policy, 0, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn expected_return_matches_the_worked_two_step_values() {
        let example = two_state_example();
        // Always the self-loop action: value 1 + 1 = 2 undiscounted.
        let stay = Policy::new(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let got = expected_return(&example.env, &stay, &example.linked_reward, 1.0, 2).unwrap();
        assert!((got - 2.0).abs() < 1e-12, "got {got}");

        // Hand off then take the first action: 1.5 + 1.0 = 2.5 under the
        // unlinked reward.
        let handoff_then_stay = Policy::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let got = expected_return(
            &example.env,
            &handoff_then_stay,
            &example.unlinked_reward,
            1.0,
            2,
        )
        .unwrap();
        assert!((got - 2.5).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn expected_return_of_zero_reward_is_zero() {
        let example = two_state_example();
        let zero = RewardTable::zeros(2, 2);
        let policy = Policy::uniform(2, 2);
        let got = expected_return(&example.env, &policy, &zero, 0.9, 25).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn expected_return_is_linear_in_finite_rewards() {
        let example = two_state_example();
        let policy = Policy::new(2, 2, vec![0.3, 0.7, 0.6, 0.4]).unwrap();
        let r1 = &example.linked_reward;
        let r2 = &example.unlinked_reward;
        let sum = RewardTable::new(
            2,
            2,
            r1.values
                .iter()
                .zip(&r2.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let v1 = expected_return(&example.env, &policy, r1, 0.95, 30).unwrap();
        let v2 = expected_return(&example.env, &policy, r2, 0.95, 30).unwrap();
        let vsum = expected_return(&example.env, &policy, &sum, 0.95, 30).unwrap();
        assert!((vsum - (v1 + v2)).abs() < 1e-9, "{vsum} vs {}", v1 + v2);
    }

    #[test]
    fn expected_return_horizon_one_is_the_immediate_reward() {
        let example = two_state_example();
        let policy = Policy::new(2, 2, vec![0.25, 0.75, 0.5, 0.5]).unwrap();
        let got = expected_return(&example.env, &policy, &example.linked_reward, 0.5, 1).unwrap();
        let expect = 0.25 * 1.0 + 0.75 * 0.5;
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn expected_return_hits_the_masked_entry_and_returns_neg_inf() {
        let example = two_state_example();
        let mut masked = example.linked_reward.clone();
        masked.set(1, 1, f64::NEG_INFINITY);
        let handoff = Policy::new(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let got = expected_return(&example.env, &handoff, &masked, 1.0, 2).unwrap();
        assert_eq!(got, f64::NEG_INFINITY);

        // A policy that never touches the masked decision keeps a finite value.
        let stay = Policy::new(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let got = expected_return(&example.env, &stay, &masked, 1.0, 2).unwrap();
        assert!(got.is_finite());
    }

    #[test]
    fn planner_config_validates_all_ranges() {
        assert!(PlannerConfig::new(0.99, 100.0, 250, PlanMode::Soft).is_ok());
        assert!(PlannerConfig::new(1.0, 100.0, 250, PlanMode::Soft).is_err());
        assert!(PlannerConfig::new(0.0, 100.0, 250, PlanMode::Soft).is_err());
        assert!(PlannerConfig::new(0.99, 0.0, 250, PlanMode::Soft).is_err());
        assert!(PlannerConfig::new(0.99, 100.0, 0, PlanMode::Soft).is_err());
    }

    #[test]
    fn absorbing_detection() {
        let example = two_state_example();
        assert!(!example.env.is_absorbing(0));
        assert!(example.env.is_absorbing(1));
    }

    #[test]
    fn reachability_covers_exactly_the_connected_part() {
        // State 2 is unreachable: both states 0 and 1 only reach each other.
        let env = Environment::new(
            3,
            1,
            vec![1.0, 0.0, 0.0],
            vec![vec![(1, 1.0)], vec![(0, 1.0)], vec![(2, 1.0)]],
        )
        .unwrap();
        assert_eq!(env.reachable_states(), vec![true, true, false]);
    }
}
