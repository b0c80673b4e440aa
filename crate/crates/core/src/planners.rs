//! Soft and hard value iteration, forbidden-decision sets, and constrained
//! re-planning by reward masking.
//!
//! Both planners run a fixed number of Bellman sweeps from `V ≡ 0`:
//!
//! * soft: `Q(s,a) = r(s,a) + γ·E_{s′∼τ}[V(s′)]`,
//!   `V(s) = (1/β)·log Σ_a exp(β·Q(s,a))`, policy `π(a|s) ∝ exp(β·Q(s,a))`;
//! * hard: the same `Q` with `V(s) = max_a Q(s,a)` and a one-hot policy
//!   (ties broken toward the lowest action index).
//!
//! Running exactly `k` sweeps yields the time-zero policy of the
//! `k`-step finite-horizon problem; large `k` approaches the stationary
//! discounted policy geometrically.
//!
//! `−∞` rewards are the constraint mechanism: [`apply_constraint`] masks
//! forbidden `(state, action)` pairs to `−∞`, and the log-sum-exp (or max)
//! reduction simply excludes those entries, so forbidden actions receive
//! probability exactly 0. `−∞` propagates backwards through the Bellman
//! recursion: an action whose successors cannot avoid `−∞` is itself `−∞`.
//! If every action of some *reachable* state is `−∞`-valued, planning fails
//! with an error naming that state.
//!
//! Numerical note: the log-sum-exp uses max-subtraction, so inverse
//! temperatures as large as `β = 100` are exact instead of overflowing.

use crate::error::{Error, Result};
use crate::mdp::{Environment, PlanMode, PlannerConfig, Policy, RewardTable, Trajectory};
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};

/// A set of forbidden `(state, action)` pairs.
///
/// Construction validates against the environment shape and rejects sets
/// that would forbid *every* action of some state — such a constraint can
/// never be satisfied by any policy.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    forbidden: BTreeSet<(usize, usize)>,
}

impl ConstraintSet {
    /// The empty constraint (planning unchanged).
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a constraint set, deduplicating pairs and rejecting both
    /// out-of-range pairs and states left with no permitted action.
    pub fn new(
        env: &Environment,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut forbidden = BTreeSet::new();
        let mut per_state: HashMap<usize, usize> = HashMap::new();
        for (s, a) in pairs {
            if s >= env.state_count || a >= env.action_count {
                return Err(Error::InvalidEnvironment(format!(
                    "forbidden pair ({s}, {a}) out of range for a {}x{} environment",
                    env.state_count, env.action_count
                )));
            }
            if forbidden.insert((s, a)) {
                *per_state.entry(s).or_insert(0) += 1;
            }
        }
        if let Some((&state, _)) = per_state
            .iter()
            .find(|&(_, &count)| count == env.action_count)
        {
            return Err(Error::InfeasibleConstraint {
                state,
                label: env.state_label(state),
            });
        }
        Ok(Self { forbidden })
    }

    /// True when `(s, a)` is forbidden.
    pub fn contains(&self, state: usize, action: usize) -> bool {
        self.forbidden.contains(&(state, action))
    }

    /// Iterates the forbidden pairs in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forbidden.iter().copied()
    }

    /// Number of forbidden pairs.
    pub fn len(&self) -> usize {
        self.forbidden.len()
    }

    /// True when no pair is forbidden.
    pub fn is_empty(&self) -> bool {
        self.forbidden.is_empty()
    }
}

/// A set of concrete `(state, action)` pairs that constitute one logical
/// decision: all states sharing an observable part (for example a grid cell
/// regardless of collected-key flags), paired with one action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionClass {
    /// `(observable id, action)` naming the class; the observable id is
    /// builder-specific (e.g. a cell index).
    pub representative: (usize, usize),
    /// Concrete `(state, action)` members, all sharing the same action.
    pub members: Vec<(usize, usize)>,
}

/// Lookup table from concrete decisions to their [`DecisionClass`].
///
/// Decisions not covered by any class are treated as singleton classes by
/// [`DecisionClassMap::expand`], so environments without observation
/// aliasing can simply use an empty map.
#[derive(Debug, Clone, Default)]
pub struct DecisionClassMap {
    classes: Vec<DecisionClass>,
    by_decision: HashMap<(usize, usize), usize>,
}

impl DecisionClassMap {
    /// Builds the map, checking that every class is non-empty, shares one
    /// action among its members, and that no decision belongs to two
    /// classes.
    pub fn new(classes: Vec<DecisionClass>) -> Result<Self> {
        let mut by_decision = HashMap::new();
        for (idx, class) in classes.iter().enumerate() {
            if class.members.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "decision class {:?} has no members",
                    class.representative
                )));
            }
            let action = class.representative.1;
            for &(s, a) in &class.members {
                if a != action {
                    return Err(Error::InvalidConfig(format!(
                        "decision class {:?} mixes actions {action} and {a}",
                        class.representative
                    )));
                }
                if by_decision.insert((s, a), idx).is_some() {
                    return Err(Error::InvalidConfig(format!(
                        "decision ({s}, {a}) belongs to more than one class"
                    )));
                }
            }
        }
        Ok(Self {
            classes,
            by_decision,
        })
    }

    /// All registered classes.
    pub fn classes(&self) -> &[DecisionClass] {
        &self.classes
    }

    /// The class containing `(s, a)`, if any.
    pub fn class_of(&self, state: usize, action: usize) -> Option<&DecisionClass> {
        self.by_decision
            .get(&(state, action))
            .map(|&idx| &self.classes[idx])
    }

    /// The concrete pairs to forbid when `(s, a)` is constrained away: the
    /// members of its class, or the singleton `[(s, a)]` when unmapped.
    pub fn expand(&self, state: usize, action: usize) -> Vec<(usize, usize)> {
        match self.class_of(state, action) {
            Some(class) => class.members.clone(),
            None => vec![(state, action)],
        }
    }
}

/// Copy of `reward` with every forbidden entry replaced by `−∞`; all other
/// entries are bit-identical to the input.
pub fn apply_constraint(reward: &RewardTable, constraint: &ConstraintSet) -> RewardTable {
    let mut masked = reward.clone();
    for (s, a) in constraint.iter() {
        masked.set(s, a, f64::NEG_INFINITY);
    }
    masked
}

/// Final action values `Q(s, a)` (flat, indexed `s·|A| + a`) after
/// `config.iterations` Bellman sweeps in the configured mode.
///
/// Entries are `−∞` exactly when the decision is forbidden or every
/// continuation hits a forbidden decision eventually. Unlike the policy
/// constructors this never fails on dead states, so callers can implement
/// their own tie-breaking or feasibility analysis on top.
pub fn action_values(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
) -> Result<Vec<f64>> {
    check_shapes(env, reward)?;
    Ok(sweep(env, reward, config))
}

/// Runs soft value iteration and returns the Boltzmann policy
/// `π(a|s) ∝ exp(β·Q(s,a))`.
///
/// Fails with [`Error::InvalidConfig`] when `config.mode` is not
/// [`PlanMode::Soft`], and with [`Error::InfeasibleState`] when a state
/// reachable from the initial distribution has only `−∞`-valued actions.
pub fn soft_value_iteration(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
) -> Result<Policy> {
    if config.mode != PlanMode::Soft {
        return Err(Error::InvalidConfig(
            "soft_value_iteration requires PlanMode::Soft".to_string(),
        ));
    }
    plan(env, reward, config)
}

/// Runs hard value iteration and returns the deterministic (one-hot)
/// policy; ties are broken toward the lowest action index.
///
/// Fails with [`Error::InvalidConfig`] when `config.mode` is not
/// [`PlanMode::Hard`]; other errors as in [`soft_value_iteration`].
pub fn hard_value_iteration(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
) -> Result<Policy> {
    if config.mode != PlanMode::Hard {
        return Err(Error::InvalidConfig(
            "hard_value_iteration requires PlanMode::Hard".to_string(),
        ));
    }
    plan(env, reward, config)
}

/// Mode-dispatching planner: soft or hard value iteration per
/// `config.mode`.
pub fn plan(env: &Environment, reward: &RewardTable, config: &PlannerConfig) -> Result<Policy> {
    check_shapes(env, reward)?;
    let q = sweep(env, reward, config);
    policy_from_values(env, reward, config, &q)
}

/// Re-plans with the constraint's decisions forbidden: equivalent to
/// planning on [`apply_constraint`]`(reward, constraint)`. Forbidden entries
/// receive probability exactly 0 in the returned policy.
pub fn plan_constrained(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
    constraint: &ConstraintSet,
) -> Result<Policy> {
    let masked = apply_constraint(reward, constraint);
    plan(env, &masked, config)
}

/// True when `s` is a terminal: absorbing under every action and rewarded
/// exactly 0 there, so an episode ending in `s` accrues nothing further.
pub fn is_terminal(env: &Environment, reward: &RewardTable, state: usize) -> bool {
    env.is_absorbing(state) && (0..env.action_count).all(|a| reward.get(state, a) == 0.0)
}

/// Greedy trajectory of the planned (unconstrained) policy: start at the
/// most likely initial state, repeatedly take `argmax_a π(a|s)` (ties to the
/// lowest action index), and stop on reaching a terminal state or after
/// `horizon_cap` decisions — the latter sets [`Trajectory::truncated`].
///
/// Deterministic transition rows are followed directly. Stochastic rows
/// require `seed` (successors are then sampled from `τ`); without one the
/// call fails rather than guessing.
pub fn most_likely_trajectory(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
    horizon_cap: usize,
    seed: Option<u64>,
) -> Result<Trajectory> {
    if horizon_cap == 0 {
        return Err(Error::InvalidConfig(
            "horizon cap must be positive".to_string(),
        ));
    }
    let policy = plan(env, reward, config)?;
    let mut state = argmax_initial(env)?;
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut decisions = Vec::new();
    let mut truncated = false;
    loop {
        if is_terminal(env, reward, state) {
            break;
        }
        if decisions.len() == horizon_cap {
            truncated = true;
            break;
        }
        let action = policy.argmax(state);
        decisions.push((state, action));
        let row = env.transition(state, action);
        state = if row.len() == 1 {
            row[0].0
        } else {
            let rng = rng.as_mut().ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "stochastic transition at ({state}, {action}) requires a seed"
                ))
            })?;
            let weights: Vec<f64> = row.iter().map(|&(_, p)| p).collect();
            let dist = rand::distributions::WeightedIndex::new(weights).map_err(|_| {
                Error::InvalidEnvironment(format!("transition row ({state}, {action}) is empty"))
            })?;
            row[dist.sample(rng)].0
        };
    }
    Ok(Trajectory {
        decisions,
        truncated,
    })
}

fn argmax_initial(env: &Environment) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (s, &p) in env.initial_dist.iter().enumerate() {
        if p > 0.0 && best.map_or(true, |b| p > env.initial_dist[b]) {
            best = Some(s);
        }
    }
    best.ok_or_else(|| {
        Error::InvalidEnvironment("initial distribution has empty support".to_string())
    })
}

fn check_shapes(env: &Environment, reward: &RewardTable) -> Result<()> {
    if !reward.matches(env) {
        return Err(Error::ShapeMismatch(format!(
            "reward shape {}x{} does not match environment {}x{}",
            reward.state_count, reward.action_count, env.state_count, env.action_count
        )));
    }
    Ok(())
}

/// Runs `config.iterations` Bellman sweeps from `V ≡ 0` and returns the
/// final `Q` table. `−∞` entries are excluded from each state's reduction;
/// a state whose entries are all `−∞` has `V = −∞`, which poisons every
/// action leading to it with positive probability.
fn sweep(env: &Environment, reward: &RewardTable, config: &PlannerConfig) -> Vec<f64> {
    let states = env.state_count;
    let actions = env.action_count;
    let mut values = vec![0.0f64; states];
    let mut q = vec![0.0f64; states * actions];
    for _ in 0..config.iterations {
        for s in 0..states {
            for a in 0..actions {
                q[s * actions + a] = backup(env, reward, config.gamma, &values, s, a);
            }
        }
        for s in 0..states {
            let row = &q[s * actions..(s + 1) * actions];
            values[s] = match config.mode {
                PlanMode::Soft => log_sum_exp(row, config.beta),
                PlanMode::Hard => max_finite(row),
            };
        }
    }
    q
}

/// One Bellman backup `r(s,a) + γ·Σ_{s′} τ(s′|s,a)·V(s′)` under `−∞`
/// arithmetic: a `−∞` reward, or any positive-probability successor with
/// `V = −∞`, makes the whole backup `−∞`.
fn backup(
    env: &Environment,
    reward: &RewardTable,
    gamma: f64,
    values: &[f64],
    s: usize,
    a: usize,
) -> f64 {
    let r = reward.get(s, a);
    if r == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut expectation = 0.0;
    for &(next, p) in env.transition(s, a) {
        if p == 0.0 {
            continue;
        }
        let v = values[next];
        if v == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        expectation += p * v;
    }
    r + gamma * expectation
}

/// `(1/β)·log Σ exp(β·x)` over the finite entries of `row`, with
/// max-subtraction for stability; `−∞` when no entry is finite.
fn log_sum_exp(row: &[f64], beta: f64) -> f64 {
    let m = max_finite(row);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = row
        .iter()
        .filter(|&&x| x != f64::NEG_INFINITY)
        .map(|&x| (beta * (x - m)).exp())
        .sum();
    m + sum.ln() / beta
}

fn max_finite(row: &[f64]) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Turns a final `Q` table into the configured policy, erroring on any
/// reachable state with an all-`−∞` row. Unreachable dead states receive a
/// uniform row: every action entering them has `Q = −∞` and therefore
/// probability 0, so the choice is arbitrary and never executed.
fn policy_from_values(
    env: &Environment,
    _reward: &RewardTable,
    config: &PlannerConfig,
    q: &[f64],
) -> Result<Policy> {
    let states = env.state_count;
    let actions = env.action_count;
    let reachable = env.reachable_states();
    let mut probs = vec![0.0f64; states * actions];
    for s in 0..states {
        let row = &q[s * actions..(s + 1) * actions];
        let out = &mut probs[s * actions..(s + 1) * actions];
        let m = max_finite(row);
        if m == f64::NEG_INFINITY {
            if reachable[s] {
                return Err(Error::InfeasibleState {
                    state: s,
                    label: env.state_label(s),
                });
            }
            out.fill(1.0 / actions as f64);
            continue;
        }
        match config.mode {
            PlanMode::Soft => {
                let mut total = 0.0;
                for (a, &x) in row.iter().enumerate() {
                    if x != f64::NEG_INFINITY {
                        let w = (config.beta * (x - m)).exp();
                        out[a] = w;
                        total += w;
                    }
                }
                out.iter_mut().for_each(|p| *p /= total);
            }
            PlanMode::Hard => {
                // First index attaining the maximum: documented tie-break.
                let best = row.iter().position(|&x| x == m).expect("max exists");
                out[best] = 1.0;
            }
        }
    }
    Policy::new(states, actions, probs)
}
