//! Demonstration sampling from soft-optimal policies.
//!
//! A demonstration set is `count` independent rollouts of the planner's
//! Boltzmann policy, each exactly `horizon` decisions long: an episode
//! that reaches an absorbing state keeps logging the (uniform) choices
//! made there, so every trajectory has identical length and the empirical
//! visitation of a set always sums to the horizon. The set remembers the
//! `(β, γ)` it was sampled under, so reward inference can check it is
//! matching the policy class the data actually came from.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, PlannerConfig, RewardTable, Trajectory};
use stratlink_core::planners::plan;

/// A batch of equally long demonstration trajectories, tagged with the
/// temperature and discount they were sampled under.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoSet {
    /// The rollouts; every trajectory has exactly `horizon` decisions.
    pub trajectories: Vec<Trajectory>,
    /// Decisions per trajectory.
    pub horizon: usize,
    /// Inverse temperature of the sampling policy.
    pub beta: f64,
    /// Discount of the sampling policy.
    pub gamma: f64,
}

impl DemoSet {
    /// Wraps trajectories after checking they all have `horizon` decisions.
    pub fn new(
        trajectories: Vec<Trajectory>,
        horizon: usize,
        beta: f64,
        gamma: f64,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidConfig(
                "demonstration horizon must be positive".into(),
            ));
        }
        if let Some(bad) = trajectories.iter().position(|t| t.horizon() != horizon) {
            return Err(Error::ShapeMismatch(format!(
                "trajectory {bad} has {} decisions, expected {horizon}",
                trajectories[bad].horizon()
            )));
        }
        Ok(DemoSet {
            trajectories,
            horizon,
            beta,
            gamma,
        })
    }

    /// Number of trajectories.
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    /// True when the set holds no trajectories.
    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

/// Samples `count` seeded rollouts of the soft-optimal policy under
/// `reward`, each exactly `horizon` decisions long.
pub fn sample_demonstrations(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
    count: usize,
    horizon: usize,
    seed: u64,
) -> Result<DemoSet> {
    if horizon == 0 {
        return Err(Error::InvalidConfig(
            "demonstration horizon must be positive".into(),
        ));
    }
    let policy = plan(env, reward, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = WeightedIndex::new(env.initial_dist.iter().copied())
        .map_err(|_| Error::InvalidEnvironment("initial distribution has no support".into()))?;
    let mut trajectories = Vec::with_capacity(count);
    for _ in 0..count {
        let mut state = initial.sample(&mut rng);
        let mut decisions = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let row = policy.row(state);
            let action = WeightedIndex::new(row.iter().copied())
                .map_err(|_| {
                    Error::InvalidPolicy(format!("policy row for state {state} has no support"))
                })?
                .sample(&mut rng);
            decisions.push((state, action));
            let successors = env.transition(state, action);
            state = if successors.len() == 1 {
                successors[0].0
            } else {
                let weights: Vec<f64> = successors.iter().map(|&(_, p)| p).collect();
                let pick = WeightedIndex::new(weights)
                    .map_err(|_| {
                        Error::InvalidEnvironment(format!(
                            "transition row ({state}, {action}) is empty"
                        ))
                    })?
                    .sample(&mut rng);
                successors[pick].0
            };
        }
        trajectories.push(Trajectory {
            decisions,
            truncated: false,
        });
    }
    DemoSet::new(trajectories, horizon, config.beta, config.gamma)
}

/// Mean per-trajectory state-action visit counts, flat `state·|A| + action`.
/// Sums to the demonstration horizon.
pub fn empirical_visitation(env: &Environment, demos: &DemoSet) -> Result<Vec<f64>> {
    if demos.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot compute visitation of an empty demonstration set".into(),
        ));
    }
    let mut counts = vec![0.0; env.state_count * env.action_count];
    for trajectory in &demos.trajectories {
        for &(s, a) in &trajectory.decisions {
            if s >= env.state_count || a >= env.action_count {
                return Err(Error::ShapeMismatch(format!(
                    "demonstration decision ({s}, {a}) is outside the {}x{} environment",
                    env.state_count, env.action_count
                )));
            }
            counts[s * env.action_count + a] += 1.0;
        }
    }
    let scale = 1.0 / demos.len() as f64;
    counts.iter_mut().for_each(|c| *c *= scale);
    Ok(counts)
}
