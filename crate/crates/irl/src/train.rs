//! Maximum-entropy reward inference by gradient ascent.
//!
//! The reward is a free `|S|×|A|` table (one-hot features per state-action
//! pair, so expected feature counts coincide with visitation frequencies),
//! initialized to zero and updated with Adam on the exact demonstration
//! log-likelihood gradient from [`crate::likelihood`]. The inner planner
//! is the same soft planner the demonstrations were sampled with — the
//! configuration carries it explicitly and training rejects a mismatch
//! with the demonstration set's recorded `(β, γ)`, because a likelihood
//! under the wrong policy class is a silent bug, not an experiment.

use crate::demos::DemoSet;
use crate::likelihood::likelihood_and_gradient;
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, PlanMode, PlannerConfig, RewardTable};

/// Reward-inference settings: Adam hyperparameters plus the inner planner.
#[derive(Debug, Clone, PartialEq)]
pub struct IrlConfig {
    /// Number of Adam steps.
    pub iterations: usize,
    /// Adam step size; 1e-4 suits the grid and shortcut worlds, 5e-3 the
    /// corridor.
    pub learning_rate: f64,
    /// First-moment decay.
    pub beta1: f64,
    /// Second-moment decay.
    pub beta2: f64,
    /// Denominator floor.
    pub epsilon: f64,
    /// Inner soft planner; must match the demonstrations' `(β, γ)`.
    pub planner: PlannerConfig,
}

impl IrlConfig {
    /// Standard hyperparameters (10,000 steps, step size 1e-4, Adam
    /// moments 0.9/0.999, floor 1e-8) around the given inner planner.
    pub fn new(planner: PlannerConfig) -> Result<Self> {
        IrlConfig {
            iterations: 10_000,
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            planner,
        }
        .validated()
    }

    /// Same settings with a different step size.
    pub fn with_learning_rate(mut self, learning_rate: f64) -> Result<Self> {
        self.learning_rate = learning_rate;
        self.validated()
    }

    /// Same settings with a different step count.
    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    fn validated(self) -> Result<Self> {
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} is outside (0, 1)",
                self.learning_rate
            )));
        }
        for (name, value) in [
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("epsilon", self.epsilon),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "Adam parameter {name} = {value} must be positive and finite"
                )));
            }
        }
        if self.beta1 >= 1.0 || self.beta2 >= 1.0 {
            return Err(Error::InvalidConfig(
                "Adam moment decays must be below 1".into(),
            ));
        }
        if self.planner.mode != PlanMode::Soft {
            return Err(Error::InvalidConfig(
                "reward inference plans with the soft planner".into(),
            ));
        }
        Ok(self)
    }
}

/// Infers a reward table from demonstrations; see
/// [`maxent_irl_with_trace`] for the variant that also reports the
/// likelihood curve.
pub fn maxent_irl(
    env: &Environment,
    demos: &DemoSet,
    config: &IrlConfig,
) -> Result<RewardTable> {
    Ok(maxent_irl_with_trace(env, demos, config, 0)?.0)
}

/// Runs `config.iterations` Adam ascent steps on the demonstration
/// log-likelihood from an all-zero reward, returning the inferred table
/// and (when `trace_points > 0`) up to that many evenly spaced mean
/// log-likelihood samples of the training curve.
pub fn maxent_irl_with_trace(
    env: &Environment,
    demos: &DemoSet,
    config: &IrlConfig,
    trace_points: usize,
) -> Result<(RewardTable, Vec<f64>)> {
    if demos.is_empty() {
        return Err(Error::InvalidConfig(
            "reward inference needs a non-empty demonstration set".into(),
        ));
    }
    let planner = &config.planner;
    if (demos.beta - planner.beta).abs() > 1e-12 || (demos.gamma - planner.gamma).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "inner planner (beta {}, gamma {}) does not match the demonstrations \
             (beta {}, gamma {})",
            planner.beta, planner.gamma, demos.beta, demos.gamma
        )));
    }
    let entries = env.state_count * env.action_count;
    let mut reward = RewardTable::zeros(env.state_count, env.action_count);
    let mut first_moment = vec![0.0f64; entries];
    let mut second_moment = vec![0.0f64; entries];
    let mut trace = Vec::with_capacity(trace_points.min(config.iterations));
    let stride = if trace_points == 0 {
        usize::MAX
    } else {
        (config.iterations / trace_points).max(1)
    };
    for step in 0..config.iterations {
        let (likelihood, gradient) = likelihood_and_gradient(env, &reward, demos, planner)?;
        if step % stride == 0 && trace.len() < trace_points {
            trace.push(likelihood);
        }
        let t = (step + 1) as i32;
        let bias1 = 1.0 - config.beta1.powi(t);
        let bias2 = 1.0 - config.beta2.powi(t);
        for (sa, &g) in gradient.iter().enumerate() {
            first_moment[sa] = config.beta1 * first_moment[sa] + (1.0 - config.beta1) * g;
            second_moment[sa] =
                config.beta2 * second_moment[sa] + (1.0 - config.beta2) * g * g;
            let m_hat = first_moment[sa] / bias1;
            let v_hat = second_moment[sa] / bias2;
            let s = sa / env.action_count;
            let a = sa % env.action_count;
            let step_value =
                reward.get(s, a) + config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
            if !step_value.is_finite() {
                return Err(Error::Degenerate(format!(
                    "reward entry ({s}, {a}) became non-finite at step {step}"
                )));
            }
            reward.set(s, a, step_value);
        }
    }
    Ok((reward, trace))
}
