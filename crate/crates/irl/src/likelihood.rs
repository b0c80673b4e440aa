//! Demonstration log-likelihood under the soft planner, and its exact
//! gradient with respect to the reward table.
//!
//! The planner is the same recursion the rest of the workspace plans with:
//! `K` Bellman sweeps from `V⁰ ≡ 0`,
//!
//! ```text
//! Qᵏ(s,a) = r(s,a) + γ·Σ_{s′} τ(s′|s,a)·Vᵏ⁻¹(s′)
//! Vᵏ(s)   = (1/β)·log Σ_a exp(β·Qᵏ(s,a))
//! ```
//!
//! with the Boltzmann policy `π(a|s) ∝ exp(β·Q^K(s,a))` of the final sweep.
//! The mean per-demonstration log-likelihood is
//! `L(r) = (1/|D|)·Σ_d Σ_t log π(a_t|s_t)
//!       = β·Σ_{s,a} n(s,a)·(Q^K(s,a) − V^K(s))`,
//! with `n` the mean visit counts.
//!
//! The gradient is computed by reverse accumulation through the recursion,
//! exactly — not by the infinite-data visitation-matching approximation.
//! Seeding the reverse pass with
//! `∂L/∂Q^K(s,a) = β·(n(s,a) − n(s)·π^K(a|s))` and walking the sweeps
//! backwards (each `Vᵏ` differentiates into its own sweep's policy,
//! each `Qᵏ` scatters through `γ·τᵀ` into the previous sweep) yields
//! `∂L/∂r` in one forward and one backward pass, so finite differences of
//! [`demo_log_likelihood`] must agree with [`likelihood_gradient`] to
//! truncation error. At the demonstration-generating reward the gradient's
//! expectation is zero (the per-state advantage has zero mean under the
//! sampling policy), which is the statistical-consistency property reward
//! inference relies on.

use crate::demos::{empirical_visitation, DemoSet};
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, PlanMode, PlannerConfig, Policy, RewardTable};

/// The retained forward pass: per-sweep policies (needed by the reverse
/// pass) plus the final value offsets for log-probabilities.
struct ForwardPass {
    /// `policies[k]` is the softmax of `Qᵏ⁺¹`, flat `s·|A| + a`.
    policies: Vec<Vec<f64>>,
    /// Final `Q^K`.
    q: Vec<f64>,
    /// Final `V^K`.
    values: Vec<f64>,
}

fn check_soft(config: &PlannerConfig) -> Result<()> {
    if config.mode != PlanMode::Soft {
        return Err(Error::InvalidConfig(
            "likelihoods are defined for the soft planner only".into(),
        ));
    }
    Ok(())
}

fn check_finite(reward: &RewardTable, env: &Environment) -> Result<()> {
    for s in 0..env.state_count {
        for a in 0..env.action_count {
            if !reward.get(s, a).is_finite() {
                return Err(Error::InvalidReward(format!(
                    "reward({s}, {a}) is not finite; likelihood gradients need finite rewards"
                )));
            }
        }
    }
    Ok(())
}

/// Runs `config.iterations` soft sweeps, retaining per-sweep policies.
fn forward(env: &Environment, reward: &RewardTable, config: &PlannerConfig) -> ForwardPass {
    let states = env.state_count;
    let actions = env.action_count;
    let beta = config.beta;
    let mut values = vec![0.0f64; states];
    let mut q = vec![0.0f64; states * actions];
    let mut policies = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        for s in 0..states {
            for a in 0..actions {
                let mut expectation = 0.0;
                for &(next, p) in env.transition(s, a) {
                    expectation += p * values[next];
                }
                q[s * actions + a] = reward.get(s, a) + config.gamma * expectation;
            }
        }
        let mut policy = vec![0.0f64; states * actions];
        for s in 0..states {
            let row = &q[s * actions..(s + 1) * actions];
            let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for (a, &x) in row.iter().enumerate() {
                let w = (beta * (x - m)).exp();
                policy[s * actions + a] = w;
                total += w;
            }
            policy[s * actions..(s + 1) * actions]
                .iter_mut()
                .for_each(|p| *p /= total);
            values[s] = m + total.ln() / beta;
        }
        policies.push(policy);
    }
    ForwardPass {
        policies,
        q,
        values,
    }
}

/// The soft policy after `config.iterations` sweeps — identical to the
/// workspace planner's, recomputed here so likelihood and gradient share
/// one forward implementation.
pub fn soft_policy(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
) -> Result<Policy> {
    check_soft(config)?;
    check_finite(reward, env)?;
    let fwd = forward(env, reward, config);
    Policy::new(
        env.state_count,
        env.action_count,
        fwd.policies
            .last()
            .expect("planner configs require at least one iteration")
            .clone(),
    )
}

/// Mean per-demonstration log-likelihood of `demos` under the soft policy
/// planned from `reward`.
pub fn demo_log_likelihood(
    env: &Environment,
    reward: &RewardTable,
    demos: &DemoSet,
    config: &PlannerConfig,
) -> Result<f64> {
    check_soft(config)?;
    check_finite(reward, env)?;
    let visits = empirical_visitation(env, demos)?;
    let fwd = forward(env, reward, config);
    Ok(log_likelihood_of(env, config, &fwd, &visits))
}

fn log_likelihood_of(
    env: &Environment,
    config: &PlannerConfig,
    fwd: &ForwardPass,
    visits: &[f64],
) -> f64 {
    let actions = env.action_count;
    let mut total = 0.0;
    for s in 0..env.state_count {
        for a in 0..actions {
            let n = visits[s * actions + a];
            if n > 0.0 {
                total += n * config.beta * (fwd.q[s * actions + a] - fwd.values[s]);
            }
        }
    }
    total
}

/// Exact gradient of [`demo_log_likelihood`] with respect to every reward
/// entry, flat `s·|A| + a`, along with the likelihood itself.
pub fn likelihood_and_gradient(
    env: &Environment,
    reward: &RewardTable,
    demos: &DemoSet,
    config: &PlannerConfig,
) -> Result<(f64, Vec<f64>)> {
    check_soft(config)?;
    check_finite(reward, env)?;
    let visits = empirical_visitation(env, demos)?;
    let fwd = forward(env, reward, config);
    let likelihood = log_likelihood_of(env, config, &fwd, &visits);

    let states = env.state_count;
    let actions = env.action_count;
    let final_policy = fwd.policies.last().expect("at least one sweep");
    let mut state_visits = vec![0.0f64; states];
    for s in 0..states {
        for a in 0..actions {
            state_visits[s] += visits[s * actions + a];
        }
    }
    // Seed: ∂L/∂Q^K(s,a) = β·(n(s,a) − n(s)·π^K(a|s)).
    let mut g_q: Vec<f64> = (0..states * actions)
        .map(|sa| config.beta * (visits[sa] - state_visits[sa / actions] * final_policy[sa]))
        .collect();

    let mut gradient = vec![0.0f64; states * actions];
    for sweep in (0..config.iterations).rev() {
        for (g, &gq) in gradient.iter_mut().zip(&g_q) {
            *g += gq;
        }
        if sweep == 0 {
            break; // Q¹ reads the constant V⁰.
        }
        let mut g_v = vec![0.0f64; states];
        for s in 0..states {
            for a in 0..actions {
                let gq = g_q[s * actions + a];
                if gq == 0.0 {
                    continue;
                }
                for &(next, p) in env.transition(s, a) {
                    g_v[next] += config.gamma * p * gq;
                }
            }
        }
        let policy = &fwd.policies[sweep - 1];
        for s in 0..states {
            let gv = g_v[s];
            for a in 0..actions {
                g_q[s * actions + a] = gv * policy[s * actions + a];
            }
        }
    }
    Ok((likelihood, gradient))
}

/// Gradient half of [`likelihood_and_gradient`].
pub fn likelihood_gradient(
    env: &Environment,
    reward: &RewardTable,
    demos: &DemoSet,
    config: &PlannerConfig,
) -> Result<Vec<f64>> {
    Ok(likelihood_and_gradient(env, reward, demos, config)?.1)
}

/// Expected state-action visits of `policy` over `horizon` steps of
/// forward dynamic programming from the initial distribution, flat
/// `s·|A| + a`. Sums to `horizon` exactly (up to rounding), since each
/// step distributes one unit of probability mass.
pub fn expected_visitation(
    env: &Environment,
    policy: &Policy,
    horizon: usize,
) -> Result<Vec<f64>> {
    if policy.state_count != env.state_count || policy.action_count != env.action_count {
        return Err(Error::ShapeMismatch(format!(
            "policy shape {}x{} does not match environment {}x{}",
            policy.state_count, policy.action_count, env.state_count, env.action_count
        )));
    }
    let states = env.state_count;
    let actions = env.action_count;
    let mut occupancy = env.initial_dist.clone();
    let mut visits = vec![0.0f64; states * actions];
    for _ in 0..horizon {
        let mut next_occupancy = vec![0.0f64; states];
        for s in 0..states {
            let mass = occupancy[s];
            if mass == 0.0 {
                continue;
            }
            for a in 0..actions {
                let weight = mass * policy.prob(s, a);
                if weight == 0.0 {
                    continue;
                }
                visits[s * actions + a] += weight;
                for &(nxt, p) in env.transition(s, a) {
                    next_occupancy[nxt] += weight * p;
                }
            }
        }
        occupancy = next_occupancy;
    }
    Ok(visits)
}
