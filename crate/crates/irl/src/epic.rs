//! Shaping-invariant distance between reward tables.
//!
//! Two rewards that differ by potential shaping `γ·Φ(s′) − Φ(s)`, a
//! positive scale, or a constant induce the same soft-optimal behavior, so
//! a meaningful "how wrong is the inferred reward" number must quotient
//! those differences out. This module does it in two steps:
//!
//! 1. **Canonicalize** against the environment's own dynamics: solve the
//!    fixed point
//!    `Φ(s) = E_a[r(s,a)] + γ·E_a[E_{s′∼τ}[Φ(s′)]]`
//!    (expectations over the configured action distribution; a
//!    γ-contraction, solved by iteration) and shift
//!    `C(r) = r + γ·E_{s′∼τ}[Φ(s′)] − Φ(s)`.
//!    Because the map `r ↦ Φ` sends a shaping term to its own potential
//!    (with opposite sign), canonicalization cancels potential shaping and
//!    constants *exactly*, not just in expectation.
//! 2. **Correlate**: Pearson correlation `ρ` of the two canonical tables
//!    over the evaluation distribution (uniform over states and actions by
//!    default, recorded in run metadata), returned as the distance
//!    `sqrt((1 − ρ)/2) ∈ [0, 1]`. Correlation is scale-free, which removes
//!    the positive-scaling freedom.
//!
//! A canonical table with zero variance (for example a constant reward)
//! has no defined correlation; that is reported as a distinct
//! [`Error::Degenerate`] outcome, never as a number.

use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, RewardTable};

/// Canonicalization settings: the discount the shaping quotient is taken
/// at, and the fixed-point iteration budget.
#[derive(Debug, Clone, PartialEq)]
pub struct EpicConfig {
    /// Discount γ of the shaping terms being cancelled.
    pub gamma: f64,
    /// Sup-norm change below which the potential iteration stops.
    pub tolerance: f64,
    /// Iteration cap for the potential fixed point.
    pub max_iterations: usize,
}

impl EpicConfig {
    /// Settings for a given discount, with defaults ample for exact
    /// cancellation at `f64` precision.
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "EPIC discount {gamma} must lie strictly inside (0, 1)"
            )));
        }
        Ok(EpicConfig {
            gamma,
            tolerance: 1e-13,
            max_iterations: 1_000_000,
        })
    }
}

fn check_shape(env: &Environment, reward: &RewardTable, which: &str) -> Result<()> {
    if !reward.matches(env) {
        return Err(Error::ShapeMismatch(format!(
            "{which} reward shape {}x{} does not match the {}x{} environment",
            reward.state_count, reward.action_count, env.state_count, env.action_count
        )));
    }
    for s in 0..env.state_count {
        for a in 0..env.action_count {
            if !reward.get(s, a).is_finite() {
                return Err(Error::InvalidReward(format!(
                    "{which} reward({s}, {a}) is not finite"
                )));
            }
        }
    }
    Ok(())
}

/// Solves the mean-reward potential fixed point by iteration.
fn potential(env: &Environment, reward: &RewardTable, config: &EpicConfig) -> Vec<f64> {
    let states = env.state_count;
    let actions = env.action_count;
    let mean_reward: Vec<f64> = (0..states)
        .map(|s| (0..actions).map(|a| reward.get(s, a)).sum::<f64>() / actions as f64)
        .collect();
    let mut phi = vec![0.0f64; states];
    for _ in 0..config.max_iterations {
        let mut next = vec![0.0f64; states];
        for s in 0..states {
            let mut successor = 0.0;
            for a in 0..actions {
                for &(nxt, p) in env.transition(s, a) {
                    successor += p * phi[nxt];
                }
            }
            next[s] = mean_reward[s] + config.gamma * successor / actions as f64;
        }
        let change = phi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        phi = next;
        if change < config.tolerance {
            break;
        }
    }
    phi
}

/// The canonical form `C(r)(s,a) = r(s,a) + γ·E_{s′}[Φ(s′)] − Φ(s)`, flat
/// `s·|A| + a`. Invariant (exactly, at `f64` precision) under adding
/// potential shaping or a constant to `r`; linear in `r`.
pub fn canonicalize(
    env: &Environment,
    reward: &RewardTable,
    config: &EpicConfig,
) -> Result<Vec<f64>> {
    check_shape(env, reward, "the")?;
    let phi = potential(env, reward, config);
    let actions = env.action_count;
    let mut canonical = vec![0.0f64; env.state_count * actions];
    for s in 0..env.state_count {
        for a in 0..actions {
            let mut successor = 0.0;
            for &(nxt, p) in env.transition(s, a) {
                successor += p * phi[nxt];
            }
            canonical[s * actions + a] = reward.get(s, a) + config.gamma * successor - phi[s];
        }
    }
    Ok(canonical)
}

/// Pearson-correlation distance `sqrt((1 − ρ)/2)` between the canonical
/// forms of two rewards, evaluated uniformly over all state-action pairs.
pub fn epic_distance(
    r1: &RewardTable,
    r2: &RewardTable,
    env: &Environment,
    config: &EpicConfig,
) -> Result<f64> {
    check_shape(env, r1, "the first")?;
    check_shape(env, r2, "the second")?;
    let c1 = canonicalize(env, r1, config)?;
    let c2 = canonicalize(env, r2, config)?;
    let n = c1.len() as f64;
    let mean1 = c1.iter().sum::<f64>() / n;
    let mean2 = c2.iter().sum::<f64>() / n;
    let mut var1 = 0.0;
    let mut var2 = 0.0;
    let mut cov = 0.0;
    for (&x, &y) in c1.iter().zip(&c2) {
        let dx = x - mean1;
        let dy = y - mean2;
        var1 += dx * dx;
        var2 += dy * dy;
        cov += dx * dy;
    }
    const VARIANCE_FLOOR: f64 = 1e-18;
    if var1 / n < VARIANCE_FLOOR || var2 / n < VARIANCE_FLOOR {
        return Err(Error::Degenerate(
            "canonical reward has zero variance; the correlation distance is undefined".into(),
        ));
    }
    let rho = (cov / (var1.sqrt() * var2.sqrt())).clamp(-1.0, 1.0);
    Ok(((1.0 - rho) / 2.0).sqrt())
}
