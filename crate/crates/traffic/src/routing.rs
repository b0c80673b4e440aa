//! Optimal flow routing on the arterial corridor.
//!
//! The corridor controller solves the flow-augmented MDP in three steps:
//! build the `(junction, flow)` state space (done by
//! [`ArterialWorld`]), run hard value iteration for the flow-dependent
//! policy `π*(Jᵢ, f)`, and roll that policy out from the entry flow to read
//! off one staying fraction per junction — the flow-free policy `π*(Jᵢ)`.
//! A road closure is a constraint forbidding every action that keeps flow
//! on the arterial at the closed junction, so the re-planned corridor must
//! divert everything there.
//!
//! Comparing the rolled-out policies before and after a closure gives one
//! score per junction: `𝔖(JX) = π_pre(JX) − π_post(JX)`, the drop in the
//! junction's arterial frequency caused by the closure. A junction whose
//! behavior the closure does not touch scores 0; the closed junction and
//! every junction that re-routes because of it score positive.
//!
//! Ties between staying fractions are broken toward the **larger**
//! fraction. Downstream of a full diversion the corridor carries no flow
//! and every action of a zero-flow state costs the same, so some
//! tie-breaking rule is forced; preferring the arterial reads as "nothing
//! changed where no flow had a choice to make", which keeps untouched
//! junctions at score 0.

use serde::Serialize;
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{PlanMode, PlannerConfig};
use stratlink_core::planners::{action_values, apply_constraint, ConstraintSet};
use stratlink_envs::arterial::ArterialWorld;

/// One arterial frequency per junction: the fraction of arriving flow that
/// stays on the arterial there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowPolicy {
    /// Per-junction staying fractions, each in `[0, 1]`, index 0 = J1.
    pub arterial: Vec<f64>,
}

impl FlowPolicy {
    /// Validates every entry into `[0, 1]`.
    pub fn new(arterial: Vec<f64>) -> Result<Self> {
        if let Some(bad) = arterial.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidPolicy(format!(
                "arterial frequency {bad} is outside [0, 1]"
            )));
        }
        Ok(FlowPolicy { arterial })
    }

    /// Number of junctions covered.
    pub fn junctions(&self) -> usize {
        self.arterial.len()
    }

    /// Frequency at 1-based junction `junction`.
    pub fn frequency(&self, junction: usize) -> f64 {
        self.arterial[junction - 1]
    }
}

/// The flow-dependent routing table: one action per `(junction, flow
/// level)` state of the corridor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDependentPolicy {
    /// Number of junctions.
    pub junctions: usize,
    /// Number of flow levels / staying-fraction actions.
    pub quantization: usize,
    /// Chosen action per state, row-major `(junction − 1)·Q + level`.
    pub actions: Vec<usize>,
}

impl FlowDependentPolicy {
    /// Action chosen at 1-based `junction` with flow level `level`.
    pub fn action(&self, junction: usize, level: usize) -> usize {
        self.actions[(junction - 1) * self.quantization + level]
    }
}

/// Planner settings used for corridor routing when the caller has no
/// preference: hard backups, a discount mild enough to preserve the
/// corridor-wide route ranking, and enough sweeps to converge the
/// finite-depth corridor exactly.
pub fn default_routing_config(world: &ArterialWorld) -> PlannerConfig {
    PlannerConfig::new(0.99, 100.0, world.config.junctions + 2, PlanMode::Hard)
        .expect("default routing parameters are valid")
}

/// The constraint encoding a road closure: at the closed junction every
/// action with a positive staying fraction is forbidden, so all arriving
/// flow must divert.
pub fn closure_constraint(world: &ArterialWorld, junction: usize) -> Result<ConstraintSet> {
    if junction < 1 || junction > world.config.junctions {
        return Err(Error::InvalidConfig(format!(
            "closure junction {junction} is outside 1..={}",
            world.config.junctions
        )));
    }
    let pairs = world
        .junction_states(junction)
        .into_iter()
        .flat_map(|state| (1..world.config.quantization).map(move |m| (state, m)));
    ConstraintSet::new(&world.env, pairs)
}

/// Hard-value-iteration routing table for the corridor, optionally under a
/// closure, with ties broken toward the larger staying fraction.
pub fn flow_dependent_routing(
    world: &ArterialWorld,
    closure: Option<usize>,
    config: &PlannerConfig,
) -> Result<FlowDependentPolicy> {
    let reward = match closure {
        Some(junction) => apply_constraint(&world.reward, &closure_constraint(world, junction)?),
        None => world.reward.clone(),
    };
    let hard = config.with_mode(PlanMode::Hard);
    let q = action_values(&world.env, &reward, &hard)?;
    let qn = world.config.quantization;
    let mut actions = Vec::with_capacity(world.config.junctions * qn);
    for junction in 1..=world.config.junctions {
        for level in 0..qn {
            let state = world
                .state_of(junction, level)
                .expect("every junction level is a state");
            let row = &q[state * qn..(state + 1) * qn];
            let mut best = 0;
            for (m, &value) in row.iter().enumerate() {
                if value >= row[best] {
                    best = m;
                }
            }
            if row[best] == f64::NEG_INFINITY {
                return Err(Error::InfeasibleState {
                    state,
                    label: world.env.state_label(state),
                });
            }
            actions.push(best);
        }
    }
    Ok(FlowDependentPolicy {
        junctions: world.config.junctions,
        quantization: qn,
        actions,
    })
}

/// Rolls the routing table out from the entry flow and reads one staying
/// fraction per junction: the flow-free policy. The realized flows stay on
/// the quantized grid, so `f_A` after junction `i` is exactly the snapped
/// product of the arriving flow and the chosen fraction.
pub fn rollout_flow_policy(world: &ArterialWorld, table: &FlowDependentPolicy) -> FlowPolicy {
    let qn = world.config.quantization;
    let mut level = qn - 1;
    let mut arterial = Vec::with_capacity(world.config.junctions);
    for junction in 1..=world.config.junctions {
        let action = table.action(junction, level);
        arterial.push(world.action_fraction(action));
        let state = world
            .state_of(junction, level)
            .expect("every junction level is a state");
        let next = world.env.transition(state, action)[0].0;
        if junction < world.config.junctions {
            level = next - junction * qn;
        }
    }
    FlowPolicy { arterial }
}

/// The full routing procedure: plan the flow-dependent table, then roll it
/// out from the entry flow. `closure` names the junction whose arterial
/// continuation is closed, if any.
pub fn optimal_routing(world: &ArterialWorld, closure: Option<usize>) -> Result<FlowPolicy> {
    optimal_routing_with(world, closure, &default_routing_config(world))
}

/// [`optimal_routing`] with explicit planner settings (the mode is always
/// forced to hard backups).
pub fn optimal_routing_with(
    world: &ArterialWorld,
    closure: Option<usize>,
    config: &PlannerConfig,
) -> Result<FlowPolicy> {
    let table = flow_dependent_routing(world, closure, config)?;
    Ok(rollout_flow_policy(world, &table))
}

/// Per-junction strategic scores of a closure: pre-closure arterial
/// frequency minus post-closure arterial frequency.
pub fn junction_link_scores(pre: &FlowPolicy, post: &FlowPolicy) -> Result<Vec<f64>> {
    if pre.junctions() != post.junctions() {
        return Err(Error::ShapeMismatch(format!(
            "pre policy covers {} junctions, post policy {}",
            pre.junctions(),
            post.junctions()
        )));
    }
    Ok(pre
        .arterial
        .iter()
        .zip(&post.arterial)
        .map(|(a, b)| a - b)
        .collect())
}
