//! Routing-behavior characterization for the arterial corridor.
//!
//! This crate answers, for the corridor environment, the same question the
//! rest of the workspace asks of discrete worlds: *which junctions does a
//! road closure actually touch?* It does so from two directions:
//!
//! - [`routing`] plans the corridor exactly — hard value iteration on the
//!   flow-augmented state space, rolled out to one staying fraction per
//!   junction — and scores a closure by how much each junction's arterial
//!   frequency drops ([`junction_link_scores`]).
//! - [`sim`] generates the same observable from below: a deterministic
//!   driver population whose shared travel-time estimates relax toward
//!   what it measures, producing cumulative detector counts.
//! - [`counts`] holds those counts and extracts pre- and
//!   post-intervention routing policies from them by least-squares slope
//!   fitting, which is what connects either source to the scores.
//!
//! The planner view and the population view agree in free flow (the
//! population converges on the all-arterial optimum) and tell the same
//! story about a closure at trend level: the closed junction's frequency
//! collapses, and the junction just upstream responds first because news
//! propagates one junction per estimate update.

pub mod counts;
pub mod routing;
pub mod sim;

pub use counts::{extract_policies, CountSeries, DEFAULT_SETTLE_FRACTION};
pub use routing::{
    closure_constraint, default_routing_config, flow_dependent_routing, junction_link_scores,
    optimal_routing, optimal_routing_with, rollout_flow_policy, FlowDependentPolicy, FlowPolicy,
};
pub use sim::{simulate_drivers, SimConfig};
