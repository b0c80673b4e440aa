//! Tabular decision-making models and strategic link scores.
//!
//! This crate provides the numerical foundation for analysing *strategic
//! links* between planned decisions: the drop in the planned probability of an
//! early ("set-up") decision when a later ("pay-off") decision is constrained
//! to probability zero.
//!
//! The pieces fit together as follows:
//!
//! * [`mdp`] — finite environments `(S, A, σ, τ)`, reward tables with a `−∞`
//!   sentinel, stochastic policies, trajectories, rollouts, and exact
//!   expected-return evaluation by dynamic programming.
//! * [`planners`] — soft (log-sum-exp) and hard (max) value iteration,
//!   forbidden-decision sets, reward masking, constrained re-planning, and
//!   greedy trajectory extraction.
//! * [`linkscore`] — the link score itself,
//!   `𝔖 = π†(a|s) − π†:C(a|s)`, region constraints for quantized continuous
//!   actions, and upper-triangular score matrices along a trajectory.
//! * [`serialize`] — a JSON document format for environment/reward pairs.
//!
//! All operations are pure functions of their inputs (plus an explicit seed
//! where sampling is involved), so they are safe to evaluate concurrently.

pub mod error;
pub mod linkscore;
pub mod mdp;
pub mod planners;
pub mod serialize;

pub use error::{Error, Result};
