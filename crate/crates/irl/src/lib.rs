//! Reward inference and its evaluation for the strategic-link workspace.
//!
//! The question this crate answers: if an observer only sees behavior, can
//! they recover enough of the underlying objective to reproduce the
//! *strategic structure* — the link scores — of the original agent? The
//! pipeline:
//!
//! - [`demos`]: sample demonstration trajectories from a soft-optimal
//!   policy, seeded and of fixed length.
//! - [`likelihood`]: the demonstration log-likelihood under the soft
//!   planner and its exact reward gradient (reverse accumulation through
//!   the planning recursion), plus forward-DP expected visitation.
//! - [`train`]: maximum-entropy reward inference — Adam ascent on that
//!   likelihood from a zero-initialized reward table.
//! - [`epic`]: a shaping- and scale-invariant distance between reward
//!   tables, for judging reward recovery itself.
//! - [`experiment`]: the temperature sweep tying it together — score
//!   error versus reward error as demonstration stochasticity varies.

pub mod demos;
pub mod epic;
pub mod experiment;
pub mod likelihood;
pub mod train;

pub use demos::{empirical_visitation, sample_demonstrations, DemoSet};
pub use epic::{canonicalize, epic_distance, EpicConfig};
pub use experiment::{
    inferred_score_error, recovery_experiment, score_list_error, IrlRunRecord, RecoveryConfig,
};
pub use likelihood::{
    demo_log_likelihood, expected_visitation, likelihood_and_gradient, likelihood_gradient,
    soft_policy,
};
pub use train::{maxent_irl, maxent_irl_with_trace, IrlConfig};
