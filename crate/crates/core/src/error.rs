//! Error type shared by all operations in this crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by environment construction, planning, and scoring.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An environment violated a structural invariant (distributions not
    /// normalized, index out of range, empty state/action space, ...).
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    /// A reward table contained a forbidden value (NaN or +∞) or had the
    /// wrong shape for its environment.
    #[error("invalid reward table: {0}")]
    InvalidReward(String),

    /// A policy row was not a probability distribution or had the wrong
    /// shape.
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    /// A configuration value was out of range (discount, temperature,
    /// iteration count, horizon, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A constraint set would forbid every action of some state, so no
    /// policy can satisfy it. Raised at construction time.
    #[error("infeasible constraint: every action of state {state}{} is forbidden", fmt_label(.label))]
    InfeasibleConstraint {
        /// State whose actions are all forbidden.
        state: usize,
        /// Human-readable state label, when the environment provides one.
        label: Option<String>,
    },

    /// Planning found a reachable state from which every action leads to
    /// unavoidable `−∞` reward, so the planned policy is undefined there.
    #[error("infeasible plan: every action from reachable state {state}{} leads to unavoidable -inf reward", fmt_label(.label))]
    InfeasibleState {
        /// Reachable state with an all-`−∞` action-value row.
        state: usize,
        /// Human-readable state label, when the environment provides one.
        label: Option<String>,
    },

    /// Data is structurally valid but carries no usable signal (for example
    /// a zero-variance canonical reward, or a zero-flow count window).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Two containers that must have identical shapes did not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Underlying I/O failure while reading or writing documents.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed JSON while reading documents.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_label(label: &Option<String>) -> String {
    match label {
        Some(name) => format!(" ({name})"),
        None => String::new(),
    }
}
