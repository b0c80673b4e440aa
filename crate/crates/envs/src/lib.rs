//! Benchmark environments for strategic-link analysis.
//!
//! Three families, all expressed as finite [`stratlink_core`] MDPs:
//!
//! - [`gridworld`]: deterministic key-and-door mazes parsed from ASCII
//!   layouts. Collecting a key is a set-up for passing its door, so these
//!   environments carry planted strategic links, with bundled layouts whose
//!   links are independent or correlated by construction.
//! - [`shortcuts`]: a chain of numbered nodes with jump edges that require
//!   preparation actions, the setting for recommendation grouping — some
//!   preparations only pay off together.
//! - [`arterial`]: a two-route traffic corridor in which the state carries
//!   the arriving flow, used to characterize routing policies before and
//!   after a road closure.

pub mod arterial;
pub mod gridworld;
pub mod shortcuts;
