//! A two-route traffic corridor as a flow-augmented MDP.
//!
//! Vehicles enter an arterial road of `J` junctions at flow `f0`. At each
//! junction a controller picks the fraction `a` of the arriving arterial
//! flow that stays on the arterial; the rest diverts onto a parallel
//! highway. The state is the pair (junction, arriving arterial flow), with
//! flow quantized to `Q` levels `{f0·k/(Q−1)}`, so the transition
//! `f′ = snap(f·a)` is deterministic; after the last junction the corridor
//! ends in an absorbing zero-reward state.
//!
//! Actions are the `Q` staying fractions `a = m/(Q−1)`. One decision at
//! junction `i` with arriving flow `f` and continuing flow `fa = snap(f·a)`
//! costs the total time its traffic spends on the next segment:
//!
//! ```text
//! r = −[ fa·T_A(fa)  +  (f−fa)·T_H(f−fa)  +  (f0−fa)·T_H(f0−fa) ]
//! ```
//!
//! — the continuing flow on the arterial segment, the newly diverted flow
//! on its entry ramp, and everything off the arterial on the parallel
//! highway segment. A full diversion therefore pays the highway time twice
//! at the diversion step (ramp plus segment), which encodes the highway
//! route being one hop longer than the arterial.
//!
//! Per-segment free-flow times are `base_A = 1000 / (20·√(J/(J+1)))` for
//! the arterial and `base_H = 50` for the highway: over the full corridor
//! the arterial is faster (`J·base_A < (J+1)·base_H`) even though each of
//! its segments is slower, which is what makes early diversion a strategic
//! question rather than a local one. The optional congestion model scales
//! a segment's time by `1 + α·(x/f0)^p` in its own flow `x` (α = 0 keeps
//! times flow-independent).

use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, RewardTable};

/// Sizing and congestion parameters for the corridor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArterialConfig {
    /// Number of junctions J along the arterial.
    pub junctions: usize,
    /// Flow entering the corridor at junction 1.
    pub entry_flow: f64,
    /// Number of flow levels and of staying-fraction actions Q.
    pub quantization: usize,
    /// Congestion strength α (0 disables congestion).
    pub congestion_alpha: f64,
    /// Congestion exponent p.
    pub congestion_power: f64,
}

impl Default for ArterialConfig {
    fn default() -> Self {
        ArterialConfig {
            junctions: 10,
            entry_flow: 2.0,
            quantization: 100,
            congestion_alpha: 0.0,
            congestion_power: 4.0,
        }
    }
}

/// The corridor MDP plus its travel-time model.
#[derive(Debug, Clone)]
pub struct ArterialWorld {
    /// Deterministic dynamics over (junction, flow-level) states plus one
    /// absorbing end state.
    pub env: Environment,
    /// Negative total travel time per decision.
    pub reward: RewardTable,
    /// The parameters the world was built from.
    pub config: ArterialConfig,
    arterial_base: f64,
    highway_base: f64,
}

impl ArterialWorld {
    /// Builds the corridor MDP.
    pub fn new(config: ArterialConfig) -> Result<Self> {
        if config.junctions < 1 {
            return Err(Error::InvalidConfig(
                "the corridor needs at least one junction".into(),
            ));
        }
        if config.quantization < 2 {
            return Err(Error::InvalidConfig(format!(
                "flow quantization must be at least 2, got {}",
                config.quantization
            )));
        }
        if !(config.entry_flow > 0.0 && config.entry_flow.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "entry flow must be positive and finite, got {}",
                config.entry_flow
            )));
        }
        if !(config.congestion_alpha >= 0.0 && config.congestion_alpha.is_finite())
            || !(config.congestion_power > 0.0 && config.congestion_power.is_finite())
        {
            return Err(Error::InvalidConfig(
                "congestion parameters must be finite, with alpha >= 0 and power > 0".into(),
            ));
        }

        let j = config.junctions;
        let q = config.quantization;
        let ratio = j as f64 / (j + 1) as f64;
        let mut world = ArterialWorld {
            env: Environment::new(1, 1, vec![1.0], vec![vec![(0, 1.0)]])?,
            reward: RewardTable::zeros(1, 1),
            config,
            arterial_base: 1000.0 / (20.0 * ratio.sqrt()),
            highway_base: 50.0,
        };

        let state_count = j * q + 1;
        let terminal = j * q;
        let mut transitions = Vec::with_capacity(state_count * q);
        let mut values = Vec::with_capacity(state_count * q);
        for junction in 1..=j {
            for level in 0..q {
                let state = (junction - 1) * q + level;
                let f = world.flow_of_level(level);
                for m in 0..q {
                    let stay_level = ((level * m) as f64 / (q - 1) as f64).round() as usize;
                    let fa = world.flow_of_level(stay_level);
                    let diverted = f - fa;
                    let off_arterial = world.config.entry_flow - fa;
                    let cost = fa * world.arterial_time(fa)
                        + diverted * world.highway_time(diverted)
                        + off_arterial * world.highway_time(off_arterial);
                    let next = if junction == j {
                        terminal
                    } else {
                        junction * q + stay_level
                    };
                    transitions.push(vec![(next, 1.0)]);
                    values.push(-cost);
                    debug_assert_eq!(transitions.len() - 1, state * q + m);
                }
            }
        }
        for _ in 0..q {
            transitions.push(vec![(terminal, 1.0)]);
            values.push(0.0);
        }
        let mut sigma = vec![0.0; state_count];
        sigma[q - 1] = 1.0; // junction 1 at full entry flow

        let mut labels: Vec<String> = (1..=j)
            .flat_map(|junction| (0..q).map(move |level| format!("J{junction}k{level}")))
            .collect();
        labels.push("end".into());

        world.env = Environment::new(state_count, q, sigma, transitions)?
            .with_state_labels(labels)?;
        world.reward = RewardTable::new(state_count, q, values)?;
        Ok(world)
    }

    /// Flow carried by quantization level `k`.
    pub fn flow_of_level(&self, level: usize) -> f64 {
        self.config.entry_flow * level as f64 / (self.config.quantization - 1) as f64
    }

    /// Staying fraction encoded by action `m`.
    pub fn action_fraction(&self, action: usize) -> f64 {
        action as f64 / (self.config.quantization - 1) as f64
    }

    /// State index of (1-based) junction `junction` at flow level `level`.
    pub fn state_of(&self, junction: usize, level: usize) -> Option<usize> {
        if junction < 1 || junction > self.config.junctions || level >= self.config.quantization {
            return None;
        }
        Some((junction - 1) * self.config.quantization + level)
    }

    /// All states of one junction, for region constraints such as a
    /// closure.
    pub fn junction_states(&self, junction: usize) -> Vec<usize> {
        (0..self.config.quantization)
            .filter_map(|level| self.state_of(junction, level))
            .collect()
    }

    /// The absorbing end-of-corridor state.
    pub fn terminal_state(&self) -> usize {
        self.config.junctions * self.config.quantization
    }

    /// The initial state: junction 1 at full entry flow.
    pub fn entry_state(&self) -> usize {
        self.config.quantization - 1
    }

    /// Per-segment arterial travel time at flow `x`.
    pub fn arterial_time(&self, x: f64) -> f64 {
        self.arterial_base * self.congestion_factor(x)
    }

    /// Per-segment highway travel time at flow `x`.
    pub fn highway_time(&self, x: f64) -> f64 {
        self.highway_base * self.congestion_factor(x)
    }

    fn congestion_factor(&self, x: f64) -> f64 {
        1.0 + self.config.congestion_alpha
            * (x / self.config.entry_flow).powf(self.config.congestion_power)
    }
}
