//! A stand-in driver population for the corridor.
//!
//! Real route-choice data comes from microsimulation; this module supplies
//! a small, fully deterministic substitute with the same observable shape:
//! cumulative detector counts per junction. Drivers enter at the corridor
//! head at the entry rate (fractional rates carry a remainder across
//! steps, so flow is conserved exactly in vehicle units), and at each
//! junction choose between staying on the arterial and diverting to the
//! highway using shared travel-time estimates:
//!
//! ```text
//! P(stay at Jj) = σ((divert_j − stay_j) / η)
//! ```
//!
//! where `stay_j` estimates the remaining trip time through the arterial
//! segment at `Jj` and `divert_j` the remaining time via the highway from
//! `Jj`. Estimates start at the free-flow truths and relax every
//! `update_period` steps toward what the population just measured:
//! the observed segment time plus the better of the two estimates at the
//! next junction (`stay`), and the observed ramp time times the remaining
//! highway hop count (`divert`). Updates are synchronous — all junctions
//! update from the previous estimates — so news of a closure walks
//! upstream one junction per update, which is what makes the junction
//! nearest the closure respond first and strongest on short horizons.
//!
//! A closure forces every driver reaching the closed junction onto the
//! highway from `closure_time` on; its own stay estimate freezes, since
//! no driver can measure a segment that cannot be entered.

use crate::counts::CountSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stratlink_core::error::{Error, Result};
use stratlink_envs::arterial::ArterialWorld;

/// Driver-population settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    /// Junction whose arterial continuation closes, if any.
    pub closure: Option<usize>,
    /// Step at which the closure takes effect (also the recorded
    /// intervention step of the produced counts).
    pub closure_time: usize,
    /// Number of simulated steps.
    pub horizon: usize,
    /// Steps between synchronous estimate updates.
    pub update_period: usize,
    /// Relaxation weight of each update, in `(0, 1]`.
    pub update_weight: f64,
    /// Logit temperature of the route choice, in time units.
    pub noise: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            closure: None,
            closure_time: 10_000,
            horizon: 50_000,
            update_period: 500,
            update_weight: 0.5,
            noise: 2.0,
        }
    }
}

impl SimConfig {
    fn validate(&self, world: &ArterialWorld) -> Result<()> {
        if let Some(junction) = self.closure {
            if junction < 1 || junction > world.config.junctions {
                return Err(Error::InvalidConfig(format!(
                    "closure junction {junction} is outside 1..={}",
                    world.config.junctions
                )));
            }
        }
        if self.horizon < 2 {
            return Err(Error::InvalidConfig(format!(
                "simulation horizon {} is too short",
                self.horizon
            )));
        }
        if !(1..self.horizon).contains(&self.closure_time) {
            return Err(Error::InvalidConfig(format!(
                "closure time {} is not strictly inside the horizon {}",
                self.closure_time, self.horizon
            )));
        }
        if self.update_period == 0 {
            return Err(Error::InvalidConfig("update period must be positive".into()));
        }
        if !(self.update_weight > 0.0 && self.update_weight <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "update weight {} is outside (0, 1]",
                self.update_weight
            )));
        }
        if !(self.noise > 0.0 && self.noise.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "choice noise {} must be positive and finite",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Runs the driver population and returns cumulative detector counts.
///
/// Every vehicle that enters leaves through exactly one highway ramp or
/// the arterial exit, so per step the number of entries equals the count
/// increments across all exits; the produced series always satisfies the
/// per-junction conservation law `Δa_{j} = Δa_{j+1} + Δh_{j+1}`.
pub fn simulate_drivers(
    world: &ArterialWorld,
    sim: &SimConfig,
    seed: u64,
) -> Result<CountSeries> {
    sim.validate(world)?;
    let junctions = world.config.junctions;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let arterial_free = world.arterial_time(0.0);
    let highway_free = world.highway_time(0.0);
    // Free-flow truths: remaining time through segment j (0-based) on the
    // arterial, and remaining time via the highway from junction j.
    let mut stay: Vec<f64> = (0..junctions)
        .map(|j| (junctions - j) as f64 * arterial_free)
        .collect();
    let mut divert: Vec<f64> = (0..junctions)
        .map(|j| (junctions + 1 - j) as f64 * highway_free)
        .collect();

    let mut cum_arterial = vec![0u64; junctions];
    let mut cum_highway = vec![0u64; junctions];
    let mut arterial_series = vec![Vec::with_capacity(sim.horizon); junctions];
    let mut highway_series = vec![Vec::with_capacity(sim.horizon); junctions];

    let mut carry = 0.0_f64;
    let mut observed_stay = vec![0.0_f64; junctions];
    let mut observed_ramp = vec![0.0_f64; junctions];
    let mut observed_steps = 0usize;

    for t in 0..sim.horizon {
        let closed_at = |junction_index: usize| {
            sim.closure == Some(junction_index + 1) && t >= sim.closure_time
        };

        carry += world.config.entry_flow;
        let entries = carry.floor() as u64;
        carry -= entries as f64;

        let mut stayed = vec![0u64; junctions];
        let mut diverted = vec![0u64; junctions];
        for _ in 0..entries {
            for j in 0..junctions {
                let p_stay = if closed_at(j) {
                    0.0
                } else {
                    let gap = (divert[j] - stay[j]) / sim.noise;
                    1.0 / (1.0 + (-gap).exp())
                };
                if rng.gen::<f64>() < p_stay {
                    stayed[j] += 1;
                } else {
                    diverted[j] += 1;
                    break;
                }
            }
        }

        let mut on_highway = 0u64;
        for j in 0..junctions {
            cum_arterial[j] += stayed[j];
            cum_highway[j] += diverted[j];
            arterial_series[j].push(cum_arterial[j]);
            highway_series[j].push(cum_highway[j]);
            on_highway += diverted[j];
            // What this step's drivers experienced: the arterial segment at
            // its realized flow, and the ramp shared by everything that has
            // left the arterial so far.
            observed_stay[j] += world.arterial_time(stayed[j] as f64);
            observed_ramp[j] += world.highway_time(on_highway as f64);
        }
        observed_steps += 1;

        if (t + 1) % sim.update_period == 0 {
            let steps = observed_steps as f64;
            let best: Vec<f64> = (0..junctions)
                .map(|j| {
                    if closed_at(j) {
                        divert[j]
                    } else {
                        stay[j].min(divert[j])
                    }
                })
                .collect();
            let w = sim.update_weight;
            for j in 0..junctions {
                let downstream = if j + 1 < junctions { best[j + 1] } else { 0.0 };
                if !closed_at(j) {
                    let stay_target = observed_stay[j] / steps + downstream;
                    stay[j] = (1.0 - w) * stay[j] + w * stay_target;
                }
                let divert_target =
                    observed_ramp[j] / steps * (junctions + 1 - j) as f64;
                divert[j] = (1.0 - w) * divert[j] + w * divert_target;
            }
            observed_stay.iter_mut().for_each(|v| *v = 0.0);
            observed_ramp.iter_mut().for_each(|v| *v = 0.0);
            observed_steps = 0;
        }
    }

    CountSeries::new(sim.closure_time, arterial_series, highway_series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use stratlink_envs::arterial::ArterialConfig;

    fn corridor(junctions: usize) -> ArterialWorld {
        ArterialWorld::new(ArterialConfig {
            junctions,
            entry_flow: 2.0,
            quantization: 10,
            congestion_alpha: 0.0,
            congestion_power: 4.0,
        })
        .expect("valid corridor")
    }

    /// A fractional entry rate must carry its remainder across steps: 1.5
    /// vehicles per step over 40 steps admits exactly 60 vehicles, and all
    /// of them leave through some detector.
    #[test]
    fn entries_follow_the_fractional_rate_exactly() {
        let world = ArterialWorld::new(ArterialConfig {
            junctions: 3,
            entry_flow: 1.5,
            quantization: 10,
            congestion_alpha: 0.0,
            congestion_power: 4.0,
        })
        .unwrap();
        let sim = SimConfig {
            horizon: 40,
            closure_time: 20,
            update_period: 10,
            ..SimConfig::default()
        };
        let counts = simulate_drivers(&world, &sim, 3).expect("simulation runs");
        let total: u64 = counts.arterial(3)[39]
            + (1..=3).map(|j| counts.highway(j)[39]).sum::<u64>();
        assert_eq!(total, 60, "1.5 vehicles per step over 40 steps");
    }

    #[test]
    fn per_junction_flow_is_conserved_every_step() {
        let world = corridor(5);
        let sim = SimConfig {
            closure: Some(5),
            closure_time: 100,
            horizon: 400,
            update_period: 50,
            ..SimConfig::default()
        };
        let counts = simulate_drivers(&world, &sim, 11).expect("simulation runs");
        for t in 0..counts.len() {
            for j in 1..5 {
                let arrived = counts.arterial(j)[t];
                let split = counts.arterial(j + 1)[t] + counts.highway(j + 1)[t];
                assert_eq!(arrived, split, "junction {} at step {t}", j + 1);
            }
        }
    }

    #[test]
    fn free_flow_population_stays_on_the_arterial() {
        // Free-flow estimates favor the arterial at every junction by a
        // 25-time-unit margin or more, and measured times reproduce the
        // estimates, so the population should essentially never divert.
        let world = corridor(5);
        let sim = SimConfig {
            horizon: 1000,
            closure_time: 500,
            update_period: 100,
            ..SimConfig::default()
        };
        let counts = simulate_drivers(&world, &sim, 1).expect("simulation runs");
        let through = counts.arterial(5)[999];
        let diverted: u64 = (1..=5).map(|j| counts.highway(j)[999]).sum();
        assert!(
            through >= 1990 && diverted <= 10,
            "through {through}, diverted {diverted}"
        );
    }

    #[test]
    fn closure_forces_diversion_and_freezes_the_closed_estimate() {
        let world = corridor(3);
        let sim = SimConfig {
            closure: Some(3),
            closure_time: 50,
            horizon: 300,
            update_period: 25,
            ..SimConfig::default()
        };
        let counts = simulate_drivers(&world, &sim, 5).expect("simulation runs");
        let at_closure = counts.arterial(3)[49];
        assert_eq!(
            counts.arterial(3)[299],
            at_closure,
            "no vehicle passes the closed junction after the closure step"
        );
        assert!(
            counts.highway(3)[299] > counts.highway(3)[49],
            "arrivals at the closed junction divert instead"
        );
    }

    #[test]
    fn identical_seeds_reproduce_identical_counts() {
        let world = corridor(4);
        let sim = SimConfig {
            closure: Some(4),
            closure_time: 60,
            horizon: 200,
            update_period: 20,
            ..SimConfig::default()
        };
        let a = simulate_drivers(&world, &sim, 42).expect("simulation runs");
        let b = simulate_drivers(&world, &sim, 42).expect("simulation runs");
        assert_eq!(a, b);
        let c = simulate_drivers(&world, &sim, 43).expect("simulation runs");
        assert_ne!(a, c, "a different seed draws different choices");
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let world = corridor(3);
        let bad = |f: fn(&mut SimConfig)| {
            let mut sim = SimConfig {
                horizon: 100,
                closure_time: 50,
                update_period: 10,
                ..SimConfig::default()
            };
            f(&mut sim);
            simulate_drivers(&world, &sim, 0).is_err()
        };
        assert!(bad(|s| s.closure = Some(4)));
        assert!(bad(|s| s.closure = Some(0)));
        assert!(bad(|s| s.closure_time = 100));
        assert!(bad(|s| s.closure_time = 0));
        assert!(bad(|s| s.horizon = 1));
        assert!(bad(|s| s.update_period = 0));
        assert!(bad(|s| s.update_weight = 0.0));
        assert!(bad(|s| s.update_weight = 1.5));
        assert!(bad(|s| s.noise = 0.0));
    }
}
