//! Shortcut networks: a chain of numbered nodes with jump edges that
//! require preparation actions taken at the first node.
//!
//! The agent starts at node 1 and wants node N, which pays `+N` on entry
//! and then absorbs with zero reward. Walking forward one node costs −1.
//! Each shortcut `(from → to, 𝒥)` can be jumped only from its origin node
//! and only once every preparation in `𝒥` has been taken; the jump costs
//! the walked distance `−(to − from)` plus a refund of `2·C` per required
//! preparation, so a shortcut is worth using exactly when its preparations
//! were bought. Preparations cost `−C` each, are only available at node 1,
//! and are recorded as state flags. Invalid jumps and repeat preparations
//! are consumed as no-ops costing −1.
//!
//! Preparations are the set-up decisions here: a preparation's value
//! exists only through the jumps it enables, which is what makes these
//! environments the benchmark for grouping recommendations that must be
//! adopted together.

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, RewardTable};
use stratlink_core::planners::{DecisionClass, DecisionClassMap};

/// One jump edge: usable from `from` to reach `to` once every preparation
/// in `preps` (1-based ids) has been taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortcut {
    /// Origin node (1-based).
    pub from: usize,
    /// Destination node (1-based, strictly greater than `from`).
    pub to: usize,
    /// Required preparation ids, each in `1..=prep_count`.
    pub preps: BTreeSet<usize>,
}

/// A shortcut network and its MDP encoding over (node, preparation-set)
/// states.
#[derive(Debug, Clone)]
pub struct ShortcutWorld {
    /// Dynamics over `node_count · 2^prep_count` states.
    pub env: Environment,
    /// Reward table described in the module docs.
    pub reward: RewardTable,
    /// Number of chain nodes N.
    pub node_count: usize,
    /// Number of available preparations J.
    pub prep_count: usize,
    /// Cost C of one preparation.
    pub prep_cost: f64,
    /// The jump edges, in action-index order.
    pub shortcuts: Vec<Shortcut>,
}

impl ShortcutWorld {
    /// Builds the MDP for a network. Duplicate shortcut endpoints are
    /// allowed (two shortcuts may span the same nodes with different
    /// preparations).
    pub fn new(
        node_count: usize,
        prep_count: usize,
        prep_cost: f64,
        shortcuts: Vec<Shortcut>,
    ) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::InvalidConfig(
                "a shortcut network needs at least two nodes".into(),
            ));
        }
        if prep_count == 0 || prep_count > 16 {
            return Err(Error::InvalidConfig(format!(
                "preparation count must be in 1..=16, got {prep_count}"
            )));
        }
        if !(prep_cost > 0.0 && prep_cost.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "preparation cost must be positive and finite, got {prep_cost}"
            )));
        }
        for (i, s) in shortcuts.iter().enumerate() {
            if s.from < 1 || s.to > node_count || s.from >= s.to {
                return Err(Error::InvalidConfig(format!(
                    "shortcut {}: endpoints {} -> {} must satisfy 1 <= from < to <= {node_count}",
                    i + 1,
                    s.from,
                    s.to
                )));
            }
            if s.preps.iter().any(|&p| p < 1 || p > prep_count) {
                return Err(Error::InvalidConfig(format!(
                    "shortcut {}: preparation ids must be in 1..={prep_count}",
                    i + 1
                )));
            }
        }

        let configs = 1usize << prep_count;
        let jump_count = shortcuts.len();
        let action_count = 1 + jump_count + prep_count;
        let state_count = node_count * configs;
        let state_of = |node: usize, flags: usize| (node - 1) * configs + flags;

        let mut transitions = Vec::with_capacity(state_count * action_count);
        let mut values = Vec::with_capacity(state_count * action_count);
        let bonus = |node: usize| if node == node_count { node_count as f64 } else { 0.0 };
        for node in 1..=node_count {
            for flags in 0..configs {
                let here = state_of(node, flags);
                for action in 0..action_count {
                    let (next, reward) = if node == node_count {
                        (here, 0.0)
                    } else if action == 0 {
                        (state_of(node + 1, flags), -1.0 + bonus(node + 1))
                    } else if action <= jump_count {
                        let s = &shortcuts[action - 1];
                        let ready = s.preps.iter().all(|&p| flags & (1 << (p - 1)) != 0);
                        if node == s.from && ready {
                            let refund = 2.0 * prep_cost * s.preps.len() as f64;
                            (
                                state_of(s.to, flags),
                                -((s.to - s.from) as f64) + refund + bonus(s.to),
                            )
                        } else {
                            (here, -1.0)
                        }
                    } else {
                        let prep = action - jump_count; // 1-based id
                        let bit = 1 << (prep - 1);
                        if node == 1 && flags & bit == 0 {
                            (state_of(1, flags | bit), -prep_cost)
                        } else {
                            (here, -1.0)
                        }
                    };
                    transitions.push(vec![(next, 1.0)]);
                    values.push(reward);
                }
            }
        }
        let mut sigma = vec![0.0; state_count];
        sigma[state_of(1, 0)] = 1.0;

        let mut state_labels = Vec::with_capacity(state_count);
        for node in 1..=node_count {
            for flags in 0..configs {
                let mut label = format!("n{node}");
                if flags != 0 {
                    label.push('+');
                    for p in 1..=prep_count {
                        if flags & (1 << (p - 1)) != 0 {
                            label.push_str(&p.to_string());
                        }
                    }
                }
                state_labels.push(label);
            }
        }
        let mut action_labels = vec!["move".to_string()];
        action_labels.extend((1..=jump_count).map(|i| format!("jump{i}")));
        action_labels.extend((1..=prep_count).map(|j| format!("prep{j}")));

        let env = Environment::new(state_count, action_count, sigma, transitions)?
            .with_state_labels(state_labels)?
            .with_action_labels(action_labels)?;
        let reward = RewardTable::new(state_count, action_count, values)?;
        Ok(ShortcutWorld {
            env,
            reward,
            node_count,
            prep_count,
            prep_cost,
            shortcuts,
        })
    }

    /// State index of a (1-based) node and preparation flag set.
    pub fn state_of(&self, node: usize, flags: usize) -> Option<usize> {
        let configs = 1 << self.prep_count;
        if node < 1 || node > self.node_count || flags >= configs {
            return None;
        }
        Some((node - 1) * configs + flags)
    }

    /// Inverse of [`ShortcutWorld::state_of`].
    pub fn locate(&self, state: usize) -> (usize, usize) {
        let configs = 1 << self.prep_count;
        (state / configs + 1, state % configs)
    }

    /// Action index of the forward move.
    pub fn move_action(&self) -> usize {
        0
    }

    /// Action index of jump `i` (1-based shortcut id).
    pub fn jump_action(&self, i: usize) -> Option<usize> {
        (i >= 1 && i <= self.shortcuts.len()).then_some(i)
    }

    /// Action index of preparation `j` (1-based id).
    pub fn prep_action(&self, j: usize) -> Option<usize> {
        (j >= 1 && j <= self.prep_count).then_some(self.shortcuts.len() + j)
    }

    /// The preparation id of an action, if it is a preparation.
    pub fn prep_of_action(&self, action: usize) -> Option<usize> {
        let first = self.shortcuts.len() + 1;
        (action >= first && action < first + self.prep_count).then(|| action - first + 1)
    }

    /// Enough decisions to buy every preparation and then walk the chain.
    pub fn horizon_cap(&self) -> usize {
        self.node_count * (self.prep_count + 1)
    }

    /// One decision class per (node, action), whose members are that choice
    /// under every preparation configuration. Forbidding a preparation
    /// through its class removes it everywhere, not just at one flag set.
    pub fn decision_classes(&self) -> DecisionClassMap {
        let configs = 1 << self.prep_count;
        let action_count = 1 + self.shortcuts.len() + self.prep_count;
        let classes = (0..self.node_count)
            .flat_map(|node| {
                (0..action_count).map(move |action| DecisionClass {
                    representative: (node * configs, action),
                    members: (0..configs).map(|f| (node * configs + f, action)).collect(),
                })
            })
            .collect();
        DecisionClassMap::new(classes).expect("node-action classes are disjoint and share actions")
    }
}

/// The worked five-node network: reaching the goal optimally takes two
/// chained jumps (node 1 → 3 → 5) whose three preparations must be bought
/// up front, while a third shortcut (2 → 5) offers an equally long but
/// differently-prepared alternative route.
pub fn two_hop_example() -> ShortcutWorld {
    ShortcutWorld::new(
        5,
        5,
        0.1,
        vec![
            Shortcut {
                from: 2,
                to: 5,
                preps: BTreeSet::from([3]),
            },
            Shortcut {
                from: 1,
                to: 3,
                preps: BTreeSet::from([4]),
            },
            Shortcut {
                from: 3,
                to: 5,
                preps: BTreeSet::from([1, 2]),
            },
        ],
    )
    .expect("worked example parameters are valid")
}

/// Draws a random network: each of `shortcut_count` shortcuts picks two
/// distinct endpoint nodes uniformly (ordered so `from < to`; duplicate
/// endpoint pairs across shortcuts are allowed) and a uniformly-sized,
/// uniformly-drawn preparation set.
pub fn random_network(
    node_count: usize,
    shortcut_count: usize,
    prep_count: usize,
    prep_cost: f64,
    rng: &mut impl Rng,
) -> Result<ShortcutWorld> {
    let mut shortcuts = Vec::with_capacity(shortcut_count);
    let nodes: Vec<usize> = (1..=node_count).collect();
    let preps: Vec<usize> = (1..=prep_count).collect();
    for _ in 0..shortcut_count {
        let ends: Vec<usize> = nodes.choose_multiple(rng, 2).copied().collect();
        let (from, to) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
        let size = rng.gen_range(1..=prep_count);
        let chosen: BTreeSet<usize> = preps.choose_multiple(rng, size).copied().collect();
        shortcuts.push(Shortcut {
            from,
            to,
            preps: chosen,
        });
    }
    ShortcutWorld::new(node_count, prep_count, prep_cost, shortcuts)
}
