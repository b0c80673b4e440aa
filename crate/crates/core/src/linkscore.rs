//! Strategic link scores between planned decisions, and score matrices
//! along a trajectory.
//!
//! The link score of a set-up decision `(s, a)` toward a pay-off decision
//! `(s̃, ã)` is the drop in the set-up's planned probability when the
//! pay-off is constrained to probability zero:
//!
//! ```text
//! 𝔖_{(s,a)→(s̃,ã)} = π†(a|s) − π†:{π(ã|s̃)=0}(a|s)
//! ```
//!
//! where both policies come from the same planner configuration and the
//! constrained one is re-planned with the pay-off decision's reward masked
//! to `−∞`. Scores lie in `[−1, 1]` and never exceed `π†(a|s)`. A positive
//! score means the set-up was (partly) taken *because of* the pay-off; zero
//! means the plan does not change; negative scores are legal and mean the
//! set-up becomes *more* likely once the pay-off is unavailable.
//!
//! [`explanation_matrix`] extracts the greedy trajectory of the planned
//! policy and scores every ordered pair of its decisions `t ≤ t′`,
//! producing an upper-triangular matrix. Pay-off constraints may expand
//! through a [`DecisionClassMap`] so that logically-equal decisions (for
//! example the same grid cell under any combination of collected-key flags)
//! are forbidden together. Distinct pay-off constraints are planned once
//! each, in parallel; cells then read from the cached plans, so the result
//! is deterministic regardless of evaluation order.

use crate::error::{Error, Result};
use crate::mdp::{Environment, PlannerConfig, Policy, RewardTable, Trajectory};
use crate::planners::{most_likely_trajectory, plan, plan_constrained, ConstraintSet, DecisionClassMap};
use rayon::prelude::*;
use std::collections::HashMap;

/// One link-score question: a set-up decision and the constraint forbidding
/// its pay-off (a single decision, a decision class, or a whole region).
#[derive(Debug, Clone)]
pub struct LinkQuery {
    /// The set-up decision `(s, a)` whose probability drop is measured.
    pub setup: (usize, usize),
    /// Forbidden pay-off decisions (must be feasible, which
    /// [`ConstraintSet::new`] guarantees).
    pub payoff: ConstraintSet,
}

impl LinkQuery {
    /// Query for a single concrete pay-off decision.
    pub fn point(
        env: &Environment,
        setup: (usize, usize),
        payoff: (usize, usize),
    ) -> Result<Self> {
        Ok(Self {
            setup,
            payoff: ConstraintSet::new(env, [payoff])?,
        })
    }
}

/// Computes `π†(a|s) − π†:C(a|s)` for the query's set-up decision under its
/// pay-off constraint. Both plans use `config`; the result lies in
/// `[−1, 1]`.
pub fn link_score(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
    query: &LinkQuery,
) -> Result<f64> {
    let (s, a) = query.setup;
    if s >= env.state_count || a >= env.action_count {
        return Err(Error::InvalidEnvironment(format!(
            "set-up decision ({s}, {a}) out of range"
        )));
    }
    let unconstrained = plan(env, reward, config)?;
    let constrained = plan_constrained(env, reward, config, &query.payoff)?;
    Ok(unconstrained.prob(s, a) - constrained.prob(s, a))
}

/// Builds the constraint forbidding every action satisfying `forbid_action`
/// at every state in `states` — the pay-off-region variant used for
/// quantized continuous actions (e.g. "all nonzero-flow fractions at the
/// closed junction").
///
/// Fails when the region covers *all* actions of an affected state. An
/// empty state set yields the empty constraint.
pub fn region_constraint(
    env: &Environment,
    states: &[usize],
    forbid_action: impl Fn(usize) -> bool,
) -> Result<ConstraintSet> {
    let mut pairs = Vec::new();
    for &s in states {
        for a in 0..env.action_count {
            if forbid_action(a) {
                pairs.push((s, a));
            }
        }
    }
    ConstraintSet::new(env, pairs)
}

/// Upper-triangular matrix of link scores `𝔖̄(t, t′)` along a trajectory,
/// defined for `0 ≤ t ≤ t′ < T` (set-up at `t`, pay-off at `t′`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScoreMatrix {
    /// The scored trajectory (its length `T` fixes the matrix size).
    pub trajectory: Trajectory,
    /// Row-major `T×T` storage; only entries with `t ≤ t′` are meaningful.
    scores: Vec<f64>,
}

impl LinkScoreMatrix {
    fn size(&self) -> usize {
        self.trajectory.horizon()
    }

    /// Number of decisions `T` (the matrix is `T×T`).
    pub fn horizon(&self) -> usize {
        self.size()
    }

    /// Score with set-up at `t` and pay-off at `t′` (0-based); `None` for
    /// the undefined lower triangle (`t′ < t`) and out-of-range indices.
    pub fn get(&self, t: usize, t_prime: usize) -> Option<f64> {
        let n = self.size();
        if t < n && t_prime < n && t <= t_prime {
            Some(self.scores[t * n + t_prime])
        } else {
            None
        }
    }

    /// Iterates the defined cells as `(t, t′, score)` with `t` outer
    /// ascending and `t′` inner ascending.
    pub fn defined(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.size();
        (0..n).flat_map(move |t| (t..n).map(move |tp| (t, tp, self.scores[t * n + tp])))
    }

    /// Plain-text export, one defined cell per line: `x y score` with
    /// `x` = pay-off index `t′` and `y` = set-up index `t`, both 1-based.
    /// The lower triangle is simply absent. Scores use six decimal places so
    /// identical inputs give byte-identical files.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (t, tp, score) in self.defined() {
            out.push_str(&format!("{} {} {:.6}\n", tp + 1, t + 1, score));
        }
        out
    }
}

/// Scores every ordered pair of decisions of an existing trajectory.
///
/// The pay-off constraint of decision `t′` is the class expansion of
/// `(s_{t′}, a_{t′})` under `classes` (singletons when absent). Each
/// *distinct* constraint is planned once — duplicated decisions share a
/// cached plan, which makes their columns equal by construction — and the
/// plans run in parallel.
pub fn trajectory_scores(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
    classes: Option<&DecisionClassMap>,
    trajectory: &Trajectory,
) -> Result<LinkScoreMatrix> {
    let n = trajectory.horizon();
    let unconstrained = plan(env, reward, config)?;

    // One constraint key per decision; deduplicate before planning.
    let keys: Vec<Vec<(usize, usize)>> = trajectory
        .decisions
        .iter()
        .map(|&(s, a)| match classes {
            Some(map) => {
                let mut members = map.expand(s, a);
                members.sort_unstable();
                members
            }
            None => vec![(s, a)],
        })
        .collect();
    let mut distinct: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut key_index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    for key in &keys {
        if !key_index.contains_key(key) {
            key_index.insert(key.clone(), distinct.len());
            distinct.push(key.clone());
        }
    }

    let constraints: Vec<ConstraintSet> = distinct
        .iter()
        .map(|pairs| ConstraintSet::new(env, pairs.iter().copied()))
        .collect::<Result<_>>()?;
    let plans: Vec<Policy> = constraints
        .par_iter()
        .map(|constraint| plan_constrained(env, reward, config, constraint))
        .collect::<Result<_>>()?;

    let mut scores = vec![0.0; n * n];
    for t in 0..n {
        let (s, a) = trajectory.decisions[t];
        let base = unconstrained.prob(s, a);
        for tp in t..n {
            let constrained = &plans[key_index[&keys[tp]]];
            scores[t * n + tp] = base - constrained.prob(s, a);
        }
    }
    Ok(LinkScoreMatrix {
        trajectory: trajectory.clone(),
        scores,
    })
}

/// Algorithm: extract the greedy trajectory of the planned policy (stopping
/// at a terminal or after `horizon_cap` decisions), then score every ordered
/// decision pair with [`trajectory_scores`].
///
/// `seed` is only needed when transitions are stochastic (it drives
/// successor sampling during trajectory extraction).
pub fn explanation_matrix(
    env: &Environment,
    reward: &RewardTable,
    config: &PlannerConfig,
    classes: Option<&DecisionClassMap>,
    horizon_cap: usize,
    seed: Option<u64>,
) -> Result<LinkScoreMatrix> {
    let trajectory = most_likely_trajectory(env, reward, config, horizon_cap, seed)?;
    trajectory_scores(env, reward, config, classes, &trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{two_state_example, PlanMode, PlannerConfig};

    fn config() -> PlannerConfig {
        PlannerConfig::new(0.5, 100.0, 200, PlanMode::Soft).unwrap()
    }

    #[test]
    fn linked_reward_scores_one_unlinked_scores_zero() {
        let ex = two_state_example();
        let query = LinkQuery::point(&ex.env, (0, 1), (1, 1)).unwrap();
        let linked = link_score(&ex.env, &ex.linked_reward, &config(), &query).unwrap();
        assert!((linked - 1.0).abs() < 1e-3, "linked score {linked}");
        let unlinked = link_score(&ex.env, &ex.unlinked_reward, &config(), &query).unwrap();
        assert!(unlinked.abs() < 1e-3, "unlinked score {unlinked}");
    }

    #[test]
    fn near_one_discounts_pollute_the_unlinked_score_with_a_tie() {
        // With γ → 1 the constrained continuation values of the two state-1
        // actions nearly coincide (both routes collect the same
        // undiscounted total), and the soft backup's log-sum-exp bonus at
        // the tied state compounds through the state-1 self-loop, so the
        // constrained set-up probability collapses and the score inflates
        // far above 0. A mid-range discount separates the routes cleanly
        // and the score returns below the 1e-3 tolerance. This pins why the
        // worked example runs at γ = 0.5.
        let ex = two_state_example();
        let query = LinkQuery::point(&ex.env, (0, 1), (1, 1)).unwrap();
        let tied_config = PlannerConfig::new(0.999, 100.0, 250, PlanMode::Soft).unwrap();
        let polluted = link_score(&ex.env, &ex.unlinked_reward, &tied_config, &query).unwrap();
        assert!(
            polluted > 0.3,
            "tied-plan score should inflate well above zero, got {polluted}"
        );
        let clean = link_score(&ex.env, &ex.unlinked_reward, &config(), &query).unwrap();
        assert!(clean.abs() < 1e-3, "separated score {clean}");
    }

    #[test]
    fn self_link_equals_the_unconstrained_probability() {
        let ex = two_state_example();
        let query = LinkQuery::point(&ex.env, (1, 1), (1, 1)).unwrap();
        let score = link_score(&ex.env, &ex.linked_reward, &config(), &query).unwrap();
        let policy = plan(&ex.env, &ex.linked_reward, &config()).unwrap();
        assert!((score - policy.prob(1, 1)).abs() < 1e-12);
        assert!(score > 0.99);
    }

    #[test]
    fn region_constraint_degenerate_cases() {
        let ex = two_state_example();
        let singleton = region_constraint(&ex.env, &[1], |a| a == 1).unwrap();
        let point = ConstraintSet::new(&ex.env, [(1, 1)]).unwrap();
        assert_eq!(singleton, point);

        let empty = region_constraint(&ex.env, &[], |_| true).unwrap();
        assert!(empty.is_empty());

        let covering = region_constraint(&ex.env, &[0], |_| true);
        assert!(matches!(covering, Err(Error::InfeasibleConstraint { .. })));
    }

    #[test]
    fn irrelevant_constraints_give_zero_scores_exactly() {
        // State 2 is unreachable, so forbidding its action leaves every
        // reachable value untouched and all scores vanish.
        let env = Environment::new(
            3,
            2,
            vec![1.0, 0.0, 0.0],
            vec![
                vec![(1, 1.0)],
                vec![(1, 1.0)],
                vec![(1, 1.0)],
                vec![(0, 1.0)],
                vec![(2, 1.0)],
                vec![(2, 1.0)],
            ],
        )
        .unwrap();
        let reward =
            RewardTable::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.25], vec![2.0, 3.0]]).unwrap();
        for setup in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let query = LinkQuery::point(&env, setup, (2, 1)).unwrap();
            let score = link_score(&env, &reward, &config(), &query).unwrap();
            assert!(score.abs() < 1e-9, "score for {setup:?} = {score}");
        }
    }

    #[test]
    fn matrix_scores_match_direct_queries_and_export_layout() {
        let ex = two_state_example();
        let matrix =
            explanation_matrix(&ex.env, &ex.linked_reward, &config(), None, 2, None).unwrap();
        assert_eq!(matrix.horizon(), 2);
        assert_eq!(matrix.trajectory.decisions, vec![(0, 1), (1, 1)]);

        // Cell (t=0, t'=1) must equal the stand-alone query.
        let query = LinkQuery::point(&ex.env, (0, 1), (1, 1)).unwrap();
        let direct = link_score(&ex.env, &ex.linked_reward, &config(), &query).unwrap();
        let cell = matrix.get(0, 1).unwrap();
        assert!((cell - direct).abs() < 1e-12);

        // Diagonal = unconstrained probabilities (self-link property).
        let policy = plan(&ex.env, &ex.linked_reward, &config()).unwrap();
        assert!((matrix.get(0, 0).unwrap() - policy.prob(0, 1)).abs() < 1e-12);
        assert!((matrix.get(1, 1).unwrap() - policy.prob(1, 1)).abs() < 1e-12);

        // Lower triangle undefined.
        assert_eq!(matrix.get(1, 0), None);

        // Export: "x y score", x = pay-off (column), y = set-up (row),
        // 1-based, upper triangle only.
        let text = matrix.export();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("1 1 "), "{text}");
        assert!(lines[1].starts_with("2 1 "), "{text}");
        assert!(lines[2].starts_with("2 2 "), "{text}");
        let linked: f64 = lines[1].split_whitespace().nth(2).unwrap().parse().unwrap();
        assert!((linked - 1.0).abs() < 1e-3);
    }

    #[test]
    fn duplicate_decisions_share_a_plan_and_their_columns_agree() {
        // Single state, two actions, positive reward on action 0: the greedy
        // walk repeats the same decision until the cap, and every pay-off
        // column masks the same class, so all defined cells in a row match.
        let env =
            Environment::new(1, 2, vec![1.0], vec![vec![(0, 1.0)], vec![(0, 1.0)]]).unwrap();
        let reward = RewardTable::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let matrix = explanation_matrix(&env, &reward, &config(), None, 3, None).unwrap();
        assert!(matrix.trajectory.truncated);
        assert_eq!(matrix.trajectory.decisions, vec![(0, 0); 3]);
        let first_row: Vec<f64> = (0..3).map(|tp| matrix.get(0, tp).unwrap()).collect();
        assert!((first_row[1] - first_row[2]).abs() < 1e-15);
        assert!((matrix.get(1, 2).unwrap() - first_row[2]).abs() < 1e-15);
    }

    #[test]
    fn matrix_is_deterministic_across_runs() {
        let ex = two_state_example();
        let a = explanation_matrix(&ex.env, &ex.linked_reward, &config(), None, 2, None).unwrap();
        let b = explanation_matrix(&ex.env, &ex.linked_reward, &config(), None, 2, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.export(), b.export());
    }
}
