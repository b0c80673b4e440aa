//! End-to-end planning checks on the worked shortcut network: the greedy
//! plan buys exactly the three useful preparations and chains the two
//! jumps, beating the walk-only baseline by the known margin.

use stratlink_core::mdp::{PlanMode, PlannerConfig};
use stratlink_core::planners::most_likely_trajectory;
use stratlink_envs::shortcuts::two_hop_example;

fn config() -> PlannerConfig {
    PlannerConfig::new(0.99, 100.0, 600, PlanMode::Soft).expect("valid planner parameters")
}

/// The plan prepares 1, 2 and 4 at the first node (lowest index first among
/// the three equally-urgent purchases), jumps 1 → 3 using preparation 4,
/// then jumps 3 → 5 using preparations 1 and 2.
#[test]
fn greedy_plan_buys_three_preps_and_chains_both_jumps() {
    let world = two_hop_example();
    let traj = most_likely_trajectory(
        &world.env,
        &world.reward,
        &config(),
        world.horizon_cap(),
        None,
    )
    .expect("planning succeeds");
    assert!(!traj.truncated, "the greedy plan should reach the goal node");

    let p = |j: usize| world.prep_action(j).expect("prep id in range");
    let jump = |i: usize| world.jump_action(i).expect("shortcut id in range");
    let start = world.state_of(1, 0).expect("start state exists");
    let after_p1 = world.state_of(1, 0b00001).expect("state exists");
    let after_p12 = world.state_of(1, 0b00011).expect("state exists");
    let after_p124 = world.state_of(1, 0b01011).expect("state exists");
    let node3 = world.state_of(3, 0b01011).expect("state exists");
    let expected = vec![
        (start, p(1)),
        (after_p1, p(2)),
        (after_p12, p(4)),
        (after_p124, jump(2)),
        (node3, jump(3)),
    ];
    assert_eq!(traj.decisions, expected, "greedy decision sequence");
}

/// Undiscounted return of the greedy plan is 1.3 (three preparations at
/// −0.1, jump 1→3 at −1.8, jump 3→5 at −2 + 0.4 + 5), beating the
/// walk-only return of 1.0 (three −1 moves plus −1+5 on the final step).
#[test]
fn plan_performance_beats_the_walk_only_baseline() {
    let world = two_hop_example();
    let traj = most_likely_trajectory(
        &world.env,
        &world.reward,
        &config(),
        world.horizon_cap(),
        None,
    )
    .expect("planning succeeds");
    let value: f64 = traj
        .decisions
        .iter()
        .map(|&(s, a)| world.reward.get(s, a))
        .sum();
    let optimal = 1.3;
    assert!(
        (value - optimal).abs() < 1e-9,
        "greedy plan return {value} should equal {optimal}"
    );
    assert!(value > 1.0, "prepared jumps must beat plain walking");
}
