//! End-to-end corridor characterizations: the planner's closure scores at
//! full quantization, the driver population's trend-level response to the
//! same closure, and the agreement between the two in free flow.

use stratlink_envs::arterial::{ArterialConfig, ArterialWorld};
use stratlink_traffic::{
    extract_policies, junction_link_scores, optimal_routing, simulate_drivers, SimConfig,
    DEFAULT_SETTLE_FRACTION,
};

fn default_corridor() -> ArterialWorld {
    ArterialWorld::new(ArterialConfig::default()).expect("default corridor is valid")
}

/// Closing the far end of the free-flow corridor re-routes everything at
/// the entrance: the closure scores 1 at its own junction and at the first
/// junction, and touches nothing in between.
#[test]
fn planner_scores_isolate_the_closure_and_the_diversion_point() {
    let world = default_corridor();
    let pre = optimal_routing(&world, None).expect("pre-closure routing");
    let post = optimal_routing(&world, Some(10)).expect("post-closure routing");
    assert_eq!(pre.arterial, vec![1.0; 10], "free flow stays on the arterial");
    let scores = junction_link_scores(&pre, &post).expect("same corridor");
    assert!(
        (scores[0] - 1.0).abs() <= 0.02,
        "first junction score {}",
        scores[0]
    );
    assert!(
        (scores[9] - 1.0).abs() <= 0.02,
        "closed junction score {}",
        scores[9]
    );
    for junction in 2..=9 {
        assert!(
            scores[junction - 1].abs() < 0.05,
            "junction {junction} score {}",
            scores[junction - 1]
        );
    }
}

/// The driver population in free flow settles on the planner's
/// all-arterial policy: extracted frequencies match within 0.05.
#[test]
fn free_flow_population_matches_the_planner() {
    let world = default_corridor();
    let sim = SimConfig {
        horizon: 4_000,
        closure_time: 2_000,
        ..SimConfig::default()
    };
    let counts = simulate_drivers(&world, &sim, 9).expect("simulation runs");
    let (pre, post) =
        extract_policies(&counts, DEFAULT_SETTLE_FRACTION).expect("flow at every junction");
    let planned = optimal_routing(&world, None).expect("routing succeeds");
    for junction in 1..=10 {
        for (window, policy) in [("pre", &pre), ("post", &post)] {
            assert!(
                (policy.frequency(junction) - planned.frequency(junction)).abs() < 0.05,
                "{window} frequency at junction {junction}: population {}, planner {}",
                policy.frequency(junction),
                planned.frequency(junction)
            );
        }
    }
}

/// After a closure at the far end, the population's strongest behavioral
/// response among the open junctions is at the one just upstream of the
/// closure — news of the blockage propagates one junction per estimate
/// update, so on a short horizon it reaches no further than that.
#[test]
fn population_response_to_a_closure_is_strongest_next_to_it() {
    let world = default_corridor();
    let sim = SimConfig {
        closure: Some(10),
        closure_time: 1_000,
        horizon: 5_000,
        ..SimConfig::default()
    };
    let counts = simulate_drivers(&world, &sim, 9).expect("simulation runs");
    let (pre, post) =
        extract_policies(&counts, DEFAULT_SETTLE_FRACTION).expect("flow at every junction");
    assert_eq!(
        post.frequency(10),
        0.0,
        "no vehicle continues on the arterial at the closed junction"
    );
    let scores = junction_link_scores(&pre, &post).expect("same corridor");
    let (strongest, &value) = scores[..9]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nine open junctions");
    assert_eq!(
        strongest + 1,
        9,
        "largest open-junction score is at junction 9, scores {scores:?}"
    );
    assert!(value > 0.05, "junction 9 responds materially, score {value}");
    assert!(
        (scores[9] - 1.0).abs() < 0.05,
        "closed junction drops from always-stay to never-stay, score {}",
        scores[9]
    );
}
