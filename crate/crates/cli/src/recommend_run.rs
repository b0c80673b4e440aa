//! `stratlink recommend`: generate seeded random shortcut networks,
//! evaluate the three adoption methods on each, and emit one `(k, value)`
//! curve file per method and statistic plus the full JSON report.

use crate::output::{to_pretty_json, CommandOutput};
use anyhow::{Context, Result};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use stratlink_core::mdp::{PlanMode, PlannerConfig};
use stratlink_envs::shortcuts::{random_network, ShortcutWorld};
use stratlink_recommend::{recommendation_report, CurvePoint};

#[derive(Args, Debug)]
pub struct RecommendArgs {
    /// Number of random environments to generate and evaluate.
    #[arg(long = "n-envs", default_value_t = 100)]
    pub n_envs: usize,
    /// Nodes per environment.
    #[arg(long, default_value_t = 10)]
    pub nodes: usize,
    /// Shortcut edges per environment.
    #[arg(long, default_value_t = 5)]
    pub shortcuts: usize,
    /// Distinct preparation actions per environment.
    #[arg(long, default_value_t = 5)]
    pub preps: usize,
    /// Cost of taking one preparation.
    #[arg(long, default_value_t = 0.1)]
    pub cost: f64,
    /// Grouping threshold on the absolute link score.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Discount factor, strictly inside (0, 1).
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Inverse temperature of the soft policy.
    #[arg(long, default_value_t = 100.0)]
    pub beta: f64,
    /// Value-iteration sweeps.
    #[arg(long, default_value_t = 600)]
    pub iters: usize,
}

fn curve_file(points: &[CurvePoint], pick: impl Fn(&CurvePoint) -> f64) -> String {
    let mut out = String::new();
    for point in points {
        out.push_str(&format!("{} {:.6}\n", point.k, pick(point)));
    }
    out
}

pub fn run(args: &RecommendArgs, seed: u64) -> Result<CommandOutput> {
    if args.n_envs == 0 {
        anyhow::bail!("--n-envs must be at least 1");
    }
    let config = PlannerConfig::new(args.gamma, args.beta, args.iters, PlanMode::Soft)
        .context("invalid planner flags")?;
    let mut worlds: Vec<(u64, ShortcutWorld)> = Vec::with_capacity(args.n_envs);
    for i in 0..args.n_envs {
        let env_seed = seed + i as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(env_seed);
        let world = random_network(args.nodes, args.shortcuts, args.preps, args.cost, &mut rng)
            .with_context(|| format!("generating environment {i} (seed {env_seed})"))?;
        worlds.push((env_seed, world));
    }
    let report = recommendation_report(&worlds, &config, args.threshold)?;

    // The all-or-nothing curve files use the baseline-filled variant: for k
    // strictly between the endpoints nothing can be partially adopted, so
    // the environment sits at its baseline. The raw endpoint-only curve is
    // still available in summary.json.
    let files = vec![
        (
            "pick_and_choose_average.dat".to_string(),
            curve_file(&report.pick_and_choose, |p| p.mean_average),
        ),
        (
            "pick_and_choose_worst.dat".to_string(),
            curve_file(&report.pick_and_choose, |p| p.mean_worst),
        ),
        (
            "all_or_nothing_average.dat".to_string(),
            curve_file(&report.all_or_nothing_filled, |p| p.mean_average),
        ),
        (
            "all_or_nothing_worst.dat".to_string(),
            curve_file(&report.all_or_nothing_filled, |p| p.mean_worst),
        ),
        (
            "strategy_aware_average.dat".to_string(),
            curve_file(&report.strategy_aware, |p| p.mean_average),
        ),
        (
            "strategy_aware_worst.dat".to_string(),
            curve_file(&report.strategy_aware, |p| p.mean_worst),
        ),
        ("summary.json".to_string(), to_pretty_json(&report)?),
    ];

    Ok(CommandOutput {
        subcommand: "recommend".to_string(),
        config: json!({
            "n_envs": args.n_envs,
            "nodes": args.nodes,
            "shortcuts": args.shortcuts,
            "preps": args.preps,
            "cost": args.cost,
            "threshold": args.threshold,
            "gamma": args.gamma,
            "beta": args.beta,
            "iterations": args.iters,
        }),
        files,
    })
}
