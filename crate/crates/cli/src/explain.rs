//! `stratlink explain`: plan a maze, walk the planned policy greedily, and
//! score every ordered pair of walked decisions into an `x y score` matrix
//! file (pay-off column, set-up row, 1-based, upper triangle only).

use crate::output::CommandOutput;
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde_json::json;
use std::fs;
use stratlink_core::linkscore::trajectory_scores;
use stratlink_core::mdp::{PlanMode, PlannerConfig};
use stratlink_core::planners::most_likely_trajectory;
use stratlink_envs::gridworld::{layouts, GridWorld, ACTION_NAMES};

/// Planner backup rule.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Log-sum-exp backups and a Boltzmann policy.
    Soft,
    /// Max backups and a deterministic policy.
    Hard,
}

impl ModeArg {
    fn plan_mode(self) -> PlanMode {
        match self {
            ModeArg::Soft => PlanMode::Soft,
            ModeArg::Hard => PlanMode::Hard,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Soft => "soft",
            ModeArg::Hard => "hard",
        }
    }
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    /// Built-in layout (simple | independent | correlated) or a layout file
    /// path.
    #[arg(long, default_value = "simple")]
    pub layout: String,
    /// Discount factor, strictly inside (0, 1).
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Inverse temperature of the soft policy.
    #[arg(long, default_value_t = 100.0)]
    pub beta: f64,
    /// Value-iteration sweeps.
    #[arg(long, default_value_t = 250)]
    pub iters: usize,
    /// Planner backup rule.
    #[arg(long, value_enum, default_value_t = ModeArg::Soft)]
    pub mode: ModeArg,
}

/// Loads a built-in layout by name, or parses the file at the given path.
pub fn load_layout(spec: &str) -> Result<GridWorld> {
    match spec {
        "simple" => Ok(layouts::simple()),
        "independent" => Ok(layouts::independent()),
        "correlated" => Ok(layouts::correlated()),
        path => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading layout file {path}"))?;
            GridWorld::parse(&text).with_context(|| format!("parsing layout file {path}"))
        }
    }
}

pub fn run(args: &ExplainArgs, seed: u64) -> Result<CommandOutput> {
    let world = load_layout(&args.layout)?;
    let config = PlannerConfig::new(args.gamma, args.beta, args.iters, args.mode.plan_mode())
        .context("invalid planner flags")?;
    let trajectory = most_likely_trajectory(
        &world.env,
        &world.reward,
        &config,
        world.horizon_cap,
        Some(seed),
    )?;
    if trajectory.truncated {
        bail!(
            "layout {} is not solvable: the planned walk did not reach a \
             terminal within {} decisions",
            args.layout,
            world.horizon_cap
        );
    }
    let classes = world.decision_classes();
    let matrix = trajectory_scores(&world.env, &world.reward, &config, Some(&classes), &trajectory)?;

    let mut walk = String::new();
    for (t, &(state, action)) in trajectory.decisions.iter().enumerate() {
        let ((row, col), flags) = world.locate(state);
        walk.push_str(&format!("{t} {row} {col} {flags} {}\n", ACTION_NAMES[action]));
    }

    Ok(CommandOutput {
        subcommand: "explain".to_string(),
        config: json!({
            "layout": args.layout,
            "gamma": args.gamma,
            "beta": args.beta,
            "iterations": args.iters,
            "mode": args.mode.name(),
            "horizon_cap": world.horizon_cap,
            "decisions": trajectory.decisions.len(),
        }),
        files: vec![
            ("matrix.dat".to_string(), matrix.export()),
            ("trajectory.dat".to_string(), walk),
        ],
    })
}
