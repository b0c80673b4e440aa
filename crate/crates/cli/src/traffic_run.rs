//! `stratlink traffic`: the corridor pipelines. `rl` plans flow-dependent
//! routing (optionally against a closure) and scores the closure's
//! strategic links; `sim` runs the driver population and records cumulative
//! detector counts; `analyze` turns recorded counts back into pre/post
//! policies and link scores.

use crate::output::CommandOutput;
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde_json::json;
use stratlink_core::mdp::{PlanMode, PlannerConfig};
use stratlink_envs::arterial::{ArterialConfig, ArterialWorld};
use stratlink_traffic::{
    default_routing_config, extract_policies, junction_link_scores, optimal_routing_with,
    simulate_drivers, CountSeries, FlowPolicy, SimConfig, DEFAULT_SETTLE_FRACTION,
};

#[derive(Subcommand, Debug)]
pub enum TrafficCommand {
    /// Plan optimal routing and score a closure's strategic links.
    Rl(TrafficRlArgs),
    /// Simulate a driver population and record cumulative counts.
    Sim(TrafficSimArgs),
    /// Extract pre/post policies and link scores from recorded counts.
    Analyze(TrafficAnalyzeArgs),
}

/// Corridor sizing shared by `rl` and `sim`.
#[derive(Args, Debug)]
pub struct CorridorArgs {
    /// Junctions along the arterial.
    #[arg(long, default_value_t = 10)]
    pub junctions: usize,
    /// Flow entering the corridor at the first junction.
    #[arg(long = "entry-flow", default_value_t = 2.0)]
    pub entry_flow: f64,
    /// Flow levels and staying-fraction actions.
    #[arg(long, default_value_t = 100)]
    pub quantization: usize,
    /// Congestion strength (0 keeps travel times flow-independent).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Congestion exponent.
    #[arg(long, default_value_t = 4.0)]
    pub power: f64,
}

impl CorridorArgs {
    fn world(&self) -> Result<ArterialWorld> {
        Ok(ArterialWorld::new(ArterialConfig {
            junctions: self.junctions,
            entry_flow: self.entry_flow,
            quantization: self.quantization,
            congestion_alpha: self.alpha,
            congestion_power: self.power,
        })?)
    }

    fn config_json(&self) -> serde_json::Value {
        json!({
            "junctions": self.junctions,
            "entry_flow": self.entry_flow,
            "quantization": self.quantization,
            "alpha": self.alpha,
            "power": self.power,
        })
    }
}

#[derive(Args, Debug)]
pub struct TrafficRlArgs {
    #[command(flatten)]
    pub corridor: CorridorArgs,
    /// Junction whose arterial continuation closes, as `J10` or `10`.
    #[arg(long)]
    pub closure: Option<String>,
    /// Discount factor, strictly inside (0, 1).
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Value-iteration sweeps (defaults to junctions + 2, enough for the
    /// backup to reach the entry from the corridor end).
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TrafficSimArgs {
    #[command(flatten)]
    pub corridor: CorridorArgs,
    /// Junction whose arterial continuation closes, as `J10` or `10`.
    #[arg(long)]
    pub closure: Option<String>,
    /// Step at which the closure takes effect.
    #[arg(long = "closure-time", default_value_t = 10_000)]
    pub closure_time: usize,
    /// Simulated steps.
    #[arg(long, default_value_t = 50_000)]
    pub horizon: usize,
    /// Steps between driver estimate updates.
    #[arg(long = "update-period", default_value_t = 500)]
    pub update_period: usize,
    /// Relaxation weight of each estimate update, in (0, 1].
    #[arg(long = "update-weight", default_value_t = 0.5)]
    pub update_weight: f64,
    /// Logit temperature of the route choice, in time units.
    #[arg(long, default_value_t = 2.0)]
    pub noise: f64,
}

#[derive(Args, Debug)]
pub struct TrafficAnalyzeArgs {
    /// Count file produced by `traffic sim`.
    #[arg(long)]
    pub counts: String,
    /// Fraction of the post-intervention window discarded as transient.
    #[arg(long, default_value_t = DEFAULT_SETTLE_FRACTION)]
    pub settle: f64,
}

/// Parses a junction given as `J10`, `j10`, or `10`.
pub fn parse_closure(text: &str) -> Result<usize> {
    let digits = text.strip_prefix(['J', 'j']).unwrap_or(text);
    let junction: usize = digits
        .parse()
        .with_context(|| format!("closure {text:?} is not a junction number like J10 or 10"))?;
    if junction == 0 {
        bail!("closure {text:?} names junction 0; junctions are numbered from 1");
    }
    Ok(junction)
}

fn policy_file(policy: &FlowPolicy) -> String {
    let mut out = String::new();
    for j in 1..=policy.junctions() {
        out.push_str(&format!("{j} {:.6}\n", policy.frequency(j)));
    }
    out
}

fn scores_file(scores: &[f64]) -> String {
    let mut out = String::new();
    for (i, score) in scores.iter().enumerate() {
        out.push_str(&format!("{} {score:.6}\n", i + 1));
    }
    out
}

pub fn run(command: &TrafficCommand, seed: u64) -> Result<CommandOutput> {
    match command {
        TrafficCommand::Rl(args) => run_rl(args),
        TrafficCommand::Sim(args) => run_sim(args, seed),
        TrafficCommand::Analyze(args) => run_analyze(args),
    }
}

fn run_rl(args: &TrafficRlArgs) -> Result<CommandOutput> {
    let world = args.corridor.world()?;
    let closure = args.closure.as_deref().map(parse_closure).transpose()?;
    let iters = args.iters.unwrap_or(world.config.junctions + 2);
    let base = default_routing_config(&world);
    let config = PlannerConfig::new(args.gamma, base.beta, iters, PlanMode::Hard)
        .context("invalid planner flags")?;

    let pre = optimal_routing_with(&world, None, &config)?;
    let mut files = vec![("policy_pre.dat".to_string(), policy_file(&pre))];
    if let Some(junction) = closure {
        let post = optimal_routing_with(&world, Some(junction), &config)?;
        let scores = junction_link_scores(&pre, &post)?;
        files.push(("policy_post.dat".to_string(), policy_file(&post)));
        files.push(("scores.dat".to_string(), scores_file(&scores)));
    }

    let mut config_json = args.corridor.config_json();
    let extra = json!({
        "closure": closure,
        "gamma": args.gamma,
        "iterations": iters,
        "mode": "hard",
    });
    merge(&mut config_json, extra);
    Ok(CommandOutput {
        subcommand: "traffic rl".to_string(),
        config: config_json,
        files,
    })
}

fn run_sim(args: &TrafficSimArgs, seed: u64) -> Result<CommandOutput> {
    let world = args.corridor.world()?;
    let closure = args.closure.as_deref().map(parse_closure).transpose()?;
    let sim = SimConfig {
        closure,
        closure_time: args.closure_time,
        horizon: args.horizon,
        update_period: args.update_period,
        update_weight: args.update_weight,
        noise: args.noise,
    };
    let counts = simulate_drivers(&world, &sim, seed)?;

    let mut config_json = args.corridor.config_json();
    let extra = serde_json::to_value(&sim).context("serializing simulation settings")?;
    merge(&mut config_json, extra);
    Ok(CommandOutput {
        subcommand: "traffic sim".to_string(),
        config: config_json,
        files: vec![("counts.dat".to_string(), counts.to_text())],
    })
}

fn run_analyze(args: &TrafficAnalyzeArgs) -> Result<CommandOutput> {
    let counts = CountSeries::read_file(&args.counts)
        .with_context(|| format!("reading count file {}", args.counts))?;
    let (pre, post) = extract_policies(&counts, args.settle)?;
    let scores = junction_link_scores(&pre, &post)?;
    Ok(CommandOutput {
        subcommand: "traffic analyze".to_string(),
        config: json!({
            "counts": args.counts,
            "settle": args.settle,
            "junctions": counts.junctions(),
            "horizon": counts.len(),
            "intervention": counts.intervention(),
        }),
        files: vec![
            ("policy_pre.dat".to_string(), policy_file(&pre)),
            ("policy_post.dat".to_string(), policy_file(&post)),
            ("scores.dat".to_string(), scores_file(&scores)),
        ],
    })
}

/// Merges `extra`'s top-level keys into `base` (both must be objects).
fn merge(base: &mut serde_json::Value, extra: serde_json::Value) {
    if let (Some(target), serde_json::Value::Object(source)) = (base.as_object_mut(), extra) {
        target.extend(source);
    }
}
