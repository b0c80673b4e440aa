//! `stratlink` — strategic-link analysis pipelines behind one binary.
//!
//! Subcommands: `explain` (maze decision-pair score matrices), `recommend`
//! (grouped-recommendation safety curves on random networks), `traffic`
//! (corridor closures from the planner's, the population's, and the count
//! detectors' point of view), and `irl` (reward recovery from sampled
//! demonstrations across stochasticity levels).
//!
//! Every run resolves its flags, computes everything, then writes its data
//! files plus a `manifest.json` listing them; identical flags and seed give
//! byte-identical files. Exit codes: 0 on success, 2 for invalid input,
//! 3 when a constraint leaves some state without any viable action, 4 when
//! data is too degenerate to carry signal (e.g. a zero-flow junction).

mod explain;
mod irl_run;
mod output;
mod recommend_run;
mod traffic_run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use stratlink_core::error::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "stratlink",
    version,
    about = "Strategic link scores: explanation matrices, recommendation \
             grouping, corridor closures, reward recovery"
)]
struct Cli {
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 picks the machine default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every ordered pair of planned maze decisions.
    Explain(explain::ExplainArgs),
    /// Evaluate recommendation-grouping methods on random networks.
    Recommend(recommend_run::RecommendArgs),
    /// Corridor closures: planner, population simulation, count analysis.
    #[command(subcommand)]
    Traffic(traffic_run::TrafficCommand),
    /// Reward recovery from demonstrations across stochasticity levels.
    Irl(irl_run::IrlArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // A second initialization (only possible in tests that call main
        // twice) keeps the existing pool, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let result = match &cli.command {
        Command::Explain(args) => explain::run(args, cli.seed),
        Command::Recommend(args) => recommend_run::run(args, cli.seed),
        Command::Traffic(command) => traffic_run::run(command, cli.seed),
        Command::Irl(args) => irl_run::run(args, cli.seed),
    };
    match result.and_then(|output| output::write_outputs(&cli.out, cli.seed, output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(exit_code(&error))
        }
    }
}

/// Maps an error chain to the documented exit scheme: 3 for constraints
/// that leave a state without viable actions, 4 for degenerate data, 2 for
/// everything else (bad flags, unreadable files, malformed inputs).
fn exit_code(error: &anyhow::Error) -> u8 {
    for cause in error.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::InfeasibleConstraint { .. } | CoreError::InfeasibleState { .. } => 3,
                CoreError::Degenerate(_) => 4,
                _ => 2,
            };
        }
    }
    2
}
