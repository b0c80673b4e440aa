//! Output plumbing shared by every subcommand: each command first computes
//! all of its artifacts in memory, then a single writer creates the output
//! directory, writes the data files, and finishes with a `manifest.json`
//! that lists every emitted file (itself included). A command that fails
//! therefore leaves no partial output behind.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs;
use std::path::Path;

/// A finished command: what to call it, the configuration it resolved, and
/// the files it wants written.
pub struct CommandOutput {
    /// Subcommand path, e.g. `"traffic rl"`.
    pub subcommand: String,
    /// Fully-resolved configuration echoed into the manifest.
    pub config: serde_json::Value,
    /// `(file name, content)` pairs, written in order.
    pub files: Vec<(String, String)>,
}

/// The record written as `manifest.json` next to the data files.
#[derive(Serialize)]
pub struct RunManifest {
    /// Subcommand that produced this run.
    pub subcommand: String,
    /// Version of the tool that produced this run.
    pub version: String,
    /// Master random seed of the run.
    pub seed: u64,
    /// Fully-resolved configuration (defaults filled in).
    pub config: serde_json::Value,
    /// Every file this run emitted, including the manifest itself.
    pub outputs: Vec<String>,
}

/// Writes all data files and the manifest into `dir`, creating it if
/// needed, and reports the files written on stdout.
pub fn write_outputs(dir: &Path, seed: u64, output: CommandOutput) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut names: Vec<String> = output.files.iter().map(|(name, _)| name.clone()).collect();
    names.push("manifest.json".to_string());
    for (name, content) in &output.files {
        let path = dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    }
    let manifest = RunManifest {
        subcommand: output.subcommand,
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: output.config,
        outputs: names.clone(),
    };
    let path = dir.join("manifest.json");
    fs::write(&path, to_pretty_json(&manifest)?)
        .with_context(|| format!("writing {}", path.display()))?;
    for name in &names {
        println!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

/// Pretty JSON with a trailing newline, so files end like text files do.
pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).context("serializing JSON output")?;
    text.push('\n');
    Ok(text)
}
