//! Cumulative detector counts and count-based policy extraction.
//!
//! A corridor study observes two detectors per junction — one on the
//! arterial segment leaving it, one on the highway on-ramp — each
//! reporting a cumulative vehicle count per time step. The routing
//! behavior at a junction is summarized by its arterial frequency
//! `slope_A / (slope_A + slope_H)`, where the slopes are least-squares
//! fits of the cumulative counts against time. Fitting slopes over a
//! window rather than differencing endpoints keeps the estimate stable
//! under step-to-step arrival noise.
//!
//! [`extract_policies`] fits one frequency per junction over two windows:
//! before the intervention step, and after it with a settle-in margin
//! skipped so the estimate describes post-intervention steady behavior
//! rather than the transient. A window in which a junction saw no flow at
//! all has no defined frequency and is reported as an error rather than a
//! number.

use crate::routing::FlowPolicy;
use std::fmt::Write as _;
use std::path::Path;
use stratlink_core::error::{Error, Result};

/// Fraction of the post-intervention window skipped before fitting, when
/// the caller expresses no preference.
pub const DEFAULT_SETTLE_FRACTION: f64 = 0.1;

/// Cumulative per-junction detector counts over time.
///
/// Both count families are stored junction-major: `arterial[j][t]` is the
/// cumulative number of vehicles that stayed on the arterial at junction
/// `j + 1` up to and including step `t`, and `highway[j][t]` the
/// cumulative number that diverted there.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    junctions: usize,
    intervention: usize,
    arterial: Vec<Vec<u64>>,
    highway: Vec<Vec<u64>>,
}

impl CountSeries {
    /// Validates and wraps raw cumulative counts.
    ///
    /// Requires at least one junction, equal-length series of at least two
    /// steps, an intervention step strictly inside the horizon, and
    /// non-decreasing counts (they are cumulative).
    pub fn new(
        intervention: usize,
        arterial: Vec<Vec<u64>>,
        highway: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if arterial.is_empty() || arterial.len() != highway.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} arterial series vs {} highway series",
                arterial.len(),
                highway.len()
            )));
        }
        let horizon = arterial[0].len();
        if horizon < 2 {
            return Err(Error::InvalidConfig(format!(
                "count series needs at least 2 steps, got {horizon}"
            )));
        }
        if !(1..horizon).contains(&intervention) {
            return Err(Error::InvalidConfig(format!(
                "intervention step {intervention} is not strictly inside the horizon {horizon}"
            )));
        }
        for (name, family) in [("arterial", &arterial), ("highway", &highway)] {
            for (j, series) in family.iter().enumerate() {
                if series.len() != horizon {
                    return Err(Error::ShapeMismatch(format!(
                        "{name} series for junction {} has {} steps, expected {horizon}",
                        j + 1,
                        series.len()
                    )));
                }
                if series.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidConfig(format!(
                        "cumulative {name} counts at junction {} decrease",
                        j + 1
                    )));
                }
            }
        }
        Ok(CountSeries {
            junctions: arterial.len(),
            intervention,
            arterial,
            highway,
        })
    }

    /// Number of junctions observed.
    pub fn junctions(&self) -> usize {
        self.junctions
    }

    /// Number of time steps recorded.
    pub fn len(&self) -> usize {
        self.arterial[0].len()
    }

    /// True when no steps are recorded (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.arterial[0].is_empty()
    }

    /// Step at which the intervention took effect.
    pub fn intervention(&self) -> usize {
        self.intervention
    }

    /// Cumulative arterial counts at 1-based `junction`.
    pub fn arterial(&self, junction: usize) -> &[u64] {
        &self.arterial[junction - 1]
    }

    /// Cumulative highway counts at 1-based `junction`.
    pub fn highway(&self, junction: usize) -> &[u64] {
        &self.highway[junction - 1]
    }

    /// Renders the series as columnar text: a header line
    /// `# junctions J horizon T intervention I`, then one row per step
    /// `t a1 h1 ... aJ hJ`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# junctions {} horizon {} intervention {}",
            self.junctions,
            self.len(),
            self.intervention
        )
        .expect("writing to a string cannot fail");
        for t in 0..self.len() {
            write!(out, "{t}").expect("writing to a string cannot fail");
            for j in 0..self.junctions {
                write!(out, " {} {}", self.arterial[j][t], self.highway[j][t])
                    .expect("writing to a string cannot fail");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the columnar text format produced by [`CountSeries::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidConfig("empty count file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header =
            || Error::InvalidConfig(format!("malformed count header: {header:?}"));
        if fields.len() != 7
            || fields[0] != "#"
            || fields[1] != "junctions"
            || fields[3] != "horizon"
            || fields[5] != "intervention"
        {
            return Err(bad_header());
        }
        let junctions: usize = fields[2].parse().map_err(|_| bad_header())?;
        let horizon: usize = fields[4].parse().map_err(|_| bad_header())?;
        let intervention: usize = fields[6].parse().map_err(|_| bad_header())?;
        let mut arterial = vec![Vec::with_capacity(horizon); junctions];
        let mut highway = vec![Vec::with_capacity(horizon); junctions];
        for (row, line) in lines.enumerate() {
            let mut values = line.split_whitespace();
            let t: usize = values
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::InvalidConfig(format!("malformed count row {row}")))?;
            if t != row {
                return Err(Error::InvalidConfig(format!(
                    "count row {row} is labeled step {t}"
                )));
            }
            for j in 0..junctions {
                for family in [&mut arterial, &mut highway] {
                    let value: u64 = values
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| {
                            Error::InvalidConfig(format!(
                                "count row {row} is missing columns for junction {}",
                                j + 1
                            ))
                        })?;
                    family[j].push(value);
                }
            }
            if values.next().is_some() {
                return Err(Error::InvalidConfig(format!(
                    "count row {row} has extra columns"
                )));
            }
        }
        if arterial[0].len() != horizon {
            return Err(Error::InvalidConfig(format!(
                "header promises {horizon} steps, file has {}",
                arterial[0].len()
            )));
        }
        CountSeries::new(intervention, arterial, highway)
    }

    /// Writes the columnar text format to a file.
    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Reads the columnar text format from a file.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        CountSeries::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Least-squares slope of `values` against step index.
fn slope(values: &[u64]) -> f64 {
    let n = values.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let v_mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, &v) in values.iter().enumerate() {
        let dt = t as f64 - t_mean;
        cov += dt * (v as f64 - v_mean);
        var += dt * dt;
    }
    cov / var
}

/// Fits pre- and post-intervention arterial frequencies per junction.
///
/// The pre window is every step before the intervention; the post window
/// starts after skipping `settle_fraction` of the remaining horizon so the
/// transient does not bias the fit. Each frequency is
/// `slope_A / (slope_A + slope_H)` over its window; a junction with zero
/// total slope in a window carried no flow there and is reported as
/// [`Error::Degenerate`].
pub fn extract_policies(
    counts: &CountSeries,
    settle_fraction: f64,
) -> Result<(FlowPolicy, FlowPolicy)> {
    if !(0.0..1.0).contains(&settle_fraction) {
        return Err(Error::InvalidConfig(format!(
            "settle fraction {settle_fraction} is outside [0, 1)"
        )));
    }
    let horizon = counts.len();
    let pre_end = counts.intervention();
    let post_start =
        pre_end + ((horizon - pre_end) as f64 * settle_fraction).round() as usize;
    if pre_end < 2 || horizon - post_start < 2 {
        return Err(Error::InvalidConfig(format!(
            "windows [0, {pre_end}) and [{post_start}, {horizon}) are too short to fit slopes"
        )));
    }
    let mut pre = Vec::with_capacity(counts.junctions());
    let mut post = Vec::with_capacity(counts.junctions());
    for junction in 1..=counts.junctions() {
        for (name, window, out) in [
            ("pre", 0..pre_end, &mut pre),
            ("post", post_start..horizon, &mut post),
        ] {
            let sa = slope(&counts.arterial(junction)[window.clone()]).max(0.0);
            let sh = slope(&counts.highway(junction)[window]).max(0.0);
            if sa + sh <= 1e-12 {
                return Err(Error::Degenerate(format!(
                    "junction {junction} saw no flow in the {name} window"
                )));
            }
            out.push(sa / (sa + sh));
        }
    }
    Ok((FlowPolicy::new(pre)?, FlowPolicy::new(post)?))
}
