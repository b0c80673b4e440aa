//! JSON interchange for environments and reward tables.
//!
//! The document is a single JSON object:
//!
//! ```text
//! {
//!   "states": N,
//!   "actions": A,
//!   "sigma":  [p_0, …, p_{N−1}],
//!   "tau":    [[[ [next, prob], … ] per action] per state],
//!   "reward": [[r(s,a) per action] per state],
//!   "labels": { "states": […], "actions": […] }   // both optional
//! }
//! ```
//!
//! Transition rows store only their support (pairs of successor index and
//! probability). Reward entries are plain numbers except `−∞`, which JSON
//! cannot represent and which is written as the string `"-inf"`. Reading
//! validates through the usual constructors, so a syntactically valid file
//! with a non-stochastic row still fails cleanly.

use crate::error::{Error, Result};
use crate::mdp::{Environment, RewardTable};
use serde_json::{json, Map, Value};
use std::path::Path;

/// Renders an environment and its reward table as one JSON document.
pub fn to_document(env: &Environment, reward: &RewardTable) -> Value {
    let tau: Vec<Value> = (0..env.state_count)
        .map(|s| {
            let rows: Vec<Value> = (0..env.action_count)
                .map(|a| {
                    let pairs: Vec<Value> = env
                        .transition(s, a)
                        .iter()
                        .map(|&(next, prob)| json!([next, prob]))
                        .collect();
                    Value::Array(pairs)
                })
                .collect();
            Value::Array(rows)
        })
        .collect();
    let reward_rows: Vec<Value> = (0..reward.state_count)
        .map(|s| {
            let row: Vec<Value> = (0..reward.action_count)
                .map(|a| {
                    let r = reward.get(s, a);
                    if r == f64::NEG_INFINITY {
                        Value::String("-inf".to_string())
                    } else {
                        json!(r)
                    }
                })
                .collect();
            Value::Array(row)
        })
        .collect();

    let mut doc = Map::new();
    doc.insert("states".into(), json!(env.state_count));
    doc.insert("actions".into(), json!(env.action_count));
    doc.insert("sigma".into(), json!(env.initial_dist));
    doc.insert("tau".into(), Value::Array(tau));
    doc.insert("reward".into(), Value::Array(reward_rows));
    let mut labels = Map::new();
    if let Some(names) = &env.state_labels {
        labels.insert("states".into(), json!(names));
    }
    if let Some(names) = &env.action_labels {
        labels.insert("actions".into(), json!(names));
    }
    if !labels.is_empty() {
        doc.insert("labels".into(), Value::Object(labels));
    }
    Value::Object(doc)
}

fn bad(field: &str, detail: &str) -> Error {
    Error::InvalidEnvironment(format!("document field '{field}': {detail}"))
}

fn as_usize(value: &Value, field: &str) -> Result<usize> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| bad(field, "expected a non-negative integer"))
}

fn as_f64(value: &Value, field: &str) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| bad(field, "expected a number"))
}

fn as_array<'a>(value: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| bad(field, "expected an array"))
}

fn reward_entry(value: &Value, field: &str) -> Result<f64> {
    match value {
        Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        Value::String(_) => Err(bad(field, "the only string entry allowed is \"-inf\"")),
        other => as_f64(other, field),
    }
}

fn string_list(value: &Value, field: &str) -> Result<Vec<String>> {
    as_array(value, field)?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| bad(field, "expected strings"))
        })
        .collect()
}

/// Parses a document produced by [`to_document`] (or written by hand) back
/// into a validated environment and reward table.
pub fn from_document(doc: &Value) -> Result<(Environment, RewardTable)> {
    let obj = doc
        .as_object()
        .ok_or_else(|| bad("<root>", "expected a JSON object"))?;
    let field = |name: &str| -> Result<&Value> {
        obj.get(name)
            .ok_or_else(|| bad(name, "missing required field"))
    };
    let states = as_usize(field("states")?, "states")?;
    let actions = as_usize(field("actions")?, "actions")?;

    let sigma: Vec<f64> = as_array(field("sigma")?, "sigma")?
        .iter()
        .map(|v| as_f64(v, "sigma"))
        .collect::<Result<_>>()?;

    let tau_rows = as_array(field("tau")?, "tau")?;
    if tau_rows.len() != states {
        return Err(bad("tau", &format!("expected {states} state entries")));
    }
    let mut transitions = Vec::with_capacity(states * actions);
    for (s, state_entry) in tau_rows.iter().enumerate() {
        let per_action = as_array(state_entry, "tau")?;
        if per_action.len() != actions {
            return Err(bad(
                "tau",
                &format!("state {s}: expected {actions} action rows"),
            ));
        }
        for row in per_action {
            let pairs = as_array(row, "tau")?;
            let mut support = Vec::with_capacity(pairs.len());
            for pair in pairs {
                let pair = as_array(pair, "tau")?;
                if pair.len() != 2 {
                    return Err(bad("tau", "support entries must be [next, prob] pairs"));
                }
                support.push((as_usize(&pair[0], "tau")?, as_f64(&pair[1], "tau")?));
            }
            transitions.push(support);
        }
    }

    let reward_rows = as_array(field("reward")?, "reward")?;
    if reward_rows.len() != states {
        return Err(bad("reward", &format!("expected {states} rows")));
    }
    let mut values = Vec::with_capacity(states * actions);
    for row in reward_rows {
        let row = as_array(row, "reward")?;
        if row.len() != actions {
            return Err(bad("reward", &format!("expected {actions} columns")));
        }
        for entry in row {
            values.push(reward_entry(entry, "reward")?);
        }
    }

    let mut env = Environment::new(states, actions, sigma, transitions)?;
    if let Some(labels) = obj.get("labels") {
        let labels = labels
            .as_object()
            .ok_or_else(|| bad("labels", "expected an object"))?;
        if let Some(names) = labels.get("states") {
            env = env.with_state_labels(string_list(names, "labels.states")?)?;
        }
        if let Some(names) = labels.get("actions") {
            env = env.with_action_labels(string_list(names, "labels.actions")?)?;
        }
    }
    let reward = RewardTable::new(states, actions, values)?;
    Ok((env, reward))
}

/// Writes the document for `env` and `reward` to `path`, pretty-printed
/// with a trailing newline.
pub fn write_document(path: &Path, env: &Environment, reward: &RewardTable) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&to_document(env, reward))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads and validates a document from `path`.
pub fn read_document(path: &Path) -> Result<(Environment, RewardTable)> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text)?;
    from_document(&doc)
}
