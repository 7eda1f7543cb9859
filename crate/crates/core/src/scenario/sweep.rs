// SPDX-License-Identifier: Apache-2.0

//! Cartesian scenario grids.
//!
//! A grid is a TOML list of axes, each naming a scenario document key and the
//! values it takes:
//!
//! ```toml
//! [[axis]]
//! field = "network"          # alias for network.preset
//! values = ["gsm", "hspa_plus"]
//!
//! [[axis]]
//! field = "fog.proc_capability_fraction"
//! values = [0.25, 0.5, 0.75, 1.0]
//! ```
//!
//! The first axis varies slowest.

use serde::{Deserialize, Serialize};

use super::{ConfigError, Scenario, ScenarioDoc};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub field: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, rename = "axis")]
    pub axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::from_toml(text, &e))
    }

    /// Number of scenarios the grid expands to.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One grid cell: the axis assignments that produced it and the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    /// `(field, value)` per axis in declaration order.
    pub labels: Vec<(String, String)>,
    pub scenario: Scenario,
}

// Keys that exclude each other within one table. Setting one clears the rest.
const EXCLUSIVE: &[&[&str]] = &[
    &[
        "workload.arrival_rate_pps",
        "workload.bitrate_bps",
        "workload.bitrate_preset",
    ],
    &["fog.proc_capability_pps", "fog.proc_capability_fraction"],
];

// A network preset has to win over explicit link values in the base document.
const CLEARED_BY_NETWORK_PRESET: &[&str] = &[
    "network.uplink_throughput_bps",
    "network.downlink_throughput_bps",
    "network.base_latency_s",
];

fn canonical_field(field: &str) -> &str {
    match field {
        "network" => "network.preset",
        "bitrate" => "workload.bitrate_preset",
        "fleet_size" => "workload.fleet_size",
        other => other,
    }
}

fn remove(table: &mut toml::Table, path: &str) {
    if let Some((section, key)) = path.split_once('.') {
        if let Some(toml::Value::Table(t)) = table.get_mut(section) {
            t.remove(key);
        }
    }
}

fn assign(doc: &mut toml::Table, field: &str, value: &toml::Value) -> Result<(), ConfigError> {
    let unknown = || ConfigError::validation(field, "not a sweepable scenario field");
    let value = match value {
        // Let integer literals stand in for floats.
        toml::Value::Integer(i) if !field.ends_with("fleet_size") => toml::Value::Float(*i as f64),
        other => other.clone(),
    };
    match field.split_once('.') {
        None => match field {
            "modification1_enabled" | "include_base_latency" => {
                doc.insert(field.to_owned(), value);
            }
            _ => return Err(unknown()),
        },
        Some((section, key)) => {
            if !matches!(section, "workload" | "fog" | "network" | "cloud") || key.contains('.') {
                return Err(unknown());
            }
            for group in EXCLUSIVE {
                if group.contains(&field) {
                    for other in group.iter().filter(|f| **f != field) {
                        remove(doc, other);
                    }
                }
            }
            if field == "network.preset" {
                for other in CLEARED_BY_NETWORK_PRESET {
                    remove(doc, other);
                }
            }
            match doc.get_mut(section) {
                Some(toml::Value::Table(t)) => {
                    t.insert(key.to_owned(), value);
                }
                _ => return Err(unknown()),
            }
        }
    }
    Ok(())
}

fn label(value: &toml::Value) -> String {
    match value {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Expands `grid` over `base`. Each cell is resolved and validated like a
/// loaded document; an empty grid yields the base scenario alone.
pub fn sweep_grid(base: &ScenarioDoc, grid: &GridSpec) -> Result<Vec<SweepPoint>, ConfigError> {
    let base_table = toml::Table::try_from(base)
        .map_err(|e| ConfigError::validation("scenario", e.to_string()))?;
    let total = grid.len();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        // Mixed-radix decomposition with the last axis varying fastest.
        let mut rem = index;
        let mut picks = vec![0; grid.axes.len()];
        for (slot, axis) in grid.axes.iter().enumerate().rev() {
            picks[slot] = rem % axis.values.len();
            rem /= axis.values.len();
        }

        let mut table = base_table.clone();
        let mut labels = Vec::with_capacity(grid.axes.len());
        for (axis, &pick) in grid.axes.iter().zip(&picks) {
            let field = canonical_field(&axis.field);
            let value = &axis.values[pick];
            assign(&mut table, field, value)?;
            labels.push((axis.field.clone(), label(value)));
        }

        let mut doc: ScenarioDoc =
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    ConfigError::validation("scenario", e.message().to_owned())
                })?;
        if !labels.is_empty() {
            let tags: Vec<String> = labels.iter().map(|(k, v)| format!("{k}={v}")).collect();
            doc.name = format!("{}[{}]", base.name, tags.join(","));
        }
        points.push(SweepPoint {
            index,
            labels,
            scenario: doc.resolve()?,
        });
    }
    Ok(points)
}
