// SPDX-License-Identifier: Apache-2.0

//! Scenario schema, loading and validation.
//!
//! Scenarios are TOML documents. Key names carry their unit suffix:
//!
//! ```toml
//! name = "default"
//! modification1_enabled = false   # optional, adds the per-bit transmission power
//! include_base_latency = false    # optional, use the network preset latency midpoint
//!
//! [workload]
//! arrival_rate_pps = 100.0        # or bitrate_bps, or bitrate_preset = "720p_min"
//! packet_size_bits = 12000.0      # optional, default 12000
//! fleet_size = 1                  # optional, multiplies the arrival rate
//!
//! [fog]
//! proc_capability_pps = 100.0     # or proc_capability_fraction (of the arrival rate)
//! energy_per_bit_j = 1e-7
//! idle_power_w = 2.0
//! tdp_w = 10.0
//! tx_energy_per_bit_j = 0.0       # optional
//!
//! [network]
//! preset = "hspa_plus"            # optional; explicit keys below override it
//! uplink_throughput_bps = 1.5e6   # required without a preset
//! downlink_throughput_bps = 1.5e6 # optional, defaults to the uplink
//! base_latency_s = 0.0            # optional
//! noise_sigma = 0.0               # optional
//! return_fraction = 0.1           # optional
//!
//! [cloud]
//! proc_capability_bps = 3e6
//! ```
//!
//! Unknown keys are rejected.

mod presets;
mod sweep;

pub use presets::{
    preset, BitrateBound, BitratePreset, MotorPreset, NetworkPreset, PresetCatalog, PresetValue,
    WirelessInfo,
};
pub use sweep::{sweep_grid, GridAxis, GridSpec, SweepPoint};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{CloudParams, FogNodeParams, ModelError, NetworkParams, WorkloadParams};

pub const DEFAULT_PACKET_SIZE_BITS: f64 = 12000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl ConfigError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    fn from_toml(text: &str, err: &toml::de::Error) -> Self {
        let (line, column) = err
            .span()
            .map(|span| line_column(text, span.start))
            .unwrap_or((0, 0));
        Self::Parse {
            line,
            column,
            message: err.message().trim().to_owned(),
        }
    }
}

impl From<ModelError> for ConfigError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::InvalidParameter { field, reason } => Self::validation(field, reason),
            other => Self::validation("scenario", other.to_string()),
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |nl| before.len() - nl - 1)
        + 1;
    (line, column)
}

/// One fully validated fog-cloud configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub workload: WorkloadParams,
    pub fog: FogNodeParams,
    pub network: NetworkParams,
    pub cloud: CloudParams,
    pub modification1_enabled: bool,
    pub include_base_latency: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "default".to_owned(),
            workload: WorkloadParams {
                arrival_rate: 100.0,
                packet_size: DEFAULT_PACKET_SIZE_BITS,
            },
            fog: FogNodeParams {
                proc_capability: 100.0,
                energy_per_bit: 1e-7,
                idle_power: 2.0,
                tdp: 10.0,
                tx_energy_per_bit: 0.0,
            },
            network: NetworkParams {
                uplink_throughput: 1.5e6,
                downlink_throughput: 1.5e6,
                base_latency: 0.0,
                noise_sigma: 0.0,
                return_fraction: NetworkParams::DEFAULT_RETURN_FRACTION,
            },
            cloud: CloudParams {
                proc_capability: 3e6,
            },
            modification1_enabled: false,
            include_base_latency: false,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(ConfigError::validation("name", "must be nonempty"));
        }
        self.workload.validate()?;
        self.fog.validate()?;
        self.network.validate()?;
        self.cloud.validate()?;
        Ok(())
    }

    /// Explicit document form: every value spelled out, no preset references.
    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            name: self.name.clone(),
            modification1_enabled: self.modification1_enabled,
            include_base_latency: self.include_base_latency,
            workload: WorkloadDoc {
                arrival_rate_pps: Some(self.workload.arrival_rate),
                packet_size_bits: Some(self.workload.packet_size),
                ..Default::default()
            },
            fog: FogDoc {
                proc_capability_pps: Some(self.fog.proc_capability),
                proc_capability_fraction: None,
                energy_per_bit_j: self.fog.energy_per_bit,
                idle_power_w: self.fog.idle_power,
                tdp_w: self.fog.tdp,
                tx_energy_per_bit_j: Some(self.fog.tx_energy_per_bit),
            },
            network: NetworkDoc {
                preset: None,
                uplink_throughput_bps: Some(self.network.uplink_throughput),
                downlink_throughput_bps: Some(self.network.downlink_throughput),
                base_latency_s: Some(self.network.base_latency),
                noise_sigma: Some(self.network.noise_sigma),
                return_fraction: Some(self.network.return_fraction),
            },
            cloud: CloudDoc {
                proc_capability_bps: self.cloud.proc_capability,
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_doc()).expect("scenario document is serializable")
    }

    /// Hex SHA-256 of the explicit TOML rendering.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, ConfigError> {
    ScenarioDoc::parse(text)?.resolve()
}

/// Raw scenario document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    #[serde(default)]
    pub modification1_enabled: bool,
    #[serde(default)]
    pub include_base_latency: bool,
    pub workload: WorkloadDoc,
    pub fog: FogDoc,
    pub network: NetworkDoc,
    pub cloud: CloudDoc,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival_rate_pps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitrate_bps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitrate_preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_size_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fleet_size: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FogDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proc_capability_pps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proc_capability_fraction: Option<f64>,
    pub energy_per_bit_j: f64,
    pub idle_power_w: f64,
    pub tdp_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_energy_per_bit_j: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplink_throughput_bps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downlink_throughput_bps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_latency_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub return_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudDoc {
    pub proc_capability_bps: f64,
}

impl ScenarioDoc {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::from_toml(text, &e))
    }

    /// Applies presets and defaults, then validates.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        let catalog = PresetCatalog;
        let w = &self.workload;

        let packet_size = w.packet_size_bits.unwrap_or(DEFAULT_PACKET_SIZE_BITS);
        if !(packet_size.is_finite() && packet_size > 0.0) {
            return Err(ConfigError::validation(
                "workload.packet_size",
                "must be a finite value > 0",
            ));
        }
        let fleet = w.fleet_size.unwrap_or(1);
        if fleet == 0 {
            return Err(ConfigError::validation(
                "workload.fleet_size",
                "must be >= 1",
            ));
        }
        let per_uav_rate = match (&w.arrival_rate_pps, &w.bitrate_bps, &w.bitrate_preset) {
            (Some(rate), None, None) => *rate,
            (None, Some(bitrate), None) => bitrate / packet_size,
            (None, None, Some(name)) => catalog.bitrate_value(name)? / packet_size,
            _ => {
                return Err(ConfigError::validation(
                    "workload.arrival_rate",
                    "set exactly one of arrival_rate_pps, bitrate_bps, bitrate_preset",
                ))
            }
        };
        let workload = WorkloadParams {
            arrival_rate: per_uav_rate * f64::from(fleet),
            packet_size,
        };
        workload.validate()?;

        let proc_capability = match (
            self.fog.proc_capability_pps,
            self.fog.proc_capability_fraction,
        ) {
            (Some(pps), None) => pps,
            (None, Some(fraction)) => {
                if !(fraction.is_finite() && fraction > 0.0) {
                    return Err(ConfigError::validation(
                        "fog.proc_capability_fraction",
                        "must be a finite value > 0",
                    ));
                }
                fraction * workload.arrival_rate
            }
            _ => {
                return Err(ConfigError::validation(
                    "fog.proc_capability",
                    "set exactly one of proc_capability_pps, proc_capability_fraction",
                ))
            }
        };
        let fog = FogNodeParams {
            proc_capability,
            energy_per_bit: self.fog.energy_per_bit_j,
            idle_power: self.fog.idle_power_w,
            tdp: self.fog.tdp_w,
            tx_energy_per_bit: self.fog.tx_energy_per_bit_j.unwrap_or(0.0),
        };

        let n = &self.network;
        let mut network = match &n.preset {
            Some(name) => catalog.network(name)?.to_params(self.include_base_latency),
            None => {
                let up = n.uplink_throughput_bps.ok_or_else(|| {
                    ConfigError::validation(
                        "network.uplink_throughput",
                        "required when no network preset is given",
                    )
                })?;
                NetworkParams {
                    uplink_throughput: up,
                    downlink_throughput: up,
                    base_latency: 0.0,
                    noise_sigma: 0.0,
                    return_fraction: NetworkParams::DEFAULT_RETURN_FRACTION,
                }
            }
        };
        if let Some(up) = n.uplink_throughput_bps {
            network.uplink_throughput = up;
            network.downlink_throughput = up;
        }
        if let Some(down) = n.downlink_throughput_bps {
            network.downlink_throughput = down;
        }
        if let Some(base) = n.base_latency_s {
            network.base_latency = base;
        }
        if let Some(sigma) = n.noise_sigma {
            network.noise_sigma = sigma;
        }
        if let Some(eta) = n.return_fraction {
            network.return_fraction = eta;
        }

        let scenario = Scenario {
            name: self.name.clone(),
            workload,
            fog,
            network,
            cloud: CloudParams {
                proc_capability: self.cloud.proc_capability_bps,
            },
            modification1_enabled: self.modification1_enabled,
            include_base_latency: self.include_base_latency,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
