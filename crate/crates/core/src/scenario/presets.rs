// SPDX-License-Identifier: Apache-2.0

//! Built-in reference values: mobile network standards, video bitrates,
//! short-range wireless technologies and the X2212 motor.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::ConfigError;
use crate::flight::MotorParams;
use crate::model::NetworkParams;

/// Mobile network standard with its uplink throughput and latency range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkPreset {
    pub name: &'static str,
    pub standard: &'static str,
    pub uplink_throughput_bps: f64,
    pub latency_min_s: f64,
    pub latency_max_s: f64,
}

impl NetworkPreset {
    pub fn latency_midpoint(&self) -> f64 {
        0.5 * (self.latency_min_s + self.latency_max_s)
    }

    /// Network parameters with a symmetric link. The latency midpoint becomes
    /// the base latency only when `include_base_latency` is set.
    pub fn to_params(&self, include_base_latency: bool) -> NetworkParams {
        NetworkParams {
            uplink_throughput: self.uplink_throughput_bps,
            downlink_throughput: self.uplink_throughput_bps,
            base_latency: if include_base_latency {
                self.latency_midpoint()
            } else {
                0.0
            },
            noise_sigma: 0.0,
            return_fraction: NetworkParams::DEFAULT_RETURN_FRACTION,
        }
    }
}

/// Video bitrate range for one resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BitratePreset {
    pub name: &'static str,
    pub min_bps: f64,
    pub max_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotorPreset {
    pub name: &'static str,
    pub model: &'static str,
    pub params: MotorParams,
}

/// Informational record for a short-range wireless technology. Not consumed
/// by any model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WirelessInfo {
    pub name: &'static str,
    pub technology: &'static str,
    pub coverage_min_m: f64,
    pub coverage_max_m: f64,
    /// `None` when only an upper bound is published.
    pub throughput_min_bps: Option<f64>,
    pub throughput_max_bps: f64,
    pub frequency: &'static str,
    pub energy_efficiency: &'static str,
}

pub const NETWORKS: [NetworkPreset; 4] = [
    NetworkPreset {
        name: "gsm",
        standard: "GSM",
        uplink_throughput_bps: 40e3,
        latency_min_s: 0.6,
        latency_max_s: 0.75,
    },
    NetworkPreset {
        name: "umts",
        standard: "UMTS",
        uplink_throughput_bps: 384e3,
        latency_min_s: 0.5,
        latency_max_s: 0.75,
    },
    NetworkPreset {
        name: "hspa",
        standard: "HSPA",
        uplink_throughput_bps: 5.76e6,
        latency_min_s: 0.15,
        latency_max_s: 0.4,
    },
    NetworkPreset {
        name: "hspa_plus",
        standard: "HSPA+",
        uplink_throughput_bps: 11.5e6,
        latency_min_s: 0.1,
        latency_max_s: 0.2,
    },
];

pub const BITRATES: [BitratePreset; 4] = [
    BitratePreset {
        name: "360p",
        min_bps: 400e3,
        max_bps: 1e6,
    },
    BitratePreset {
        name: "480p",
        min_bps: 500e3,
        max_bps: 2e6,
    },
    BitratePreset {
        name: "720p",
        min_bps: 1.5e6,
        max_bps: 4e6,
    },
    BitratePreset {
        name: "1080p",
        min_bps: 3e6,
        max_bps: 6e6,
    },
];

pub const MOTORS: [MotorPreset; 1] = [MotorPreset {
    name: "x2212",
    model: "Sunnysky X2212 1250KV",
    params: MotorParams {
        kv: 1250.0,
        no_load_current: 0.6,
        resistance: 0.079,
        max_power: 390.0,
        prop_diameter: 0.254,
        prop_pitch: 0.119,
        efficiency_min: 0.75,
        efficiency_max: 0.85,
    },
}];

pub const WIRELESS: [WirelessInfo; 4] = [
    WirelessInfo {
        name: "bluetooth",
        technology: "Bluetooth",
        coverage_min_m: 100.0,
        coverage_max_m: 100.0,
        throughput_min_bps: Some(22e6),
        throughput_max_bps: 22e6,
        frequency: "LF 120-134Khz HF 13.56MHz UHF 850-960MHz",
        energy_efficiency: "High",
    },
    WirelessInfo {
        name: "wifi",
        technology: "Wi-Fi",
        coverage_min_m: 100.0,
        coverage_max_m: 2000.0,
        throughput_min_bps: None,
        throughput_max_bps: 300e6,
        frequency: "2.4, 5GHz",
        energy_efficiency: "Low",
    },
    WirelessInfo {
        name: "hspa_link",
        technology: "HSPA",
        coverage_min_m: 5000.0,
        coverage_max_m: 5000.0,
        throughput_min_bps: Some(5.76e6),
        throughput_max_bps: 11e6,
        frequency: "TDD 1.85-3.8GHz FDD 0.7 - 2.6GHz",
        energy_efficiency: "Depends on the Signal Strength",
    },
    WirelessInfo {
        name: "zigbee",
        technology: "ZigBee",
        coverage_min_m: 1200.0,
        coverage_max_m: 14000.0,
        throughput_min_bps: Some(0.25e6),
        throughput_max_bps: 72e6,
        frequency: "0.9, 1.2, 2.4 GHz",
        energy_efficiency: "Depends on the Model",
    },
];

/// Any value the catalog can hand out by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetValue {
    Network(NetworkPreset),
    Bitrate(BitratePreset),
    Motor(MotorPreset),
    Wireless(WirelessInfo),
}

/// Which end of a bitrate range a `<resolution>_min` / `_max` name selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitrateBound {
    Min,
    Max,
}

#[derive(Debug, Serialize)]
struct Section<T: Serialize> {
    table: &'static str,
    entries: T,
}

#[derive(Debug, Serialize)]
struct CatalogDocument {
    networks: Section<&'static [NetworkPreset]>,
    bitrates: Section<&'static [BitratePreset]>,
    motors: Section<&'static [MotorPreset]>,
    wireless_info: Section<&'static [WirelessInfo]>,
}

/// Read-only view over the built-in presets.
#[derive(Debug, Clone, Copy, Default)]
pub struct PresetCatalog;

impl PresetCatalog {
    pub fn networks(&self) -> &'static [NetworkPreset] {
        &NETWORKS
    }

    pub fn bitrates(&self) -> &'static [BitratePreset] {
        &BITRATES
    }

    pub fn motors(&self) -> &'static [MotorPreset] {
        &MOTORS
    }

    pub fn wireless_info(&self) -> &'static [WirelessInfo] {
        &WIRELESS
    }

    pub fn network(&self, name: &str) -> Result<NetworkPreset, ConfigError> {
        NETWORKS
            .iter()
            .find(|p| p.name == name)
            .copied()
            .ok_or_else(|| ConfigError::UnknownPreset(name.to_owned()))
    }

    pub fn bitrate(&self, name: &str) -> Result<BitratePreset, ConfigError> {
        BITRATES
            .iter()
            .find(|p| p.name == name)
            .copied()
            .ok_or_else(|| ConfigError::UnknownPreset(name.to_owned()))
    }

    /// Resolves `720p_min`, `1080p_max` and friends to a bit-rate. A bare
    /// resolution name selects the minimum.
    pub fn bitrate_value(&self, name: &str) -> Result<f64, ConfigError> {
        let (res, bound) = match name.rsplit_once('_') {
            Some((res, "min")) => (res, BitrateBound::Min),
            Some((res, "max")) => (res, BitrateBound::Max),
            _ => (name, BitrateBound::Min),
        };
        let preset = self
            .bitrate(res)
            .map_err(|_| ConfigError::UnknownPreset(name.to_owned()))?;
        Ok(match bound {
            BitrateBound::Min => preset.min_bps,
            BitrateBound::Max => preset.max_bps,
        })
    }

    pub fn motor(&self, name: &str) -> Result<MotorPreset, ConfigError> {
        MOTORS
            .iter()
            .find(|p| p.name == name)
            .copied()
            .ok_or_else(|| ConfigError::UnknownPreset(name.to_owned()))
    }

    pub fn get(&self, name: &str) -> Result<PresetValue, ConfigError> {
        if let Ok(p) = self.network(name) {
            return Ok(PresetValue::Network(p));
        }
        if let Ok(p) = self.bitrate(name) {
            return Ok(PresetValue::Bitrate(p));
        }
        if let Ok(p) = self.motor(name) {
            return Ok(PresetValue::Motor(p));
        }
        WIRELESS
            .iter()
            .find(|p| p.name == name)
            .map(|p| PresetValue::Wireless(*p))
            .ok_or_else(|| ConfigError::UnknownPreset(name.to_owned()))
    }

    fn document(&self) -> CatalogDocument {
        CatalogDocument {
            networks: Section {
                table: "network characteristics of common mobile standards",
                entries: &NETWORKS,
            },
            bitrates: Section {
                table: "bitrate required for common image sizes",
                entries: &BITRATES,
            },
            motors: Section {
                table: "electric motor parameters",
                entries: &MOTORS,
            },
            wireless_info: Section {
                table: "characteristics of typical wireless standards",
                entries: &WIRELESS,
            },
        }
    }

    /// Machine-readable catalog dump.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.document()).expect("catalog is serializable")
    }

    /// SHA-256 over the compact JSON rendering of the catalog.
    pub fn checksum(&self) -> String {
        let compact = serde_json::to_string(&self.document()).expect("catalog is serializable");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}

/// Looks up any preset by name.
pub fn preset(name: &str) -> Result<PresetValue, ConfigError> {
    PresetCatalog.get(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    // Pinned digest of the transcribed tables. Any edit to a preset value
    // changes it.
    const CATALOG_SHA256: &str = "14c34a1eecb6305994f476615f456ae36ff7ba4f699c8bc5a1296f79d10efd1e";

    #[test]
    fn point_lookups() {
        match preset("gsm").unwrap() {
            PresetValue::Network(n) => assert_eq!(n.uplink_throughput_bps, 40000.0),
            other => panic!("{other:?}"),
        }
        match preset("1080p").unwrap() {
            PresetValue::Bitrate(b) => assert_eq!(b.max_bps, 6e6),
            other => panic!("{other:?}"),
        }
        match preset("x2212").unwrap() {
            PresetValue::Motor(m) => assert_eq!(m.params.resistance, 0.079),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            preset("zigbee").unwrap(),
            PresetValue::Wireless(_)
        ));
        assert!(matches!(preset("lte"), Err(ConfigError::UnknownPreset(n)) if n == "lte"));
    }

    #[test]
    fn network_table_values() {
        let cat = PresetCatalog;
        let expect = [
            ("gsm", 40e3, 0.6, 0.75),
            ("umts", 384e3, 0.5, 0.75),
            ("hspa", 5.76e6, 0.15, 0.4),
            ("hspa_plus", 11.5e6, 0.1, 0.2),
        ];
        for (name, up, lo, hi) in expect {
            let p = cat.network(name).unwrap();
            assert_eq!(
                (p.uplink_throughput_bps, p.latency_min_s, p.latency_max_s),
                (up, lo, hi)
            );
        }
        assert_eq!(
            cat.network("hspa_plus").unwrap().latency_midpoint(),
            0.15000000000000002
        );
    }

    #[test]
    fn bitrate_names_resolve() {
        let cat = PresetCatalog;
        assert_eq!(cat.bitrate_value("360p_min").unwrap(), 400e3);
        assert_eq!(cat.bitrate_value("1080p_max").unwrap(), 6e6);
        assert_eq!(cat.bitrate_value("720p").unwrap(), 1.5e6);
        assert!(cat.bitrate_value("4k_max").is_err());
    }

    #[test]
    fn names_are_unique() {
        let cat = PresetCatalog;
        let mut seen = HashSet::new();
        let names = cat
            .networks()
            .iter()
            .map(|p| p.name)
            .chain(cat.bitrates().iter().map(|p| p.name))
            .chain(cat.motors().iter().map(|p| p.name))
            .chain(cat.wireless_info().iter().map(|p| p.name));
        for n in names {
            assert!(seen.insert(n), "duplicate preset {n}");
        }
    }

    #[test]
    fn checksum_is_pinned() {
        assert_eq!(PresetCatalog.checksum(), CATALOG_SHA256);
    }
}
