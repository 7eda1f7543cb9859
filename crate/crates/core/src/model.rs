// SPDX-License-Identifier: Apache-2.0

//! Analytic objective model for a single fog node splitting its workload
//! with the cloud.
//!
//! All quantities use a one-second accounting epoch, so a bit-rate doubles as
//! the bit volume handled in one epoch. That is what lets the cloud latency
//! divide the offloaded rate by link and processing throughputs.
//!
//! Every function here is pure. The stochastic cloud latency takes an
//! explicit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Scenario;

/// Lower truncation bound of the latency noise multiplier.
pub const NOISE_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("fog power {power} W exceeds the TDP bound of {tdp} W")]
    TdpExceeded { power: f64, tdp: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

fn invalid(field: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

fn require(ok: bool, field: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(field, reason))
    }
}

/// Traffic arriving at the fog node from the fleet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadParams {
    /// Packets per second.
    pub arrival_rate: f64,
    /// Bits per packet.
    pub packet_size: f64,
}

impl WorkloadParams {
    pub fn validate(&self) -> Result<()> {
        require(
            self.arrival_rate.is_finite() && self.arrival_rate >= 0.0,
            "workload.arrival_rate",
            "must be a finite value >= 0",
        )?;
        require(
            self.packet_size.is_finite() && self.packet_size > 0.0,
            "workload.packet_size",
            "must be a finite value > 0",
        )
    }

    /// Offered bit-rate `δ·s`.
    pub fn bitrate(&self) -> f64 {
        self.arrival_rate * self.packet_size
    }
}

/// Processing and power characteristics of the fog node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FogNodeParams {
    /// Packets per second the node can process.
    pub proc_capability: f64,
    /// Joules per processed bit.
    pub energy_per_bit: f64,
    /// Watts drawn when idle.
    pub idle_power: f64,
    /// Thermal design power bound, watts.
    pub tdp: f64,
    /// Joules per transmitted bit. Zero disables the transmission term.
    pub tx_energy_per_bit: f64,
}

impl FogNodeParams {
    pub fn validate(&self) -> Result<()> {
        require(
            self.proc_capability.is_finite() && self.proc_capability > 0.0,
            "fog.proc_capability",
            "must be a finite value > 0",
        )?;
        require(
            self.energy_per_bit.is_finite() && self.energy_per_bit >= 0.0,
            "fog.energy_per_bit",
            "must be a finite value >= 0",
        )?;
        require(
            self.idle_power.is_finite() && self.idle_power >= 0.0,
            "fog.idle_power",
            "must be a finite value >= 0",
        )?;
        require(
            self.tdp.is_finite() && self.tdp > self.idle_power,
            "fog.tdp",
            "must be finite and greater than fog.idle_power",
        )?;
        require(
            self.tx_energy_per_bit.is_finite() && self.tx_energy_per_bit >= 0.0,
            "fog.tx_energy_per_bit",
            "must be a finite value >= 0",
        )
    }
}

/// Fog-cloud link characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Fog to cloud, bits per second.
    pub uplink_throughput: f64,
    /// Cloud to fog, bits per second.
    pub downlink_throughput: f64,
    /// Constant additive latency, seconds.
    pub base_latency: f64,
    /// Standard deviation of the mean-one uplink noise multiplier.
    pub noise_sigma: f64,
    /// Fraction of the offloaded volume sent back downlink.
    pub return_fraction: f64,
}

impl NetworkParams {
    pub const DEFAULT_RETURN_FRACTION: f64 = 0.1;

    pub fn validate(&self) -> Result<()> {
        require(
            self.uplink_throughput.is_finite() && self.uplink_throughput > 0.0,
            "network.uplink_throughput",
            "must be a finite value > 0",
        )?;
        require(
            self.downlink_throughput.is_finite() && self.downlink_throughput > 0.0,
            "network.downlink_throughput",
            "must be a finite value > 0",
        )?;
        require(
            self.base_latency.is_finite() && self.base_latency >= 0.0,
            "network.base_latency",
            "must be a finite value >= 0",
        )?;
        require(
            self.noise_sigma.is_finite() && self.noise_sigma >= 0.0,
            "network.noise_sigma",
            "must be a finite value >= 0",
        )?;
        require(
            (0.0..=1.0).contains(&self.return_fraction),
            "network.return_fraction",
            "must lie in [0, 1]",
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudParams {
    /// Bits per second.
    pub proc_capability: f64,
}

impl CloudParams {
    pub fn validate(&self) -> Result<()> {
        require(
            self.proc_capability.is_finite() && self.proc_capability > 0.0,
            "cloud.proc_capability",
            "must be a finite value > 0",
        )
    }
}

/// Workload split: the fraction `r` kept at the fog and the derived packet
/// rates on each side. `local + forwarded == arrival_rate` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionState {
    pub r: f64,
    /// Packets per second processed at the fog (`x1`).
    pub local: f64,
    /// Packets per second forwarded to the cloud (`x2`).
    pub forwarded: f64,
}

impl DecisionState {
    pub fn new(workload: &WorkloadParams, r: f64) -> Result<Self> {
        require((0.0..=1.0).contains(&r), "r", "must lie in [0, 1]")?;
        let local = workload.arrival_rate * r;
        Ok(Self {
            r,
            local,
            forwarded: workload.arrival_rate - local,
        })
    }

    /// Offloaded bit-rate (and per-epoch volume) `a = s·δ·(1−r)`.
    pub fn offloaded_bits(&self, workload: &WorkloadParams) -> f64 {
        workload.packet_size * workload.arrival_rate * (1.0 - self.r)
    }
}

/// The minimised triple (B, E, D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// Bits per second sent to the cloud.
    pub throughput_to_cloud: f64,
    /// Fog node power, watts.
    pub fog_energy: f64,
    /// Average perceived latency, seconds.
    pub avg_latency: f64,
}

impl ObjectiveVector {
    pub fn new(throughput_to_cloud: f64, fog_energy: f64, avg_latency: f64) -> Self {
        Self {
            throughput_to_cloud,
            fog_energy,
            avg_latency,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.throughput_to_cloud, self.fog_energy, self.avg_latency]
    }
}

impl From<[f64; 3]> for ObjectiveVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Linear fog latency together with the stability flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogLatency {
    pub seconds: f64,
    /// Set when the local load reaches or exceeds the processing capability.
    pub unstable: bool,
}

/// The additive terms of the cloud latency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudLatencyTerms {
    pub uplink: f64,
    pub downlink: f64,
    pub processing: f64,
    pub base: f64,
}

impl CloudLatencyTerms {
    pub fn total(&self) -> f64 {
        self.uplink + self.downlink + self.processing + self.base
    }
}

/// Bits per second forwarded to the cloud, `δ·(1−r)·s`.
pub fn throughput_to_cloud(w: &WorkloadParams, d: &DecisionState) -> f64 {
    w.arrival_rate * (1.0 - d.r) * w.packet_size
}

fn check_tdp(power: f64, f: &FogNodeParams) -> Result<f64> {
    if power > f.tdp {
        Err(ModelError::TdpExceeded { power, tdp: f.tdp })
    } else {
        Ok(power)
    }
}

fn processing_power(w: &WorkloadParams, f: &FogNodeParams, d: &DecisionState) -> f64 {
    f.energy_per_bit * w.arrival_rate * w.packet_size * d.r + f.idle_power
}

fn processing_and_tx_power(w: &WorkloadParams, f: &FogNodeParams, d: &DecisionState) -> f64 {
    f.energy_per_bit * w.arrival_rate * w.packet_size * d.r
        + f.tx_energy_per_bit * w.arrival_rate * w.packet_size * (1.0 - d.r)
        + f.idle_power
}

/// Fog power draw `γ·δ·s·r + θ`, bounded by the TDP.
pub fn fog_energy(w: &WorkloadParams, f: &FogNodeParams, d: &DecisionState) -> Result<f64> {
    check_tdp(processing_power(w, f, d), f)
}

/// Fog power including the per-bit transmission cost of forwarded data.
pub fn fog_energy_with_tx(w: &WorkloadParams, f: &FogNodeParams, d: &DecisionState) -> Result<f64> {
    check_tdp(processing_and_tx_power(w, f, d), f)
}

/// Linear fog latency `δ·r / v_fog`.
pub fn fog_latency_linear(w: &WorkloadParams, f: &FogNodeParams, d: &DecisionState) -> FogLatency {
    let load = w.arrival_rate * d.r;
    FogLatency {
        seconds: load / f.proc_capability,
        unstable: load >= f.proc_capability,
    }
}

/// Exponential fog latency `2^(δ·r / v_fog)`.
///
/// Evaluates to 1, not 0, at zero local load.
pub fn fog_latency_exact(w: &WorkloadParams, f: &FogNodeParams, d: &DecisionState) -> f64 {
    fog_latency_linear(w, f, d).seconds.exp2()
}

pub fn cloud_latency_terms(
    w: &WorkloadParams,
    n: &NetworkParams,
    c: &CloudParams,
    d: &DecisionState,
) -> CloudLatencyTerms {
    let a = d.offloaded_bits(w);
    CloudLatencyTerms {
        uplink: a / (2.0 * n.uplink_throughput),
        downlink: n.return_fraction * a / (2.0 * n.downlink_throughput),
        processing: a / (2.0 * c.proc_capability),
        base: n.base_latency,
    }
}

pub fn cloud_latency(
    w: &WorkloadParams,
    n: &NetworkParams,
    c: &CloudParams,
    d: &DecisionState,
) -> f64 {
    cloud_latency_terms(w, n, c, d).total()
}

/// Draws one mean-one multiplier from `N(1, sigma)` truncated below at
/// [`NOISE_FLOOR`] by resampling.
pub fn sample_noise_multiplier<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let normal = Normal::new(1.0, sigma).expect("sigma is finite and non-negative");
    loop {
        let f = normal.sample(rng);
        if f >= NOISE_FLOOR {
            return f;
        }
    }
}

/// Cloud latency terms with the uplink term scaled by a seeded noise sample.
pub fn cloud_latency_terms_stochastic(
    w: &WorkloadParams,
    n: &NetworkParams,
    c: &CloudParams,
    d: &DecisionState,
    seed: u64,
) -> CloudLatencyTerms {
    let mut terms = cloud_latency_terms(w, n, c, d);
    if n.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        terms.uplink *= sample_noise_multiplier(&mut rng, n.noise_sigma);
    }
    terms
}

pub fn cloud_latency_stochastic(
    w: &WorkloadParams,
    n: &NetworkParams,
    c: &CloudParams,
    d: &DecisionState,
    seed: u64,
) -> f64 {
    if n.noise_sigma == 0.0 {
        return cloud_latency(w, n, c, d);
    }
    cloud_latency_terms_stochastic(w, n, c, d, seed).total()
}

/// Unweighted mean of fog and cloud latency.
pub fn avg_latency(fog_latency: f64, cloud_latency: f64) -> f64 {
    (fog_latency + cloud_latency) / 2.0
}

/// Full breakdown of one decision, computed without enforcing the TDP bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub decision: DecisionState,
    pub throughput_to_cloud: f64,
    pub fog_energy: f64,
    pub fog_latency: FogLatency,
    pub cloud_latency: f64,
    pub avg_latency: f64,
    pub tdp: f64,
}

impl Evaluation {
    pub fn objectives(&self) -> ObjectiveVector {
        ObjectiveVector::new(self.throughput_to_cloud, self.fog_energy, self.avg_latency)
    }

    pub fn feasible(&self) -> bool {
        self.fog_energy <= self.tdp
    }

    /// Watts above the TDP bound, zero when feasible.
    pub fn tdp_violation(&self) -> f64 {
        (self.fog_energy - self.tdp).max(0.0)
    }

    pub fn checked(&self) -> Result<ObjectiveVector> {
        if self.feasible() {
            Ok(self.objectives())
        } else {
            Err(ModelError::TdpExceeded {
                power: self.fog_energy,
                tdp: self.tdp,
            })
        }
    }
}

fn evaluate_with(
    scenario: &Scenario,
    r: f64,
    cloud: impl FnOnce(&DecisionState) -> f64,
) -> Result<Evaluation> {
    let decision = DecisionState::new(&scenario.workload, r)?;
    let w = &scenario.workload;
    let f = &scenario.fog;
    let fog_energy = if scenario.modification1_enabled {
        processing_and_tx_power(w, f, &decision)
    } else {
        processing_power(w, f, &decision)
    };
    let fog_latency = fog_latency_linear(w, f, &decision);
    let cloud_latency = cloud(&decision);
    Ok(Evaluation {
        decision,
        throughput_to_cloud: throughput_to_cloud(w, &decision),
        fog_energy,
        fog_latency,
        cloud_latency,
        avg_latency: avg_latency(fog_latency.seconds, cloud_latency),
        tdp: f.tdp,
    })
}

/// Evaluates every objective at `r`. Only fails on an out-of-range `r`.
pub fn evaluate(scenario: &Scenario, r: f64) -> Result<Evaluation> {
    evaluate_with(scenario, r, |d| {
        cloud_latency(&scenario.workload, &scenario.network, &scenario.cloud, d)
    })
}

/// Like [`evaluate`], with the uplink noise multiplier drawn from `seed`.
pub fn evaluate_stochastic(scenario: &Scenario, r: f64, seed: u64) -> Result<Evaluation> {
    evaluate_with(scenario, r, |d| {
        cloud_latency_stochastic(
            &scenario.workload,
            &scenario.network,
            &scenario.cloud,
            d,
            seed,
        )
    })
}

/// Objective vector (B, E, D) at `r`; fails with `TdpExceeded` when the fog
/// power breaks its bound.
pub fn objectives(scenario: &Scenario, r: f64) -> Result<ObjectiveVector> {
    evaluate(scenario, r)?.checked()
}
