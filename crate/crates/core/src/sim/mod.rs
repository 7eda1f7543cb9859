// SPDX-License-Identifier: Apache-2.0

//! Packet-level discrete-event simulation of the fog node dataflow.
//!
//! Packets arrive as a Poisson stream. Each one is classified: important
//! packets go through filtering to the uplink, the rest are processed
//! locally. Local processing is a FIFO single server with exponential
//! service at the fog processing capability, so its sojourn time can be
//! checked against the M/M/1 closed form. The uplink is a second FIFO
//! server whose transfer time is `size / uplink_throughput`, scaled by the
//! noise multiplier when noise is enabled. Cloud processing and the
//! downlink return are fixed per-packet delays without queueing.
//!
//! The simulator is a cross-check of trends and stability. It does not
//! reproduce the analytic latency values point by point.

mod trend;

pub use trend::{spearman, trend_compare, TrendRow, TrendTable};

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::model::sample_noise_multiplier;
use crate::scenario::Scenario;

/// Number of equally spaced queue-length samples over the second half of a
/// run. A strictly increasing sequence marks the run unstable.
pub const STABILITY_CHECKPOINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("failed to write trace: {0}")]
    Trace(String),
}

fn invalid(field: &'static str, reason: &str) -> SimError {
    SimError::InvalidParameter {
        field,
        reason: reason.to_owned(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ServiceDistribution {
    /// Exponential with rate equal to the fog processing capability.
    #[default]
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub scenario: Scenario,
    /// Probability a packet is classified for local processing.
    pub local_prob: f64,
    pub service: ServiceDistribution,
    /// Simulated seconds.
    pub duration: f64,
    /// Leading seconds excluded from every statistic.
    pub warmup: f64,
}

impl SimScenario {
    pub const DEFAULT_WARMUP_FRACTION: f64 = 0.1;

    /// Warmup defaults to 10% of the duration.
    pub fn new(scenario: Scenario, local_prob: f64, duration: f64) -> Result<Self, SimError> {
        Self::with_warmup(
            scenario,
            local_prob,
            duration,
            Self::DEFAULT_WARMUP_FRACTION * duration,
        )
    }

    pub fn with_warmup(
        scenario: Scenario,
        local_prob: f64,
        duration: f64,
        warmup: f64,
    ) -> Result<Self, SimError> {
        let s = Self {
            scenario,
            local_prob,
            service: ServiceDistribution::default(),
            duration,
            warmup,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.local_prob) {
            return Err(invalid("local_prob", "must lie in [0, 1]"));
        }
        if !(self.warmup.is_finite() && self.warmup >= 0.0) {
            return Err(invalid("warmup", "must be a finite value >= 0"));
        }
        if !(self.duration.is_finite() && self.duration > self.warmup) {
            return Err(invalid(
                "duration",
                "must be finite and greater than warmup",
            ));
        }
        self.scenario
            .validate()
            .map_err(|e| invalid("scenario", &e.to_string()))
    }

    pub fn with_local_prob(&self, local_prob: f64) -> Result<Self, SimError> {
        let s = Self {
            local_prob,
            ..self.clone()
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketPath {
    Local,
    Forwarded,
}

impl PacketPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Local => "local",
            Self::Forwarded => "forwarded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet {
    pub id: u64,
    pub arrival_time: f64,
    pub size: f64,
    /// Important packets bypass local processing.
    pub important: bool,
    /// `None` while still in flight when the run ends.
    pub departure_time: Option<f64>,
    pub path: PacketPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimMetrics {
    /// Mean local queueing plus service time, seconds.
    pub mean_local_sojourn: f64,
    /// Mean uplink queueing and transfer plus the fixed cloud delays.
    pub mean_forward_latency: f64,
    /// Bits per second leaving over the uplink.
    pub empirical_uplink_throughput: f64,
    /// Watts.
    pub mean_fog_power: f64,
    pub local_queue_max: usize,
    pub mean_local_queue_len: f64,
    pub unstable: bool,
    pub packets_generated: u64,
    pub packets_local: u64,
    pub packets_forwarded: u64,
    pub packets_in_flight: u64,
}

impl SimMetrics {
    /// Unweighted mean of the local and forward path latencies.
    pub fn mean_latency(&self) -> f64 {
        0.5 * (self.mean_local_sojourn + self.mean_forward_latency)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub metrics: SimMetrics,
    /// Every generated packet, ordered by id.
    pub packets: Vec<Packet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    Arrival,
    LocalDone,
    UplinkDone,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so the max-heap pops the earliest event; ties go to the event
// scheduled first.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Streams {
    arrivals: ChaCha8Rng,
    classify: ChaCha8Rng,
    service: ChaCha8Rng,
    noise: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            rng
        };
        Self {
            arrivals: stream(0),
            classify: stream(1),
            service: stream(2),
            noise: stream(3),
        }
    }
}

/// Length of `[a, b] ∩ [lo, hi]`.
fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    (b.min(hi) - a.max(lo)).max(0.0)
}

struct Engine<'a> {
    sim: &'a SimScenario,
    streams: Streams,
    events: BinaryHeap<Event>,
    seq: u64,
    now: f64,
    packets: Vec<Packet>,
    local_queue: VecDeque<usize>,
    uplink_queue: VecDeque<usize>,
    // Integrals over the statistics window.
    queue_area: f64,
    processed_bits: f64,
    transmitted_bits: f64,
    uplink_bits_done: f64,
    local_queue_max: usize,
    checkpoints: Vec<f64>,
    samples: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn new(sim: &'a SimScenario, seed: u64) -> Self {
        let half = sim.duration / 2.0;
        let step = half / STABILITY_CHECKPOINTS as f64;
        Self {
            sim,
            streams: Streams::new(seed),
            events: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            packets: Vec::new(),
            local_queue: VecDeque::new(),
            uplink_queue: VecDeque::new(),
            queue_area: 0.0,
            processed_bits: 0.0,
            transmitted_bits: 0.0,
            uplink_bits_done: 0.0,
            local_queue_max: 0,
            checkpoints: (0..=STABILITY_CHECKPOINTS)
                .map(|k| half + k as f64 * step)
                .collect(),
            samples: Vec::with_capacity(STABILITY_CHECKPOINTS + 1),
        }
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.events.push(Event {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn window(&self) -> (f64, f64) {
        (self.sim.warmup, self.sim.duration)
    }

    /// Moves the clock to `t`, accumulating the queue-length integral and
    /// taking any checkpoint samples passed on the way.
    fn advance(&mut self, t: f64) {
        let (lo, hi) = self.window();
        let len = self.local_queue.len();
        self.queue_area += len as f64 * overlap(self.now, t, lo, hi);
        while self.samples.len() < self.checkpoints.len()
            && self.checkpoints[self.samples.len()] <= t
        {
            self.samples.push(len);
        }
        self.now = t;
    }

    fn next_arrival(&mut self) {
        let rate = self.sim.scenario.workload.arrival_rate;
        if rate > 0.0 {
            let gap = Exp::new(rate)
                .expect("rate > 0")
                .sample(&mut self.streams.arrivals);
            self.schedule(self.now + gap, EventKind::Arrival);
        }
    }

    fn start_local_service(&mut self) {
        let Some(&idx) = self.local_queue.front() else {
            return;
        };
        let rate = self.sim.scenario.fog.proc_capability;
        let service = match self.sim.service {
            ServiceDistribution::Exponential => Exp::new(rate)
                .expect("rate > 0")
                .sample(&mut self.streams.service),
        };
        let (lo, hi) = self.window();
        let end = self.now + service;
        if service > 0.0 {
            self.processed_bits +=
                self.packets[idx].size * overlap(self.now, end, lo, hi) / service;
        }
        self.schedule(end, EventKind::LocalDone);
    }

    fn start_uplink(&mut self) {
        let Some(&idx) = self.uplink_queue.front() else {
            return;
        };
        let net = &self.sim.scenario.network;
        let base = self.packets[idx].size / net.uplink_throughput;
        let transfer = base * sample_noise_multiplier(&mut self.streams.noise, net.noise_sigma);
        let (lo, hi) = self.window();
        let end = self.now + transfer;
        if transfer > 0.0 {
            self.transmitted_bits +=
                self.packets[idx].size * overlap(self.now, end, lo, hi) / transfer;
        }
        self.schedule(end, EventKind::UplinkDone);
    }

    fn on_arrival(&mut self) {
        let id = self.packets.len();
        let important = self.streams.classify.random::<f64>() >= self.sim.local_prob;
        let path = if important {
            PacketPath::Forwarded
        } else {
            PacketPath::Local
        };
        self.packets.push(Packet {
            id: id as u64,
            arrival_time: self.now,
            size: self.sim.scenario.workload.packet_size,
            important,
            departure_time: None,
            path,
        });
        match path {
            PacketPath::Local => {
                self.local_queue.push_back(id);
                self.local_queue_max = self.local_queue_max.max(self.local_queue.len());
                if self.local_queue.len() == 1 {
                    self.start_local_service();
                }
            }
            PacketPath::Forwarded => {
                self.uplink_queue.push_back(id);
                if self.uplink_queue.len() == 1 {
                    self.start_uplink();
                }
            }
        }
        self.next_arrival();
    }

    fn on_local_done(&mut self) {
        let idx = self
            .local_queue
            .pop_front()
            .expect("completion implies a packet in service");
        self.packets[idx].departure_time = Some(self.now);
        self.start_local_service();
    }

    fn on_uplink_done(&mut self) {
        let idx = self
            .uplink_queue
            .pop_front()
            .expect("completion implies a packet in transfer");
        let s = &self.sim.scenario;
        let size = self.packets[idx].size;
        let (lo, hi) = self.window();
        if self.now >= lo && self.now <= hi {
            self.uplink_bits_done += size;
        }
        let fixed = s.network.return_fraction * size / s.network.downlink_throughput
            + size / s.cloud.proc_capability
            + s.network.base_latency;
        self.packets[idx].departure_time = Some(self.now + fixed);
        self.start_uplink();
    }

    fn run(mut self) -> SimRun {
        self.next_arrival();
        while let Some(ev) = self.events.peek().copied() {
            if ev.time > self.sim.duration {
                break;
            }
            self.events.pop();
            self.advance(ev.time);
            match ev.kind {
                EventKind::Arrival => self.on_arrival(),
                EventKind::LocalDone => self.on_local_done(),
                EventKind::UplinkDone => self.on_uplink_done(),
            }
        }
        self.advance(self.sim.duration);
        self.finish()
    }

    fn finish(self) -> SimRun {
        let sim = self.sim;
        let s = &sim.scenario;
        let (lo, hi) = (sim.warmup, sim.duration);
        let span = hi - lo;

        let mut local = (0.0, 0u64);
        let mut forward = (0.0, 0u64);
        let (mut n_local, mut n_forward) = (0u64, 0u64);
        for p in &self.packets {
            let Some(dep) = p.departure_time else {
                continue;
            };
            match p.path {
                PacketPath::Local => n_local += 1,
                PacketPath::Forwarded => n_forward += 1,
            }
            if p.arrival_time < lo {
                continue;
            }
            let acc = match p.path {
                PacketPath::Local => &mut local,
                PacketPath::Forwarded => &mut forward,
            };
            acc.0 += dep - p.arrival_time;
            acc.1 += 1;
        }
        let mean = |(sum, n): (f64, u64)| if n == 0 { 0.0 } else { sum / n as f64 };

        let tx_energy = if s.modification1_enabled {
            s.fog.tx_energy_per_bit * self.transmitted_bits
        } else {
            0.0
        };
        let mean_fog_power =
            s.fog.idle_power + (s.fog.energy_per_bit * self.processed_bits + tx_energy) / span;

        let unstable = self.samples.len() == self.checkpoints.len()
            && self.samples.windows(2).all(|w| w[1] > w[0]);

        let generated = self.packets.len() as u64;
        let metrics = SimMetrics {
            mean_local_sojourn: mean(local),
            mean_forward_latency: mean(forward),
            empirical_uplink_throughput: self.uplink_bits_done / span,
            mean_fog_power,
            local_queue_max: self.local_queue_max,
            mean_local_queue_len: self.queue_area / span,
            unstable,
            packets_generated: generated,
            packets_local: n_local,
            packets_forwarded: n_forward,
            packets_in_flight: generated - n_local - n_forward,
        };
        SimRun {
            metrics,
            packets: self.packets,
        }
    }
}

/// Runs one simulation and keeps the per-packet records.
pub fn simulate_with_trace(s: &SimScenario, seed: u64) -> Result<SimRun, SimError> {
    s.validate()?;
    Ok(Engine::new(s, seed).run())
}

/// Runs one simulation. Deterministic in `(s, seed)`.
pub fn simulate(s: &SimScenario, seed: u64) -> Result<SimMetrics, SimError> {
    simulate_with_trace(s, seed).map(|run| run.metrics)
}

/// Writes one CSV record per packet with a header row. Departure is empty
/// for packets still in flight.
pub fn write_trace<W: Write>(packets: &[Packet], out: W) -> Result<(), SimError> {
    let err = |e: csv::Error| SimError::Trace(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "arrival_time",
        "important",
        "path",
        "departure_time",
        "size_bits",
    ])
    .map_err(err)?;
    for p in packets {
        w.write_record([
            p.id.to_string(),
            p.arrival_time.to_string(),
            p.important.to_string(),
            p.path.as_str().to_owned(),
            p.departure_time.map(|t| t.to_string()).unwrap_or_default(),
            p.size.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| SimError::Trace(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(rate: f64, v_fog: f64) -> Scenario {
        let mut s = Scenario::default();
        s.workload.arrival_rate = rate;
        s.fog.proc_capability = v_fog;
        s
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SimScenario::new(Scenario::default(), 1.2, 10.0).is_err());
        assert!(SimScenario::with_warmup(Scenario::default(), 0.5, 10.0, 10.0).is_err());
        assert!(SimScenario::with_warmup(Scenario::default(), 0.5, 10.0, -1.0).is_err());
    }

    #[test]
    fn zero_arrivals_give_zero_metrics() {
        let s = SimScenario::new(scenario(0.0, 100.0), 0.5, 100.0).unwrap();
        let m = simulate(&s, 1).unwrap();
        assert_eq!(m.packets_generated, 0);
        assert_eq!(m.mean_local_sojourn, 0.0);
        assert_eq!(m.mean_forward_latency, 0.0);
        assert_eq!(m.empirical_uplink_throughput, 0.0);
        assert_eq!(m.local_queue_max, 0);
        assert!(!m.unstable);
        assert_eq!(m.mean_fog_power, s.scenario.fog.idle_power);
    }

    #[test]
    fn conservation_and_path_consistency() {
        let s = SimScenario::new(scenario(100.0, 100.0), 0.7, 200.0).unwrap();
        let run = simulate_with_trace(&s, 4).unwrap();
        let m = run.metrics;
        assert_eq!(m.packets_generated, run.packets.len() as u64);
        assert_eq!(
            m.packets_generated,
            m.packets_local + m.packets_forwarded + m.packets_in_flight
        );
        for p in &run.packets {
            assert_eq!(p.important, p.path == PacketPath::Forwarded);
            if let Some(d) = p.departure_time {
                assert!(d >= p.arrival_time);
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let s = SimScenario::new(scenario(100.0, 100.0), 0.5, 100.0).unwrap();
        assert_eq!(
            simulate_with_trace(&s, 11).unwrap(),
            simulate_with_trace(&s, 11).unwrap()
        );
        assert_ne!(simulate(&s, 11).unwrap(), simulate(&s, 12).unwrap());
    }

    #[test]
    fn overload_is_flagged() {
        let s = SimScenario::new(scenario(200.0, 100.0), 1.0, 1000.0).unwrap();
        let m = simulate(&s, 1).unwrap();
        assert!(m.unstable);
        assert!(m.local_queue_max > 10_000);
    }

    #[test]
    fn power_stays_in_band() {
        let s = SimScenario::new(scenario(100.0, 200.0), 0.5, 500.0).unwrap();
        let m = simulate(&s, 2).unwrap();
        let f = &s.scenario.fog;
        let nominal = f.energy_per_bit * 100.0 * 12000.0 * 0.5;
        assert!(m.mean_fog_power >= f.idle_power);
        assert!(m.mean_fog_power <= f.idle_power + nominal * 1.05);
    }

    #[test]
    fn trace_has_one_row_per_packet() {
        let s = SimScenario::new(scenario(20.0, 100.0), 0.5, 10.0).unwrap();
        let run = simulate_with_trace(&s, 3).unwrap();
        let mut buf = Vec::new();
        write_trace(&run.packets, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "id,arrival_time,important,path,departure_time,size_bits"
        );
        assert_eq!(lines.count(), run.packets.len());
    }
}
