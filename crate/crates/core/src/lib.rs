// SPDX-License-Identifier: Apache-2.0

//! Feasibility analysis for fog-cloud workload splitting on UAV fleets.
//!
//! - [`model`]: throughput, fog power and latency objectives for a split `r`.
//! - [`pareto`]: dominance tools and the evolutionary front search.
//! - [`sim`]: packet-level discrete-event cross-check of the model.
//! - [`flight`]: camera dwell-time and propulsive power budgets.
//! - [`scenario`]: configuration schema, presets and sweep grids.
//! - [`report`]: result tables and run manifests.

pub mod flight;
pub mod model;
pub mod pareto;
pub mod report;
pub mod scenario;
pub mod sim;

pub use model::{
    CloudParams, DecisionState, Evaluation, FogNodeParams, ModelError, NetworkParams,
    ObjectiveVector, WorkloadParams,
};
pub use pareto::{OptConfig, OptError, OptProblem, ParetoFront};
pub use report::{ResultTable, RunManifest};
pub use scenario::{load_scenario, ConfigError, PresetCatalog, Scenario};
pub use sim::{SimMetrics, SimScenario};
