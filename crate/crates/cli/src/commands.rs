// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use fogscope_core::flight::{
    self, AircraftKind, AircraftModel, CameraParams, FlightError, CLOUD_ROUND_TRIP_S,
};
use fogscope_core::model::{self, Evaluation, ModelError};
use fogscope_core::pareto::{optimize, OptConfig, OptError, OptProblem};
use fogscope_core::report::{Cell, ResultTable, RunManifest};
use fogscope_core::scenario::{sweep_grid, GridSpec, ScenarioDoc};
use fogscope_core::sim::{simulate_with_trace, write_trace, SimScenario};
use fogscope_core::{load_scenario, ConfigError, PresetCatalog, Scenario};

use crate::{manifest, Artifact, CliError};

/// Mass added by the payload whose power cost the `power` command reports.
pub const PAYLOAD_DELTA_KG: f64 = 0.25;
/// Upper end of the supported airframe mass envelope.
pub const MAX_BASE_MASS_KG: f64 = 3.0;

pub const EVALUATE_COLUMNS: [&str; 7] = [
    "r",
    "B_bps",
    "E_w",
    "D_fog_s",
    "D_cloud_s",
    "D_avg_s",
    "feasible",
];
pub const OPTIMIZE_COLUMNS: [&str; 6] = ["r", "B_bps", "E_w", "D_avg_s", "rank", "crowding"];
pub const SIMULATE_COLUMNS: [&str; 17] = [
    "local_prob",
    "duration_s",
    "warmup_s",
    "mean_local_sojourn_s",
    "mean_forward_latency_s",
    "mean_latency_s",
    "empirical_uplink_bps",
    "mean_fog_power_w",
    "local_queue_max",
    "mean_local_queue_len",
    "unstable",
    "packets_generated",
    "packets_local",
    "packets_forwarded",
    "packets_in_flight",
    "analytic_B_bps",
    "analytic_D_fog_s",
];
pub const FOV_COLUMNS: [&str; 6] = [
    "h_m",
    "v_mps",
    "along_track_m",
    "dwell_s",
    "cloud_feasible_at_1.68s",
    "margin_s",
];
pub const POWER_COLUMNS: [&str; 3] = ["mass_kg", "power_w", "delta_power_plus_250g_w"];

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::TdpExceeded { .. } => CliError::Infeasible(e.to_string()),
            ModelError::InvalidParameter { .. } => CliError::Input(e.to_string()),
        }
    }
}

impl From<FlightError> for CliError {
    fn from(e: FlightError) -> Self {
        match e {
            FlightError::MotorOverload { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<OptError> for CliError {
    fn from(e: OptError) -> Self {
        match e {
            OptError::NoFeasibleSolution => CliError::Optimizer(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    load_scenario(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn stochastic(s: &Scenario) -> bool {
    s.network.noise_sigma > 0.0
}

/// Evaluates with the noisy uplink when the scenario asks for one, which
/// requires a seed.
fn evaluate_at(s: &Scenario, r: f64, seed: Option<u64>) -> Result<Evaluation, CliError> {
    match (stochastic(s), seed) {
        (false, _) => Ok(model::evaluate(s, r)?),
        (true, Some(seed)) => Ok(model::evaluate_stochastic(s, r, seed)?),
        (true, None) => Err(CliError::Input(
            "scenario has noise_sigma > 0; pass --seed".to_owned(),
        )),
    }
}

fn metric_cells(ev: &Evaluation) -> Vec<Cell> {
    vec![
        ev.decision.r.into(),
        ev.throughput_to_cloud.into(),
        ev.fog_energy.into(),
        ev.fog_latency.seconds.into(),
        ev.cloud_latency.into(),
        ev.avg_latency.into(),
    ]
}

pub fn evaluate(scenario: &Path, r: f64, seed: Option<u64>) -> Result<Vec<Artifact>, CliError> {
    let s = read_scenario(scenario)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(CliError::Input(format!("--r must lie in [0, 1], got {r}")));
    }
    let ev = evaluate_at(&s, r, seed)?;
    ev.checked()?;
    let mut t = ResultTable::new(EVALUATE_COLUMNS);
    let mut row = metric_cells(&ev);
    row.push(true.into());
    t.push(row);
    let m = manifest(
        "evaluate",
        Some(s.digest()),
        seed.filter(|_| stochastic(&s)),
    );
    Ok(vec![Artifact::table("evaluate.csv", &m, &t).primary()])
}

/// `steps` evenly spaced values from 0 to 1 inclusive.
pub fn r_grid(steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Input("--r-steps must be >= 2".to_owned()));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| i as f64 / last).collect())
}

fn file_stem_for(field: &str) -> String {
    field
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Infeasible points stay in the table with `feasible = false`.
pub fn sweep(
    scenario: &Path,
    grid: &Path,
    r_steps: usize,
    seed: Option<u64>,
) -> Result<Vec<Artifact>, CliError> {
    let text = read(scenario)?;
    let doc = ScenarioDoc::parse(&text)?;
    let base = doc.resolve()?;
    let spec = GridSpec::parse(&read(grid)?)?;
    if spec.is_empty() {
        return Err(CliError::Input("grid has no points".to_owned()));
    }
    let rs = r_grid(r_steps)?;
    let points = sweep_grid(&doc, &spec)?;
    let axes: Vec<String> = spec.axes.iter().map(|a| a.field.clone()).collect();
    let any_stochastic = points.iter().any(|p| stochastic(&p.scenario));

    let mut columns = vec!["group".to_owned()];
    columns.extend(axes.iter().cloned());
    columns.extend(EVALUATE_COLUMNS.iter().map(|c| c.to_string()));
    let mut table = ResultTable::new(columns);
    let mut per_axis: Vec<ResultTable> = axes
        .iter()
        .map(|a| {
            let mut cols = vec!["group".to_owned(), a.clone()];
            cols.extend(["r", "B_bps", "E_w", "D_avg_s", "feasible"].map(String::from));
            ResultTable::new(cols)
        })
        .collect();

    for p in &points {
        for &r in &rs {
            let ev = evaluate_at(&p.scenario, r, seed)?;
            let mut row: Vec<Cell> = vec![p.index.into()];
            row.extend(p.labels.iter().map(|(_, v)| Cell::from(v.as_str())));
            row.extend(metric_cells(&ev));
            row.push(ev.feasible().into());
            table.push(row);
            for (t, (_, v)) in per_axis.iter_mut().zip(&p.labels) {
                t.push(vec![
                    p.index.into(),
                    v.as_str().into(),
                    r.into(),
                    ev.throughput_to_cloud.into(),
                    ev.fog_energy.into(),
                    ev.avg_latency.into(),
                    ev.feasible().into(),
                ]);
            }
        }
    }

    let m = manifest(
        "sweep",
        Some(base.digest()),
        seed.filter(|_| any_stochastic),
    );
    let mut out = vec![Artifact::table("sweep.csv", &m, &table).primary()];
    for (axis, t) in axes.iter().zip(&per_axis) {
        out.push(Artifact::table(
            format!("sweep_by_{}.csv", file_stem_for(axis)),
            &m,
            t,
        ));
    }
    Ok(out)
}

/// Rank-0 members sorted by throughput, ties broken by `r`. Copies of the
/// same `r` are written once.
pub fn optimize_front(
    scenario: &Path,
    population: usize,
    generations: usize,
    seed: u64,
) -> Result<Vec<Artifact>, CliError> {
    let s = read_scenario(scenario)?;
    let digest = s.digest();
    let cfg = OptConfig {
        population_size: population,
        generations,
        seed,
        ..OptConfig::default()
    };
    let front = optimize(&OptProblem::new(s), &cfg)?;
    let mut rows: Vec<_> = front.rank0().filter(|m| m.feasible).collect();
    rows.sort_by(|a, b| {
        a.objectives
            .throughput_to_cloud
            .total_cmp(&b.objectives.throughput_to_cloud)
            .then(a.r.total_cmp(&b.r))
    });
    rows.dedup_by(|a, b| a.r == b.r);
    let mut t = ResultTable::new(OPTIMIZE_COLUMNS);
    for m in rows {
        t.push(vec![
            m.r.into(),
            m.objectives.throughput_to_cloud.into(),
            m.objectives.fog_energy.into(),
            m.objectives.avg_latency.into(),
            m.rank.into(),
            m.crowding.into(),
        ]);
    }
    let m = manifest("optimize", Some(digest), Some(seed));
    Ok(vec![Artifact::table("optimize.csv", &m, &t).primary()])
}

pub struct SimulateArgs<'a> {
    pub scenario: &'a Path,
    pub local_prob: f64,
    pub duration: f64,
    pub seed: u64,
    pub trace: Option<PathBuf>,
    /// Defaults to 10% of the duration.
    pub warmup: Option<f64>,
}

pub fn simulate(args: &SimulateArgs<'_>) -> Result<Vec<Artifact>, CliError> {
    let s = read_scenario(args.scenario)?;
    let digest = s.digest();
    let invalid = |e: fogscope_core::sim::SimError| CliError::Input(e.to_string());
    let sim = match args.warmup {
        Some(w) => SimScenario::with_warmup(s, args.local_prob, args.duration, w),
        None => SimScenario::new(s, args.local_prob, args.duration),
    }
    .map_err(invalid)?;
    let run = simulate_with_trace(&sim, args.seed).map_err(invalid)?;
    let analytic = model::evaluate(&sim.scenario, sim.local_prob)?;
    let x = &run.metrics;
    let mut t = ResultTable::new(SIMULATE_COLUMNS);
    t.push(vec![
        sim.local_prob.into(),
        sim.duration.into(),
        sim.warmup.into(),
        x.mean_local_sojourn.into(),
        x.mean_forward_latency.into(),
        x.mean_latency().into(),
        x.empirical_uplink_throughput.into(),
        x.mean_fog_power.into(),
        x.local_queue_max.into(),
        x.mean_local_queue_len.into(),
        x.unstable.into(),
        x.packets_generated.into(),
        x.packets_local.into(),
        x.packets_forwarded.into(),
        x.packets_in_flight.into(),
        analytic.throughput_to_cloud.into(),
        analytic.fog_latency.seconds.into(),
    ]);
    let m = manifest("simulate", Some(digest), Some(args.seed));
    let mut out = vec![Artifact::table("simulate.csv", &m, &t).primary()];
    if let Some(path) = &args.trace {
        let mut buf = Vec::new();
        m.write_header(&mut buf)
            .map_err(|e| CliError::Io(e.to_string()))?;
        write_trace(&run.packets, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(Artifact {
            primary: false,
            path: path.clone(),
            contents: String::from_utf8(buf).expect("trace is UTF-8"),
        });
    }
    Ok(out)
}

fn check_positive(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Input(format!(
            "--{name} must list at least one value"
        )));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(CliError::Input(format!(
            "--{name} values must be positive, got {v}"
        )));
    }
    Ok(())
}

/// Rows iterate heights in the outer loop.
pub fn fov(
    heights: &[f64],
    speeds: &[f64],
    camera: CameraParams,
) -> Result<Vec<Artifact>, CliError> {
    check_positive("heights", heights)?;
    check_positive("speeds", speeds)?;
    camera.validate()?;
    let mut t = ResultTable::new(FOV_COLUMNS);
    for &h in heights {
        let along = flight::ground_coverage(&camera, h).along_track;
        for &v in speeds {
            let dwell = flight::dwell_time(&camera, h, v)?;
            let verdict = flight::latency_budget_verdict(dwell, CLOUD_ROUND_TRIP_S);
            t.push(vec![
                h.into(),
                v.into(),
                along.into(),
                dwell.into(),
                verdict.is_feasible().into(),
                verdict.margin().into(),
            ]);
        }
    }
    let m = manifest("fov", None, None);
    Ok(vec![Artifact::table("fov.csv", &m, &t).primary()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    Quad,
    FixedWing,
}

pub struct PowerArgs<'a> {
    pub kind: PowerKind,
    pub mass_min: f64,
    pub mass_max: f64,
    pub step: f64,
    pub motor: &'a str,
    pub efficiency: f64,
    pub wing_area: f64,
    pub drag_coeff: f64,
    pub lift_coeff: f64,
}

/// `mass_min, mass_min + step, …` up to `mass_max`, inclusive within a small
/// tolerance so that decimal steps land on the end point.
pub fn mass_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(min > 0.0 && max <= MAX_BASE_MASS_KG && min <= max) {
        return Err(CliError::Input(format!(
            "mass range [{min}, {max}] must lie within (0, {MAX_BASE_MASS_KG}] kg"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Input("--step must be > 0".to_owned()));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

pub fn power(args: &PowerArgs<'_>) -> Result<Vec<Artifact>, CliError> {
    let masses = mass_grid(args.mass_min, args.mass_max, args.step)?;
    let motor = PresetCatalog.motor(args.motor)?.params;
    let base = match args.kind {
        PowerKind::Quad => AircraftModel::quad_rotor(args.mass_min, motor),
        PowerKind::FixedWing => AircraftModel {
            kind: AircraftKind::FixedWingBimotor {
                wing_area: args.wing_area,
                lift_coeff: args.lift_coeff,
            },
            ..AircraftModel::fixed_wing(args.mass_min, motor, args.wing_area, args.drag_coeff)
        },
    }
    .with_efficiency(args.efficiency);
    let power_at = |mass: f64| -> Result<f64, FlightError> {
        let a = base.with_mass(mass);
        match args.kind {
            PowerKind::Quad => flight::hover_power(&a),
            PowerKind::FixedWing => flight::fixed_wing_level_power(&a),
        }
    };
    let mut t = ResultTable::new(POWER_COLUMNS);
    for m in masses {
        let p = power_at(m)?;
        let loaded = power_at(m + PAYLOAD_DELTA_KG)?;
        t.push(vec![m.into(), p.into(), (loaded - p).into()]);
    }
    let m = manifest("power", None, None);
    Ok(vec![Artifact::table("power.csv", &m, &t).primary()])
}

pub fn presets() -> Result<Vec<Artifact>, CliError> {
    let catalog = PresetCatalog;
    let m: RunManifest = manifest("presets", None, None);
    let doc = serde_json::json!({
        "manifest": m.to_json(),
        "checksum": format!("sha256:{}", catalog.checksum()),
        "catalog": catalog.to_json_value(),
    });
    let mut contents = serde_json::to_string_pretty(&doc).expect("catalog is serializable");
    contents.push('\n');
    Ok(vec![Artifact {
        primary: true,
        path: "presets.json".into(),
        contents,
    }])
}
