// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fogscope_cli::commands::{self, PowerArgs, PowerKind, SimulateArgs};
use fogscope_cli::{emit, out_dir, Artifact, CliError};
use fogscope_core::flight::CameraParams;

/// Fog-cloud workload split and UAV flight budget analysis.
///
/// Output files go to $FOGSCOPE_OUT (default ./fogscope-out); the main
/// table is also printed to stdout.
#[derive(Debug, Parser)]
#[command(name = "fogscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Quad,
    Fixedwing,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Objectives at one workload split.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        /// Fraction of packets processed on the fog node.
        #[arg(long)]
        r: f64,
        /// Needed when the scenario sets noise_sigma > 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Objectives over a scenario grid and an even r grid.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 101)]
        r_steps: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Pareto front of the workload split.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 100)]
        pop: usize,
        #[arg(long, default_value_t = 100)]
        gens: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Packet-level simulation of one workload split.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        local_prob: f64,
        /// Simulated seconds.
        #[arg(long)]
        duration: f64,
        #[arg(long)]
        seed: u64,
        /// Per-packet CSV, relative to the output directory unless absolute.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Seconds excluded from statistics; default 10% of the duration.
        #[arg(long)]
        warmup: Option<f64>,
    },
    /// Camera dwell time against the cloud round trip.
    Fov {
        #[arg(long, value_delimiter = ',', default_value = "10,15,20")]
        heights: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        speeds: Vec<f64>,
        /// Diagonal field of view, degrees.
        #[arg(long, default_value_t = 94.0)]
        dfov: f64,
        #[arg(long, default_value = "3:2", value_parser = parse_aspect)]
        aspect: (f64, f64),
    },
    /// Propulsive power over a mass range, with the cost of 250 g extra.
    Power {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        mass_min: f64,
        #[arg(long)]
        mass_max: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value = "x2212")]
        motor: String,
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        /// Fixed wing only, m².
        #[arg(long, default_value_t = 0.72)]
        wing_area: f64,
        /// Fixed wing only.
        #[arg(long, default_value_t = 0.05)]
        cd: f64,
        /// Fixed wing only.
        #[arg(long, default_value_t = 0.3)]
        cl: f64,
    },
    /// Dump the built-in preset catalog as JSON.
    Presets,
}

fn parse_aspect(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s.split_once(':').ok_or("expected W:H")?;
    let w: f64 = w.trim().parse().map_err(|e| format!("{e}"))?;
    let h: f64 = h.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((w, h))
}

fn run(cmd: Command) -> Result<Vec<Artifact>, CliError> {
    match cmd {
        Command::Evaluate { scenario, r, seed } => commands::evaluate(&scenario, r, seed),
        Command::Sweep {
            scenario,
            grid,
            r_steps,
            seed,
        } => commands::sweep(&scenario, &grid, r_steps, seed),
        Command::Optimize {
            scenario,
            pop,
            gens,
            seed,
        } => commands::optimize_front(&scenario, pop, gens, seed),
        Command::Simulate {
            scenario,
            local_prob,
            duration,
            seed,
            trace,
            warmup,
        } => commands::simulate(&SimulateArgs {
            scenario: &scenario,
            local_prob,
            duration,
            seed,
            trace,
            warmup,
        }),
        Command::Fov {
            heights,
            speeds,
            dfov,
            aspect,
        } => {
            let cam = CameraParams::new(dfov, aspect.0, aspect.1)
                .map_err(|e| CliError::Input(e.to_string()))?;
            commands::fov(&heights, &speeds, cam)
        }
        Command::Power {
            kind,
            mass_min,
            mass_max,
            step,
            motor,
            efficiency,
            wing_area,
            cd,
            cl,
        } => commands::power(&PowerArgs {
            kind: match kind {
                Kind::Quad => PowerKind::Quad,
                Kind::Fixedwing => PowerKind::FixedWing,
            },
            mass_min,
            mass_max,
            step,
            motor: &motor,
            efficiency,
            wing_area,
            drag_coeff: cd,
            lift_coeff: cl,
        }),
        Command::Presets => commands::presets(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        run(cli.command).and_then(|arts| emit(&arts, &out_dir(), std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fogscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
