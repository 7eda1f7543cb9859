// SPDX-License-Identifier: Apache-2.0

//! Workloads shared by the criterion benches.

use fogscope_core::pareto::{OptConfig, OptProblem};
use fogscope_core::sim::SimScenario;
use fogscope_core::Scenario;

/// Evenly spaced split values covering `[0, 1]`.
pub fn r_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

pub fn optimize_case(population: usize, generations: usize) -> (OptProblem, OptConfig) {
    (
        OptProblem::new(Scenario::default()),
        OptConfig {
            population_size: population,
            generations,
            seed: 42,
            ..OptConfig::default()
        },
    )
}

/// Default scenario at `r = 0.5` for `duration` simulated seconds.
pub fn simulate_case(duration: f64) -> SimScenario {
    SimScenario::new(Scenario::default(), 0.5, duration).expect("default scenario is valid")
}

/// Points on the plane `x + y + z = 1`, mutually non-dominated.
pub fn simplex_front(n: usize) -> Vec<[f64; 3]> {
    let side = (n as f64).sqrt().ceil() as usize;
    let mut pts = Vec::with_capacity(n);
    'outer: for i in 0..side {
        for j in 0..side {
            if pts.len() == n {
                break 'outer;
            }
            let x = i as f64 / side as f64;
            let y = (1.0 - x) * j as f64 / side as f64;
            pts.push([x, y, 1.0 - x - y]);
        }
    }
    pts
}
