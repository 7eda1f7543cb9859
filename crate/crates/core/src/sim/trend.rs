// SPDX-License-Identifier: Apache-2.0

//! Side-by-side comparison of the analytic model and the simulator over a
//! grid of workload splits.

use rayon::prelude::*;

use super::{simulate, SimError, SimMetrics, SimScenario};
use crate::model::{self, Evaluation};

#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub r: f64,
    pub analytic: Evaluation,
    pub metrics: SimMetrics,
}

impl TrendRow {
    /// `|empirical − analytic| / analytic` for the uplink throughput; zero
    /// when both vanish.
    pub fn uplink_relative_error(&self) -> f64 {
        let expected = self.analytic.throughput_to_cloud;
        let got = self.metrics.empirical_uplink_throughput;
        if expected == 0.0 {
            if got == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (got - expected).abs() / expected
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
    /// Rank correlation of analytic average latency with the simulated mean
    /// path latency. `None` with fewer than two rows or a constant column.
    pub latency_spearman: Option<f64>,
    /// Rank correlation of the linear fog latency with the simulated local
    /// sojourn time.
    pub fog_latency_spearman: Option<f64>,
}

/// Simulates every `r` in the grid with the same seed and pairs each run with
/// the analytic evaluation. Runs execute in parallel; row order follows
/// `r_grid`.
pub fn trend_compare(s: &SimScenario, r_grid: &[f64], seed: u64) -> Result<TrendTable, SimError> {
    if r_grid.is_empty() {
        return Err(SimError::InvalidParameter {
            field: "r_grid",
            reason: "must be nonempty".to_owned(),
        });
    }
    let rows = r_grid
        .par_iter()
        .map(|&r| {
            let sim = s.with_local_prob(r)?;
            let metrics = simulate(&sim, seed)?;
            let analytic =
                model::evaluate(&s.scenario, r).map_err(|e| SimError::InvalidParameter {
                    field: "r_grid",
                    reason: e.to_string(),
                })?;
            Ok(TrendRow {
                r,
                analytic,
                metrics,
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    let analytic_d: Vec<f64> = rows.iter().map(|r| r.analytic.avg_latency).collect();
    let empirical_d: Vec<f64> = rows.iter().map(|r| r.metrics.mean_latency()).collect();
    let analytic_fog: Vec<f64> = rows
        .iter()
        .map(|r| r.analytic.fog_latency.seconds)
        .collect();
    let sojourn: Vec<f64> = rows.iter().map(|r| r.metrics.mean_local_sojourn).collect();
    Ok(TrendTable {
        latency_spearman: spearman(&analytic_d, &empirical_d),
        fog_latency_spearman: spearman(&analytic_fog, &sojourn),
        rows,
    })
}

/// Fractional ranks with ties sharing their average position.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of the ranks).
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len(), "spearman needs paired samples");
    if a.len() < 2 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        None
    } else {
        Some(cov / (va * vb).sqrt())
    }
}
