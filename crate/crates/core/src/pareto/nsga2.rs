// SPDX-License-Identifier: Apache-2.0

//! Elitist dominance-based search over the fog fraction `r`.
//!
//! Binary tournament on (rank, crowding), blend crossover, Gaussian mutation
//! scaled to the bound width, and (μ+λ) survival by rank then crowding.
//! Candidates above the TDP bound are ranked below every feasible one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use super::dominance::{crowding_distance, dominates_slice, rank_by, rank_crowding_cmp};
use crate::model::{self, ObjectiveVector};
use crate::scenario::Scenario;

/// BLX-α expansion factor.
const BLEND_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("no sampled workload split satisfies the TDP bound")]
    NoFeasibleSolution,
}

/// How TDP-violating candidates enter the ranking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum InfeasibilityPolicy {
    /// Constrained dominance: feasible beats infeasible, and between two
    /// infeasible candidates the smaller violation wins.
    #[default]
    AlwaysDominated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptProblem {
    pub scenario: Scenario,
    pub lower: f64,
    pub upper: f64,
    pub infeasibility: InfeasibilityPolicy,
}

impl OptProblem {
    /// Searches the full `[0, 1]` range.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            lower: 0.0,
            upper: 1.0,
            infeasibility: InfeasibilityPolicy::default(),
        }
    }

    pub fn with_bounds(scenario: Scenario, lower: f64, upper: f64) -> Result<Self, OptError> {
        let p = Self {
            lower,
            upper,
            ..Self::new(scenario)
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OptError> {
        if !(0.0 <= self.lower && self.lower <= self.upper && self.upper <= 1.0) {
            return Err(OptError::InvalidProblem(format!(
                "bounds [{}, {}] must be a nonempty interval within [0, 1]",
                self.lower, self.upper
            )));
        }
        self.scenario
            .validate()
            .map_err(|e| OptError::InvalidProblem(e.to_string()))
    }

    fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn clamp(&self, r: f64) -> f64 {
        r.clamp(self.lower, self.upper)
    }

    fn evaluate(&self, r: f64) -> Candidate {
        let ev = model::evaluate(&self.scenario, r).expect("r is clamped to the problem bounds");
        Candidate {
            r,
            objectives: ev.objectives(),
            violation: ev.tdp_violation(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the bound width.
    pub mutation_sigma: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 100,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_sigma: 0.05,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<(), OptError> {
        let bad = |msg: &str| Err(OptError::InvalidConfig(msg.to_owned()));
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return bad("population_size must be even and >= 4");
        }
        if self.generations < 1 {
            return bad("generations must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate)
        {
            return bad("crossover_rate and mutation_rate must lie in [0, 1]");
        }
        if !(self.mutation_sigma > 0.0 && self.mutation_sigma.is_finite()) {
            return bad("mutation_sigma must be > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    r: f64,
    objectives: ObjectiveVector,
    violation: f64,
}

impl Candidate {
    fn constrained_dominates(&self, other: &Self) -> bool {
        match (self.violation > 0.0, other.violation > 0.0) {
            (false, true) => true,
            (true, false) => false,
            (true, true) => self.violation < other.violation,
            (false, false) => {
                dominates_slice(&self.objectives.to_array(), &other.objectives.to_array())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontMember {
    pub r: f64,
    pub objectives: ObjectiveVector,
    pub feasible: bool,
    pub rank: usize,
    pub crowding: f64,
}

/// Ranked candidate set ordered by (rank, −crowding).
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub members: Vec<FrontMember>,
}

impl ParetoFront {
    pub fn ranks(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.rank).collect()
    }

    pub fn crowding(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.crowding).collect()
    }

    pub fn rank0(&self) -> impl Iterator<Item = &FrontMember> {
        self.members.iter().filter(|m| m.rank == 0)
    }

    pub fn rank0_objectives(&self) -> Vec<[f64; 3]> {
        self.rank0().map(|m| m.objectives.to_array()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Ranks and crowding for every candidate, crowding computed per front.
fn rank_and_crowd(cands: &[Candidate]) -> (Vec<usize>, Vec<f64>) {
    let ranks = rank_by(cands.len(), |i, j| {
        cands[i].constrained_dominates(&cands[j])
    });
    let mut crowd = vec![0.0; cands.len()];
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    for rank in 0..=max_rank {
        let idx: Vec<usize> = (0..cands.len()).filter(|&i| ranks[i] == rank).collect();
        let pts: Vec<[f64; 3]> = idx
            .iter()
            .map(|&i| cands[i].objectives.to_array())
            .collect();
        for (&i, d) in idx.iter().zip(crowding_distance(&pts)) {
            crowd[i] = d;
        }
    }
    (ranks, crowd)
}

fn build_front(cands: &[Candidate]) -> ParetoFront {
    let (ranks, crowd) = rank_and_crowd(cands);
    let mut members: Vec<FrontMember> = cands
        .iter()
        .enumerate()
        .map(|(i, c)| FrontMember {
            r: c.r,
            objectives: c.objectives,
            feasible: c.violation == 0.0,
            rank: ranks[i],
            crowding: crowd[i],
        })
        .collect();
    members.sort_by(|a, b| {
        rank_crowding_cmp(a.rank, a.crowding, b.rank, b.crowding).then(a.r.total_cmp(&b.r))
    });
    ParetoFront { members }
}

struct Population {
    cands: Vec<Candidate>,
    ranks: Vec<usize>,
    crowd: Vec<f64>,
}

impl Population {
    fn new(cands: Vec<Candidate>) -> Self {
        let (ranks, crowd) = rank_and_crowd(&cands);
        Self {
            cands,
            ranks,
            crowd,
        }
    }

    fn tournament(&self, rng: &mut ChaCha8Rng) -> f64 {
        let a = rng.random_range(0..self.cands.len());
        let b = rng.random_range(0..self.cands.len());
        let winner =
            match rank_crowding_cmp(self.ranks[a], self.crowd[a], self.ranks[b], self.crowd[b]) {
                std::cmp::Ordering::Greater => b,
                _ => a,
            };
        self.cands[winner].r
    }

    /// (μ+λ) survival: whole fronts first, the split front by crowding.
    fn survive(self, size: usize) -> Self {
        let mut order: Vec<usize> = (0..self.cands.len()).collect();
        order.sort_by(|&a, &b| {
            rank_crowding_cmp(self.ranks[a], self.crowd[a], self.ranks[b], self.crowd[b])
                .then(a.cmp(&b))
        });
        let kept: Vec<Candidate> = order
            .into_iter()
            .take(size)
            .map(|i| self.cands[i])
            .collect();
        Self::new(kept)
    }
}

/// Runs the evolutionary search. Deterministic in `(problem, cfg.seed)`.
pub fn optimize(problem: &OptProblem, cfg: &OptConfig) -> Result<ParetoFront, OptError> {
    problem.validate()?;
    cfg.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = problem.width();
    let mutation = Normal::new(0.0, cfg.mutation_sigma * width.max(f64::MIN_POSITIVE))
        .map_err(|e| OptError::InvalidConfig(e.to_string()))?;

    let initial: Vec<Candidate> = (0..cfg.population_size)
        .map(|_| problem.evaluate(problem.lower + width * rng.random::<f64>()))
        .collect();
    let mut pop = Population::new(initial);

    for _ in 0..cfg.generations {
        let mut children = Vec::with_capacity(cfg.population_size);
        while children.len() < cfg.population_size {
            let p1 = pop.tournament(&mut rng);
            let p2 = pop.tournament(&mut rng);
            let (mut c1, mut c2) = if rng.random::<f64>() < cfg.crossover_rate {
                let lo = p1.min(p2);
                let hi = p1.max(p2);
                let spread = BLEND_ALPHA * (hi - lo);
                let span = (hi + spread) - (lo - spread);
                (
                    lo - spread + span * rng.random::<f64>(),
                    lo - spread + span * rng.random::<f64>(),
                )
            } else {
                (p1, p2)
            };
            for c in [&mut c1, &mut c2] {
                if rng.random::<f64>() < cfg.mutation_rate {
                    *c += mutation.sample(&mut rng);
                }
                *c = problem.clamp(*c);
            }
            children.push(problem.evaluate(c1));
            children.push(problem.evaluate(c2));
        }
        let mut combined = pop.cands;
        combined.extend(children);
        pop = Population::new(combined).survive(cfg.population_size);
    }

    if pop.cands.iter().all(|c| c.violation > 0.0) {
        return Err(OptError::NoFeasibleSolution);
    }
    Ok(build_front(&pop.cands))
}

/// Exhaustive evaluation on a regular `r` grid (bounds included), reduced to
/// its exact non-dominated subset. Infeasible grid points are dropped when
/// any feasible one exists.
pub fn brute_force_front(problem: &OptProblem, grid_step: f64) -> Result<ParetoFront, OptError> {
    problem.validate()?;
    let width = problem.width();
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(OptError::InvalidConfig("grid_step must be > 0".to_owned()));
    }
    let steps = (width / grid_step).round() as usize;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|i| problem.lower + i as f64 * grid_step)
        .filter(|r| *r < problem.upper)
        .collect();
    grid.push(problem.upper);

    let cands: Vec<Candidate> = grid.into_iter().map(|r| problem.evaluate(r)).collect();
    let any_feasible = cands.iter().any(|c| c.violation == 0.0);
    let pool: Vec<Candidate> = cands
        .into_iter()
        .filter(|c| !any_feasible || c.violation == 0.0)
        .collect();
    let ranks = rank_by(pool.len(), |i, j| pool[i].constrained_dominates(&pool[j]));
    let front: Vec<Candidate> = pool
        .into_iter()
        .zip(ranks)
        .filter(|(_, rank)| *rank == 0)
        .map(|(c, _)| c)
        .collect();
    Ok(build_front(&front))
}
