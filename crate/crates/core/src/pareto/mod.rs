// SPDX-License-Identifier: Apache-2.0

//! Multiobjective search over the workload split.

mod dominance;
mod nsga2;

pub use dominance::{
    crowding_distance, dominates, dominates_slice, hypervolume, non_dominated_sort, rank_by,
    rank_crowding_cmp,
};
pub use nsga2::{
    brute_force_front, optimize, FrontMember, InfeasibilityPolicy, OptConfig, OptError, OptProblem,
    ParetoFront,
};
