// SPDX-License-Identifier: Apache-2.0

//! Pareto dominance primitives for minimisation problems.

use std::cmp::Ordering;

use crate::model::ObjectiveVector;

/// True iff `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    dominates_slice(&a.to_array(), &b.to_array())
}

/// Fast non-dominated sort over an arbitrary dominance relation.
/// Returns one rank per item; rank 0 is the non-dominated set.
pub fn rank_by<F>(n: usize, dominates: F) -> Vec<usize>
where
    F: Fn(usize, usize) -> bool,
{
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(i, j) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(j, i) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut ranks = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    let mut rank = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            ranks[i] = rank;
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        rank += 1;
        current = next;
    }
    ranks
}

/// Non-domination rank of every point.
pub fn non_dominated_sort<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    rank_by(points.len(), |i, j| {
        dominates_slice(points[i].as_ref(), points[j].as_ref())
    })
}

/// Crowding distance within one front. Boundary points of every objective
/// get `f64::INFINITY`; interior points sum the neighbour gap normalised by
/// the objective's range. A zero-range objective contributes nothing.
pub fn crowding_distance<P: AsRef<[f64]>>(front: &[P]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let dims = front[0].as_ref().len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..dims {
        let value = |i: usize| front[i].as_ref()[k];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let lo = value(order[0]);
        let hi = value(order[n - 1]);
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let (prev, mid, next) = (w[0], w[1], w[2]);
            distance[mid] += (value(next) - value(prev)) / range;
        }
    }
    distance
}

/// Dominated hypervolume relative to `reference` (minimisation). Points not
/// strictly better than the reference in every objective contribute nothing.
pub fn hypervolume<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> f64 {
    let inside: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.as_ref().to_vec())
        .filter(|p| p.iter().zip(reference).all(|(x, r)| x < r))
        .collect();
    hv_recursive(inside, reference)
}

fn hv_recursive(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let dims = reference.len();
    if points.is_empty() {
        return 0.0;
    }
    match dims {
        1 => reference[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => hv_2d(&mut points, reference),
        _ => {
            // Slice along the last objective; each slab is the
            // lower-dimensional volume of the points at or below it.
            let last = dims - 1;
            points.sort_by(|a, b| a[last].total_cmp(&b[last]));
            let mut volume = 0.0;
            for i in 0..points.len() {
                let top = points.get(i + 1).map_or(reference[last], |p| p[last]);
                let height = top - points[i][last];
                if height <= 0.0 {
                    continue;
                }
                let slab: Vec<Vec<f64>> = points[..=i].iter().map(|p| p[..last].to_vec()).collect();
                volume += height * hv_recursive(slab, &reference[..last]);
            }
            volume
        }
    }
}

fn hv_2d(points: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut best_y = reference[1];
    for i in 0..points.len() {
        best_y = best_y.min(points[i][1]);
        let next_x = points.get(i + 1).map_or(reference[0], |p| p[0]);
        area += (next_x - points[i][0]) * (reference[1] - best_y);
    }
    area
}

/// Orders by rank, then by descending crowding distance.
pub fn rank_crowding_cmp(rank_a: usize, crowd_a: f64, rank_b: usize, crowd_b: f64) -> Ordering {
    rank_a.cmp(&rank_b).then(crowd_b.total_cmp(&crowd_a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dominance_examples() {
        let v = |a, b, c| ObjectiveVector::new(a, b, c);
        assert!(dominates(&v(1.0, 1.0, 1.0), &v(2.0, 2.0, 2.0)));
        assert!(!dominates(&v(1.0, 3.0, 0.0), &v(3.0, 1.0, 0.0)));
        assert!(!dominates(&v(3.0, 1.0, 0.0), &v(1.0, 3.0, 0.0)));
        assert!(!dominates(&v(1.0, 1.0, 1.0), &v(1.0, 1.0, 1.0)));
    }

    /// Peels non-dominated layers by exhaustive pairwise checks.
    fn peel_layers(points: &[Vec<f64>]) -> Vec<usize> {
        let mut ranks = vec![usize::MAX; points.len()];
        let mut rank = 0;
        while ranks.contains(&usize::MAX) {
            let remaining: Vec<usize> = (0..points.len())
                .filter(|&i| ranks[i] == usize::MAX)
                .collect();
            let layer: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| dominates_slice(&points[j], &points[i]))
                })
                .collect();
            for i in layer {
                ranks[i] = rank;
            }
            rank += 1;
        }
        ranks
    }

    #[test]
    fn sort_examples() {
        let pts = [[1.0, 1.0], [1.0, 2.0], [2.0, 1.0], [2.0, 2.0]];
        assert_eq!(non_dominated_sort(&pts), vec![0, 1, 1, 2]);
        assert_eq!(non_dominated_sort(&[[3.0, 4.0]]), vec![0]);
        assert_eq!(non_dominated_sort(&[[1.0, 1.0]; 5]), vec![0; 5]);
    }

    #[test]
    fn crowding_examples() {
        let d = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        assert_eq!(d, vec![f64::INFINITY, 2.0, f64::INFINITY]);
        assert!(crowding_distance(&[[0.0, 1.0], [1.0, 0.0]])
            .iter()
            .all(|d| d.is_infinite()));
        assert!(crowding_distance::<[f64; 2]>(&[]).is_empty());
        // Second objective constant: only the first contributes.
        let d = crowding_distance(&[[0.0, 5.0], [1.0, 5.0], [4.0, 5.0]]);
        assert_eq!(d[1], 1.0);
    }

    /// Exact hypervolume by inclusion-exclusion over all subsets.
    fn hv_inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
        let n = points.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let members: Vec<&Vec<f64>> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &points[i])
                .collect();
            let mut vol = 1.0;
            for k in 0..reference.len() {
                let corner = members.iter().map(|p| p[k]).fold(f64::MIN, f64::max);
                vol *= (reference[k] - corner).max(0.0);
            }
            let sign = if members.len() % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * vol;
        }
        total
    }

    #[test]
    fn hypervolume_simple_cases() {
        assert_eq!(hypervolume(&[[0.0, 0.0]], &[1.0, 1.0]), 1.0);
        assert_eq!(hypervolume(&[[0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0]), 0.125);
        assert_eq!(hypervolume(&[[1.0, 0.0]], &[1.0, 1.0]), 0.0);
        assert_eq!(hypervolume::<[f64; 3]>(&[], &[1.0, 1.0, 1.0]), 0.0);
        let pts = [[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]];
        assert_eq!(hypervolume(&pts, &[3.0, 3.0]), 6.0);
    }

    proptest! {
        #[test]
        fn sort_matches_layer_peeling(pts in prop::collection::vec(prop::collection::vec(0u8..6, 3), 1..25)) {
            let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
            prop_assert_eq!(non_dominated_sort(&pts), peel_layers(&pts));
        }

        #[test]
        fn dominated_addition_keeps_rank0(
            pts in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 3), 1..20),
            pick in 0usize..20,
            bump in prop::collection::vec(0.0..2.0f64, 3),
        ) {
            let before = non_dominated_sort(&pts);
            let base = &pts[pick % pts.len()];
            let mut extra: Vec<f64> = base.iter().zip(&bump).map(|(x, b)| x + b).collect();
            extra[0] += 0.5;
            let mut with = pts.clone();
            with.push(extra);
            let after = non_dominated_sort(&with);
            for i in 0..pts.len() {
                prop_assert_eq!(before[i] == 0, after[i] == 0);
            }
            prop_assert!(after[pts.len()] > 0);
        }

        #[test]
        fn ranks_invariant_under_objective_scaling(
            pts in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 3), 1..20),
            k in 0usize..3,
            scale in 1e-3..1e3f64,
        ) {
            let scaled: Vec<Vec<f64>> = pts.iter().map(|p| {
                let mut q = p.clone();
                q[k] *= scale;
                q
            }).collect();
            prop_assert_eq!(non_dominated_sort(&pts), non_dominated_sort(&scaled));
        }

        #[test]
        fn hypervolume_matches_inclusion_exclusion(
            pts in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 1..9),
        ) {
            let reference = [1.0, 1.0, 1.0];
            let fast = hypervolume(&pts, &reference);
            let exact = hv_inclusion_exclusion(&pts, &reference);
            prop_assert!((fast - exact).abs() <= 1e-12 * exact.max(1.0), "{} vs {}", fast, exact);
        }

        #[test]
        fn hypervolume_2d_matches_inclusion_exclusion(
            pts in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 1..10),
        ) {
            let reference = [1.0, 1.0];
            let fast = hypervolume(&pts, &reference);
            let exact = hv_inclusion_exclusion(&pts, &reference);
            prop_assert!((fast - exact).abs() <= 1e-12, "{} vs {}", fast, exact);
        }
    }
}
