//! Pivot-restricted QuickSort for the feedback arc set problem on
//! tournaments, plus an exact solver for tiny instances.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::{Ordering, Tournament};
use crate::seed;

/// Cap on the default number of best-of repetitions.
pub const MAX_DEFAULT_RUNS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuickSortConfig {
    pub runs: usize,
}

impl QuickSortConfig {
    /// `ceil(log2 n)` runs, at least one and at most [`MAX_DEFAULT_RUNS`].
    pub fn for_size(n: usize) -> Self {
        let runs = if n <= 1 {
            1
        } else {
            (usize::BITS - (n - 1).leading_zeros()) as usize
        };
        Self {
            runs: runs.clamp(1, MAX_DEFAULT_RUNS),
        }
    }
}

/// One randomized QuickSort pass over `scope`, drawing pivots only from
/// `pivots`. In-neighbours of the pivot go before it, out-neighbours after;
/// deleted pairs pick a side by coin. A branch without any available pivot
/// is shuffled.
pub fn quicksort_rank(t: &Tournament, scope: &VertexSet, pivots: &VertexSet, seed: u64) -> Ordering {
    let mut rng = seed::rng(seed);
    let mut items = scope.to_vec();
    let mut stack = vec![(0, items.len())];
    let mut left = Vec::new();
    let mut right = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo <= 1 {
            continue;
        }
        let branch = &mut items[lo..hi];
        let available = branch.iter().filter(|&&v| pivots.contains(v)).count();
        if available == 0 {
            branch.shuffle(&mut rng);
            continue;
        }
        let pick = rng.random_range(0..available);
        let pivot = *branch
            .iter()
            .filter(|&&v| pivots.contains(v))
            .nth(pick)
            .expect("pick < available");
        left.clear();
        right.clear();
        for &x in branch.iter() {
            if x == pivot {
                continue;
            }
            let before = if t.beats(x, pivot) {
                true
            } else if t.beats(pivot, x) {
                false
            } else {
                rng.random_bool(0.5)
            };
            if before {
                left.push(x);
            } else {
                right.push(x);
            }
        }
        let split = left.len();
        branch[..split].copy_from_slice(&left);
        branch[split] = pivot;
        branch[split + 1..].copy_from_slice(&right);
        stack.push((lo + split + 1, hi));
        stack.push((lo, lo + split));
    }
    Ordering::from_vec_unchecked(items)
}

/// Ordering with its backward-edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranked {
    pub ordering: Ordering,
    pub backward: usize,
}

/// Sub-seed of run `r` in [`best_of_runs`].
pub fn run_seed(seed: u64, run: usize) -> u64 {
    seed::derive(seed, 0x5155_4943_4b00 + run as u64)
}

/// Runs [`quicksort_rank`] `config.runs` times and keeps the ordering with
/// the fewest backward edges (first one on ties).
pub fn best_of_runs(
    t: &Tournament,
    scope: &VertexSet,
    pivots: &VertexSet,
    config: QuickSortConfig,
    seed: u64,
) -> Ranked {
    let mut best: Option<Ranked> = None;
    for run in 0..config.runs.max(1) {
        let ordering = quicksort_rank(t, scope, pivots, run_seed(seed, run));
        let backward = t
            .backward_edges(&ordering, None)
            .expect("plain backward count cannot fail");
        if best.as_ref().is_none_or(|b| backward < b.backward) {
            best = Some(Ranked { ordering, backward });
        }
    }
    best.expect("at least one run")
}

/// Largest scope accepted by [`exact_min_fas`].
pub const EXACT_LIMIT: usize = 10;

/// Minimum number of backward edges over all orderings of `scope`, by
/// dynamic programming over subsets.
pub fn exact_min_fas(t: &Tournament, scope: &VertexSet) -> Result<(usize, Ordering)> {
    let verts = scope.to_vec();
    let m = verts.len();
    if m > EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact_min_fas scope",
            size: m as u64,
            limit: EXACT_LIMIT as u64,
        });
    }
    // beats_mask[i]: local indices j with verts[i] -> verts[j]
    let beats_mask: Vec<u32> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| j != i && t.beats(verts[i], verts[j]))
                .fold(0, |acc, j| acc | 1 << j)
        })
        .collect();
    let full = (1usize << m) - 1;
    let mut cost = vec![usize::MAX; 1 << m];
    let mut last = vec![0u8; 1 << m];
    cost[0] = 0;
    for set in 1..=full {
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = set & !(1 << i);
            // verts[i] placed after every member of prev
            let c = cost[prev] + (beats_mask[i] & prev as u32).count_ones() as usize;
            if c < cost[set] {
                cost[set] = c;
                last[set] = i as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut set = full;
    while set != 0 {
        let i = last[set] as usize;
        order.push(verts[i]);
        set &= !(1 << i);
    }
    order.reverse();
    Ok((cost[full], Ordering::from_vec_unchecked(order)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotational5() -> Tournament {
        Tournament::from_fn(5, |u, v| {
            let d = (v + 5 - u) % 5;
            d == 1 || d == 2
        })
    }

    #[test]
    fn runs_default() {
        assert_eq!(QuickSortConfig::for_size(1).runs, 1);
        assert_eq!(QuickSortConfig::for_size(2).runs, 1);
        assert_eq!(QuickSortConfig::for_size(8).runs, 3);
        assert_eq!(QuickSortConfig::for_size(9).runs, 4);
        assert_eq!(QuickSortConfig::for_size(100_000).runs, MAX_DEFAULT_RUNS);
    }

    #[test]
    fn transitive_input_sorted_exactly() {
        let order = vec![4, 2, 7, 0, 1, 6, 3, 5];
        let t = Tournament::transitive(&order);
        let all = VertexSet::full(8);
        for s in 0..20 {
            let o = quicksort_rank(&t, &all, &all, s);
            assert_eq!(o.as_slice(), order.as_slice());
        }
    }

    #[test]
    fn three_cycle_always_one_backward() {
        let t = Tournament::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let all = VertexSet::full(3);
        for s in 0..20 {
            let o = quicksort_rank(&t, &all, &all, s);
            assert_eq!(t.backward_edges(&o, None).unwrap(), 1);
        }
    }

    #[test]
    fn empty_scope_and_pivot_free_fallback() {
        let t = Tournament::transitive(&[0, 1, 2, 3]);
        assert!(quicksort_rank(&t, &VertexSet::empty(4), &VertexSet::full(4), 0).is_empty());
        let o = quicksort_rank(&t, &VertexSet::full(4), &VertexSet::empty(4), 3);
        let mut sorted = o.into_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
    }

    #[test]
    fn transitive_backbone_pivots_suffice() {
        let t = Tournament::transitive(&(0..12).collect::<Vec<_>>());
        let scope = VertexSet::full(12);
        let pivots = VertexSet::from_iter(12, (0..12).step_by(2));
        for s in 0..10 {
            let o = quicksort_rank(&t, &scope, &pivots, s);
            // odd vertices between consecutive pivots are still forced into place
            assert_eq!(t.backward_edges(&o, None).unwrap(), 0);
        }
    }

    #[test]
    fn single_run_matches_derived_seed() {
        let t = rotational5();
        let all = VertexSet::full(5);
        let best = best_of_runs(&t, &all, &all, QuickSortConfig { runs: 1 }, 77);
        assert_eq!(best.ordering, quicksort_rank(&t, &all, &all, run_seed(77, 0)));
    }

    #[test]
    fn exact_small_cases() {
        let cyc = Tournament::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(exact_min_fas(&cyc, &VertexSet::full(3)).unwrap().0, 1);
        let tr = Tournament::transitive(&[5, 3, 1, 0, 2, 4]);
        let (c, o) = exact_min_fas(&tr, &VertexSet::full(6)).unwrap();
        assert_eq!(c, 0);
        assert_eq!(o.as_slice(), &[5, 3, 1, 0, 2, 4]);
        // every vertex has in-degree 2, so whichever comes first costs 2, and
        // the remaining 4-vertex tournament is not transitive
        let (c, o) = exact_min_fas(&rotational5(), &VertexSet::full(5)).unwrap();
        assert_eq!(c, 3);
        assert_eq!(rotational5().backward_edges(&o, None).unwrap(), 3);
        let big = Tournament::transitive(&(0..11).collect::<Vec<_>>());
        assert!(exact_min_fas(&big, &VertexSet::full(11)).is_err());
    }
}
