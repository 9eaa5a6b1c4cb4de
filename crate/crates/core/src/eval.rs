//! Metrics against a planted groundtruth.

use std::fmt::Write as _;

use crate::bitset::VertexSet;
use crate::clustering::Partitioning;
use crate::error::{Error, Result};
use crate::fas::{best_of_runs, QuickSortConfig};
use crate::graph::{Ordering, Tournament};
use crate::model::GroundTruth;
use crate::ranking::{answer_query, RankModel};
use crate::seed::{self, stream};

fn check_labeled(n: usize, truth: &GroundTruth) -> Result<()> {
    if n > truth.n() {
        return Err(Error::Unlabeled(truth.n()));
    }
    Ok(())
}

/// Per cluster, the share of its largest domain; the minimum over clusters
/// (1 when there are none).
pub fn purity(partitioning: &Partitioning, truth: &GroundTruth) -> Result<(Vec<f64>, f64)> {
    check_labeled(partitioning.n, truth)?;
    let mut per = Vec::with_capacity(partitioning.clusters.len());
    for cluster in &partitioning.clusters {
        let (_, top) = majority_domain(cluster, truth);
        per.push(if cluster.is_empty() { 1.0 } else { top as f64 / cluster.len() as f64 });
    }
    let min = per.iter().copied().fold(1.0, f64::min);
    Ok((per, min))
}

/// Most frequent domain in `cluster` (smallest id on ties) and its count.
pub fn majority_domain(cluster: &[usize], truth: &GroundTruth) -> (usize, usize) {
    let mut counts = vec![0usize; truth.k()];
    for &v in cluster {
        counts[truth.domain(v)] += 1;
    }
    counts
        .iter()
        .enumerate()
        .fold((0, 0), |best, (d, &c)| if c > best.1 { (d, c) } else { best })
}

/// For each domain, the largest share of it held by a single cluster,
/// averaged over domains. Clusters only grow while clustering runs, so this
/// never decreases over a run.
pub fn reconstructed_purity(partitioning: &Partitioning, truth: &GroundTruth) -> Result<f64> {
    check_labeled(partitioning.n, truth)?;
    let k = truth.k();
    let mut best = vec![0usize; k];
    for cluster in &partitioning.clusters {
        let mut counts = vec![0usize; k];
        for &v in cluster {
            counts[truth.domain(v)] += 1;
        }
        for d in 0..k {
            best[d] = best[d].max(counts[d]);
        }
    }
    let sizes = truth.sizes();
    Ok((0..k).map(|d| best[d] as f64 / sizes[d] as f64).sum::<f64>() / k as f64)
}

/// Query error split by kind. Cross queries are scored only when the truth
/// carries a global order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub intra_wrong: usize,
    pub intra_total: usize,
    pub cross_wrong: usize,
    pub cross_total: usize,
    pub cross_scored: bool,
}

impl ErrorReport {
    /// Wrong answers over scored queries.
    pub fn error(&self) -> f64 {
        let (wrong, total) = if self.cross_scored {
            (self.intra_wrong + self.cross_wrong, self.intra_total + self.cross_total)
        } else {
            (self.intra_wrong, self.intra_total)
        };
        if total == 0 {
            0.0
        } else {
            wrong as f64 / total as f64
        }
    }

    pub fn correct(&self) -> usize {
        let scored = if self.cross_scored {
            self.intra_total + self.cross_total
        } else {
            self.intra_total
        };
        scored - self.wrong()
    }

    pub fn wrong(&self) -> usize {
        self.intra_wrong + if self.cross_scored { self.cross_wrong } else { 0 }
    }

    /// Cross-query error even when it is excluded from [`Self::error`].
    pub fn cross_error(&self) -> f64 {
        if self.cross_total == 0 {
            0.0
        } else {
            self.cross_wrong as f64 / self.cross_total as f64
        }
    }
}

fn score(
    truth: &GroundTruth,
    queries: &[(usize, usize)],
    mut answer: impl FnMut(usize, usize, usize) -> Result<usize>,
) -> Result<ErrorReport> {
    let mut r = ErrorReport {
        intra_wrong: 0,
        intra_total: 0,
        cross_wrong: 0,
        cross_total: 0,
        cross_scored: truth.is_global(),
    };
    for (i, &(u, v)) in queries.iter().enumerate() {
        let picked = answer(i, u, v)?;
        let intra = truth.same_domain(u, v);
        let wrong = match truth.prefers(u, v) {
            Some(u_first) => (picked == u) != u_first,
            // no cross-domain truth: count the loss for the separate report
            None => true,
        };
        if intra {
            r.intra_total += 1;
            r.intra_wrong += wrong as usize;
        } else {
            r.cross_total += 1;
            r.cross_wrong += (wrong && r.cross_scored) as usize;
        }
    }
    Ok(r)
}

fn query_seed(seed: u64, i: usize) -> u64 {
    seed::derive(seed::derive(seed, stream::ANSWERS), i as u64)
}

pub fn generalization_error(
    model: &RankModel,
    truth: &GroundTruth,
    queries: &[(usize, usize)],
    seed: u64,
) -> Result<ErrorReport> {
    check_labeled(model.n(), truth)?;
    score(truth, queries, |i, u, v| answer_query(model, u, v, query_seed(seed, i)))
}

/// Answers every query from one best-of-runs QuickSort ordering of all of `t`.
pub fn baseline_global_quicksort(
    t: &Tournament,
    truth: &GroundTruth,
    queries: &[(usize, usize)],
    seed: u64,
) -> Result<(ErrorReport, Ordering)> {
    check_labeled(t.n(), truth)?;
    let all = VertexSet::full(t.n());
    let ordering = best_of_runs(t, &all, &all, QuickSortConfig::for_size(t.n()), seed).ordering;
    let pos = ordering.positions(t.n());
    let report = score(truth, queries, |_, u, v| Ok(if pos[u] < pos[v] { u } else { v }))?;
    Ok((report, ordering))
}

/// Backward edges of `ordering` among same-domain pairs.
pub fn intra_backward_edges(t: &Tournament, truth: &GroundTruth, ordering: &Ordering) -> usize {
    let o = ordering.as_slice();
    let mut count = 0;
    for (i, &a) in o.iter().enumerate() {
        for &b in &o[i + 1..] {
            if truth.same_domain(a, b) && t.beats(b, a) {
                count += 1;
            }
        }
    }
    count
}

/// Inversions in `seq` (counted with a Fenwick tree over values `0..m`).
fn inversions(seq: &[usize], m: usize) -> u64 {
    let mut tree = vec![0u64; m + 1];
    let mut count = 0;
    for (seen, &x) in seq.iter().enumerate() {
        let mut i = x + 1;
        let mut le = 0;
        while i > 0 {
            le += tree[i];
            i &= i - 1;
        }
        count += seen as u64 - le;
        let mut i = x + 1;
        while i <= m {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    count
}

/// Kendall distance of a cluster ordering to its majority domain's order,
/// normalized by the number of pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterKendall {
    pub cluster: usize,
    pub domain: usize,
    /// Majority-domain vertices compared.
    pub size: usize,
    pub distance: f64,
}

pub fn kendall_within_domain(model: &RankModel, truth: &GroundTruth) -> Result<Vec<ClusterKendall>> {
    check_labeled(model.n(), truth)?;
    let mut out = Vec::new();
    for (i, sigma) in model.orderings.iter().enumerate() {
        let (domain, _) = majority_domain(&model.partitioning.clusters[i], truth);
        let ranks: Vec<usize> = sigma
            .as_slice()
            .iter()
            .filter(|&&v| truth.domain(v) == domain)
            .map(|&v| truth.position(v))
            .collect();
        out.push(ClusterKendall {
            cluster: i,
            domain,
            size: ranks.len(),
            distance: normalized_kendall(&ranks),
        });
    }
    Ok(out)
}

/// Inversions of a sequence of distinct ranks over `C(len, 2)`.
pub fn normalized_kendall(ranks: &[usize]) -> f64 {
    let m = ranks.len();
    if m < 2 {
        return 0.0;
    }
    // compress to 0..m
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable();
    let dense: Vec<usize> = ranks.iter().map(|r| sorted.binary_search(r).expect("present")).collect();
    inversions(&dense, m) as f64 / (m * (m - 1) / 2) as f64
}

/// One experiment outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub ratio: f64,
    pub p_succ: f64,
    pub eps_config: f64,
    pub eps_clust: f64,
    pub eps_baseline: f64,
    pub coverage: f64,
    pub min_purity: f64,
    pub clusters: usize,
    pub find_runs: usize,
    pub copies_found: usize,
    pub wall_ms: u64,
}

impl MetricsRow {
    pub const HEADER: &'static str = "seed,n,k,ratio,p_succ,eps_config,eps_clust,eps_baseline,coverage,min_purity,clusters,find_runs,copies_found,wall_ms";

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
            self.seed,
            self.n,
            self.k,
            self.ratio,
            self.p_succ,
            self.eps_config,
            self.eps_clust,
            self.eps_baseline,
            self.coverage,
            self.min_purity,
            self.clusters,
            self.find_runs,
            self.copies_found,
            self.wall_ms
        )
        .expect("writing to a String");
        s
    }
}
