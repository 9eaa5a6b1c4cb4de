//! The full pipeline: cluster, purify, then rank inside each cluster with
//! pivots restricted to nonoutliers.

use rand::Rng as _;

use crate::bitset::VertexSet;
use crate::clustering::{dag_clustering, ClusteringConfig, ClusteringStats, Partitioning};
use crate::error::{config_err, Error, Result};
use crate::fas::{best_of_runs, QuickSortConfig};
use crate::gadget::Gadget;
use crate::graph::{Ordering, Tournament};
use crate::model::Bounds;
use crate::purify::{purify, PurifyConfig};
use crate::seed::{self, stream};

#[derive(Debug, Clone, PartialEq)]
pub struct RankModel {
    pub partitioning: Partitioning,
    /// `orderings[i]` is a permutation of cluster `i`.
    pub orderings: Vec<Ordering>,
    pub nonoutliers: VertexSet,
    cluster_of: Vec<Option<usize>>,
    position: Vec<usize>,
}

impl RankModel {
    pub fn new(partitioning: Partitioning, orderings: Vec<Ordering>, nonoutliers: VertexSet) -> Result<Self> {
        let n = partitioning.n;
        if orderings.len() != partitioning.clusters.len() {
            return Err(config_err("one ordering per cluster required"));
        }
        let cluster_of = partitioning.cluster_of();
        let mut position = vec![usize::MAX; n];
        for (i, o) in orderings.iter().enumerate() {
            if o.len() != partitioning.clusters[i].len() {
                return Err(config_err(format!("ordering {i} is not a permutation of its cluster")));
            }
            for (pos, &v) in o.as_slice().iter().enumerate() {
                if v >= n || cluster_of[v] != Some(i) {
                    return Err(config_err(format!("ordering {i} contains foreign vertex {v}")));
                }
                position[v] = pos;
            }
        }
        if nonoutliers.universe() != n || nonoutliers.iter().any(|v| cluster_of[v].is_none()) {
            return Err(config_err("nonoutliers must be clustered vertices"));
        }
        Ok(Self {
            partitioning,
            orderings,
            nonoutliers,
            cluster_of,
            position,
        })
    }

    pub fn n(&self) -> usize {
        self.partitioning.n
    }

    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        self.cluster_of.get(v).copied().flatten()
    }

    /// Same-cluster pairs in cluster order, `None` otherwise.
    pub fn compare(&self, u: usize, v: usize) -> Option<usize> {
        match (self.cluster_of(u), self.cluster_of(v)) {
            (Some(a), Some(b)) if a == b => Some(if self.position[u] < self.position[v] { u } else { v }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HeteroConfig {
    pub clustering: ClusteringConfig,
    /// `None` skips purification; every clustered vertex is then a pivot.
    pub purify: Option<PurifyConfig>,
    /// Runs of the final per-cluster ranking; `None` uses the size default.
    pub quicksort: Option<QuickSortConfig>,
}

/// Clusters `t`, purifies the clusters against `tc`, and orders each cluster.
pub fn hetero_ranking(
    t: &Tournament,
    tc: Option<&Tournament>,
    bounds: &Bounds,
    eps: f64,
    gadget: &Gadget,
    cfg: &HeteroConfig,
    seed: u64,
) -> Result<(RankModel, ClusteringStats)> {
    let n = t.n();
    let (partitioning, stats) = dag_clustering(
        t,
        bounds,
        eps,
        gadget,
        &cfg.clustering,
        seed::derive(seed, stream::CLUSTERING),
    )?;
    let nonoutliers = match (&cfg.purify, tc) {
        (Some(pc), Some(tc)) => purify(&partitioning, tc, bounds, eps, pc, seed::derive(seed, stream::PURIFY))?,
        (Some(_), None) => return Err(config_err("purification needs an independent tournament")),
        (None, _) => VertexSet::from_iter(n, partitioning.clusters.iter().flatten().copied()),
    };
    let orderings = partitioning
        .clusters
        .iter()
        .enumerate()
        .map(|(i, members)| {
            let scope = VertexSet::from_iter(n, members.iter().copied());
            let pivots = scope.intersection(&nonoutliers);
            let qs = cfg.quicksort.unwrap_or_else(|| QuickSortConfig::for_size(members.len()));
            let run = seed::derive(seed::derive(seed, stream::RANKING), i as u64);
            best_of_runs(t, &scope, &pivots, qs, run).ordering
        })
        .collect();
    Ok((RankModel::new(partitioning, orderings, nonoutliers)?, stats))
}

/// Same-cluster queries follow the cluster order; anything else gets a coin
/// seeded by `seed`.
pub fn answer_query(model: &RankModel, u: usize, v: usize, seed: u64) -> Result<usize> {
    let n = model.n();
    if u == v {
        return Err(Error::InvalidQuery(format!("query ({u}, {u}) compares a vertex with itself")));
    }
    if u >= n || v >= n {
        return Err(Error::InvalidVertex { u, v, n });
    }
    Ok(model.compare(u, v).unwrap_or_else(|| {
        if seed::rng(seed).random_bool(0.5) {
            u
        } else {
            v
        }
    }))
}

/// `N M / (M + m) (1 - 2 eps)^2 (1 - 4 p_u)`: guaranteed correct answers out
/// of `N` queries drawn with intra/cross weights `M`/`m`.
pub fn theorem42_bound(queries: usize, intra_weight: f64, cross_weight: f64, eps: f64, p_u: f64) -> Result<f64> {
    if !(intra_weight + cross_weight > 0.0) {
        return Err(config_err("M + m must be positive"));
    }
    Ok(queries as f64 * intra_weight / (intra_weight + cross_weight)
        * (1.0 - 2.0 * eps).powi(2)
        * (1.0 - 4.0 * p_u))
}
