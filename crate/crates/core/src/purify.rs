//! Outlier removal by directed-triangle density.
//!
//! A vertex that belongs to its cluster's domain sits on few directed
//! triangles inside the cluster; an outlier with near-random edges sits on a
//! constant fraction of `|N+| |N-|` of them.

use rand::Rng as _;

use crate::bitset::VertexSet;
use crate::clustering::Partitioning;
use crate::error::{config_err, Error, Result};
use crate::graph::Tournament;
use crate::model::Bounds;
use crate::seed::{self, stream};

/// How the caller obtains the tournament independent of the clustering input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreshSource {
    /// Draw the model again with a fresh seed.
    Regenerate,
    /// Split each pair's votes in two halves, one tournament per half.
    VoteSplit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurifyConfig {
    /// `s = ceil(a ln n)` samples per vertex.
    pub sample_coefficient: f64,
    /// Count triangles exactly instead of sampling.
    pub exact: bool,
    /// Outlier threshold is `threshold_constant (1 - eps)^2 |P|^2 p_m^2`.
    pub threshold_constant: f64,
    pub fresh: FreshSource,
}

impl Default for PurifyConfig {
    fn default() -> Self {
        Self {
            sample_coefficient: 30.0,
            exact: false,
            threshold_constant: DEFAULT_THRESHOLD_CONSTANT,
            fresh: FreshSource::Regenerate,
        }
    }
}

pub const DEFAULT_THRESHOLD_CONSTANT: f64 = 1.0 / 32.0;

impl PurifyConfig {
    pub fn samples(&self, n: usize) -> Result<usize> {
        if !(self.sample_coefficient > 0.0) {
            return Err(config_err(format!(
                "sample coefficient must be positive, got {}",
                self.sample_coefficient
            )));
        }
        Ok((self.sample_coefficient * (n.max(2) as f64).ln()).ceil() as usize)
    }
}

fn split_neighbourhood(tc: &Tournament, cluster: &VertexSet, v: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if !cluster.contains(v) {
        return Err(Error::InvalidQuery(format!("vertex {v} is not in the cluster")));
    }
    Ok((
        tc.out_neighbors_in(v, cluster).to_vec(),
        tc.in_neighbors_in(v, cluster).to_vec(),
    ))
}

/// Estimates the number of directed triangles `v -> u -> w -> v` inside
/// `cluster` from `s` uniform samples of `(u, w)` in `N+(v) x N-(v)`.
pub fn triangle_estimate(tc: &Tournament, cluster: &VertexSet, v: usize, s: usize, seed: u64) -> Result<f64> {
    if s == 0 {
        return Err(config_err("triangle sample count must be positive"));
    }
    let (out, inn) = split_neighbourhood(tc, cluster, v)?;
    if out.is_empty() || inn.is_empty() {
        return Ok(0.0);
    }
    let mut rng = seed::rng(seed);
    let hits = (0..s)
        .filter(|_| {
            let u = out[rng.random_range(0..out.len())];
            let w = inn[rng.random_range(0..inn.len())];
            tc.beats(u, w)
        })
        .count();
    Ok(hits as f64 / s as f64 * out.len() as f64 * inn.len() as f64)
}

/// Exact count of directed triangles through `v` inside `cluster`.
pub fn exact_triangles(tc: &Tournament, cluster: &VertexSet, v: usize) -> Result<usize> {
    let (out, _) = split_neighbourhood(tc, cluster, v)?;
    let inn = tc.in_neighbors_in(v, cluster);
    Ok(out.iter().map(|&u| tc.out_degree_in(u, &inn)).sum())
}

pub fn outlier_threshold(cfg: &PurifyConfig, cluster_size: usize, eps: f64, p_m: f64) -> f64 {
    let size = cluster_size as f64;
    cfg.threshold_constant * (1.0 - eps).powi(2) * size * size * p_m * p_m
}

/// Keeps every clustered vertex whose triangle score in `tc` stays below the
/// outlier threshold of its cluster.
pub fn purify(
    partitioning: &Partitioning,
    tc: &Tournament,
    bounds: &Bounds,
    eps: f64,
    cfg: &PurifyConfig,
    seed: u64,
) -> Result<VertexSet> {
    if tc.n() != partitioning.n {
        return Err(config_err("fresh tournament and partitioning disagree on n"));
    }
    let s = cfg.samples(tc.n())?;
    let seed = seed::derive(seed, stream::TRIANGLES);
    let mut kept = VertexSet::empty(partitioning.n);
    for (i, members) in partitioning.clusters.iter().enumerate() {
        let cluster = partitioning.cluster_set(i);
        let threshold = outlier_threshold(cfg, members.len(), eps, bounds.p_m);
        for &v in members {
            let score = if cfg.exact {
                exact_triangles(tc, &cluster, v)? as f64
            } else {
                triangle_estimate(tc, &cluster, v, s, seed::derive(seed, v as u64))?
            };
            if score < threshold {
                kept.insert(v);
            }
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_of_transitive_cluster_scores_zero() {
        let t = Tournament::transitive(&[3, 0, 1, 2]);
        let c = VertexSet::full(4);
        assert_eq!(triangle_estimate(&t, &c, 3, 10, 0).unwrap(), 0.0);
        assert_eq!(exact_triangles(&t, &c, 3).unwrap(), 0);
    }

    #[test]
    fn three_cycle_scores_one() {
        let t = Tournament::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = VertexSet::full(3);
        for s in [1, 5, 50] {
            assert_eq!(triangle_estimate(&t, &c, 0, s, 9).unwrap(), 1.0);
        }
        assert_eq!(exact_triangles(&t, &c, 0).unwrap(), 1);
    }

    #[test]
    fn zero_samples_and_foreign_vertex_rejected() {
        let t = Tournament::transitive(&[0, 1, 2]);
        let c = VertexSet::from_iter(3, [0, 1]);
        assert!(triangle_estimate(&t, &c, 0, 0, 0).is_err());
        assert!(triangle_estimate(&t, &c, 2, 4, 0).is_err());
    }

    #[test]
    fn threshold_arithmetic() {
        let cfg = PurifyConfig::default();
        assert!((outlier_threshold(&cfg, 1000, 0.1, 0.5) - 6328.125).abs() < 1e-9);
    }

    #[test]
    fn transitive_cluster_keeps_everyone() {
        let t = Tournament::transitive(&(0..40).collect::<Vec<_>>());
        let p = Partitioning::new(40, vec![(0..40).collect()]).unwrap();
        let b = Bounds { p_u: 0.0, p_m: 0.5, k_u: 1 };
        for exact in [false, true] {
            let cfg = PurifyConfig { exact, ..Default::default() };
            assert_eq!(purify(&p, &t, &b, 0.1, &cfg, 3).unwrap().len(), 40);
        }
    }
}
