//! Pseudotransitive clustering by forbidden-pattern search.
//!
//! [`find`] splits the live vertices into `h` random windows and tries to
//! embed the gadget one vertex per window ([`searcher`]). A completed
//! embedding is a copy of the gadget, whose edges [`dag_clustering`] deletes.
//! A failed level yields two sets with one-sided density, which become a new
//! cluster chunk.

use rand::seq::{index, SliceRandom};

use crate::bitset::VertexSet;
use crate::error::{config_err, Error, Result};
use crate::fas::{best_of_runs, QuickSortConfig};
use crate::gadget::Gadget;
use crate::graph::Tournament;
use crate::model::Bounds;
use crate::seed::{self, stream, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FindConfig {
    /// Degree threshold: a window vertex must reach `c * |W_i|` neighbours.
    pub c: f64,
    /// Failures past this many embedded vertices are retried once `copy_cap`
    /// copies have been found.
    pub depth: usize,
    /// Copies to find before the depth rule kicks in.
    pub copy_cap: usize,
    /// Window vertices sampled per degree estimate; 0 counts exactly.
    pub sample_size: usize,
    /// Re-partitions allowed per [`find`] call before the depth rule is waived.
    pub max_restarts: usize,
    pub choice: Choice,
}

/// Which qualifying window vertex the searcher embeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// The first one in a random scan.
    First,
    /// The one whose smallest later neighbourhood, relative to its window, is
    /// largest; keeps windows wide so failures happen on large sets.
    Widest,
}

impl FindConfig {
    /// `c = eps * p_m / 4`; the depth rule is off until configured.
    pub fn new(eps: f64, p_m: f64, h: usize) -> Self {
        Self {
            c: 0.25 * eps * p_m,
            depth: h,
            copy_cap: usize::MAX,
            sample_size: 0,
            max_restarts: 20,
            choice: Choice::Widest,
        }
    }

    pub fn validate(&self, h: usize) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(config_err(format!("c = {} must lie in (0, 1)", self.c)));
        }
        if self.depth > h {
            return Err(config_err(format!("depth {} exceeds gadget order {h}", self.depth)));
        }
        if self.copy_cap == 0 {
            return Err(config_err("copy cap must be at least 1"));
        }
        Ok(())
    }
}

/// Which neighbourhood of a window vertex a degree test looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Out,
    In,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FindOutcome {
    /// `vertices[l]` embeds gadget vertex `gadget_order[l]`.
    Copy {
        vertices: Vec<usize>,
        gadget_order: Vec<usize>,
    },
    /// Every `x` in `x` has fewer than `c|y|` neighbours on `side` in `y`.
    Pair {
        x: VertexSet,
        y: VertexSet,
        side: Side,
        level: usize,
    },
}

impl FindOutcome {
    /// All unordered pairs spanned by a copy.
    pub fn copy_pairs(&self) -> Vec<(usize, usize)> {
        match self {
            FindOutcome::Copy { vertices, .. } => {
                let mut pairs = Vec::with_capacity(vertices.len() * vertices.len() / 2);
                for (i, &a) in vertices.iter().enumerate() {
                    for &b in &vertices[i + 1..] {
                        pairs.push((a, b));
                    }
                }
                pairs
            }
            FindOutcome::Pair { .. } => Vec::new(),
        }
    }
}

/// Result of one [`find`] call with the attempts it took.
#[derive(Debug, Clone, PartialEq)]
pub struct FindReport {
    pub outcome: FindOutcome,
    pub restarts: usize,
}

/// Gadget edge direction between levels, precomputed per attempt.
struct Pattern {
    /// `need[j][i]` for `i > j`: side of the level-`j` vertex facing level `i`.
    need: Vec<Vec<Side>>,
    order: Vec<usize>,
}

impl Pattern {
    fn new(gadget: &Tournament, order: Vec<usize>) -> Self {
        let h = order.len();
        let need = (0..h)
            .map(|j| {
                (0..h)
                    .map(|i| {
                        if i > j && gadget.beats(order[i], order[j]) {
                            Side::In
                        } else {
                            Side::Out
                        }
                    })
                    .collect()
            })
            .collect();
        Self { need, order }
    }
}

fn degree(t: &Tournament, v: usize, within: &VertexSet, side: Side) -> usize {
    match side {
        Side::Out => t.out_degree_in(v, within),
        Side::In => t.in_degree_in(v, within),
    }
}

fn neighbours(t: &Tournament, v: usize, within: &VertexSet, side: Side) -> VertexSet {
    match side {
        Side::Out => t.out_neighbors_in(v, within),
        Side::In => t.in_neighbors_in(v, within),
    }
}

fn estimated_degree(
    t: &Tournament,
    v: usize,
    window: &VertexSet,
    members: &[usize],
    side: Side,
    sample: usize,
    rng: &mut Rng,
) -> f64 {
    if sample == 0 || members.len() <= sample {
        return degree(t, v, window, side) as f64;
    }
    let hits = index::sample(rng, members.len(), sample)
        .into_iter()
        .filter(|&k| match side {
            Side::Out => t.beats(v, members[k]),
            Side::In => t.beats(members[k], v),
        })
        .count();
    hits as f64 * members.len() as f64 / sample as f64
}

/// Embeds the gadget levels `embedded.len()..h` into the matching windows,
/// extending the partial embedding `embedded` (one vertex per earlier level).
/// `gadget_order[l]` is the gadget vertex looked for at level `l`.
pub fn searcher(
    t: &Tournament,
    gadget: &Tournament,
    gadget_order: &[usize],
    mut windows: Vec<VertexSet>,
    mut embedded: Vec<usize>,
    cfg: &FindConfig,
    rng: &mut Rng,
) -> Result<FindOutcome> {
    let h = gadget_order.len();
    if windows.len() != h || embedded.len() > h {
        return Err(config_err("searcher needs one window per gadget vertex"));
    }
    let pattern = Pattern::new(gadget, gadget_order.to_vec());
    for level in embedded.len()..h {
        let later = level + 1..h;
        let members: Vec<Vec<usize>> = if cfg.sample_size > 0 {
            later.clone().map(|i| windows[i].to_vec()).collect()
        } else {
            Vec::new()
        };
        let mut candidates = windows[level].to_vec();
        candidates.shuffle(rng);
        // smallest ratio |N_w(i)| / |W_i| over later windows, if w qualifies
        let score = |w: usize, rng: &mut Rng, exact: bool| -> Option<f64> {
            let mut worst = f64::INFINITY;
            for i in later.clone() {
                let window = &windows[i];
                if window.is_empty() {
                    return None;
                }
                let side = pattern.need[level][i];
                let got = if exact {
                    degree(t, w, window, side) as f64
                } else {
                    let m = &members[i - level - 1];
                    estimated_degree(t, w, window, m, side, cfg.sample_size, rng)
                };
                if got < cfg.c * window.len() as f64 {
                    return None;
                }
                worst = worst.min(got / window.len() as f64);
            }
            Some(worst)
        };
        let pick = |rng: &mut Rng, exact: bool| -> Option<usize> {
            match cfg.choice {
                Choice::First => candidates.iter().copied().find(|&w| score(w, rng, exact).is_some()),
                Choice::Widest => {
                    let mut best: Option<(usize, f64)> = None;
                    for &w in &candidates {
                        if let Some(r) = score(w, rng, exact) {
                            if best.is_none_or(|(_, b)| r > b) {
                                best = Some((w, r));
                            }
                        }
                    }
                    best.map(|(w, _)| w)
                }
            }
        };
        let mut chosen = pick(rng, cfg.sample_size == 0);
        if chosen.is_none() {
            let (buckets, side_of) = failure_buckets(t, &windows, &pattern, level, cfg.c);
            let best = buckets
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_empty())
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)));
            match best {
                Some((i_star, bucket)) => {
                    let x = VertexSet::from_iter(t.n(), bucket.iter().copied());
                    return Ok(FindOutcome::Pair {
                        x,
                        y: windows[i_star].clone(),
                        side: side_of[i_star],
                        level,
                    });
                }
                // sampled estimates rejected a vertex that passes exactly
                None => {
                    chosen = pick(rng, true);
                }
            }
        }
        let w = chosen.expect("exact rescan finds the vertex that escaped every bucket");
        for i in later {
            windows[i] = neighbours(t, w, &windows[i], pattern.need[level][i]);
        }
        windows[level] = VertexSet::from_iter(t.n(), [w]);
        embedded.push(w);
    }
    Ok(FindOutcome::Copy {
        vertices: embedded,
        gadget_order: pattern.order,
    })
}

/// Buckets every vertex of `windows[level]` by its first exactly-failing
/// later window. Vertices that fail nowhere are left out.
fn failure_buckets(
    t: &Tournament,
    windows: &[VertexSet],
    pattern: &Pattern,
    level: usize,
    c: f64,
) -> (Vec<Vec<usize>>, Vec<Side>) {
    let h = windows.len();
    let mut buckets = vec![Vec::new(); h];
    let side_of: Vec<Side> = (0..h).map(|i| pattern.need[level][i]).collect();
    for x in &windows[level] {
        let failing = (level + 1..h).find(|&i| {
            let window = &windows[i];
            window.is_empty() || (degree(t, x, window, side_of[i]) as f64) < c * window.len() as f64
        });
        if let Some(i) = failing {
            buckets[i].push(x);
        }
    }
    (buckets, side_of)
}

/// Randomly partitions `alive` into `h` windows of `floor(|alive| / h)`
/// vertices (the surplus sits out this attempt) and runs [`searcher`].
///
/// Once `copies_found >= cfg.copy_cap`, a run that fails after embedding more
/// than `cfg.depth` vertices (where windows have shrunk the most) is discarded
/// and re-partitioned, up to `cfg.max_restarts` times; after that the failing
/// run's pair is accepted.
pub fn find(
    gadget: &Gadget,
    t1: &Tournament,
    alive: &VertexSet,
    cfg: &FindConfig,
    copies_found: usize,
    seed: u64,
) -> Result<FindReport> {
    let h = gadget.h();
    let live = alive.len();
    if live < h || h == 0 {
        return Err(Error::TooSmall { alive: live, h });
    }
    cfg.validate(h)?;
    let mut rng = seed::rng(seed);
    let width = live / h;
    let mut vertices = alive.to_vec();
    let depth_rule = copies_found >= cfg.copy_cap && cfg.depth < h;
    let mut restarts = 0;
    loop {
        vertices.shuffle(&mut rng);
        let windows: Vec<VertexSet> = (0..h)
            .map(|i| VertexSet::from_iter(t1.n(), vertices[i * width..(i + 1) * width].iter().copied()))
            .collect();
        let mut order: Vec<usize> = (0..h).collect();
        order.shuffle(&mut rng);
        let outcome = searcher(t1, &gadget.tournament, &order, windows, Vec::new(), cfg, &mut rng)?;
        let too_deep = matches!(outcome, FindOutcome::Pair { level, .. } if level > cfg.depth);
        if depth_rule && too_deep && restarts < cfg.max_restarts {
            restarts += 1;
            continue;
        }
        return Ok(FindReport { outcome, restarts });
    }
}

/// Disjoint clusters plus the vertices left unclustered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    pub n: usize,
    /// Each cluster sorted ascending.
    pub clusters: Vec<Vec<usize>>,
    /// Sorted ascending.
    pub remainder: Vec<usize>,
}

impl Partitioning {
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut sorted = Vec::with_capacity(clusters.len());
        for mut cluster in clusters {
            cluster.sort_unstable();
            for &v in &cluster {
                if v >= n || seen[v] {
                    return Err(config_err(format!("vertex {v} invalid or in two clusters")));
                }
                seen[v] = true;
            }
            sorted.push(cluster);
        }
        let remainder = (0..n).filter(|&v| !seen[v]).collect();
        Ok(Self {
            n,
            clusters: sorted,
            remainder,
        })
    }

    pub fn clustered(&self) -> usize {
        self.n - self.remainder.len()
    }

    pub fn coverage(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.clustered() as f64 / self.n as f64
        }
    }

    pub fn cluster_of(&self) -> Vec<Option<usize>> {
        let mut of = vec![None; self.n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                of[v] = Some(i);
            }
        }
        of
    }

    pub fn cluster_set(&self, i: usize) -> VertexSet {
        VertexSet::from_iter(self.n, self.clusters[i].iter().copied())
    }
}

#[derive(Debug, Clone)]
pub struct ClusteringConfig {
    pub find: FindConfig,
    /// Ranking runs for the merge test; `None` uses `ceil(log2 |S|)`.
    pub quicksort: Option<QuickSortConfig>,
    /// Hard stop on [`find`] calls.
    pub max_find_runs: usize,
    /// A chunk smaller than this that merges nowhere is handed back to the
    /// live set instead of founding a cluster; 0 founds every such chunk.
    pub min_new_cluster: usize,
    /// Also hand back unplaceable chunks that are not near-transitive
    /// themselves (see [`founding_threshold`]).
    pub founding_test: bool,
    /// Consecutive size hand-backs after which the largest of those chunks
    /// that passes the founding test founds a cluster anyway.
    pub max_rejections: usize,
    /// Consecutive founding-test hand-backs allowed before the test is waived
    /// for one chunk; a regime where pure chunks fail it gives up quickly.
    pub max_founding_rejections: usize,
}

impl ClusteringConfig {
    /// Desk-scale defaults: new clusters need `3h` vertices and a
    /// near-transitive chunk, but only where the merge threshold clears the
    /// intra-domain noise floor (`p_m / 6 + 2 eps p_u > p_u`). Below it a pure
    /// chunk fails both tests, and the rules fall back to
    /// [`ClusteringConfig::strict`].
    pub fn new(eps: f64, bounds: &Bounds, gadget: &Gadget) -> Self {
        let separable = merge_rate(bounds, eps) > bounds.p_u;
        Self {
            find: FindConfig::new(eps, bounds.p_m, gadget.h()),
            quicksort: None,
            max_find_runs: 10_000_000,
            min_new_cluster: if separable { 3 * gadget.h() } else { 0 },
            founding_test: separable,
            max_rejections: 1_000,
            max_founding_rejections: 1_000,
        }
    }

    /// New clusters from every unplaceable chunk, as in the plain algorithm.
    pub fn strict(eps: f64, bounds: &Bounds, gadget: &Gadget) -> Self {
        Self {
            min_new_cluster: 0,
            founding_test: false,
            ..Self::new(eps, bounds, gadget)
        }
    }
}

/// A chunk `Z` added to cluster `cluster` during find run `find_run`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkEvent {
    pub find_run: usize,
    pub cluster: usize,
    pub merged: bool,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusteringStats {
    pub find_runs: usize,
    pub copies_found: usize,
    pub pairs_found: usize,
    pub deleted_pairs: usize,
    pub restarts: usize,
    /// Small unplaceable chunks handed back to the live set.
    pub rejected: usize,
    pub chunks: Vec<ChunkEvent>,
}

impl ClusteringStats {
    /// Clusters as they stood after the first `budget` find runs.
    pub fn clusters_after(&self, n: usize, budget: usize) -> Partitioning {
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for ev in self.chunks.iter().filter(|e| e.find_run < budget) {
            if ev.cluster == clusters.len() {
                clusters.push(Vec::new());
            }
            clusters[ev.cluster].extend_from_slice(&ev.vertices);
        }
        Partitioning::new(n, clusters).expect("chunks are disjoint")
    }
}

/// Backward-edge rate `p_m/6 + 2 eps p_u` allowed per cross pair by the
/// merge test; the same as `(het/6 + 2 eps) p_u`, but finite at `p_u = 0`.
pub fn merge_rate(bounds: &Bounds, eps: f64) -> f64 {
    bounds.p_m / 6.0 + 2.0 * eps * bounds.p_u
}

/// Merge threshold `(het/6 + 2 eps) |Z| |P| p_u`.
pub fn merge_threshold(bounds: &Bounds, eps: f64, z: usize, p: usize) -> f64 {
    merge_rate(bounds, eps) * z as f64 * p as f64
}

/// The merge test applied to a chunk alone: at most
/// `(p_m / 6 + 2 eps p_u) C(|Z|, 2)` backward edges inside `Z`.
pub fn founding_threshold(bounds: &Bounds, eps: f64, z: usize) -> f64 {
    merge_rate(bounds, eps) * (z * z.saturating_sub(1)) as f64 / 2.0
}

fn self_consistent(t: &Tournament, bounds: &Bounds, eps: f64, z: &VertexSet, cfg: &ClusteringConfig, seed: u64) -> bool {
    let qs = cfg.quicksort.unwrap_or_else(|| QuickSortConfig::for_size(z.len()));
    let ranked = best_of_runs(t, z, z, qs, seed::derive(seed, u64::MAX));
    ranked.backward as f64 <= founding_threshold(bounds, eps, z.len())
}

/// Repeatedly finds gadget copies (deleting their edges) or one-sided pairs
/// (turning them into cluster chunks) until fewer than `eps * n` vertices
/// remain live.
pub fn dag_clustering(
    t: &Tournament,
    bounds: &Bounds,
    eps: f64,
    gadget: &Gadget,
    cfg: &ClusteringConfig,
    seed: u64,
) -> Result<(Partitioning, ClusteringStats)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(config_err(format!("eps = {eps} must lie in (0, 1)")));
    }
    let n = t.n();
    let h = gadget.h();
    let mut t1 = t.clone();
    let mut alive = VertexSet::full(n);
    let mut clusters: Vec<VertexSet> = Vec::new();
    let mut stats = ClusteringStats::default();
    let stop = eps * n as f64;
    let find_seed = seed::derive(seed, stream::FIND);
    let merge_seed = seed::derive(seed, stream::MERGE);
    let (mut small, mut unfit, mut best) = (0, 0, None);

    while alive.len() as f64 >= stop {
        if stats.find_runs >= cfg.max_find_runs {
            log::warn!("stopping after {} find runs", stats.find_runs);
            break;
        }
        let run_seed = seed::derive(find_seed, stats.find_runs as u64);
        let report = match find(gadget, &t1, &alive, &cfg.find, stats.copies_found, run_seed) {
            Ok(r) => r,
            Err(Error::TooSmall { .. }) => break,
            Err(e) => return Err(e),
        };
        let find_run = stats.find_runs;
        stats.find_runs += 1;
        stats.restarts += report.restarts;
        match &report.outcome {
            FindOutcome::Copy { vertices, .. } => {
                debug_assert_eq!(vertices.len(), h);
                let pairs = report.outcome.copy_pairs();
                stats.deleted_pairs += t1.delete_pairs_in_place(&pairs)?;
                stats.copies_found += 1;
            }
            FindOutcome::Pair { x, y, .. } => {
                stats.pairs_found += 1;
                let z = x.union(y);
                let z_len = z.len();
                let mut target = None;
                for (i, p) in clusters.iter().enumerate() {
                    let s = z.union(p);
                    let qs = cfg.quicksort.unwrap_or_else(|| QuickSortConfig::for_size(s.len()));
                    let ranked = best_of_runs(t, &s, &s, qs, seed::derive(seed::derive(merge_seed, find_run as u64), i as u64));
                    let back = t.backward_edges(&ranked.ordering, Some((&z, p)))?;
                    if back as f64 <= merge_threshold(bounds, eps, z_len, p.len()) {
                        target = Some(i);
                        break;
                    }
                }
                let mut z = z;
                if target.is_none() {
                    let consistent = |z: &VertexSet| {
                        !cfg.founding_test || self_consistent(t, bounds, eps, z, cfg, seed::derive(merge_seed, find_run as u64))
                    };
                    if z_len < cfg.min_new_cluster {
                        // nothing in the live set changes until a chunk is
                        // accepted, so the best candidate stays valid
                        if best.as_ref().is_none_or(|b: &VertexSet| z_len > b.len()) && consistent(&z) {
                            best = Some(z);
                        }
                        small += 1;
                        stats.rejected += 1;
                        if small < cfg.max_rejections {
                            continue;
                        }
                        match best.take() {
                            Some(b) => z = b,
                            None => continue,
                        }
                    } else if unfit < cfg.max_founding_rejections && !consistent(&z) {
                        unfit += 1;
                        stats.rejected += 1;
                        continue;
                    }
                }
                (small, unfit, best) = (0, 0, None);
                let cluster = match target {
                    Some(i) => {
                        clusters[i].union_with(&z);
                        i
                    }
                    None => {
                        clusters.push(z.clone());
                        clusters.len() - 1
                    }
                };
                stats.chunks.push(ChunkEvent {
                    find_run,
                    cluster,
                    merged: target.is_some(),
                    vertices: z.to_vec(),
                });
                alive.difference_with(&z);
            }
        }
    }
    let partitioning = Partitioning::new(n, clusters.iter().map(VertexSet::to_vec).collect())?;
    Ok((partitioning, stats))
}
