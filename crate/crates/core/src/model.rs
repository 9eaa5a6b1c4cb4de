//! Generators for planted-partition and majority-voting preference
//! tournaments, together with the closed-form parameter bounds that come with
//! them.

use rand::seq::SliceRandom;
use rand::{Rng as _, RngCore};
use rand_distr::{Binomial, Distribution, Hypergeometric, Poisson};
use statrs::distribution::{Binomial as BinomialPmf, Discrete};

use crate::error::{config_err, Error, Result};
use crate::graph::Tournament;
use crate::seed::{self, stream};

/// Published model parameters: `p_u` bounds every intra flip probability from
/// above, `p_m` bounds every cross probability away from 0 and 1, `k_u`
/// bounds the number of domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub p_u: f64,
    pub p_m: f64,
    pub k_u: usize,
}

impl Bounds {
    /// Heterogeneity level `p_m / p_u` (infinite when `p_u = 0`).
    pub fn het(&self) -> f64 {
        if self.p_u == 0.0 {
            f64::INFINITY
        } else {
            self.p_m / self.p_u
        }
    }
}

/// How vertex ids are assigned to domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    /// Domain `i` is a contiguous id block in canonical order.
    Contiguous,
    /// Ids are shuffled across domains and within canonical orders.
    Shuffled { seed: u64 },
}

/// Planted domains and their canonical orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    orderings: Vec<Vec<usize>>,
    domain_of: Vec<usize>,
    position_of: Vec<usize>,
    /// True when the concatenation of the canonical orders is a global
    /// groundtruth ranking (majority-voting model).
    global: bool,
}

impl GroundTruth {
    pub fn from_orderings(orderings: Vec<Vec<usize>>, global: bool) -> Result<Self> {
        let n: usize = orderings.iter().map(Vec::len).sum();
        let mut domain_of = vec![usize::MAX; n];
        let mut position_of = vec![usize::MAX; n];
        for (d, order) in orderings.iter().enumerate() {
            for (pos, &v) in order.iter().enumerate() {
                if v >= n || domain_of[v] != usize::MAX {
                    return Err(config_err(format!(
                        "domain orderings must partition 0..{n}; vertex {v} is invalid or repeated"
                    )));
                }
                domain_of[v] = d;
                position_of[v] = pos;
            }
        }
        Ok(Self {
            orderings,
            domain_of,
            position_of,
            global,
        })
    }

    pub fn with_layout(sizes: &[usize], layout: Layout, global: bool) -> Result<Self> {
        if sizes.is_empty() {
            return Err(config_err("at least one domain is required"));
        }
        let n: usize = sizes.iter().sum();
        let mut ids: Vec<usize> = (0..n).collect();
        if let Layout::Shuffled { seed } = layout {
            ids.shuffle(&mut seed::rng(seed::derive(seed, stream::LAYOUT)));
        }
        let mut orderings = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in sizes {
            orderings.push(ids[start..start + size].to_vec());
            start += size;
        }
        Self::from_orderings(orderings, global)
    }

    pub fn n(&self) -> usize {
        self.domain_of.len()
    }

    pub fn k(&self) -> usize {
        self.orderings.len()
    }

    pub fn is_global(&self) -> bool {
        self.global
    }

    pub fn domain(&self, v: usize) -> usize {
        self.domain_of[v]
    }

    pub fn position(&self, v: usize) -> usize {
        self.position_of[v]
    }

    pub fn canonical(&self, domain: usize) -> &[usize] {
        &self.orderings[domain]
    }

    pub fn orderings(&self) -> &[Vec<usize>] {
        &self.orderings
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orderings.iter().map(Vec::len).collect()
    }

    pub fn same_domain(&self, u: usize, v: usize) -> bool {
        self.domain_of[u] == self.domain_of[v]
    }

    /// Whether `u` is ranked above `v`. Cross-domain pairs only have an answer
    /// when a global ranking exists.
    pub fn prefers(&self, u: usize, v: usize) -> Option<bool> {
        let (du, dv) = (self.domain_of[u], self.domain_of[v]);
        if du == dv {
            Some(self.position_of[u] < self.position_of[v])
        } else if self.global {
            Some(du < dv)
        } else {
            None
        }
    }

    /// The global ranking: domain canonical orders concatenated.
    pub fn global_order(&self) -> Vec<usize> {
        self.orderings.iter().flatten().copied().collect()
    }
}

/// Directed planted-partition model.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub truth: GroundTruth,
    /// Per-domain probability that an intra pair points against the canonical order.
    pub p_intra: Vec<f64>,
    /// `p_cross[i][j]`: probability of `u -> v` for `u` in domain `i`, `v` in `j`.
    pub p_cross: Vec<Vec<f64>>,
    pub bounds: Bounds,
}

impl PlantedSpec {
    /// Every intra flip probability equals `p_intra`; cross pairs between
    /// domains `i < j` point from `i` to `j` with probability `p_cross`.
    /// Bounds are the tightest valid ones with `k_u = k`.
    pub fn uniform(sizes: &[usize], p_intra: f64, p_cross: f64, layout: Layout) -> Result<Self> {
        let truth = GroundTruth::with_layout(sizes, layout, false)?;
        let k = sizes.len();
        let mut cross = vec![vec![0.5; k]; k];
        for (i, row) in cross.iter_mut().enumerate() {
            for (j, p) in row.iter_mut().enumerate() {
                if i < j {
                    *p = p_cross;
                } else if i > j {
                    *p = 1.0 - p_cross;
                }
            }
        }
        let p_m = if k > 1 { p_cross.min(1.0 - p_cross) } else { 0.5 };
        let spec = Self {
            truth,
            p_intra: vec![p_intra; k],
            p_cross: cross,
            bounds: Bounds {
                p_u: p_intra,
                p_m,
                k_u: k,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.truth.k()
    }

    pub fn n(&self) -> usize {
        self.truth.n()
    }

    /// Full check, including the heterogeneity requirement `p_m > p_u`.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if self.bounds.p_m <= self.bounds.p_u {
            return Err(config_err(format!(
                "p_m ({}) must exceed p_u ({})",
                self.bounds.p_m, self.bounds.p_u
            )));
        }
        Ok(())
    }

    /// Probability tables consistent with each other and with the bounds;
    /// enough to sample from. Degenerate bounds such as `p_m = 0` pass.
    pub fn validate_structure(&self) -> Result<()> {
        let k = self.k();
        let b = &self.bounds;
        if self.p_intra.len() != k || self.p_cross.len() != k {
            return Err(config_err("probability tables do not match the domain count"));
        }
        if self.truth.sizes().iter().any(|&s| s < 2) {
            return Err(config_err("every domain needs at least two vertices"));
        }
        if !(0.0..=1.0).contains(&b.p_u) || !(0.0..=0.5).contains(&b.p_m) {
            return Err(config_err("bounds must satisfy 0 <= p_u <= 1, 0 <= p_m <= 1/2"));
        }
        if k > b.k_u {
            return Err(config_err(format!("k = {k} exceeds k_u = {}", b.k_u)));
        }
        for (i, &p) in self.p_intra.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || p > b.p_u {
                return Err(config_err(format!("p_{i} = {p} violates p_u = {}", b.p_u)));
            }
        }
        for i in 0..k {
            if self.p_cross[i].len() != k {
                return Err(config_err("cross probability table must be k x k"));
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                let p = self.p_cross[i][j];
                if (p + self.p_cross[j][i] - 1.0).abs() > 1e-12 {
                    return Err(config_err(format!("p_({i},{j}) + p_({j},{i}) must be 1")));
                }
                if p < b.p_m - 1e-12 || p > 1.0 - b.p_m + 1e-12 {
                    return Err(config_err(format!(
                        "p_({i},{j}) = {p} outside [p_m, 1 - p_m]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draws a planted-partition tournament. Pairs are visited in `(u, v)`,
/// `u < v` order so the output is a pure function of `(spec, seed)`.
pub fn generate_planted(spec: &PlantedSpec, seed: u64) -> Result<(Tournament, GroundTruth)> {
    spec.validate_structure()?;
    if spec.bounds.p_m <= spec.bounds.p_u {
        log::warn!("p_m = {} does not exceed p_u = {}", spec.bounds.p_m, spec.bounds.p_u);
    }
    let truth = &spec.truth;
    let mut rng = seed::rng(seed::derive(seed, stream::EDGES));
    let t = Tournament::from_fn(truth.n(), |u, v| {
        let (du, dv) = (truth.domain(u), truth.domain(v));
        let draw: f64 = rng.random();
        if du == dv {
            let u_first = truth.position(u) < truth.position(v);
            let flipped = draw < spec.p_intra[du];
            u_first != flipped
        } else {
            draw < spec.p_cross[du][dv]
        }
    });
    Ok((t, truth.clone()))
}

/// How per-pair vote counts are realised from the expected counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoteRealization {
    /// Exactly `M` votes per intra pair and `m` per cross pair.
    Fixed,
    /// Poisson counts with means `M` and `m`.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VotingConfig {
    /// Probability that a single vote contradicts the groundtruth.
    pub p_mis: f64,
    /// `M`: votes per intra-domain pair.
    pub intra_votes: u32,
    /// `m`: votes per cross-domain pair.
    pub cross_votes: u32,
    pub realization: VoteRealization,
}

impl VotingConfig {
    /// Cross vote count is `round(ratio * intra_votes)`.
    pub fn from_ratio(p_succ: f64, intra_votes: u32, ratio: f64) -> Result<Self> {
        let cfg = Self {
            p_mis: 1.0 - p_succ,
            intra_votes,
            cross_votes: (ratio * intra_votes as f64).round() as u32,
            realization: VoteRealization::Fixed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn p_succ(&self) -> f64 {
        1.0 - self.p_mis
    }

    pub fn ratio(&self) -> f64 {
        self.cross_votes as f64 / self.intra_votes as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.p_mis) {
            return Err(config_err(format!("p_mis = {} must lie in [0, 1/2)", self.p_mis)));
        }
        if self.intra_votes <= self.cross_votes {
            return Err(config_err("intra votes M must exceed cross votes m"));
        }
        Ok(())
    }
}

/// Per-pair vote counts, indexed by the pair `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteTallies {
    n: usize,
    /// Votes saying `u -> v`.
    forward: Vec<u32>,
    total: Vec<u32>,
}

#[inline]
pub(crate) fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

impl VoteTallies {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `(votes for u -> v, total votes)` for `u < v`.
    pub fn get(&self, u: usize, v: usize) -> (u32, u32) {
        let i = pair_index(self.n, u, v);
        (self.forward[i], self.total[i])
    }

    /// Majority tournament; ties and vote-less pairs fall to a fair coin.
    pub fn majority(&self, seed: u64) -> Tournament {
        let mut rng = seed::rng(seed::derive(seed, stream::TIES));
        let mut idx = 0;
        Tournament::from_fn(self.n, |_, _| {
            let (f, t) = (self.forward[idx], self.total[idx]);
            idx += 1;
            match (2 * f).cmp(&t) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => rng.random_bool(0.5),
            }
        })
    }

    /// Splits each pair's votes uniformly at random into two halves of sizes
    /// `ceil(K/2)` and `floor(K/2)`.
    pub fn split(&self, seed: u64) -> (VoteTallies, VoteTallies) {
        let mut rng = seed::rng(seed::derive(seed, stream::SPLIT));
        let mut a = self.clone();
        let mut b = self.clone();
        for i in 0..self.total.len() {
            let (f, t) = (self.forward[i], self.total[i]);
            let first = t.div_ceil(2);
            let f_first = if t == 0 {
                0
            } else {
                Hypergeometric::new(t as u64, f as u64, first as u64)
                    .expect("valid hypergeometric parameters")
                    .sample(&mut rng) as u32
            };
            a.forward[i] = f_first;
            a.total[i] = first;
            b.forward[i] = f - f_first;
            b.total[i] = t - first;
        }
        (a, b)
    }
}

/// Draws votes for every pair and returns the majority tournament together
/// with the tallies. `truth` must carry a global ranking.
pub fn generate_voting(
    config: &VotingConfig,
    truth: &GroundTruth,
    seed: u64,
) -> Result<(Tournament, VoteTallies)> {
    let tallies = draw_votes(config, truth, seed)?;
    let t = tallies.majority(seed);
    Ok((t, tallies))
}

pub fn draw_votes(config: &VotingConfig, truth: &GroundTruth, seed: u64) -> Result<VoteTallies> {
    config.validate()?;
    if !truth.is_global() {
        return Err(config_err("majority voting needs a global groundtruth ranking"));
    }
    let n = truth.n();
    let pairs = n * n.saturating_sub(1) / 2;
    let mut rng = seed::rng(seed::derive(seed, stream::VOTES));
    let mut forward = Vec::with_capacity(pairs);
    let mut total = Vec::with_capacity(pairs);
    let intra_pois = Poisson::new(config.intra_votes.max(1) as f64).ok();
    let cross_pois = Poisson::new(config.cross_votes as f64).ok();
    for u in 0..n {
        for v in (u + 1)..n {
            let intra = truth.same_domain(u, v);
            let k = match config.realization {
                VoteRealization::Fixed => {
                    if intra {
                        config.intra_votes
                    } else {
                        config.cross_votes
                    }
                }
                VoteRealization::Poisson => {
                    let dist = if intra { intra_pois } else { cross_pois };
                    dist.map(|d| d.sample(&mut rng) as u32).unwrap_or(0)
                }
            };
            let correct = if k == 0 {
                0
            } else {
                Binomial::new(k as u64, config.p_succ())
                    .expect("valid binomial parameters")
                    .sample(&mut rng) as u32
            };
            let u_first = truth.prefers(u, v).expect("global ranking");
            forward.push(if u_first { correct } else { k - correct });
            total.push(k);
        }
    }
    Ok(VoteTallies { n, forward, total })
}

/// Probability that the majority of `k` votes is wrong when each vote errs
/// independently with probability `p_mis`; ties count one half.
pub fn majority_error(k: u32, p_mis: f64) -> f64 {
    if k == 0 {
        return 0.5;
    }
    let dist = BinomialPmf::new(p_mis, k as u64).expect("p_mis in [0, 1]");
    let mut p = 0.0;
    for wrong in 0..=k as u64 {
        let twice = 2 * wrong;
        if twice > k as u64 {
            p += dist.pmf(wrong);
        } else if twice == k as u64 {
            p += 0.5 * dist.pmf(wrong);
        }
    }
    p
}

fn poisson_mixture(mean: u32, p_mis: f64) -> f64 {
    if mean == 0 {
        return 0.5;
    }
    let lambda = mean as f64;
    let upper = (lambda + 12.0 * lambda.sqrt() + 20.0) as u32;
    let mut weight = (-lambda).exp();
    let mut p = weight * majority_error(0, p_mis);
    for k in 1..=upper {
        weight *= lambda / k as f64;
        p += weight * majority_error(k, p_mis);
    }
    p
}

/// `(p_u, p_m)` implied by a voting configuration using exact binomial tails.
///
/// Fixed counts: `p_u` is the majority error at `M` votes, `p_m` the smallest
/// majority error over `0..=m` votes. Poisson counts average the same
/// quantities over the count distribution.
pub fn derive_bounds(config: &VotingConfig) -> Result<(f64, f64)> {
    config.validate()?;
    Ok(match config.realization {
        VoteRealization::Fixed => {
            let p_u = majority_error(config.intra_votes, config.p_mis);
            let p_m = (0..=config.cross_votes)
                .map(|k| majority_error(k, config.p_mis))
                .fold(0.5, f64::min);
            (p_u, p_m)
        }
        VoteRealization::Poisson => (
            poisson_mixture(config.intra_votes, config.p_mis),
            poisson_mixture(config.cross_votes, config.p_mis),
        ),
    })
}

/// Chernoff upper bound `exp(-d^2/(2+d) * K * p_succ)` with `d = 1/2 - p_mis`
/// on the probability that `K` votes produce a wrong majority.
pub fn chernoff_mistake_bound(votes: u32, p_mis: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p_mis) {
        return Err(Error::Domain(format!("p_mis = {p_mis} must lie in [0, 1/2)")));
    }
    if votes == 0 {
        return Err(Error::Domain("at least one vote is required".into()));
    }
    let delta = 0.5 - p_mis;
    let p_succ = 1.0 - p_mis;
    Ok((-(delta * delta) / (2.0 + delta) * votes as f64 * p_succ).exp())
}

/// High-probability cap on the number of bad (intra, inverted) edges:
/// `(1 + d) * S / 2` where `S = sum n_i^2 p_i (1 - 1/n_i)` and
/// `d = max(2, 4 ln g / S)`.
pub fn bad_edge_bound(sizes: &[usize], p_intra: &[f64], g: f64) -> Result<f64> {
    if sizes.len() != p_intra.len() {
        return Err(config_err("sizes and probabilities differ in length"));
    }
    if g <= 0.0 {
        return Err(config_err("g(n) must be positive"));
    }
    let s: f64 = sizes
        .iter()
        .zip(p_intra)
        .map(|(&ni, &pi)| {
            let ni = ni as f64;
            ni * ni * pi * (1.0 - 1.0 / ni)
        })
        .sum();
    if s == 0.0 {
        return Ok(0.0);
    }
    let delta = f64::max(2.0, 4.0 * g.ln() / s);
    Ok((1.0 + delta) * s / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Theory-regime conditions for the clustering and query guarantees. Purely
/// advisory; the algorithms run regardless.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionReport {
    pub checks: Vec<Check>,
}

impl PreconditionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn validate_preconditions(
    domain_sizes: &[usize],
    bounds: &Bounds,
    h: usize,
    eps: f64,
) -> PreconditionReport {
    let het = bounds.het();
    let k_u = bounds.k_u as f64;
    let h_f = h as f64;
    let lower = 2.0 * h_f * (3.0 * k_u * h_f / het).sqrt();
    let upper = (1.0 / k_u).min(bounds.p_m / 4.0);
    let ranking_cap = bounds.p_m * (bounds.p_m / 128.0 - 4.0 / het);
    let checks = vec![
        Check {
            name: "het",
            passed: het >= 12.0,
            detail: format!("het = {het:.4} (need >= 12)"),
        },
        Check {
            name: "eps_lower",
            passed: lower <= eps,
            detail: format!("2h*sqrt(3 k_u h / het) = {lower:.4} vs eps = {eps}"),
        },
        Check {
            name: "eps_upper",
            passed: eps <= upper,
            detail: format!("min(1/k_u, p_m/4) = {upper:.4} vs eps = {eps}"),
        },
        Check {
            name: "domain_sizes",
            passed: domain_sizes.iter().all(|&s| s >= 2),
            detail: format!("min domain size = {}", domain_sizes.iter().min().unwrap_or(&0)),
        },
        Check {
            name: "eps_ranking",
            passed: eps <= ranking_cap,
            detail: format!("p_m (p_m/128 - 4/het) = {ranking_cap:.5} vs eps = {eps}"),
        },
    ];
    for c in checks.iter().filter(|c| !c.passed) {
        log::warn!("precondition {} not met: {}", c.name, c.detail);
    }
    PreconditionReport { checks }
}

/// Query/training pair distribution: intra pairs weigh `intra_weight`, cross
/// pairs `cross_weight`, uniformly within each class.
pub fn sample_queries(
    truth: &GroundTruth,
    intra_weight: f64,
    cross_weight: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    if count == 0 {
        return Err(config_err("at least one query is required"));
    }
    let sizes = truth.sizes();
    let intra_pairs: Vec<f64> = sizes.iter().map(|&s| (s * (s - 1) / 2) as f64).collect();
    let total_intra: f64 = intra_pairs.iter().sum();
    let mut cross_blocks = Vec::new();
    for i in 0..sizes.len() {
        for j in (i + 1)..sizes.len() {
            cross_blocks.push((i, j, (sizes[i] * sizes[j]) as f64));
        }
    }
    let total_cross: f64 = cross_blocks.iter().map(|b| b.2).sum();
    let w_intra = intra_weight * total_intra;
    let w_cross = cross_weight * total_cross;
    if w_intra + w_cross <= 0.0 {
        return Err(config_err("query weights leave no pair with positive mass"));
    }
    let p_intra = w_intra / (w_intra + w_cross);
    let mut rng = seed::rng(seed::derive(seed, stream::QUERIES));
    let pick = |rng: &mut seed::Rng, weights: &mut dyn Iterator<Item = f64>, total: f64| {
        let mut target = rng.random::<f64>() * total;
        let mut last = 0;
        for (i, w) in weights.enumerate() {
            last = i;
            if target < w {
                return i;
            }
            target -= w;
        }
        last
    };
    let mut queries = Vec::with_capacity(count);
    for _ in 0..count {
        if rng.random::<f64>() < p_intra {
            let d = pick(&mut rng, &mut intra_pairs.iter().copied(), total_intra);
            let order = truth.canonical(d);
            let a = rng.random_range(0..order.len());
            let mut b = rng.random_range(0..order.len() - 1);
            if b >= a {
                b += 1;
            }
            queries.push((order[a], order[b]));
        } else {
            let idx = pick(&mut rng, &mut cross_blocks.iter().map(|b| b.2), total_cross);
            let (i, j, _) = cross_blocks[idx];
            let u = truth.canonical(i)[rng.random_range(0..sizes[i])];
            let v = truth.canonical(j)[rng.random_range(0..sizes[j])];
            if rng.next_u32() & 1 == 0 {
                queries.push((u, v));
            } else {
                queries.push((v, u));
            }
        }
    }
    Ok(queries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Ordering;

    #[test]
    fn zero_flip_single_domain_is_transitive() {
        let spec = PlantedSpec::uniform(&[40], 0.0, 0.5, Layout::Shuffled { seed: 3 }).unwrap();
        let (t, truth) = generate_planted(&spec, 11).unwrap();
        let order = Ordering::new(truth.canonical(0).to_vec()).unwrap();
        assert_eq!(t.backward_edges(&order, None).unwrap(), 0);
    }

    #[test]
    fn degenerate_cross_probability() {
        let spec = PlantedSpec {
            p_cross: vec![vec![0.5, 1.0], vec![0.0, 0.5]],
            bounds: Bounds { p_u: 0.1, p_m: 0.0, k_u: 2 },
            ..PlantedSpec::uniform(&[5, 6], 0.1, 0.3, Layout::Contiguous).unwrap()
        };
        let (t, truth) = generate_planted(&spec, 5).unwrap();
        for &u in truth.canonical(0) {
            for &v in truth.canonical(1) {
                assert!(t.beats(u, v));
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(PlantedSpec::uniform(&[1, 5], 0.1, 0.5, Layout::Contiguous).is_err());
        assert!(PlantedSpec::uniform(&[5, 5], 0.6, 0.5, Layout::Contiguous).is_err());
        let mut spec = PlantedSpec::uniform(&[5, 5], 0.1, 0.5, Layout::Contiguous).unwrap();
        spec.p_intra[0] = 0.2;
        assert!(matches!(generate_planted(&spec, 1), Err(Error::Config(_))));
    }

    #[test]
    fn planted_is_seed_deterministic() {
        let spec = PlantedSpec::uniform(&[30, 30], 0.05, 0.5, Layout::Shuffled { seed: 1 }).unwrap();
        assert_eq!(generate_planted(&spec, 9).unwrap().0, generate_planted(&spec, 9).unwrap().0);
        assert_ne!(generate_planted(&spec, 9).unwrap().0, generate_planted(&spec, 10).unwrap().0);
    }

    #[test]
    fn error_free_voters_reproduce_groundtruth() {
        let truth = GroundTruth::with_layout(&[10, 12], Layout::Shuffled { seed: 2 }, true).unwrap();
        let cfg = VotingConfig {
            p_mis: 0.0,
            intra_votes: 1,
            cross_votes: 0,
            realization: VoteRealization::Fixed,
        };
        let (t, tallies) = generate_voting(&cfg, &truth, 4).unwrap();
        for d in 0..2 {
            let sub = t.induced(truth.canonical(d));
            assert_eq!(sub.backward_edges(&Ordering::identity(sub.n()), None).unwrap(), 0);
        }
        let (u, v) = (truth.canonical(0)[0], truth.canonical(1)[0]);
        let (a, b) = (u.min(v), u.max(v));
        assert_eq!(tallies.get(a, b), (0, 0));
    }

    #[test]
    fn majority_error_examples() {
        assert!((majority_error(1, 0.45) - 0.45).abs() < 1e-12);
        assert_eq!(majority_error(0, 0.3), 0.5);
        assert!((majority_error(2, 0.45) - 0.45).abs() < 1e-12);
    }

    #[test]
    fn derive_bounds_examples() {
        let cfg = VotingConfig {
            p_mis: 0.45,
            intra_votes: 1,
            cross_votes: 0,
            realization: VoteRealization::Fixed,
        };
        let (p_u, p_m) = derive_bounds(&cfg).unwrap();
        assert!((p_u - 0.45).abs() < 1e-12);
        assert_eq!(p_m, 0.5);
    }

    #[test]
    fn chernoff_examples() {
        let b = chernoff_mistake_bound(100, 0.45).unwrap();
        let expected = (-(0.05f64 * 0.05) / 2.05 * 100.0 * 0.55).exp();
        assert!((b - expected).abs() < 1e-12);
        assert!((b - 0.935).abs() < 1e-3);
        assert!(majority_error(100, 0.45) < b);
        let zero = chernoff_mistake_bound(30, 0.0).unwrap();
        assert!((zero - (-3.0f64).exp()).abs() < 1e-12);
        assert!(chernoff_mistake_bound(10, 0.5).is_err());
        assert!(chernoff_mistake_bound(200, 0.3).unwrap() < chernoff_mistake_bound(100, 0.3).unwrap());
    }

    #[test]
    fn bad_edge_bound_examples() {
        let m = bad_edge_bound(&[100], &[0.05], 100.0).unwrap();
        assert!((m - 742.5).abs() < 1e-9);
        assert_eq!(bad_edge_bound(&[100, 50], &[0.0, 0.0], 150.0).unwrap(), 0.0);
        let doubled = bad_edge_bound(&[100], &[0.1], 100.0).unwrap();
        assert!((doubled - 2.0 * m).abs() < 1e-9);
    }

    #[test]
    fn precondition_examples() {
        let b = Bounds { p_u: 0.02, p_m: 0.5, k_u: 3 };
        let r = validate_preconditions(&[100, 100, 100], &b, 7, 0.2);
        assert!(r.get("het").unwrap().passed);
        assert!(!r.get("eps_lower").unwrap().passed);
        assert!(!r.all_passed());

        let low = Bounds { p_u: 0.5 / 11.9, p_m: 0.5, k_u: 2 };
        assert!(!validate_preconditions(&[10, 10], &low, 7, 0.1).get("het").unwrap().passed);

        let four = Bounds { p_u: 0.01, p_m: 0.5, k_u: 4 };
        assert!(!validate_preconditions(&[10; 4], &four, 7, 0.3).get("eps_upper").unwrap().passed);
        assert!(!validate_preconditions(&[1, 10], &four, 7, 0.1).get("domain_sizes").unwrap().passed);
    }

    #[test]
    fn queries_without_cross_weight_are_intra() {
        let truth = GroundTruth::with_layout(&[20, 30], Layout::Shuffled { seed: 8 }, true).unwrap();
        let q = sample_queries(&truth, 100.0, 0.0, 2000, 1).unwrap();
        assert!(q.iter().all(|&(u, v)| u != v && truth.same_domain(u, v)));
        assert!(sample_queries(&truth, 1.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn vote_split_preserves_counts() {
        let truth = GroundTruth::with_layout(&[8, 8], Layout::Contiguous, true).unwrap();
        let cfg = VotingConfig::from_ratio(0.6, 21, 0.2).unwrap();
        let tallies = draw_votes(&cfg, &truth, 3).unwrap();
        let (a, b) = tallies.split(5);
        for u in 0..16 {
            for v in (u + 1)..16 {
                let (f, t) = tallies.get(u, v);
                let (fa, ta) = a.get(u, v);
                let (fb, tb) = b.get(u, v);
                assert_eq!((fa + fb, ta + tb), (f, t));
                assert_eq!(ta, t.div_ceil(2));
            }
        }
    }
}
