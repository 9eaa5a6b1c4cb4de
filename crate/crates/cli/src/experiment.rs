//! One configured run: generate, cluster, purify, rank, evaluate.

use std::time::Instant;

use hetrank::clustering::{ClusteringConfig, ClusteringStats};
use hetrank::eval::{baseline_global_quicksort, generalization_error, purity, MetricsRow};
use hetrank::gadget::{quadratic_residue_gadget, random_gadget, Gadget};
use hetrank::model::{
    derive_bounds, draw_votes, generate_planted, sample_queries, validate_preconditions, Bounds, GroundTruth, Layout,
    PlantedSpec, VotingConfig,
};
use hetrank::purify::PurifyConfig;
use hetrank::ranking::{hetero_ranking, HeteroConfig, RankModel};
use hetrank::seed::derive;
use hetrank::{io, Ordering, Tournament};

use crate::config::{Config, Fresh, GadgetConfig, ModelConfig};
use crate::error::CliError;

const FRESH: u64 = 0x0000006672657368; // fresh
const BASELINE: u64 = 0x626173656c696e65; // baseline
const GADGET: u64 = 0x0000676164676574; // gadget

/// Everything drawn for one seed.
#[derive(Debug, Clone)]
pub struct Instance {
    pub t: Tournament,
    /// Independent tournament for Purify, when it is enabled.
    pub tc: Option<Tournament>,
    pub truth: GroundTruth,
    pub bounds: Bounds,
    /// Query weights `(M, m)`.
    pub weights: (f64, f64),
    /// `(ratio, p_succ)` of a voting model, NaN for planted.
    pub voting: (f64, f64),
}

pub fn load_gadget(cfg: &GadgetConfig, k_u: usize, seed: u64) -> Result<Gadget, CliError> {
    let mut g = match cfg {
        GadgetConfig::Qr(p) => quadratic_residue_gadget(*p)?,
        GadgetConfig::Random(h) => random_gadget(*h, derive(seed, GADGET))?,
        GadgetConfig::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            io::read_gadget(&text)?
        }
    };
    if g.k_u == 0 {
        g.k_u = k_u;
    }
    Ok(g)
}

pub fn generate(cfg: &Config, seed: u64) -> Result<Instance, CliError> {
    let k_u = cfg.k_u();
    let want_fresh = cfg.purify.enabled;
    match &cfg.model {
        ModelConfig::Planted {
            sizes,
            p_intra,
            p_cross,
            shuffle,
        } => {
            let layout = if *shuffle { Layout::Shuffled { seed } } else { Layout::Contiguous };
            let mut spec = PlantedSpec::uniform(sizes, *p_intra, *p_cross, layout)?;
            spec.bounds.k_u = k_u;
            let (t, truth) = generate_planted(&spec, seed)?;
            let tc = match want_fresh {
                true => Some(generate_planted(&spec, derive(seed, FRESH))?.0),
                false => None,
            };
            Ok(Instance {
                t,
                tc,
                truth,
                bounds: spec.bounds,
                weights: cfg.query_weights.unwrap_or((1.0, 1.0)),
                voting: (f64::NAN, f64::NAN),
            })
        }
        ModelConfig::Voting {
            sizes,
            p_succ,
            intra_votes,
            ratio,
            realization,
        } => {
            let truth = GroundTruth::with_layout(sizes, Layout::Shuffled { seed }, true)?;
            let vc = VotingConfig {
                realization: (*realization).into(),
                ..VotingConfig::from_ratio(*p_succ, *intra_votes, *ratio)?
            };
            let tallies = draw_votes(&vc, &truth, seed)?;
            let split = want_fresh && cfg.fresh() == Fresh::VoteSplit;
            let (t, tc, bounds_cfg) = if split {
                let (a, b) = tallies.split(seed);
                let half = VotingConfig {
                    intra_votes: vc.intra_votes.div_ceil(2),
                    cross_votes: vc.cross_votes.div_ceil(2),
                    ..vc
                };
                (a.majority(seed), Some(b.majority(derive(seed, FRESH))), half)
            } else {
                let tc = match want_fresh {
                    true => Some(draw_votes(&vc, &truth, derive(seed, FRESH))?.majority(derive(seed, FRESH))),
                    false => None,
                };
                (tallies.majority(seed), tc, vc)
            };
            let (p_u, p_m) = derive_bounds(&bounds_cfg)?;
            Ok(Instance {
                t,
                tc,
                truth,
                bounds: Bounds { p_u, p_m, k_u },
                weights: cfg
                    .query_weights
                    .unwrap_or((vc.intra_votes as f64, vc.cross_votes as f64)),
                voting: (*ratio, *p_succ),
            })
        }
    }
}

pub fn clustering_config(cfg: &Config, bounds: &Bounds, gadget: &Gadget) -> ClusteringConfig {
    let o = &cfg.clustering;
    let mut cc = match o.strict {
        true => ClusteringConfig::strict(cfg.eps, bounds, gadget),
        false => ClusteringConfig::new(cfg.eps, bounds, gadget),
    };
    if let Some(r) = o.max_find_runs {
        cc.max_find_runs = r;
    }
    if let Some(d) = o.depth {
        cc.find.depth = d;
    }
    if let Some(c) = o.copies {
        cc.find.copy_cap = c;
    }
    if let Some(s) = o.sample {
        cc.find.sample_size = s;
    }
    if let Some(c) = o.c {
        cc.find.c = c;
    }
    cc
}

pub fn hetero_config(cfg: &Config, bounds: &Bounds, gadget: &Gadget) -> HeteroConfig {
    let p = &cfg.purify;
    HeteroConfig {
        clustering: clustering_config(cfg, bounds, gadget),
        purify: p.enabled.then(|| PurifyConfig {
            sample_coefficient: p.sample_coefficient,
            exact: p.exact,
            threshold_constant: p.threshold_constant,
            fresh: cfg.fresh().into(),
        }),
        quicksort: None,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub row: MetricsRow,
    pub instance: Instance,
    pub model: RankModel,
    pub stats: ClusteringStats,
    pub baseline: Ordering,
}

/// Runs the pipeline on an already generated instance.
pub fn run_instance(cfg: &Config, instance: Instance, seed: u64) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let gadget = load_gadget(&cfg.gadget, cfg.k_u(), seed)?;
    let b = instance.bounds;
    validate_preconditions(&instance.truth.sizes(), &b, gadget.h(), cfg.eps);
    let hc = hetero_config(cfg, &b, &gadget);
    let (model, stats) = hetero_ranking(&instance.t, instance.tc.as_ref(), &b, cfg.eps, &gadget, &hc, seed)?;
    let (m_w, c_w) = instance.weights;
    let queries = sample_queries(&instance.truth, m_w, c_w, cfg.queries, seed)?;
    let report = generalization_error(&model, &instance.truth, &queries, seed)?;
    let (base, baseline) = baseline_global_quicksort(&instance.t, &instance.truth, &queries, derive(seed, BASELINE))?;
    let (_, min_purity) = purity(&model.partitioning, &instance.truth)?;
    let row = MetricsRow {
        seed,
        n: instance.t.n(),
        k: instance.truth.k(),
        ratio: instance.voting.0,
        p_succ: instance.voting.1,
        eps_config: cfg.eps,
        eps_clust: report.error(),
        eps_baseline: base.error(),
        coverage: model.partitioning.coverage(),
        min_purity,
        clusters: model.partitioning.clusters.len(),
        find_runs: stats.find_runs,
        copies_found: stats.copies_found,
        wall_ms: start.elapsed().as_millis() as u64,
    };
    Ok(Outcome {
        row,
        instance,
        model,
        stats,
        baseline,
    })
}

pub fn run(cfg: &Config, seed: u64) -> Result<Outcome, CliError> {
    let instance = generate(cfg, seed)?;
    run_instance(cfg, instance, seed)
}
