//! Experiment configuration, read from TOML.
//!
//! ```toml
//! eps = 0.15
//! k_u = 2               # defaults to the domain count
//! seeds = [0, 1, 2]
//! queries = 10000
//!
//! [model]
//! kind = "planted"      # or "voting"
//! sizes = [300, 300]
//! p_intra = 0.0
//! p_cross = 0.5
//! # voting: p_succ = 0.6, intra_votes = 100, ratio = 0.05, realization = "fixed"
//!
//! [gadget]
//! qr = 7                # or `random = 21` or `file = "gadget.txt"`
//!
//! [clustering]
//! strict = false
//! # max_find_runs, depth, copies, sample, c
//!
//! [purify]
//! enabled = true
//! fresh = "regenerate"  # or "vote-split"
//! # sample_coefficient, exact, threshold_constant
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use hetrank::model::VoteRealization;
use hetrank::purify::{FreshSource, DEFAULT_THRESHOLD_CONSTANT};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub eps: f64,
    #[serde(default)]
    pub k_u: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_queries")]
    pub queries: usize,
    /// Intra/cross query weights `(M, m)`; voting defaults to the vote counts,
    /// planted to `(1, 1)`.
    #[serde(default)]
    pub query_weights: Option<(f64, f64)>,
    pub model: ModelConfig,
    #[serde(default)]
    pub gadget: GadgetConfig,
    #[serde(default)]
    pub clustering: ClusteringOptions,
    #[serde(default)]
    pub purify: PurifyOptions,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_queries() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Planted {
        sizes: Vec<usize>,
        p_intra: f64,
        p_cross: f64,
        #[serde(default = "yes")]
        shuffle: bool,
    },
    Voting {
        sizes: Vec<usize>,
        p_succ: f64,
        intra_votes: u32,
        ratio: f64,
        #[serde(default)]
        realization: Realization,
    },
}

fn yes() -> bool {
    true
}

impl ModelConfig {
    pub fn sizes(&self) -> &[usize] {
        match self {
            ModelConfig::Planted { sizes, .. } | ModelConfig::Voting { sizes, .. } => sizes,
        }
    }

    pub fn n(&self) -> usize {
        self.sizes().iter().sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realization {
    #[default]
    Fixed,
    Poisson,
}

impl From<Realization> for VoteRealization {
    fn from(r: Realization) -> Self {
        match r {
            Realization::Fixed => VoteRealization::Fixed,
            Realization::Poisson => VoteRealization::Poisson,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetConfig {
    /// Quadratic-residue tournament on `Z_p`.
    Qr(usize),
    /// Uniformly random tournament of this order, seeded by the run seed.
    Random(usize),
    File(PathBuf),
}

impl Default for GadgetConfig {
    fn default() -> Self {
        GadgetConfig::Qr(7)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringOptions {
    /// Paper founding rule: every unplaceable chunk becomes a cluster.
    #[serde(default)]
    pub strict: bool,
    pub max_find_runs: Option<usize>,
    pub depth: Option<usize>,
    /// Copies found before the depth rule applies.
    pub copies: Option<usize>,
    /// Neighbours sampled per degree estimate; 0 counts exactly.
    pub sample: Option<usize>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurifyOptions {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub fresh: Option<Fresh>,
    #[serde(default = "default_sample_coefficient")]
    pub sample_coefficient: f64,
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "default_threshold_constant")]
    pub threshold_constant: f64,
}

fn default_sample_coefficient() -> f64 {
    30.0
}

fn default_threshold_constant() -> f64 {
    DEFAULT_THRESHOLD_CONSTANT
}

impl Default for PurifyOptions {
    fn default() -> Self {
        Self {
            enabled: true,
            fresh: None,
            sample_coefficient: default_sample_coefficient(),
            exact: false,
            threshold_constant: default_threshold_constant(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fresh {
    Regenerate,
    VoteSplit,
}

impl From<Fresh> for FreshSource {
    fn from(f: Fresh) -> Self {
        match f {
            Fresh::Regenerate => FreshSource::Regenerate,
            Fresh::VoteSplit => FreshSource::VoteSplit,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn k_u(&self) -> usize {
        self.k_u.unwrap_or(self.model.sizes().len())
    }

    /// Where the independent tournament for Purify comes from; voting splits
    /// votes unless told otherwise.
    pub fn fresh(&self) -> Fresh {
        self.purify.fresh.unwrap_or(match self.model {
            ModelConfig::Planted { .. } => Fresh::Regenerate,
            ModelConfig::Voting { .. } => Fresh::VoteSplit,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} must lie in (0, 1)", self.eps));
        }
        let sizes = self.model.sizes();
        if sizes.is_empty() || sizes.iter().any(|&s| s < 2) {
            return bad("every domain needs at least two vertices".into());
        }
        if self.k_u() < sizes.len() {
            return bad(format!("k_u = {} is below the domain count {}", self.k_u(), sizes.len()));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.queries == 0 {
            return bad("at least one query is required".into());
        }
        if let ModelConfig::Planted { p_intra, p_cross, .. } = self.model {
            if !(0.0..=1.0).contains(&p_intra) || !(0.0..=1.0).contains(&p_cross) {
                return bad("planted probabilities must lie in [0, 1]".into());
            }
        }
        if self.fresh() == Fresh::VoteSplit && matches!(self.model, ModelConfig::Planted { .. }) {
            return bad("vote splitting needs the voting model".into());
        }
        Ok(())
    }
}
