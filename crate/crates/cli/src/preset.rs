//! Desk-scale experiment presets and the sweeps behind `bench`.

use hetrank::eval::{purity, reconstructed_purity, MetricsRow};

use crate::config::{ClusteringOptions, Config, GadgetConfig, ModelConfig, PurifyOptions, Realization};
use crate::error::CliError;
use crate::experiment;

/// The swept parameter of a preset.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    /// Cross/intra vote ratio of the voting model.
    Ratio(Vec<f64>),
    /// Find-run budget; clusters are read back from one run per seed.
    FindRuns(Vec<usize>),
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Ratio(_) => "ratio",
            Axis::FindRuns(_) => "find_runs",
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Ratio(v) => v.clone(),
            Axis::FindRuns(v) => v.iter().map(|&b| b as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub config: Config,
    pub axis: Axis,
}

pub const PRESETS: [&str; 3] = ["table1-mini", "figure1-mini", "figure3-purity"];

fn voting(sizes: Vec<usize>, p_succ: f64, intra_votes: u32, ratio: f64, seeds: u64) -> Config {
    Config {
        eps: 0.1,
        k_u: None,
        seeds: (0..seeds).collect(),
        queries: 10_000,
        query_weights: None,
        model: ModelConfig::Voting {
            sizes,
            p_succ,
            intra_votes,
            ratio,
            realization: Realization::Fixed,
        },
        gadget: GadgetConfig::Qr(7),
        clustering: ClusteringOptions {
            copies: Some(15),
            ..Default::default()
        },
        purify: PurifyOptions {
            enabled: false,
            ..Default::default()
        },
    }
}

pub fn preset(name: &str) -> Result<Preset, CliError> {
    Ok(match name {
        // first Table 1 column at n = 1000
        "table1-mini" => Preset {
            name: "table1-mini",
            config: voting(vec![500, 500], 0.55, 100, 0.02, 5),
            axis: Axis::Ratio(vec![0.02]),
        },
        // generalization error against the vote ratio, k = 3
        "figure1-mini" => Preset {
            name: "figure1-mini",
            config: voting(vec![300, 300, 300], 0.6, 100, 0.05, 3),
            axis: Axis::Ratio(vec![0.05, 0.1, 0.2, 0.3]),
        },
        // reconstructed share of each domain against the find-run budget
        "figure3-purity" => Preset {
            name: "figure3-purity",
            config: Config {
                clustering: ClusteringOptions {
                    copies: Some(12),
                    ..Default::default()
                },
                ..voting(vec![500, 500], 0.6, 200, 0.1, 3)
            },
            axis: Axis::FindRuns(vec![1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000]),
        },
        _ => {
            return Err(CliError::Config(format!(
                "unknown preset `{name}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    })
}

/// One bench observation: a metrics row at a sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub value: f64,
    pub metrics: MetricsRow,
    pub reconstructed_purity: f64,
}

impl BenchRow {
    pub fn header(axis: &str) -> String {
        format!("{axis},{},reconstructed_purity", MetricsRow::HEADER)
    }

    pub fn to_csv(&self) -> String {
        format!("{},{},{:.6}", self.value, self.metrics.to_csv(), self.reconstructed_purity)
    }
}

fn with_ratio(cfg: &Config, r: f64) -> Config {
    let mut cfg = cfg.clone();
    if let ModelConfig::Voting { ratio, .. } = &mut cfg.model {
        *ratio = r;
    }
    cfg
}

/// Rows in point-major, seed-minor order.
pub fn sweep(p: &Preset, seeds: &[u64]) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    match &p.axis {
        Axis::Ratio(values) => {
            if !matches!(p.config.model, ModelConfig::Voting { .. }) {
                return Err(CliError::Config("a ratio sweep needs the voting model".into()));
            }
            for &r in values {
                let cfg = with_ratio(&p.config, r);
                for &seed in seeds {
                    let out = experiment::run(&cfg, seed)?;
                    let rp = reconstructed_purity(&out.model.partitioning, &out.instance.truth)?;
                    rows.push(BenchRow {
                        value: r,
                        metrics: out.row,
                        reconstructed_purity: rp,
                    });
                }
            }
        }
        Axis::FindRuns(budgets) => {
            let mut per_seed = Vec::new();
            for &seed in seeds {
                per_seed.push(experiment::run(&p.config, seed)?);
            }
            for &budget in budgets {
                for out in &per_seed {
                    let part = out.stats.clusters_after(out.row.n, budget);
                    let (_, min_purity) = purity(&part, &out.instance.truth)?;
                    let rp = reconstructed_purity(&part, &out.instance.truth)?;
                    rows.push(BenchRow {
                        value: budget as f64,
                        metrics: MetricsRow {
                            coverage: part.coverage(),
                            min_purity,
                            clusters: part.clusters.len(),
                            find_runs: budget.min(out.stats.find_runs),
                            ..out.row.clone()
                        },
                        reconstructed_purity: rp,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub value: f64,
    pub eps_clust: (f64, f64),
    pub eps_baseline: (f64, f64),
    pub reconstructed_purity: (f64, f64),
}

impl SummaryRow {
    pub fn header(axis: &str) -> String {
        format!(
            "{axis},eps_clust_mean,eps_clust_stderr,eps_baseline_mean,eps_baseline_stderr,\
             reconstructed_purity_mean,reconstructed_purity_stderr"
        )
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.value,
            self.eps_clust.0,
            self.eps_clust.1,
            self.eps_baseline.0,
            self.eps_baseline.1,
            self.reconstructed_purity.0,
            self.reconstructed_purity.1
        )
    }
}

pub fn summarize(axis: &Axis, rows: &[BenchRow]) -> Vec<SummaryRow> {
    axis.values()
        .into_iter()
        .map(|value| {
            let at: Vec<&BenchRow> = rows.iter().filter(|r| r.value == value).collect();
            let col = |f: fn(&BenchRow) -> f64| mean_stderr(&at.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                value,
                eps_clust: col(|r| r.metrics.eps_clust),
                eps_baseline: col(|r| r.metrics.eps_baseline),
                reconstructed_purity: col(|r| r.reconstructed_purity),
            }
        })
        .collect()
}
