//! Command implementations behind the `hetrank` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use hetrank::gadget::{quadratic_residue_gadget, random_gadget, verify_gadget, Verdict, VerifyMode};
use hetrank::io;

use crate::config::{Config, GadgetConfig};
use crate::error::CliError;
use crate::experiment;
use crate::preset::{self, Axis, BenchRow, SummaryRow};
use crate::report::{line_plot, metrics_csv, Series};

#[derive(Debug, Parser)]
#[command(name = "hetrank", version, about = "Ranking from heterogeneous pairwise tournaments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw tournaments and groundtruth for each seed.
    Gen(RunArgs),
    /// Full pipeline with baseline; one CSV row per seed.
    Run(RunArgs),
    /// Build or verify gadget tournaments.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Sweep a preset and write CSV plus an SVG plot.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML experiment config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Use a preset's base config instead of a file.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Comma-separated seeds; `a..b` is inclusive.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Skip Purify; every clustered vertex becomes a pivot.
    #[arg(long)]
    pub no_purify: bool,
    /// `qr:P`, `random:H`, or a gadget file.
    #[arg(long)]
    pub gadget: Option<String>,
    /// Find-run budget.
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Copies found before the depth rule applies.
    #[arg(long)]
    pub copies: Option<usize>,
    /// Neighbours sampled per degree estimate.
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum GadgetCommand {
    Make(MakeArgs),
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Exhaustive,
    Sampled,
    None,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 2)]
    pub ku: usize,
    #[arg(long, value_enum, default_value_t = CheckMode::Exhaustive)]
    pub verify: CheckMode,
    /// Subsets drawn in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MakeArgs {
    /// Quadratic-residue tournament on Z_p.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub qr: Option<usize>,
    /// Random tournament of this order.
    #[arg(long)]
    pub random: Option<usize>,
    #[command(flatten)]
    pub check: CheckArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub check: CheckArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the preset's seeds.
    #[arg(long)]
    pub seeds: Option<String>,
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Gadget(GadgetCommand::Make(a)) => cmd_gadget_make(&a),
        Command::Gadget(GadgetCommand::Verify(a)) => cmd_gadget_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

/// Parses `1,2,5..8` (ranges inclusive).
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Config(format!("bad seed list `{s}`"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_gadget(s: &str) -> Result<GadgetConfig, CliError> {
    let num = |v: &str| v.parse().map_err(|_| CliError::Config(format!("bad gadget `{s}`")));
    Ok(match s.split_once(':') {
        Some(("qr", p)) => GadgetConfig::Qr(num(p)?),
        Some(("random", h)) => GadgetConfig::Random(num(h)?),
        _ => GadgetConfig::File(PathBuf::from(s)),
    })
}

/// The config after applying command-line overrides.
pub fn resolve(a: &RunArgs) -> Result<Config, CliError> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(path), _) => Config::from_toml(&fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)?,
        (None, Some(name)) => preset::preset(name)?.config,
        (None, None) => return Err(CliError::Config("--config or --preset is required".into())),
    };
    if let Some(s) = a.seed {
        cfg.seeds = vec![s];
    }
    if let Some(s) = &a.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    if a.no_purify {
        cfg.purify.enabled = false;
    }
    if let Some(g) = &a.gadget {
        cfg.gadget = parse_gadget(g)?;
    }
    let c = &mut cfg.clustering;
    c.max_find_runs = a.runs.or(c.max_find_runs);
    c.depth = a.depth.or(c.depth);
    c.copies = a.copies.or(c.copies);
    c.sample = a.sample.or(c.sample);
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

/// Writes `tournament.txt`, `groundtruth.txt` and, when Purify is on,
/// `fresh.txt` under `seed-<s>/` for every seed.
pub fn cmd_gen(a: &RunArgs) -> Result<(), CliError> {
    let cfg = resolve(a)?;
    for &seed in &cfg.seeds {
        let inst = experiment::generate(&cfg, seed)?;
        let dir = seed_dir(&a.out, seed);
        write(&dir.join("tournament.txt"), &io::write_tournament(&inst.t))?;
        write(&dir.join("groundtruth.txt"), &io::write_groundtruth(&inst.truth))?;
        if let Some(tc) = &inst.tc {
            write(&dir.join("fresh.txt"), &io::write_tournament(tc))?;
        }
    }
    Ok(())
}

/// Runs every seed, writing `metrics.csv`, the resolved `config.toml`, and
/// `seed-<s>/model.txt`. Rows finished before a failure are kept.
pub fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let cfg = resolve(a)?;
    write(&a.out.join("config.toml"), &cfg.to_toml())?;
    let mut rows = Vec::new();
    let mut result = Ok(());
    for &seed in &cfg.seeds {
        match experiment::run(&cfg, seed) {
            Ok(out) => {
                write(&seed_dir(&a.out, seed).join("model.txt"), &io::write_model(&out.model))?;
                log::info!("seed {seed}: eps_clust {:.4}, eps_baseline {:.4}", out.row.eps_clust, out.row.eps_baseline);
                rows.push(out.row);
            }
            Err(e) => {
                result = Err(match e {
                    CliError::Pipeline(m) => CliError::Pipeline(format!("seed {seed}: {m}")),
                    other => other,
                });
                break;
            }
        }
    }
    write(&a.out.join("metrics.csv"), &metrics_csv(&rows))?;
    result
}

fn check(gadget: &hetrank::gadget::Gadget, c: &CheckArgs) -> Result<Option<Verdict>, CliError> {
    let mode = match c.verify {
        CheckMode::Exhaustive => VerifyMode::Exhaustive,
        CheckMode::Sampled => VerifyMode::Sampled {
            trials: c.trials,
            seed: c.seed,
        },
        CheckMode::None => return Ok(None),
    };
    match verify_gadget(gadget, c.ku, mode) {
        Err(hetrank::Error::SizeLimit { what, size, limit }) => Err(CliError::Infeasible(format!(
            "{what}: {size} exceeds {limit}; try --verify sampled --trials N"
        ))),
        other => Ok(Some(other?)),
    }
}

fn counterexample(witness: &[usize]) -> CliError {
    let list: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
    CliError::Pipeline(format!("transitive subset: {}", list.join(" ")))
}

pub fn cmd_gadget_make(a: &MakeArgs) -> Result<(), CliError> {
    // construction only fails on bad parameters
    let mut gadget = match (a.qr, a.random) {
        (Some(p), _) => quadratic_residue_gadget(p),
        (None, Some(h)) => random_gadget(h, a.check.seed),
        (None, None) => return Err(CliError::Config("--qr or --random is required".into())),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    gadget.k_u = a.check.ku;
    let gadget = match check(&gadget, &a.check)? {
        None => gadget,
        Some(Verdict::Verified(g)) => g,
        Some(Verdict::Counterexample(w)) => return Err(counterexample(&w)),
    };
    let text = io::write_gadget(&gadget);
    match &a.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_gadget_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.file).map_err(|e| CliError::io(&a.file, e))?;
    let gadget = io::read_gadget(&text)?;
    match check(&gadget, &a.check)? {
        Some(Verdict::Counterexample(w)) => Err(counterexample(&w)),
        Some(Verdict::Verified(g)) => {
            println!("verified: h={} k_u={} ({:?})", g.h(), g.k_u, g.verified);
            Ok(())
        }
        None => Err(CliError::Config("verify needs --verify exhaustive or sampled".into())),
    }
}

/// Writes `<preset>.csv` (one row per point and seed), `<preset>_summary.csv`
/// (mean and stderr per point) and `<preset>.svg`.
pub fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let p = preset::preset(&a.preset)?;
    let seeds = match &a.seeds {
        Some(s) => parse_seeds(s)?,
        None => p.config.seeds.clone(),
    };
    let rows = preset::sweep(&p, &seeds)?;
    let axis = p.axis.name();
    let mut csv = BenchRow::header(axis) + "\n";
    for r in &rows {
        csv += &(r.to_csv() + "\n");
    }
    write(&a.out.join(format!("{}.csv", p.name)), &csv)?;
    let summary = preset::summarize(&p.axis, &rows);
    let mut sc = SummaryRow::header(axis) + "\n";
    for s in &summary {
        sc += &(s.to_csv() + "\n");
    }
    write(&a.out.join(format!("{}_summary.csv", p.name)), &sc)?;
    let series = |label: &str, f: fn(&SummaryRow) -> (f64, f64)| Series {
        label: label.into(),
        points: summary.iter().map(|s| (s.value, f(s).0, f(s).1)).collect(),
    };
    let svg = match p.axis {
        Axis::Ratio(_) => line_plot(
            p.name,
            "ratio",
            "generalization error",
            &[series("HeteroRanking", |s| s.eps_clust), series("QuickSort", |s| s.eps_baseline)],
            false,
        ),
        Axis::FindRuns(_) => line_plot(
            p.name,
            "find runs",
            "reconstructed purity",
            &[series("purity", |s| s.reconstructed_purity)],
            true,
        ),
    };
    write(&a.out.join(format!("{}.svg", p.name)), &svg)
}
