//! Command-line options.
//!
//! Long flags are accepted with one dash (`-np 4`, `-maxnodes 10000`) as
//! well as two; [`normalize_args`] rewrites the single-dash form before
//! clap sees it.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use mts_core::engine::{CheckpointPolicy, CheckpointTrigger, ConfigError};
use mts_core::reverse::PruneMode;
use mts_core::{BudgetKind, OutputMode, SchedulerConfig};

#[derive(Debug, Parser)]
#[command(
    name = "mts",
    version,
    about = "Parallel budgeted tree search with bundled applications"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Linear extensions of a poset (`n m` then `m` lines `a b`).
    Topsorts(RunArgs),
    /// Spanning trees of a connected graph (`n m` then `m` lines `u v`).
    Spantree(RunArgs),
    /// Nodes of a sampled Galton-Watson tree (`<law> <n_lo> <n_hi>`).
    Gwtree(RunArgs),
    /// Satisfiability of a DIMACS CNF formula.
    Sat(SatArgs),
    /// Job-list fraction on sampled Galton-Watson trees, as CSV.
    GwRatio(GwRatioArgs),
    /// Parallel efficiency from single-core and multicore timings.
    Efficiency(EfficiencyArgs),
}

/// A depth limit: a positive integer, or `inf` for none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthLimit(pub Option<u64>);

impl FromStr for DepthLimit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "unbounded" | "none" => Ok(DepthLimit(None)),
            _ => s
                .parse::<u64>()
                .map(|d| DepthLimit(Some(d)))
                .map_err(|_| format!("`{s}` is neither a nonnegative integer nor `inf`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneArg(pub Option<PruneMode>);

impl FromStr for PruneArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "off" {
            return Ok(PruneArg(None));
        }
        s.parse::<PruneMode>()
            .map(|p| PruneArg(Some(p)))
            .map_err(|_| format!("prune must be off, 0 or 1, got `{s}`"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Problem input file.
    pub input: PathBuf,
    /// Number of worker threads.
    #[arg(long = "np", default_value_t = 1)]
    pub np: usize,
    /// Depth limit while the job list is short (`inf` for none).
    #[arg(long, default_value = "2")]
    pub maxd: DepthLimit,
    /// Budget per job, counted in the selected budget kind.
    #[arg(long, default_value_t = 5000)]
    pub maxnodes: u64,
    /// Budget multiplier used once the job list exceeds `lmax`.
    #[arg(long, default_value_t = 40)]
    pub scale: u64,
    /// The depth limit applies while the job list is shorter than
    /// `lmin * (np + 2)`.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lmin: f64,
    /// The budget is multiplied by `scale` once the job list is longer than
    /// `lmax * (np + 2)`.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub lmax: f64,
    /// Keep the base budget regardless of the job-list length.
    #[arg(long = "static")]
    pub static_budget: bool,
    /// off, 0 (no leaves returned) or 1 (no leaves or paths returned).
    #[arg(long, default_value = "off")]
    pub prune: PruneArg,
    /// Print only the total count.
    #[arg(long)]
    pub countonly: bool,
    /// Write the busy-worker and job-list time series here (CSV).
    #[arg(long)]
    pub hist: Option<PathBuf>,
    /// Write per-job budget use here, one value per line.
    #[arg(long)]
    pub freq: Option<PathBuf>,
    /// Write checkpoints to this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Seconds between checkpoints.
    #[arg(long = "checkpoint-interval", default_value_t = 3600.0)]
    pub checkpoint_interval: f64,
    /// Checkpoint after this many completed jobs instead of on a timer.
    #[arg(long = "checkpoint-jobs")]
    pub checkpoint_jobs: Option<u64>,
    /// Stop (as if killed) once this many checkpoints are written.
    #[arg(long = "stop-after")]
    pub stop_after: Option<usize>,
    /// Resume from this checkpoint instead of the start vertex. The input
    /// file is still read for the problem instance.
    #[arg(long)]
    pub restart: Option<PathBuf>,
    /// nodes, decisions or conflicts (default: the application's first).
    #[arg(long)]
    pub budgetkind: Option<BudgetKind>,
    /// Seed for applications that sample their instance.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Minimum seconds between histogram samples.
    #[arg(long = "sample-interval", default_value_t = 0.1)]
    pub sample_interval: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SatArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Branch on variable activity instead of variable order.
    #[arg(long)]
    pub vsids: bool,
    /// Enable restarts inside jobs.
    #[arg(long)]
    pub restarts: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GwRatioArgs {
    /// Offspring law: catalan, fullbinary, geometric, poisson,
    /// binomial(k), uniform(2).
    #[arg(long, default_value = "catalan")]
    pub law: String,
    /// Target size; trees are accepted within 50% of it.
    #[arg(short = 'n', long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Explicit lower size bound (overrides the window from `n`).
    #[arg(long)]
    pub lo: Option<usize>,
    /// Explicit upper size bound.
    #[arg(long)]
    pub hi: Option<usize>,
    /// Nodes budget per job.
    #[arg(short = 'b', long, default_value_t = 5000)]
    pub b: u64,
    /// Number of sampled trees.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Constant used in the prediction (default: the law's nominal value).
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// CSV destination (default: standard output).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl GwRatioArgs {
    pub fn window(&self) -> (usize, usize) {
        let lo = self.lo.unwrap_or(self.n - self.n / 2);
        let hi = self.hi.unwrap_or(self.n + self.n / 2);
        (lo, hi)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EfficiencyArgs {
    /// Single-core running time in seconds.
    #[arg(long)]
    pub single: f64,
    #[arg(long)]
    pub cores: u32,
    /// Multicore running time in seconds.
    #[arg(long)]
    pub multi: f64,
}

/// Rewrites `-name` into `--name` for every multi-letter flag. Single
/// letters (`-h`, `-V`), negative numbers and everything after `--` are
/// left alone.
pub fn normalize_args<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut out = Vec::new();
    let mut passthrough = false;
    for a in args {
        let a: OsString = a.into();
        if passthrough {
            out.push(a);
            continue;
        }
        match a.to_str() {
            Some("--") => {
                passthrough = true;
                out.push(a);
            }
            Some(s)
                if s.starts_with('-')
                    && !s.starts_with("--")
                    && s.len() > 2
                    && s[1..].starts_with(|c: char| c.is_ascii_alphabetic()) =>
            {
                out.push(format!("-{s}").into());
            }
            _ => out.push(a),
        }
    }
    out
}

impl RunArgs {
    pub fn scheduler_config(&self, default_kind: BudgetKind) -> Result<SchedulerConfig, ConfigError> {
        let checkpoint = self.checkpoint.as_ref().map(|path| CheckpointPolicy {
            path: path.clone(),
            trigger: match self.checkpoint_jobs {
                Some(n) => CheckpointTrigger::Jobs(n),
                None => CheckpointTrigger::Interval(Duration::from_secs_f64(
                    self.checkpoint_interval.max(0.0),
                )),
            },
            stop_after: self.stop_after,
        });
        let config = SchedulerConfig {
            num_workers: self.np,
            base_max_depth: self.maxd.0,
            base_max_nodes: self.maxnodes,
            scale: self.scale,
            lmin: self.lmin,
            lmax: self.lmax,
            budget_kind: self.budgetkind.unwrap_or(default_kind),
            dynamic_budget: !self.static_budget,
            output_mode: if self.countonly {
                OutputMode::CountOnly
            } else {
                OutputMode::Full
            },
            checkpoint,
            restart_path: self.restart.clone(),
            sample_interval: Duration::from_secs_f64(self.sample_interval.max(0.0)),
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(normalize_args(std::iter::once("mts").chain(args.iter().copied())))
    }

    fn run_args(args: &[&str]) -> RunArgs {
        match parse(args).unwrap().command {
            Command::Topsorts(r) => r,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults() {
        let r = run_args(&["topsorts", "in.txt"]);
        let c = r.scheduler_config(BudgetKind::Nodes).unwrap();
        assert_eq!(c.base_max_depth, Some(2));
        assert_eq!(c.base_max_nodes, 5000);
        assert_eq!(c.scale, 40);
        assert_eq!(c.lmin, 1.0);
        assert_eq!(c.lmax, 3.0);
        assert!(c.dynamic_budget);
        assert_eq!(c.output_mode, OutputMode::Full);
        assert!(c.checkpoint.is_none());
    }

    #[test]
    fn single_dash_flags() {
        let r = run_args(&["topsorts", "-scale", "200", "-maxnodes", "10000", "-np", "4", "in"]);
        assert_eq!((r.scale, r.maxnodes, r.np), (200, 10000, 4));
        let r = run_args(&["topsorts", "in", "-maxd", "inf", "-prune", "1", "-countonly"]);
        assert_eq!(r.maxd, DepthLimit(None));
        assert_eq!(r.prune, PruneArg(Some(PruneMode::Paths)));
        assert!(r.countonly);
    }

    #[test]
    fn inverted_bounds_rejected() {
        let r = run_args(&["topsorts", "in", "-lmin", "3", "-lmax", "1"]);
        assert_eq!(
            r.scheduler_config(BudgetKind::Nodes),
            Err(ConfigError::InvertedBounds { lmin: 3.0, lmax: 1.0 })
        );
        let r = run_args(&["topsorts", "in", "-lmin", "-1"]);
        assert!(r.scheduler_config(BudgetKind::Nodes).is_err());
    }

    #[test]
    fn bad_values_and_unknown_flags() {
        assert!(parse(&["topsorts", "in", "-prune", "2"]).is_err());
        assert!(parse(&["topsorts", "in", "-maxd", "deep"]).is_err());
        assert!(parse(&["topsorts", "in", "-bogus", "1"]).is_err());
        assert!(parse(&["topsorts", "in", "-budgetkind", "steps"]).is_err());
        assert!(parse(&["topsorts"]).is_err());
    }

    #[test]
    fn normalisation_leaves_short_and_numeric_alone() {
        let got = normalize_args(["mts", "-h", "-np", "-5", "--", "-keep"]);
        let want: Vec<OsString> = ["mts", "-h", "--np", "-5", "--", "-keep"]
            .iter()
            .map(OsString::from)
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sat_and_ratio_options() {
        match parse(&["sat", "f.cnf", "-budgetkind", "conflicts", "-vsids"]).unwrap().command {
            Command::Sat(s) => {
                assert!(s.vsids && !s.restarts);
                assert_eq!(s.run.budgetkind, Some(BudgetKind::Conflicts));
            }
            other => panic!("{other:?}"),
        }
        match parse(&["gw-ratio", "-n", "1000", "-b", "50"]).unwrap().command {
            Command::GwRatio(g) => {
                assert_eq!(g.window(), (500, 1500));
                assert_eq!(g.b, 50);
            }
            other => panic!("{other:?}"),
        }
    }
}
