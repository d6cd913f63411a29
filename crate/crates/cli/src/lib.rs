//! Front end for the `mts` binary: option parsing, input dispatch and the
//! files written after a run.

pub mod options;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use clap::Parser;
use log::{info, warn};
use thiserror::Error;

use mts_apps::gwtree::{self, GwEnumeration, GwExperiment, GwSpec, OffspringLaw};
use mts_apps::sat::{SatApp, SolverOptions};
use mts_apps::spantree::SpanningTrees;
use mts_apps::topsorts::TopSorts;
use mts_core::engine::EngineError;
use mts_core::metrics::{compute_efficiency, emit_histograms};
use mts_core::{run, Application};

use options::{Cli, Command, EfficiencyArgs, GwRatioArgs, RunArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Config(_) => CliError::Usage(e.to_string()),
            EngineError::Checkpoint(_) | EngineError::WrongApplication { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing
/// results to standard output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    let cli = match Cli::try_parse_from(options::normalize_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mts: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Topsorts(a) => {
            let app = TopSorts::parse(&read_input(&a.input)?)
                .map_err(|e| input_error(&a.input, e))?
                .with_prune(a.prune.0);
            run_app(Arc::new(app), &a)
        }
        Command::Spantree(a) => {
            let app = SpanningTrees::parse(&read_input(&a.input)?)
                .map_err(|e| input_error(&a.input, e))?
                .with_prune(a.prune.0);
            run_app(Arc::new(app), &a)
        }
        Command::Gwtree(a) => {
            let spec = GwSpec::parse(&read_input(&a.input)?).map_err(|e| input_error(&a.input, e))?;
            let app = GwEnumeration::sample(&spec, a.seed)
                .map_err(|e| CliError::Input(e.to_string()))?
                .with_prune(a.prune.0);
            info!("sampled a {} tree with {} nodes", spec.law, app.tree().size());
            run_app(Arc::new(app), &a)
        }
        Command::Sat(s) => {
            if s.run.prune.0.is_some() {
                return Err(CliError::Usage("sat does not support pruning".into()));
            }
            let opts = SolverOptions {
                vsids: s.vsids,
                restarts: s.restarts,
                ..Default::default()
            };
            let app = SatApp::parse(&read_input(&s.run.input)?, opts)
                .map_err(|e| input_error(&s.run.input, e))?;
            run_app(Arc::new(app), &s.run)
        }
        Command::GwRatio(g) => gw_ratio(&g),
        Command::Efficiency(e) => efficiency(&e),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn run_app(app: Arc<dyn Application>, args: &RunArgs) -> Result<(), CliError> {
    let desc = app.descriptor();
    let default_kind = desc.budget_kinds[0];
    let config = args
        .scheduler_config(default_kind)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if !desc.budget_kinds.contains(&config.budget_kind) {
        return Err(CliError::Usage(format!(
            "{} does not support budget kind {}",
            desc.name, config.budget_kind
        )));
    }

    let out = run(app, &config, BufWriter::new(io::stdout()))?;
    out.sink
        .into_inner()
        .map_err(|e| CliError::Internal(format!("flushing output: {}", e.error())))?
        .flush()
        .map_err(|e| CliError::Internal(format!("flushing output: {e}")))?;

    for w in emit_histograms(&out.metrics, &out.report, args.hist.as_deref(), args.freq.as_deref()) {
        warn!("{w}");
        eprintln!("mts: warning: {w}");
    }
    let r = &out.report;
    info!(
        "{} outputs, {} jobs, {:.3} s, {} checkpoints",
        r.total_output_count,
        r.jobs_executed,
        r.wall_time.as_secs_f64(),
        out.checkpoints_written
    );
    if r.interrupted {
        eprintln!(
            "mts: stopped after {} checkpoint(s); resume with -restart",
            out.checkpoints_written
        );
    }
    Ok(())
}

fn gw_ratio(g: &GwRatioArgs) -> Result<(), CliError> {
    let law: OffspringLaw = g.law.parse().map_err(|e: gwtree::GwError| CliError::Usage(e.to_string()))?;
    let (lo, hi) = g.window();
    let exp = GwExperiment {
        law,
        lo,
        hi,
        budget: g.b,
        trials: g.trials,
        seed: g.seed,
        sigma2: g.sigma2,
    };
    let result = gwtree::measure_joblist_ratio(&exp).map_err(|e| match e {
        gwtree::GwError::ZeroBudget | gwtree::GwError::EmptyWindow { .. } => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Internal(e.to_string()),
    })?;
    let write = |w: &mut dyn Write| gwtree::write_csv(&exp, &result, w);
    match &g.output {
        Some(path) => {
            let mut f = File::create(path)
                .map(BufWriter::new)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
            write(&mut f)
        }
        None => write(&mut io::stdout().lock()),
    }
    .map_err(|e| CliError::Internal(format!("writing CSV: {e}")))?;
    eprintln!(
        "mean ratio {:.6}, predicted {:.6} (sigma2 = {})",
        result.mean_ratio,
        result.predicted,
        exp.sigma2()
    );
    Ok(())
}

fn efficiency(e: &EfficiencyArgs) -> Result<(), CliError> {
    let r = compute_efficiency(e.single, e.cores, e.multi).map_err(|x| CliError::Usage(x.to_string()))?;
    println!("efficiency {:.4}", r.efficiency);
    println!("speedup {:.4}", r.speedup);
    Ok(())
}
