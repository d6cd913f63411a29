//! One master, one consumer and `num_workers` workers, each in its own
//! thread, talking only over channels.
//!
//! The master owns the job list and the shared-data table. It hands each
//! free worker the next job with a budget picked from the current list
//! length, collects unexplored nodes and shared-data updates, and stops
//! when the list is empty and every worker is idle.

mod policy;
mod roles;
mod state;

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{unbounded, RecvTimeoutError, Sender};
use log::{debug, warn};
use thiserror::Error;

use crate::checkpoint::{self, CheckpointError};
use crate::metrics::{RunMetrics, Sample};
use crate::search::{Application, BudgetKind, OutputMode};

pub use policy::select_budget;
pub use roles::{consumer_loop, join_lines, worker_loop, FromWorker, ToConsumer, ToWorker};
pub use state::{Assignment, JobList, JobOutcome, MasterState, RunReport, SharedStore};

#[derive(Debug, Clone, PartialEq)]
pub enum CheckpointTrigger {
    /// After this much wall time since the previous checkpoint.
    Interval(Duration),
    /// After this many completed jobs since the previous checkpoint.
    Jobs(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointPolicy {
    pub path: PathBuf,
    pub trigger: CheckpointTrigger,
    /// End the run (as if killed) once this many checkpoints are written.
    pub stop_after: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerConfig {
    pub num_workers: usize,
    /// `None` is unbounded.
    pub base_max_depth: Option<u64>,
    pub base_max_nodes: u64,
    pub scale: u64,
    pub lmin: f64,
    pub lmax: f64,
    pub budget_kind: BudgetKind,
    /// Adjust budgets from the job-list length; otherwise always use the
    /// base values.
    pub dynamic_budget: bool,
    pub output_mode: OutputMode,
    pub checkpoint: Option<CheckpointPolicy>,
    pub restart_path: Option<PathBuf>,
    /// Minimum spacing of histogram samples.
    pub sample_interval: Duration,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            num_workers: 1,
            base_max_depth: Some(2),
            base_max_nodes: 5000,
            scale: 40,
            lmin: 1.0,
            lmax: 3.0,
            budget_kind: BudgetKind::Nodes,
            dynamic_budget: true,
            output_mode: OutputMode::Full,
            checkpoint: None,
            restart_path: None,
            sample_interval: Duration::from_millis(100),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("num_workers must be at least 1")]
    NoWorkers,
    #[error("max_depth must be at least 1")]
    ZeroDepth,
    #[error("max_nodes must be at least 1")]
    ZeroNodes,
    #[error("scale must be at least 1")]
    ZeroScale,
    #[error("lmin and lmax must be positive, got lmin={lmin} lmax={lmax}")]
    NonPositiveBound { lmin: f64, lmax: f64 },
    #[error("lmin ({lmin}) exceeds lmax ({lmax})")]
    InvertedBounds { lmin: f64, lmax: f64 },
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        if self.base_max_depth == Some(0) {
            return Err(ConfigError::ZeroDepth);
        }
        if self.base_max_nodes == 0 {
            return Err(ConfigError::ZeroNodes);
        }
        if self.scale == 0 {
            return Err(ConfigError::ZeroScale);
        }
        let (lmin, lmax) = (self.lmin, self.lmax);
        if !(lmin > 0.0 && lmax > 0.0) {
            return Err(ConfigError::NonPositiveBound { lmin, lmax });
        }
        if lmin > lmax {
            return Err(ConfigError::InvertedBounds { lmin, lmax });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("checkpoint belongs to application `{found}`, not `{expected}`")]
    WrongApplication { expected: String, found: String },
    #[error("worker {worker} failed on a job at depth {depth}: {message}")]
    WorkerFailed {
        worker: usize,
        depth: u32,
        /// The lost job's payload.
        payload: Vec<u8>,
        message: String,
    },
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("output stream failed: {0}")]
    Output(String),
}

#[derive(Debug)]
pub struct RunOutcome<W> {
    pub report: RunReport,
    pub metrics: RunMetrics,
    pub checkpoints_written: usize,
    /// The output sink, returned once the consumer has exited.
    pub sink: W,
}

struct Contexts {
    workers: Vec<(Sender<ToWorker>, thread::JoinHandle<()>)>,
    consumer_tx: Sender<ToConsumer>,
}

impl Contexts {
    fn terminate_workers(&mut self) {
        for (tx, _) in &self.workers {
            let _ = tx.send(ToWorker::Terminate);
        }
        for (_, h) in self.workers.drain(..) {
            let _ = h.join();
        }
    }
}

/// Runs `app` to completion (or until a checkpoint stop or early halt),
/// streaming output into `sink`.
pub fn run<W>(
    app: Arc<dyn Application>,
    config: &SchedulerConfig,
    sink: W,
) -> Result<RunOutcome<W>, EngineError>
where
    W: Write + Send + 'static,
{
    config.validate()?;
    let desc = app.descriptor();
    let started = Instant::now();

    let mut master = match &config.restart_path {
        Some(path) => {
            let restored = checkpoint::checkpoint_read(path)?;
            if restored.app_name != desc.name {
                return Err(EngineError::WrongApplication {
                    expected: desc.name,
                    found: restored.app_name,
                });
            }
            let mut m = MasterState::new(config.num_workers, restored.joblist, restored.store);
            m.report.total_output_count = restored.output_count;
            m
        }
        None => MasterState::new(
            config.num_workers,
            JobList::from_iter([app.root()]),
            SharedStore::new(),
        ),
    };

    let (consumer_tx, consumer_rx) = unbounded::<ToConsumer>();
    let single_answer = desc.single_answer;
    let consumer = thread::Builder::new()
        .name("mts-consumer".into())
        .spawn(move || {
            let mut sink = sink;
            consumer_loop(consumer_rx, &mut sink, single_answer).map(|()| sink)
        })
        .expect("spawn consumer");

    let (result_tx, result_rx) = unbounded::<FromWorker>();
    let mut ctx = Contexts {
        workers: Vec::with_capacity(config.num_workers),
        consumer_tx: consumer_tx.clone(),
    };
    for id in 0..config.num_workers {
        let (tx, rx) = unbounded();
        let app = Arc::clone(&app);
        let to_master = result_tx.clone();
        let to_consumer = consumer_tx.clone();
        let h = thread::Builder::new()
            .name(format!("mts-worker-{id}"))
            .spawn(move || worker_loop(id, app, rx, to_master, to_consumer))
            .expect("spawn worker");
        ctx.workers.push((tx, h));
    }
    drop(result_tx);
    drop(consumer_tx);

    let mut metrics = RunMetrics::default();
    let mut last_sample: Option<Instant> = None;
    let mut checkpoints_written = 0usize;
    let mut last_checkpoint = Instant::now();
    let mut jobs_since_checkpoint = 0u64;
    let mut checkpoint_pending = false;
    let mut failure: Option<EngineError> = None;

    loop {
        if let Some(policy) = &config.checkpoint {
            let due = match policy.trigger {
                CheckpointTrigger::Interval(d) => last_checkpoint.elapsed() >= d,
                CheckpointTrigger::Jobs(n) => jobs_since_checkpoint >= n,
            };
            if due && !master.report.halted {
                checkpoint_pending = true;
            }
            // quiescent: nothing in flight, so the list holds every open job
            if checkpoint_pending && master.busy() == 0 {
                match checkpoint::checkpoint_write(
                    &policy.path,
                    &desc.name,
                    &master.joblist,
                    &master.store,
                    &master.report,
                ) {
                    Ok(()) => {
                        checkpoints_written += 1;
                        debug!(
                            "checkpoint {checkpoints_written}: {} jobs pending",
                            master.joblist.len()
                        );
                    }
                    Err(e) => warn!("checkpoint to {} failed: {e}", policy.path.display()),
                }
                checkpoint_pending = false;
                last_checkpoint = Instant::now();
                jobs_since_checkpoint = 0;
                if policy
                    .stop_after
                    .is_some_and(|n| checkpoints_written >= n && !master.joblist.is_empty())
                {
                    master.report.interrupted = true;
                    break;
                }
            }
        }

        if !master.report.halted && !checkpoint_pending {
            while !master.joblist.is_empty() {
                let Some(worker) = master.first_free() else {
                    break;
                };
                let budget = select_budget(master.joblist.len(), config);
                let job = master.joblist.take_next().expect("non-empty list");
                let msg = master.assign(worker, job, budget, config.output_mode);
                if ctx.workers[worker].0.send(ToWorker::Assign(msg)).is_err() {
                    failure = Some(EngineError::Protocol(format!("worker {worker} hung up")));
                    break;
                }
            }
        }
        if failure.is_some() {
            break;
        }

        let now = Instant::now();
        if last_sample.is_none_or(|t| now - t >= config.sample_interval) {
            metrics.samples.push(Sample {
                elapsed_seconds: (now - started).as_secs_f64(),
                busy_workers: master.busy(),
                joblist_len: master.joblist.len(),
            });
            last_sample = Some(now);
        }

        let idle = master.busy() == 0;
        if idle && (master.joblist.is_empty() || master.report.halted) {
            break;
        }
        if idle {
            // only a pending checkpoint leaves everyone idle with work queued
            continue;
        }

        let wait = last_sample
            .map(|t| config.sample_interval.saturating_sub(t.elapsed()))
            .unwrap_or_default()
            .max(Duration::from_millis(1));
        let first = match result_rx.recv_timeout(wait) {
            Ok(m) => Some(m),
            Err(RecvTimeoutError::Timeout) => None,
            Err(RecvTimeoutError::Disconnected) => {
                failure = Some(EngineError::Protocol("all workers hung up".into()));
                break;
            }
        };
        for msg in first.into_iter().chain(result_rx.try_iter()) {
            match msg {
                FromWorker::Done { worker, outcome } => {
                    if let Err(e) = master.collect(worker, outcome) {
                        failure = Some(e);
                        break;
                    }
                    jobs_since_checkpoint += 1;
                }
                FromWorker::Failed { worker, job, error } => {
                    failure = Some(EngineError::WorkerFailed {
                        worker,
                        depth: job.origin_depth,
                        payload: job.payload,
                        message: error,
                    });
                    break;
                }
            }
        }
        if failure.is_some() {
            break;
        }
    }

    if failure.is_none() && !master.report.interrupted {
        let final_lines = app.finish(master.report.halted, master.store.items());
        if !final_lines.is_empty() {
            let _ = ctx.consumer_tx.send(ToConsumer::Output(join_lines(&final_lines)));
        }
        if config.output_mode == OutputMode::CountOnly {
            let _ = ctx
                .consumer_tx
                .send(ToConsumer::Count(master.report.total_output_count));
        }
    }
    ctx.terminate_workers();
    let _ = ctx.consumer_tx.send(ToConsumer::Terminate);
    let sink = consumer
        .join()
        .map_err(|_| EngineError::Output("consumer panicked".into()))?
        .map_err(|e| EngineError::Output(e.to_string()))?;

    if let Some(e) = failure {
        return Err(e);
    }
    master.report.wall_time = started.elapsed();
    debug_assert_eq!(
        master.report.jobs_executed as usize,
        master.report.frequencies.len()
    );
    Ok(RunOutcome {
        report: master.report,
        metrics,
        checkpoints_written,
        sink,
    })
}
