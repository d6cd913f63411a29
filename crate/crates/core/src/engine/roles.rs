//! Worker and consumer loops and the messages they exchange.

use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;

use crossbeam_channel::{Receiver, Sender};

use crate::search::{Application, JobNode, SharedToken};

use super::state::{Assignment, JobOutcome};

#[derive(Debug)]
pub enum ToWorker {
    Assign(Assignment),
    Terminate,
}

#[derive(Debug)]
pub enum FromWorker {
    Done { worker: usize, outcome: JobOutcome },
    Failed { worker: usize, job: JobNode, error: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ToConsumer {
    /// Pre-formatted text, written verbatim.
    Output(String),
    /// Contribution to the count-only total.
    Count(u64),
    Terminate,
}

/// Joins output lines into one newline-terminated message.
pub fn join_lines(lines: &[String]) -> String {
    let mut s = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    s
}

/// Worker context: waits for assignments until told to terminate.
///
/// Output goes to the consumer before the result goes to the master, so
/// by the time the master sees a job finish its output is already queued
/// ahead of any terminate message.
pub fn worker_loop(
    id: usize,
    app: Arc<dyn Application>,
    inbox: Receiver<ToWorker>,
    to_master: Sender<FromWorker>,
    to_consumer: Sender<ToConsumer>,
) {
    let mut shared: Vec<SharedToken> = Vec::new();
    while let Ok(msg) = inbox.recv() {
        let assignment = match msg {
            ToWorker::Terminate => break,
            ToWorker::Assign(a) => a,
        };
        shared.extend(assignment.shared);
        let job = assignment.job;
        let budget = assignment.budget;
        let mode = assignment.mode;
        let result = panic::catch_unwind(AssertUnwindSafe(|| {
            app.search(&job, &budget, &shared, mode)
        }));
        let reply = match result {
            Ok(Ok(r)) => {
                if !r.outputs.is_empty() {
                    let _ = to_consumer.send(ToConsumer::Output(join_lines(&r.outputs)));
                }
                FromWorker::Done {
                    worker: id,
                    outcome: JobOutcome {
                        unexplored: r.unexplored,
                        shared_delta: r.shared_delta,
                        visited: r.visited,
                        output_count: r.output_count,
                        halt: r.halt,
                    },
                }
            }
            Ok(Err(e)) => FromWorker::Failed {
                worker: id,
                job,
                error: e.to_string(),
            },
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".to_string());
                FromWorker::Failed {
                    worker: id,
                    job,
                    error: format!("worker panicked: {msg}"),
                }
            }
        };
        if to_master.send(reply).is_err() {
            break;
        }
    }
}

/// Consumer context: writes messages in arrival order until terminate.
///
/// With `first_only`, only the first output message is written. Count
/// messages are summed and reported as a single `count: N` line at the end.
pub fn consumer_loop<W: Write>(
    inbox: Receiver<ToConsumer>,
    out: &mut W,
    first_only: bool,
) -> io::Result<()> {
    let mut wrote_any = false;
    let mut total: Option<u64> = None;
    while let Ok(msg) = inbox.recv() {
        match msg {
            ToConsumer::Terminate => break,
            ToConsumer::Output(text) => {
                if first_only && wrote_any {
                    continue;
                }
                out.write_all(text.as_bytes())?;
                wrote_any = true;
            }
            ToConsumer::Count(n) => *total.get_or_insert(0) += n,
        }
    }
    if let Some(n) = total {
        writeln!(out, "count: {n}")?;
    }
    out.flush()
}
