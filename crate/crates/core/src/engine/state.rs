//! Master-side bookkeeping: the job list, the shared-data table, worker
//! occupancy and per-job accounting. Everything here is owned by the
//! master context.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::Duration;

use crate::search::{Budget, JobNode, OutputMode, SharedToken};

use super::EngineError;

/// Pending jobs, served first in first out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JobList {
    entries: VecDeque<JobNode>,
}

impl JobList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, node: JobNode) {
        self.entries.push_back(node);
    }

    pub fn take_next(&mut self) -> Option<JobNode> {
        self.entries.pop_front()
    }

    pub fn iter(&self) -> impl Iterator<Item = &JobNode> {
        self.entries.iter()
    }
}

impl Extend<JobNode> for JobList {
    fn extend<T: IntoIterator<Item = JobNode>>(&mut self, iter: T) {
        self.entries.extend(iter)
    }
}

impl FromIterator<JobNode> for JobList {
    fn from_iter<T: IntoIterator<Item = JobNode>>(iter: T) -> Self {
        JobList {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Set of shared tokens numbered in merge order (sequence numbers start at
/// 1), with a per-worker record of the last number delivered.
#[derive(Debug, Clone, Default)]
pub struct SharedStore {
    items: Vec<SharedToken>,
    index: HashSet<SharedToken>,
    delivered: HashMap<usize, u64>,
}

impl SharedStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_items(items: impl IntoIterator<Item = SharedToken>) -> Self {
        let mut store = Self::new();
        store.merge(items);
        store
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Items in sequence order.
    pub fn items(&self) -> &[SharedToken] {
        &self.items
    }

    pub fn last_seq(&self) -> u64 {
        self.items.len() as u64
    }

    /// Adds the tokens not already present; returns how many were new.
    pub fn merge(&mut self, tokens: impl IntoIterator<Item = SharedToken>) -> usize {
        let before = self.items.len();
        for t in tokens {
            if self.index.insert(t.clone()) {
                self.items.push(t);
            }
        }
        self.items.len() - before
    }

    pub fn mark(&self, worker: usize) -> u64 {
        self.delivered.get(&worker).copied().unwrap_or(0)
    }

    pub fn set_mark(&mut self, worker: usize, seq: u64) {
        self.delivered.insert(worker, seq);
    }

    /// Items newer than what `worker` has; advances its mark.
    pub fn deliver(&mut self, worker: usize) -> Vec<SharedToken> {
        let mark = self.mark(worker) as usize;
        let fresh = self.items[mark.min(self.items.len())..].to_vec();
        self.delivered.insert(worker, self.last_seq());
        fresh
    }
}

/// Totals for a run (or the part of it executed by this process).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub total_output_count: u64,
    pub jobs_executed: u64,
    pub wall_time: Duration,
    /// Budget units consumed by each completed job, in completion order.
    pub frequencies: Vec<u64>,
    /// A job asked the run to stop (e.g. a SAT verdict was found).
    pub halted: bool,
    /// The run stopped after a checkpoint instead of finishing.
    pub interrupted: bool,
}

/// A job handed to a worker.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub job: JobNode,
    pub budget: Budget,
    pub shared: Vec<SharedToken>,
    pub mode: OutputMode,
}

/// What a worker sends back to the master after a job.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JobOutcome {
    pub unexplored: Vec<JobNode>,
    pub shared_delta: Vec<SharedToken>,
    pub visited: u64,
    pub output_count: u64,
    pub halt: bool,
}

#[derive(Debug, Clone)]
pub struct MasterState {
    pub joblist: JobList,
    pub store: SharedStore,
    pub report: RunReport,
    /// Job currently held by each worker, `None` when the worker is free.
    working: Vec<Option<JobNode>>,
}

impl MasterState {
    pub fn new(num_workers: usize, joblist: JobList, store: SharedStore) -> Self {
        MasterState {
            joblist,
            store,
            report: RunReport::default(),
            working: vec![None; num_workers],
        }
    }

    pub fn num_workers(&self) -> usize {
        self.working.len()
    }

    pub fn first_free(&self) -> Option<usize> {
        self.working.iter().position(Option::is_none)
    }

    pub fn busy(&self) -> usize {
        self.working.iter().filter(|w| w.is_some()).count()
    }

    pub fn is_working(&self, worker: usize) -> bool {
        self.working.get(worker).is_some_and(Option::is_some)
    }

    pub fn in_flight(&self, worker: usize) -> Option<&JobNode> {
        self.working.get(worker).and_then(Option::as_ref)
    }

    /// No pending jobs and every worker free.
    pub fn is_finished(&self) -> bool {
        self.joblist.is_empty() && self.busy() == 0
    }

    /// Marks `worker` as working on `job` and builds its message, carrying
    /// exactly the shared items the worker has not seen.
    pub fn assign(
        &mut self,
        worker: usize,
        job: JobNode,
        budget: Budget,
        mode: OutputMode,
    ) -> Assignment {
        debug_assert!(!self.is_working(worker), "worker {worker} already busy");
        self.working[worker] = Some(job.clone());
        Assignment {
            job,
            budget,
            shared: self.store.deliver(worker),
            mode,
        }
    }

    /// Takes a finished job back from `worker`.
    pub fn collect(&mut self, worker: usize, outcome: JobOutcome) -> Result<(), EngineError> {
        if !self.is_working(worker) {
            return Err(EngineError::Protocol(format!(
                "result from worker {worker}, which holds no job"
            )));
        }
        self.working[worker] = None;
        self.joblist.extend(outcome.unexplored);
        self.store.merge(outcome.shared_delta);
        self.report.total_output_count += outcome.output_count;
        self.report.jobs_executed += 1;
        self.report.frequencies.push(outcome.visited);
        self.report.halted |= outcome.halt;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(i: u8) -> SharedToken {
        SharedToken(vec![i])
    }

    fn node(i: u8) -> JobNode {
        JobNode::new(vec![i], 0)
    }

    fn assign(m: &mut MasterState, w: usize) -> Assignment {
        let job = m.joblist.take_next().unwrap_or_else(|| node(0));
        m.assign(w, job, Budget::UNBOUNDED, OutputMode::Full)
    }

    #[test]
    fn empty_store_delivers_nothing() {
        let mut m = MasterState::new(2, JobList::from_iter([node(1)]), SharedStore::new());
        let a = assign(&mut m, 0);
        assert!(a.shared.is_empty());
        assert!(m.is_working(0));
        assert_eq!(m.first_free(), Some(1));
    }

    #[test]
    fn delivers_items_above_mark() {
        let mut store = SharedStore::from_items((1..=5).map(tok));
        store.set_mark(0, 3);
        let mut m = MasterState::new(1, JobList::new(), store);
        let a = assign(&mut m, 0);
        assert_eq!(a.shared, vec![tok(4), tok(5)]);
        assert_eq!(m.store.mark(0), 5);
    }

    #[test]
    fn second_assign_without_new_items_carries_none() {
        let mut m = MasterState::new(1, JobList::new(), SharedStore::from_items([tok(1)]));
        assert_eq!(assign(&mut m, 0).shared, vec![tok(1)]);
        m.collect(0, JobOutcome::default()).unwrap();
        assert!(assign(&mut m, 0).shared.is_empty());
    }

    #[test]
    fn collect_appends_unexplored() {
        let mut m = MasterState::new(1, JobList::from_iter([node(9)]), SharedStore::new());
        assign(&mut m, 0);
        m.collect(0, JobOutcome::default()).unwrap();
        assert_eq!(m.joblist.len(), 0);
        assign(&mut m, 0);
        let k = 4;
        m.collect(
            0,
            JobOutcome {
                unexplored: (0..k).map(node).collect(),
                visited: 7,
                output_count: 7,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.joblist.len(), k as usize);
        assert_eq!(m.report.frequencies, vec![0, 7]);
        assert_eq!(m.report.jobs_executed, 2);
        assert!(!m.is_working(0));
    }

    #[test]
    fn duplicate_token_not_stored_or_redelivered() {
        let mut m = MasterState::new(2, JobList::new(), SharedStore::from_items([tok(1)]));
        assign(&mut m, 0);
        assign(&mut m, 1);
        m.collect(
            0,
            JobOutcome {
                shared_delta: vec![tok(1)],
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.store.len(), 1);
        assert!(assign(&mut m, 0).shared.is_empty());
    }

    #[test]
    fn collect_from_idle_worker_is_rejected() {
        let mut m = MasterState::new(1, JobList::new(), SharedStore::new());
        assert!(matches!(
            m.collect(0, JobOutcome::default()),
            Err(EngineError::Protocol(_))
        ));
    }

    #[test]
    fn tokens_reach_every_later_worker_once() {
        let mut m = MasterState::new(3, JobList::new(), SharedStore::new());
        assign(&mut m, 0);
        m.collect(
            0,
            JobOutcome {
                shared_delta: vec![tok(1), tok(2)],
                ..Default::default()
            },
        )
        .unwrap();
        for w in 0..3 {
            assert_eq!(assign(&mut m, w).shared, vec![tok(1), tok(2)]);
        }
        for w in 0..3 {
            m.collect(w, JobOutcome::default()).unwrap();
            assert!(assign(&mut m, w).shared.is_empty());
        }
    }
}
