//! Parallel budgeted tree search.
//!
//! An [`Application`] exposes a tree through budgeted searches from
//! serialized nodes; [`engine::run`] spreads those searches over worker
//! threads, re-queueing whatever each job leaves unexplored.

pub mod checkpoint;
pub mod engine;
pub mod metrics;
pub mod reverse;
pub mod search;

pub use engine::{run, RunOutcome, RunReport, SchedulerConfig};
pub use search::{
    Application, ApplicationDescriptor, Budget, BudgetKind, JobNode, OutputMode, SearchError,
    SearchResult, SharedToken,
};
