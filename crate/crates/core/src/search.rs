//! The contract between the engine and an application.
//!
//! An application owns its immutable problem data (parsed once from the
//! input), produces a root [`JobNode`], and runs budgeted searches from any
//! node it previously produced. Nodes and shared tokens are opaque bytes to
//! the engine.

use std::fmt;

use thiserror::Error;

/// What a budget limit counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BudgetKind {
    Nodes,
    Decisions,
    Conflicts,
}

impl BudgetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BudgetKind::Nodes => "nodes",
            BudgetKind::Decisions => "decisions",
            BudgetKind::Conflicts => "conflicts",
        }
    }
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BudgetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nodes" => Ok(BudgetKind::Nodes),
            "decisions" => Ok(BudgetKind::Decisions),
            "conflicts" => Ok(BudgetKind::Conflicts),
            other => Err(format!("unknown budget kind `{other}`")),
        }
    }
}

/// Work limit for a single job. `None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_depth: Option<u64>,
    pub max_nodes: Option<u64>,
    pub kind: BudgetKind,
}

impl Budget {
    pub const UNBOUNDED: Budget = Budget {
        max_depth: None,
        max_nodes: None,
        kind: BudgetKind::Nodes,
    };

    pub fn nodes(max_depth: Option<u64>, max_nodes: Option<u64>) -> Self {
        Budget {
            max_depth,
            max_nodes,
            kind: BudgetKind::Nodes,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.max_depth.is_none() && self.max_nodes.is_none()
    }
}

/// Root of an unexplored subtree, serialized by the owning application.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JobNode {
    pub payload: Vec<u8>,
    /// Depth below the application's start vertex. Informational only.
    pub origin_depth: u32,
}

impl JobNode {
    pub fn new(payload: Vec<u8>, origin_depth: u32) -> Self {
        JobNode {
            payload,
            origin_depth,
        }
    }
}

/// An application-defined item relayed through the master to every worker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SharedToken(pub Vec<u8>);

/// Whether workers format output lines or only report counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Full,
    CountOnly,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchResult {
    /// Fully formatted output lines, empty in count-only mode.
    pub outputs: Vec<String>,
    pub output_count: u64,
    pub unexplored: Vec<JobNode>,
    /// Budget units consumed by this job.
    pub visited: u64,
    pub shared_delta: Vec<SharedToken>,
    /// The application found a final answer; the run should wind down.
    pub halt: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplicationDescriptor {
    pub name: String,
    pub supports_shared_data: bool,
    pub budget_kinds: Vec<BudgetKind>,
    /// Only the first output message of a run is kept (e.g. a SAT verdict).
    pub single_answer: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("cannot decode job node: {0}")]
    Decode(String),
    #[error("malformed shared token: {0}")]
    SharedToken(String),
    #[error("search failed: {0}")]
    Failed(String),
}

/// A parallelizable budgeted tree search.
///
/// `search` must be callable on any node returned by `root` or by an earlier
/// `search` on the same instance, from any thread, and its outputs together
/// with the subtrees of the returned unexplored nodes must cover the subtree
/// of `node` exactly once.
pub trait Application: Send + Sync {
    fn descriptor(&self) -> ApplicationDescriptor;

    fn root(&self) -> JobNode;

    fn search(
        &self,
        node: &JobNode,
        budget: &Budget,
        shared: &[SharedToken],
        mode: OutputMode,
    ) -> Result<SearchResult, SearchError>;

    /// Final output lines, called once by the master after the main loop
    /// with the complete shared data. `halted` is true when some job asked
    /// the run to stop early.
    fn finish(&self, _halted: bool, _shared: &[SharedToken]) -> Vec<String> {
        Vec::new()
    }
}

/// Little-endian byte reader used by the bundled node codecs.
pub struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        ByteReader { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], SearchError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(SearchError::Decode(format!(
                "truncated payload: wanted {n} bytes at offset {}, have {}",
                self.pos,
                self.bytes.len()
            ))),
        }
    }

    pub fn u8(&mut self) -> Result<u8, SearchError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, SearchError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn i32(&mut self) -> Result<i32, SearchError> {
        Ok(self.u32()? as i32)
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub fn finish(self) -> Result<(), SearchError> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(SearchError::Decode(format!(
                "{} trailing bytes",
                self.remaining()
            )))
        }
    }
}
