//! Reverse search over an adjacency oracle, with and without budgets.
//!
//! The traversal never stores visited vertices: forward steps are taken
//! along edges `v -> adj(v, j)` whose local-search parent is `(v, j)`, and
//! backtracking recomputes the parent. Oracle indices are 1-based.

use thiserror::Error;

use crate::search::{Budget, ByteReader, JobNode, OutputMode, SearchError, SearchResult};

pub trait AdjacencyOracle {
    type Vertex: Clone + PartialEq;

    /// Upper bound on the number of neighbours of any vertex.
    fn max_degree(&self) -> usize;

    /// The `j`-th neighbour of `v`, `1 <= j <= max_degree()`, if any.
    fn adj(&self, v: &Self::Vertex, j: usize) -> Option<Self::Vertex>;

    /// Local search: the tree parent `u` of `v` together with the index `j`
    /// such that `adj(u, j) == v`. `None` exactly at the root.
    fn parent(&self, v: &Self::Vertex) -> Option<(Self::Vertex, usize)>;

    /// `adj(v, j)` when it is a reverse-search tree child of `v`.
    ///
    /// Oracles with a cheaper test than recomputing the parent can
    /// override this.
    fn child(&self, v: &Self::Vertex, j: usize) -> Option<Self::Vertex> {
        let w = self.adj(v, j)?;
        match self.parent(&w) {
            Some((u, pj)) if pj == j && u == *v => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraversalError {
    #[error("local search returned no parent for a vertex at depth {depth}")]
    MissingParent { depth: u64 },
    #[error("local search returned oracle index {index} outside 1..={max_degree}")]
    BadParentIndex { index: usize, max_degree: usize },
    #[error("traversal exceeded {cap} forward steps; oracle and local search disagree")]
    StepCap { cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrsLimits {
    pub max_depth: Option<u64>,
    pub max_nodes: Option<u64>,
    /// Hard cap on forward steps, turning a non-terminating traversal into
    /// an error.
    pub step_cap: Option<u64>,
}

impl BrsLimits {
    pub fn new(max_depth: Option<u64>, max_nodes: Option<u64>) -> Self {
        BrsLimits {
            max_depth,
            max_nodes,
            step_cap: max_nodes.map(|m| m.saturating_mul(10).max(10)),
        }
    }

    pub const UNBOUNDED: BrsLimits = BrsLimits {
        max_depth: None,
        max_nodes: None,
        step_cap: None,
    };

    pub fn with_step_cap(mut self, cap: Option<u64>) -> Self {
        self.step_cap = cap;
        self
    }
}

/// Root of a subtree the traversal did not enter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unexplored<V> {
    pub vertex: V,
    /// Depth relative to the traversal's start vertex.
    pub depth: u64,
    /// Whether `vertex` itself was already passed to the sink.
    pub emitted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrsOutcome<V> {
    /// Forward steps taken, which is also the number of emitted vertices.
    pub count: u64,
    pub unexplored: Vec<Unexplored<V>>,
}

/// Budgeted reverse search from `start`.
///
/// Every vertex entered by a forward step is passed to `sink` together with
/// its unexplored flag; `start` itself is never emitted. A vertex at
/// `max_depth` is flagged and its subtree skipped. Once `max_nodes` forward
/// steps have been taken the vertex just entered is flagged, no further
/// forward steps happen, and every tree child still ahead of the index
/// cursor on the way back to `start` is returned without being emitted.
pub fn brs<O, F>(
    oracle: &O,
    start: O::Vertex,
    limits: &BrsLimits,
    mut sink: F,
) -> Result<BrsOutcome<O::Vertex>, TraversalError>
where
    O: AdjacencyOracle,
    F: FnMut(&O::Vertex, bool),
{
    let delta = oracle.max_degree();
    let mut v = start;
    let mut j = 0usize;
    let mut depth = 0u64;
    let mut count = 0u64;
    let mut exhausted = limits.max_nodes == Some(0);
    let mut unexplored = Vec::new();

    loop {
        let mut flagged = false;
        while j < delta && !flagged {
            j += 1;
            let Some(w) = oracle.child(&v, j) else {
                continue;
            };
            if exhausted {
                unexplored.push(Unexplored {
                    vertex: w,
                    depth: depth + 1,
                    emitted: false,
                });
                continue;
            }
            // forward step
            v = w;
            j = 0;
            count += 1;
            depth += 1;
            if let Some(cap) = limits.step_cap {
                if count > cap {
                    return Err(TraversalError::StepCap { cap });
                }
            }
            if limits.max_nodes.is_some_and(|m| count >= m) {
                flagged = true;
                exhausted = true;
            }
            if limits.max_depth == Some(depth) {
                flagged = true;
            }
            sink(&v, flagged);
            if flagged {
                unexplored.push(Unexplored {
                    vertex: v.clone(),
                    depth,
                    emitted: true,
                });
            }
        }
        if depth > 0 {
            // backtrack step
            let (u, pj) = oracle
                .parent(&v)
                .ok_or(TraversalError::MissingParent { depth })?;
            if pj == 0 || pj > delta {
                return Err(TraversalError::BadParentIndex {
                    index: pj,
                    max_degree: delta,
                });
            }
            v = u;
            j = pj;
            depth -= 1;
        }
        if depth == 0 && j == delta {
            break;
        }
    }

    Ok(BrsOutcome { count, unexplored })
}

/// Unbudgeted reverse search; returns the number of vertices emitted.
pub fn rs<O, F>(oracle: &O, start: O::Vertex, mut sink: F) -> Result<u64, TraversalError>
where
    O: AdjacencyOracle,
    F: FnMut(&O::Vertex),
{
    let outcome = brs(oracle, start, &BrsLimits::UNBOUNDED, |v, _| sink(v))?;
    debug_assert!(outcome.unexplored.is_empty());
    Ok(outcome.count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneMode {
    /// Never return a leaf as unexplored.
    Leaves,
    /// Never return a leaf or a single-child chain as unexplored.
    Paths,
}

impl std::str::FromStr for PruneMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(PruneMode::Leaves),
            "1" => Ok(PruneMode::Paths),
            other => Err(format!("prune mode must be 0 or 1, got `{other}`")),
        }
    }
}

/// Up to `limit` tree children of `v`, in oracle order.
fn first_children<O: AdjacencyOracle>(oracle: &O, v: &O::Vertex, limit: usize) -> Vec<O::Vertex> {
    let mut out = Vec::with_capacity(limit);
    for j in 1..=oracle.max_degree() {
        if let Some(w) = oracle.child(v, j) {
            out.push(w);
            if out.len() == limit {
                break;
            }
        }
    }
    out
}

/// Drops unexplored nodes that are not worth a separate job, emitting the
/// vertices they stand for through `sink` instead.
///
/// Vertices are emitted only if they were not emitted already, so the set
/// of vertices emitted over a whole run is unchanged.
pub fn prune_filter<O, F>(
    oracle: &O,
    list: Vec<Unexplored<O::Vertex>>,
    mode: PruneMode,
    mut sink: F,
) -> Vec<Unexplored<O::Vertex>>
where
    O: AdjacencyOracle,
    F: FnMut(&O::Vertex),
{
    let mut kept = Vec::with_capacity(list.len());
    for node in list {
        match mode {
            PruneMode::Leaves => {
                if first_children(oracle, &node.vertex, 1).is_empty() {
                    if !node.emitted {
                        sink(&node.vertex);
                    }
                } else {
                    kept.push(node);
                }
            }
            PruneMode::Paths => {
                let mut cur = node;
                loop {
                    let mut children = first_children(oracle, &cur.vertex, 2);
                    match children.len() {
                        0 => {
                            if !cur.emitted {
                                sink(&cur.vertex);
                            }
                            break;
                        }
                        1 => {
                            if !cur.emitted {
                                sink(&cur.vertex);
                            }
                            cur = Unexplored {
                                vertex: children.pop().expect("one child"),
                                depth: cur.depth + 1,
                                emitted: false,
                            };
                        }
                        _ => {
                            kept.push(cur);
                            break;
                        }
                    }
                }
            }
        }
    }
    kept
}

/// A reverse-search enumeration problem that can be driven as an
/// [`Application`](crate::search::Application) through [`search_job`].
pub trait ReverseSearchProblem: AdjacencyOracle {
    fn root_vertex(&self) -> Self::Vertex;
    fn encode_vertex(&self, v: &Self::Vertex, out: &mut Vec<u8>);
    fn decode_vertex(&self, r: &mut ByteReader<'_>) -> Result<Self::Vertex, SearchError>;
    fn format_vertex(&self, v: &Self::Vertex) -> String;
}

/// Node payload layout: one flag byte (1 when the vertex was already
/// emitted by the job that returned it) followed by the vertex encoding.
pub fn encode_job<P: ReverseSearchProblem>(
    problem: &P,
    v: &P::Vertex,
    emitted: bool,
    origin_depth: u32,
) -> JobNode {
    let mut payload = vec![u8::from(emitted)];
    problem.encode_vertex(v, &mut payload);
    JobNode::new(payload, origin_depth)
}

pub fn decode_job<P: ReverseSearchProblem>(
    problem: &P,
    node: &JobNode,
) -> Result<(P::Vertex, bool), SearchError> {
    let mut r = ByteReader::new(&node.payload);
    let emitted = match r.u8()? {
        0 => false,
        1 => true,
        b => return Err(SearchError::Decode(format!("bad emitted flag {b}"))),
    };
    let v = problem.decode_vertex(&mut r)?;
    r.finish()?;
    Ok((v, emitted))
}

/// The job for the whole tree. Its root is emitted by the first job, so a
/// full run outputs every vertex including the root.
pub fn root_job<P: ReverseSearchProblem>(problem: &P) -> JobNode {
    encode_job(problem, &problem.root_vertex(), false, 0)
}

/// Runs one budgeted job. A root not yet emitted is emitted here and
/// charged one unit against `max_nodes`.
pub fn search_job<P: ReverseSearchProblem>(
    problem: &P,
    node: &JobNode,
    budget: &Budget,
    prune: Option<PruneMode>,
    mode: OutputMode,
) -> Result<SearchResult, SearchError> {
    let (start, emitted) = decode_job(problem, node)?;
    let mut outputs = Vec::new();
    let mut count = 0u64;
    let mut emit = |v: &P::Vertex| {
        count += 1;
        if mode == OutputMode::Full {
            outputs.push(problem.format_vertex(v));
        }
    };

    let mut max_nodes = budget.max_nodes;
    if !emitted {
        emit(&start);
        max_nodes = max_nodes.map(|m| m.saturating_sub(1));
    }
    let limits = BrsLimits::new(budget.max_depth, max_nodes);
    let outcome = brs(problem, start, &limits, |v, _| emit(v))
        .map_err(|e| SearchError::Failed(e.to_string()))?;
    let unexplored = match prune {
        Some(p) => prune_filter(problem, outcome.unexplored, p, &mut emit),
        None => outcome.unexplored,
    };

    let unexplored = unexplored
        .into_iter()
        .map(|u| {
            let depth = node.origin_depth.saturating_add(u.depth as u32);
            encode_job(problem, &u.vertex, u.emitted, depth)
        })
        .collect();

    Ok(SearchResult {
        outputs,
        output_count: count,
        unexplored,
        visited: count,
        shared_delta: Vec::new(),
        halt: false,
    })
}


#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;

    use proptest::prelude::*;

    fn collect(
        t: &HeapTree,
        start: usize,
        limits: BrsLimits,
    ) -> (Vec<(usize, bool)>, BrsOutcome<usize>) {
        let mut seen = Vec::new();
        let out = brs(t, start, &limits, |v, f| seen.push((*v, f))).unwrap();
        (seen, out)
    }

    #[test]
    fn unbounded_binary_tree_visits_everything_but_root() {
        let t = HeapTree::complete(2, 3);
        assert_eq!(t.size, 15);
        let (seen, out) = collect(&t, 0, BrsLimits::UNBOUNDED);
        assert_eq!(out.count, 14);
        assert!(out.unexplored.is_empty());
        let mut ids: Vec<_> = seen.iter().map(|(v, _)| *v).collect();
        ids.sort_unstable();
        assert_eq!(ids, (1..15).collect::<Vec<_>>());
    }

    #[test]
    fn depth_one_returns_both_children() {
        let t = HeapTree::complete(2, 3);
        let (seen, out) = collect(&t, 0, BrsLimits::new(Some(1), None));
        assert_eq!(out.count, 2);
        assert_eq!(seen, vec![(1, true), (2, true)]);
        let roots: Vec<_> = out.unexplored.iter().map(|u| (u.vertex, u.emitted)).collect();
        assert_eq!(roots, vec![(1, true), (2, true)]);
    }

    #[test]
    fn node_budget_five_hand_trace() {
        // heap order: 1,2 at depth 1; 3..6 at depth 2; 7..14 leaves.
        // DFS: 1, 3, 7, 8, 4 <- fifth step flags 4; 2 is a backtrack sibling.
        let t = HeapTree::complete(2, 3);
        let (seen, out) = collect(&t, 0, BrsLimits::new(None, Some(5)));
        assert_eq!(out.count, 5);
        assert_eq!(
            seen,
            vec![(1, false), (3, false), (7, false), (8, false), (4, true)]
        );
        let roots: Vec<_> = out.unexplored.iter().map(|u| (u.vertex, u.emitted)).collect();
        assert_eq!(roots, vec![(4, true), (2, false)]);

        // Unbudgeted reruns on the returned roots finish the tree: the
        // emitted root contributes its descendants, the other its whole
        // subtree.
        let mut further = 0;
        for u in &out.unexplored {
            further += rs(&t, u.vertex, |_| {}).unwrap() + u64::from(!u.emitted);
        }
        assert_eq!(further, 14 - 5);
    }

    #[test]
    fn rs_small_cases() {
        let single = HeapTree::complete(2, 0);
        assert_eq!(rs(&single, 0, |_| {}).unwrap(), 0);
        let path = HeapTree::complete(1, 3);
        assert_eq!(path.size, 4);
        assert_eq!(rs(&path, 0, |_| {}).unwrap(), 3);
    }

    #[test]
    fn zero_node_budget_returns_children_unemitted() {
        let t = HeapTree::complete(3, 2);
        let (seen, out) = collect(&t, 0, BrsLimits::new(None, Some(0)));
        assert!(seen.is_empty());
        assert_eq!(out.count, 0);
        assert_eq!(out.unexplored.len(), 3);
        assert!(out.unexplored.iter().all(|u| !u.emitted));
    }

    /// Tree whose local search claims every vertex's parent is its
    /// predecessor while every vertex has a child: an infinite path.
    struct Endless;

    impl AdjacencyOracle for Endless {
        type Vertex = u64;
        fn max_degree(&self) -> usize {
            1
        }
        fn adj(&self, v: &u64, _j: usize) -> Option<u64> {
            Some(v + 1)
        }
        fn parent(&self, v: &u64) -> Option<(u64, usize)> {
            (*v > 0).then(|| (v - 1, 1))
        }
    }

    #[test]
    fn step_cap_stops_runaway_traversal() {
        let limits = BrsLimits::UNBOUNDED.with_step_cap(Some(100));
        let err = brs(&Endless, 0, &limits, |_, _| {}).unwrap_err();
        assert_eq!(err, TraversalError::StepCap { cap: 100 });
    }

    struct Orphan;

    impl AdjacencyOracle for Orphan {
        type Vertex = u8;
        fn max_degree(&self) -> usize {
            1
        }
        fn adj(&self, v: &u8, _j: usize) -> Option<u8> {
            (*v == 0).then_some(1)
        }
        fn parent(&self, _v: &u8) -> Option<(u8, usize)> {
            None
        }
        fn child(&self, v: &u8, j: usize) -> Option<u8> {
            self.adj(v, j)
        }
    }

    #[test]
    fn missing_parent_is_reported() {
        let err = brs(&Orphan, 0, &BrsLimits::UNBOUNDED, |_, _| {}).unwrap_err();
        assert_eq!(err, TraversalError::MissingParent { depth: 1 });
    }

    /// Explicit tree given by child lists, for the pruning cases.
    struct Explicit {
        children: Vec<Vec<usize>>,
        parent: Vec<Option<(usize, usize)>>,
    }

    impl Explicit {
        fn new(children: Vec<Vec<usize>>) -> Self {
            let mut parent = vec![None; children.len()];
            for (u, cs) in children.iter().enumerate() {
                for (k, &c) in cs.iter().enumerate() {
                    parent[c] = Some((u, k + 1));
                }
            }
            Explicit { children, parent }
        }
    }

    impl AdjacencyOracle for Explicit {
        type Vertex = usize;
        fn max_degree(&self) -> usize {
            self.children.iter().map(Vec::len).max().unwrap_or(0)
        }
        fn adj(&self, v: &usize, j: usize) -> Option<usize> {
            self.children[*v].get(j - 1).copied()
        }
        fn parent(&self, v: &usize) -> Option<(usize, usize)> {
            self.parent[*v]
        }
    }

    fn u(vertex: usize, emitted: bool) -> Unexplored<usize> {
        Unexplored {
            vertex,
            depth: 1,
            emitted,
        }
    }

    #[test]
    fn prune_drops_leaf_and_emits_it() {
        let t = Explicit::new(vec![vec![1], vec![]]);
        let mut emitted = Vec::new();
        let kept = prune_filter(&t, vec![u(1, false)], PruneMode::Leaves, |v| emitted.push(*v));
        assert!(kept.is_empty());
        assert_eq!(emitted, vec![1]);

        // already emitted leaf is dropped silently
        emitted.clear();
        let kept = prune_filter(&t, vec![u(1, true)], PruneMode::Leaves, |v| emitted.push(*v));
        assert!(kept.is_empty());
        assert!(emitted.is_empty());
    }

    #[test]
    fn prune_paths_walks_chain_to_branch() {
        // 0 -> 1 -> 2 -> 3 -> 4 {5, 6}: chain 1,2,3 ends at branch 4
        let t = Explicit::new(vec![
            vec![1],
            vec![2],
            vec![3],
            vec![4],
            vec![5, 6],
            vec![],
            vec![],
        ]);
        let mut emitted = Vec::new();
        let kept = prune_filter(&t, vec![u(1, false)], PruneMode::Paths, |v| emitted.push(*v));
        assert_eq!(emitted, vec![1, 2, 3]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].vertex, 4);
        assert!(!kept[0].emitted);
        assert_eq!(kept[0].depth, 4);

        // mode 0 keeps the chain head, it has a child
        emitted.clear();
        let kept = prune_filter(&t, vec![u(1, false)], PruneMode::Leaves, |v| emitted.push(*v));
        assert_eq!(kept.len(), 1);
        assert!(emitted.is_empty());
    }

    #[test]
    fn prune_paths_chain_to_leaf_disappears() {
        let t = Explicit::new(vec![vec![1], vec![2], vec![]]);
        let mut emitted = Vec::new();
        let kept = prune_filter(&t, vec![u(1, true)], PruneMode::Paths, |v| emitted.push(*v));
        assert!(kept.is_empty());
        assert_eq!(emitted, vec![2]);
    }

    #[test]
    fn branch_vertex_unchanged_by_either_mode() {
        let t = Explicit::new(vec![vec![1], vec![2, 3], vec![], vec![]]);
        for mode in [PruneMode::Leaves, PruneMode::Paths] {
            let mut emitted = Vec::new();
            let kept = prune_filter(&t, vec![u(1, true)], mode, |v| emitted.push(*v));
            assert_eq!(kept, vec![u(1, true)]);
            assert!(emitted.is_empty());
        }
    }

    /// Runs jobs to completion from a FIFO queue, returning every emitted
    /// vertex and the per-job counts.
    fn drain(
        t: &HeapTree,
        budget: Budget,
        prune: Option<PruneMode>,
    ) -> (Vec<usize>, Vec<u64>) {
        let mut queue = std::collections::VecDeque::from([root_job(t)]);
        let mut all = Vec::new();
        let mut freqs = Vec::new();
        while let Some(job) = queue.pop_front() {
            let r = search_job(t, &job, &budget, prune, OutputMode::Full).unwrap();
            all.extend(r.outputs.iter().map(|s| s.parse::<usize>().unwrap()));
            assert_eq!(r.output_count, r.outputs.len() as u64);
            freqs.push(r.visited);
            queue.extend(r.unexplored);
        }
        (all, freqs)
    }

    proptest! {
        #[test]
        fn budgeted_jobs_partition_tree(
            arity in 1usize..4,
            height in 0u32..6,
            depth in prop::option::of(1u64..4),
            nodes in prop::option::of(1u64..20),
            prune in prop::option::of(prop_oneof![Just(PruneMode::Leaves), Just(PruneMode::Paths)]),
        ) {
            let t = HeapTree::complete(arity, height);
            let (mut all, freqs) = drain(&t, Budget::nodes(depth, nodes), prune);
            all.sort_unstable();
            prop_assert_eq!(all, (0..t.size).collect::<Vec<_>>());
            prop_assert_eq!(freqs.iter().sum::<u64>(), t.size as u64);
            if prune.is_none() {
                if let Some(n) = nodes {
                    prop_assert!(freqs.iter().all(|&f| f <= n));
                }
            }
        }

        #[test]
        fn brs_respects_budget_and_flag_monotonicity(
            arity in 1usize..4,
            height in 0u32..6,
            depth in prop::option::of(1u64..5),
            nodes in prop::option::of(1u64..30),
        ) {
            let t = HeapTree::complete(arity, height);
            let mut depths = Vec::new();
            let mut flags = Vec::new();
            let out = brs(&t, 0, &BrsLimits::new(depth, nodes), |v, f| {
                let mut d = 0u64;
                let mut x = *v;
                while x != 0 { x = (x - 1) / arity; d += 1; }
                depths.push(d);
                flags.push(f);
            }).unwrap();
            if let Some(n) = nodes {
                prop_assert!(out.count <= n);
            }
            if let Some(d) = depth {
                prop_assert!(depths.iter().all(|&x| x <= d));
            }
            // with no depth limit the first flag ends the forward steps
            if depth.is_none() {
                if let Some(first) = flags.iter().position(|&f| f) {
                    prop_assert_eq!(first + 1, flags.len());
                }
            }
            // emitted vertices plus returned subtrees cover the rest exactly
            let mut covered: Vec<usize> = Vec::new();
            let mut emitted_set: Vec<usize> = Vec::new();
            brs(&t, 0, &BrsLimits::new(depth, nodes), |v, _| emitted_set.push(*v)).unwrap();
            covered.extend(&emitted_set);
            for u in &out.unexplored {
                let mut sub = Vec::new();
                subtree(&t, u.vertex, &mut sub);
                if u.emitted { sub.remove(0); }
                covered.extend(sub);
            }
            covered.sort_unstable();
            prop_assert_eq!(covered, (1..t.size).collect::<Vec<_>>());
        }

        #[test]
        fn rs_matches_unbounded_brs(arity in 1usize..4, height in 0u32..6) {
            let t = HeapTree::complete(arity, height);
            let a = rs(&t, 0, |_| {}).unwrap();
            let b = brs(&t, 0, &BrsLimits::UNBOUNDED, |_, f| assert!(!f)).unwrap();
            prop_assert_eq!(a, b.count);
            prop_assert_eq!(a, t.size as u64 - 1);
        }
    }

    #[test]
    fn job_codec_round_trip_and_truncation() {
        let t = HeapTree::complete(2, 4);
        let job = encode_job(&t, &9, true, 3);
        assert_eq!(decode_job(&t, &job).unwrap(), (9, true));
        let mut short = job.clone();
        short.payload.truncate(3);
        assert!(matches!(decode_job(&t, &short), Err(SearchError::Decode(_))));
        let mut bad_flag = job;
        bad_flag.payload[0] = 7;
        assert!(decode_job(&t, &bad_flag).is_err());
    }
}
