//! Spanning trees of a connected graph by reverse search over edge
//! exchanges.
//!
//! A tree is its sorted list of edge indices. The root is the greedy
//! (Kruskal by index) tree, which is the lexicographically least spanning
//! tree. The local search adds the least-index root edge missing from the
//! tree and drops the largest-index non-root edge on the cycle it closes,
//! so every step gains one root edge.

use std::collections::VecDeque;

use mts_core::reverse::{self, AdjacencyOracle, PruneMode, ReverseSearchProblem};
use mts_core::search::ByteReader;
use mts_core::{
    Application, ApplicationDescriptor, Budget, BudgetKind, JobNode, OutputMode, SearchError,
    SearchResult, SharedToken,
};

use crate::{parse_ints, InputError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    /// Edge `i` joins `edges[i].0` and `edges[i].1`, 0-based.
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, InputError> {
        let mut seen = std::collections::HashSet::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(InputError::Invalid(format!("edge {} leaves the vertex range", i + 1)));
            }
            if u == v {
                return Err(InputError::Invalid(format!("edge {} is a self-loop", i + 1)));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(InputError::Invalid(format!("edge {} is a parallel edge", i + 1)));
            }
        }
        let g = Graph { n, edges };
        if n == 0 || g.greedy_tree().len() + 1 != n {
            return Err(InputError::Invalid("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("cycle")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::new(n, edges).expect("complete graph")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a)
            .flat_map(|i| (0..b).map(move |j| (i, a + j)))
            .collect();
        Graph::new(a + b, edges).expect("complete bipartite graph")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, edges).expect("petersen graph")
    }

    /// Parses `n m` followed by `m` lines `u v` (1-based); edge indices
    /// follow line order.
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(InputError::Empty)?;
        let [n, m] = parse_ints::<2>(header, hline)?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or(InputError::Syntax {
                line: hline,
                msg: format!("expected {m} edges"),
            })?;
            let [u, v] = parse_ints::<2>(text, line)?;
            if u == 0 || v == 0 || u > n || v > n {
                return Err(InputError::Syntax {
                    line,
                    msg: format!("vertex outside 1..={n}"),
                });
            }
            edges.push((u - 1, v - 1));
        }
        if let Some((line, _)) = lines.next() {
            return Err(InputError::Syntax {
                line,
                msg: "unexpected trailing line".into(),
            });
        }
        Graph::new(n, edges)
    }

    /// Kruskal in index order.
    pub fn greedy_tree(&self) -> Vec<u32> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut tree = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                tree.push(i as u32);
            }
        }
        tree
    }

    /// Whether the edge set is a spanning tree.
    pub fn is_spanning_tree(&self, tree: &[u32]) -> bool {
        if tree.len() + 1 != self.n {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for &e in tree {
            let Some(&(u, v)) = self.edges.get(e as usize) else {
                return false;
            };
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}


#[derive(Debug, Clone)]
pub struct SpanningTrees {
    graph: Graph,
    root: Vec<u32>,
    in_root: Vec<bool>,
    /// Number of non-tree edges of any spanning tree.
    cotree: usize,
    prune: Option<PruneMode>,
}

impl SpanningTrees {
    pub fn new(graph: Graph) -> Self {
        let root = graph.greedy_tree();
        let mut in_root = vec![false; graph.edges.len()];
        for &e in &root {
            in_root[e as usize] = true;
        }
        let cotree = graph.edges.len() + 1 - graph.n;
        SpanningTrees {
            graph,
            root,
            in_root,
            cotree,
            prune: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        Ok(Self::new(Graph::parse(text)?))
    }

    pub fn with_prune(mut self, prune: Option<PruneMode>) -> Self {
        self.prune = prune;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Edges not in `tree`, ascending.
    fn complement(&self, tree: &[u32]) -> Vec<u32> {
        let mut in_tree = vec![false; self.graph.edges.len()];
        for &e in tree {
            in_tree[e as usize] = true;
        }
        (0..self.graph.edges.len() as u32)
            .filter(|&e| !in_tree[e as usize])
            .collect()
    }

    /// Edge indices on the tree path between `from` and `to`.
    fn tree_path(&self, tree: &[u32], from: usize, to: usize) -> Vec<u32> {
        let n = self.graph.n;
        let mut adj = vec![Vec::new(); n];
        for &e in tree {
            let (u, v) = self.graph.edges[e as usize];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let mut via: Vec<Option<(usize, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = to;
        while let Some((p, e)) = via[x] {
            path.push(e);
            x = p;
        }
        path
    }

    /// The (added, dropped) edge pair of the local search at `tree`.
    fn improving_exchange(&self, tree: &[u32]) -> Option<(u32, u32)> {
        let mut in_tree = vec![false; self.graph.edges.len()];
        for &e in tree {
            in_tree[e as usize] = true;
        }
        let add = *self.root.iter().find(|&&e| !in_tree[e as usize])?;
        let (u, v) = self.graph.edges[add as usize];
        let drop = self
            .tree_path(tree, u, v)
            .into_iter()
            .filter(|&e| !self.in_root[e as usize])
            .max()
            .expect("cycle through a root edge leaves the root");
        Some((add, drop))
    }

    fn exchange(tree: &[u32], out: u32, inn: u32) -> Vec<u32> {
        let mut t: Vec<u32> = tree.iter().copied().filter(|&e| e != out).collect();
        let pos = t.partition_point(|&e| e < inn);
        t.insert(pos, inn);
        t
    }
}

impl AdjacencyOracle for SpanningTrees {
    type Vertex = Vec<u32>;

    fn max_degree(&self) -> usize {
        (self.graph.n - 1) * self.cotree
    }

    /// Index `j` names the pair (tree edge `(j-1) / c`, non-tree edge
    /// `(j-1) % c`), positions taken in ascending edge order, where `c` is
    /// the number of non-tree edges.
    fn adj(&self, tree: &Vec<u32>, j: usize) -> Option<Vec<u32>> {
        let out = tree[(j - 1) / self.cotree];
        let inn = self.complement(tree)[(j - 1) % self.cotree];
        let (u, v) = self.graph.edges[inn as usize];
        if !self.tree_path(tree, u, v).contains(&out) {
            return None;
        }
        Some(Self::exchange(tree, out, inn))
    }

    fn parent(&self, tree: &Vec<u32>) -> Option<(Vec<u32>, usize)> {
        let (add, drop) = self.improving_exchange(tree)?;
        let parent = Self::exchange(tree, drop, add);
        let out_pos = parent.binary_search(&add).expect("added edge present");
        let in_pos = self
            .complement(&parent)
            .binary_search(&drop)
            .expect("dropped edge absent");
        Some((parent, out_pos * self.cotree + in_pos + 1))
    }
}

impl ReverseSearchProblem for SpanningTrees {
    fn root_vertex(&self) -> Vec<u32> {
        self.root.clone()
    }

    fn encode_vertex(&self, v: &Vec<u32>, out: &mut Vec<u8>) {
        for &e in v {
            out.extend_from_slice(&e.to_le_bytes());
        }
    }

    fn decode_vertex(&self, r: &mut ByteReader<'_>) -> Result<Vec<u32>, SearchError> {
        let k = self.graph.n - 1;
        if r.remaining() != 4 * k {
            return Err(SearchError::Decode(format!(
                "expected {k} edge indices, found {} bytes",
                r.remaining()
            )));
        }
        let tree = (0..k).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
        if !tree.windows(2).all(|w| w[0] < w[1]) || !self.graph.is_spanning_tree(&tree) {
            return Err(SearchError::Decode("payload is not a spanning tree".into()));
        }
        Ok(tree)
    }

    fn format_vertex(&self, v: &Vec<u32>) -> String {
        v.iter()
            .map(|e| (e + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Application for SpanningTrees {
    fn descriptor(&self) -> ApplicationDescriptor {
        ApplicationDescriptor {
            name: "spantree".into(),
            supports_shared_data: false,
            budget_kinds: vec![BudgetKind::Nodes],
            single_answer: false,
        }
    }

    fn root(&self) -> JobNode {
        reverse::root_job(self)
    }

    fn search(
        &self,
        node: &JobNode,
        budget: &Budget,
        _shared: &[SharedToken],
        mode: OutputMode,
    ) -> Result<SearchResult, SearchError> {
        reverse::search_job(self, node, budget, self.prune, mode)
    }
}
