//! Linear extensions of a poset by reverse search over permutations.
//!
//! Elements are relabelled so that the greedy extension (repeatedly take
//! the smallest available element) is the identity. Every linear extension
//! other than the identity then has a first descent, and swapping it yields
//! another linear extension with one fewer inversion; that swap is the
//! local search. Neighbours are adjacent transpositions, so the maximum
//! degree is `n - 1`.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use mts_core::reverse::{self, AdjacencyOracle, PruneMode, ReverseSearchProblem};
use mts_core::search::ByteReader;
use mts_core::{
    Application, ApplicationDescriptor, Budget, BudgetKind, JobNode, OutputMode, SearchError,
    SearchResult, SharedToken,
};

use crate::{parse_ints, InputError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    pub n: usize,
    /// `(a, b)`: `a` precedes `b`, 0-based.
    pub relations: Vec<(usize, usize)>,
}

impl Poset {
    pub fn antichain(n: usize) -> Self {
        Poset {
            n,
            relations: Vec::new(),
        }
    }

    pub fn chain(n: usize) -> Self {
        Poset {
            n,
            relations: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    /// Every one of the first `a` elements precedes each of the last `b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let relations = (0..a)
            .flat_map(|i| (0..b).map(move |j| (i, a + j)))
            .collect();
        Poset { n: a + b, relations }
    }

    /// Parses `n m` followed by `m` lines `a b` (1-based).
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(InputError::Empty)?;
        let [n, m] = parse_ints::<2>(header, hline)?;
        let mut relations = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or(InputError::Syntax {
                line: hline,
                msg: format!("expected {m} relations"),
            })?;
            let [a, b] = parse_ints::<2>(text, line)?;
            for x in [a, b] {
                if x == 0 || x > n {
                    return Err(InputError::Syntax {
                        line,
                        msg: format!("element {x} outside 1..={n}"),
                    });
                }
            }
            if a == b {
                return Err(InputError::Syntax {
                    line,
                    msg: format!("element {a} related to itself"),
                });
            }
            relations.push((a - 1, b - 1));
        }
        if let Some((line, _)) = lines.next() {
            return Err(InputError::Syntax {
                line,
                msg: "unexpected trailing line".into(),
            });
        }
        let poset = Poset { n, relations };
        if poset.greedy_extension().is_none() {
            return Err(InputError::Invalid("relations contain a cycle".into()));
        }
        Ok(poset)
    }

    /// Kahn's algorithm taking the smallest available element each time;
    /// `None` when the relation digraph is cyclic.
    pub fn greedy_extension(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        let mut succ = vec![Vec::new(); self.n];
        for &(a, b) in &self.relations {
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..self.n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_extension(&self, perm: &[usize]) -> bool {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &e) in perm.iter().enumerate() {
            if e >= self.n || pos[e] != usize::MAX {
                return false;
            }
            pos[e] = i;
        }
        perm.len() == self.n && self.relations.iter().all(|&(a, b)| pos[a] < pos[b])
    }
}


/// Reverse-search oracle over the linear extensions of a poset.
#[derive(Debug, Clone)]
pub struct TopSorts {
    n: usize,
    /// `precedes[a * n + b]` for relabelled elements.
    precedes: Vec<bool>,
    /// Original 0-based element for each label.
    element: Vec<usize>,
    prune: Option<PruneMode>,
}

impl TopSorts {
    pub fn new(poset: &Poset) -> Result<Self, InputError> {
        let element = poset
            .greedy_extension()
            .ok_or_else(|| InputError::Invalid("relations contain a cycle".into()))?;
        let n = poset.n;
        let mut label = vec![0usize; n];
        for (l, &e) in element.iter().enumerate() {
            label[e] = l;
        }
        let mut precedes = vec![false; n * n];
        for &(a, b) in &poset.relations {
            precedes[label[a] * n + label[b]] = true;
        }
        Ok(TopSorts {
            n,
            precedes,
            element,
            prune: None,
        })
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        Self::new(&Poset::parse(text)?)
    }

    pub fn with_prune(mut self, prune: Option<PruneMode>) -> Self {
        self.prune = prune;
        self
    }

    /// Original 0-based elements in the order given by a vertex.
    pub fn elements(&self, v: &[u16]) -> Vec<usize> {
        v.iter().map(|&l| self.element[l as usize]).collect()
    }

    fn first_descent(v: &[u16]) -> Option<usize> {
        v.windows(2).position(|w| w[0] > w[1])
    }
}

impl AdjacencyOracle for TopSorts {
    type Vertex = Vec<u16>;

    fn max_degree(&self) -> usize {
        self.n.saturating_sub(1)
    }

    /// Swap positions `j - 1` and `j` when the result is still an extension.
    fn adj(&self, v: &Vec<u16>, j: usize) -> Option<Vec<u16>> {
        let (a, b) = (v[j - 1] as usize, v[j] as usize);
        if self.precedes[a * self.n + b] {
            return None;
        }
        let mut w = v.clone();
        w.swap(j - 1, j);
        Some(w)
    }

    fn parent(&self, v: &Vec<u16>) -> Option<(Vec<u16>, usize)> {
        let i = Self::first_descent(v)?;
        let mut u = v.clone();
        u.swap(i, i + 1);
        Some((u, i + 1))
    }

    /// The swap at `j` is a tree edge exactly when it creates the first
    /// descent of the result: `v[j-1] < v[j]`, `v[..j-1]` ascends and
    /// `v[j-2] < v[j]`.
    fn child(&self, v: &Vec<u16>, j: usize) -> Option<Vec<u16>> {
        let p = j - 1;
        if v[p] > v[p + 1] {
            return None;
        }
        if p > 0 && v[p - 1] > v[p + 1] {
            return None;
        }
        if Self::first_descent(&v[..p]).is_some() {
            return None;
        }
        self.adj(v, j)
    }
}

impl ReverseSearchProblem for TopSorts {
    fn root_vertex(&self) -> Vec<u16> {
        (0..self.n as u16).collect()
    }

    fn encode_vertex(&self, v: &Vec<u16>, out: &mut Vec<u8>) {
        for &x in v {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }

    fn decode_vertex(&self, r: &mut ByteReader<'_>) -> Result<Vec<u16>, SearchError> {
        if r.remaining() != 2 * self.n {
            return Err(SearchError::Decode(format!(
                "expected {} permutation bytes, found {}",
                2 * self.n,
                r.remaining()
            )));
        }
        let mut v = Vec::with_capacity(self.n);
        let mut seen = vec![false; self.n];
        for _ in 0..self.n {
            let x = u16::from(r.u8()?) | (u16::from(r.u8()?) << 8);
            if x as usize >= self.n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(SearchError::Decode(format!("not a permutation: label {x}")));
            }
            v.push(x);
        }
        Ok(v)
    }

    fn format_vertex(&self, v: &Vec<u16>) -> String {
        let mut s = String::with_capacity(3 * v.len());
        for (i, &l) in v.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&(self.element[l as usize] + 1).to_string());
        }
        s
    }
}

impl Application for TopSorts {
    fn descriptor(&self) -> ApplicationDescriptor {
        ApplicationDescriptor {
            name: "topsorts".into(),
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
