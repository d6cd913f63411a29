//! Critical Galton-Watson trees: sampling, enumeration and job-list
//! measurements.
//!
//! A tree is sampled as its preorder offspring sequence (the Lukasiewicz
//! word) and searched directly: the oracle returns the j-th child and the
//! local search returns the parent. Sizes are conditioned by rejection
//! into a window.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use mts_core::reverse::{self, AdjacencyOracle, PruneMode, ReverseSearchProblem};
use mts_core::search::ByteReader;
use mts_core::{
    Application, ApplicationDescriptor, Budget, BudgetKind, JobNode, OutputMode, SearchError,
    SearchResult, SharedToken,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use thiserror::Error;

use crate::{parse_ints, InputError};

/// Name of the generator recorded in experiment output.
pub const GENERATOR: &str = "chacha8";

/// Rejection attempts allowed before giving up on a size window.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GwError {
    #[error("unknown or non-critical offspring law `{0}`")]
    Law(String),
    #[error("size window [{lo}, {hi}] is empty")]
    EmptyWindow { lo: usize, hi: usize },
    #[error(
        "no tree with size in [{lo}, {hi}] after {attempts} attempts; widen the window"
    )]
    RetryCap { lo: usize, hi: usize, attempts: u64 },
    #[error("offspring sequence is not a tree: {0}")]
    NotATree(String),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("enumeration failed: {0}")]
    Search(String),
}

/// Offspring distributions with mean exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffspringLaw {
    /// 0, 1, 2 with probabilities 1/4, 1/2, 1/4: uniform binary trees.
    Catalan,
    /// 0 or 2 with probability 1/2 each.
    FullBinary,
    /// P(i) = 2^-(i+1): uniform planted plane trees.
    Geometric,
    /// Poisson(1): Cayley tree shapes.
    Poisson,
    /// Binomial(k, 1/k): uniform k-ary trees, k >= 2.
    Binomial(u32),
    /// Uniform on {0..k}; critical only for k = 2.
    Uniform(u32),
}

impl OffspringLaw {
    pub fn variance(&self) -> f64 {
        match *self {
            OffspringLaw::Catalan => 0.5,
            OffspringLaw::FullBinary => 1.0,
            OffspringLaw::Geometric => 2.0,
            OffspringLaw::Poisson => 1.0,
            OffspringLaw::Binomial(k) => 1.0 - 1.0 / f64::from(k),
            OffspringLaw::Uniform(k) => {
                let k = f64::from(k);
                k * (k + 2.0) / 12.0
            }
        }
    }

    /// The constant used in the job-list prediction. For the Catalan law
    /// this is the customary value 3/2, which is the second moment rather
    /// than the variance; every other law uses its variance.
    pub fn nominal_sigma2(&self) -> f64 {
        match self {
            OffspringLaw::Catalan => 1.5,
            other => other.variance(),
        }
    }

    pub fn sampler(&self) -> OffspringSampler {
        let kind = match *self {
            OffspringLaw::Catalan => SamplerKind::Catalan,
            OffspringLaw::FullBinary => SamplerKind::FullBinary,
            OffspringLaw::Geometric => SamplerKind::Geometric,
            OffspringLaw::Poisson => SamplerKind::Poisson(Poisson::new(1.0).expect("rate 1")),
            OffspringLaw::Binomial(k) => SamplerKind::Binomial(
                Binomial::new(u64::from(k), 1.0 / f64::from(k)).expect("valid binomial"),
            ),
            OffspringLaw::Uniform(k) => SamplerKind::Uniform(k),
        };
        OffspringSampler { kind }
    }
}

impl fmt::Display for OffspringLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OffspringLaw::Catalan => f.write_str("catalan"),
            OffspringLaw::FullBinary => f.write_str("fullbinary"),
            OffspringLaw::Geometric => f.write_str("geometric"),
            OffspringLaw::Poisson => f.write_str("poisson"),
            OffspringLaw::Binomial(k) => write!(f, "binomial({k})"),
            OffspringLaw::Uniform(k) => write!(f, "uniform({k})"),
        }
    }
}

impl FromStr for OffspringLaw {
    type Err = GwError;

    /// Accepts `catalan`, `fullbinary`, `geometric`, `poisson`,
    /// `binomial(k)` and `uniform(k)`; `name:k` also works for the last two.
    fn from_str(s: &str) -> Result<Self, GwError> {
        let bad = || GwError::Law(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let (name, arg) = match lower.split_once(['(', ':']) {
            Some((n, rest)) => {
                let k = rest.trim_end_matches(')').trim();
                (n.trim(), Some(k.parse::<u32>().map_err(|_| bad())?))
            }
            None => (lower.as_str(), None),
        };
        let law = match (name, arg) {
            ("catalan", None) => OffspringLaw::Catalan,
            ("fullbinary", None) => OffspringLaw::FullBinary,
            ("geometric", None) => OffspringLaw::Geometric,
            ("poisson", None) => OffspringLaw::Poisson,
            ("binomial", Some(k)) if k >= 2 => OffspringLaw::Binomial(k),
            ("uniform", Some(2)) => OffspringLaw::Uniform(2),
            _ => return Err(bad()),
        };
        Ok(law)
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Catalan,
    FullBinary,
    Geometric,
    Poisson(Poisson<f64>),
    Binomial(Binomial),
    Uniform(u32),
}

/// Draws offspring counts for one law.
#[derive(Debug, Clone)]
pub struct OffspringSampler {
    kind: SamplerKind,
}

impl OffspringSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match &self.kind {
            SamplerKind::Catalan => [0, 1, 1, 2][rng.gen_range(0..4)],
            SamplerKind::FullBinary => 2 * u32::from(rng.gen::<bool>()),
            SamplerKind::Geometric => rng.gen::<u64>().trailing_ones(),
            SamplerKind::Poisson(d) => d.sample(rng) as u32,
            SamplerKind::Binomial(d) => d.sample(rng) as u32,
            SamplerKind::Uniform(k) => rng.gen_range(0..=*k),
        }
    }
}

/// Draws unconditioned trees until one has size in `[lo, hi]`, abandoning
/// a draw as soon as it grows past `hi`.
pub fn sample_offspring_sequence<R: Rng + ?Sized>(
    law: OffspringLaw,
    lo: usize,
    hi: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Vec<u32>, GwError> {
    if lo == 0 || lo > hi {
        return Err(GwError::EmptyWindow { lo, hi });
    }
    let sampler = law.sampler();
    let mut seq = Vec::new();
    for _ in 0..max_attempts {
        seq.clear();
        let mut open = 1u64;
        while open > 0 && seq.len() <= hi {
            let xi = sampler.draw(rng);
            seq.push(xi);
            open = open - 1 + u64::from(xi);
        }
        if open == 0 && (lo..=hi).contains(&seq.len()) {
            return Ok(seq);
        }
    }
    Err(GwError::RetryCap {
        lo,
        hi,
        attempts: max_attempts,
    })
}

pub fn sample_gw_tree(law: OffspringLaw, lo: usize, hi: usize, seed: u64) -> Result<GwTree, GwError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = sample_offspring_sequence(law, lo, hi, &mut rng, DEFAULT_MAX_ATTEMPTS)?;
    GwTree::from_offspring(seq)
}

/// An ordered tree in preorder, with explicit child lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwTree {
    offspring: Vec<u32>,
    parent: Vec<u32>,
    /// 1-based position of each node among its siblings.
    rank: Vec<u32>,
    /// Children of `v` are `children[first[v]..first[v + 1]]`.
    first: Vec<u32>,
    children: Vec<u32>,
    max_offspring: u32,
}

impl GwTree {
    pub fn from_offspring(offspring: Vec<u32>) -> Result<Self, GwError> {
        let n = offspring.len();
        if n == 0 {
            return Err(GwError::NotATree("empty sequence".into()));
        }
        let mut open = 1u64;
        for (i, &xi) in offspring.iter().enumerate() {
            if open == 0 {
                return Err(GwError::NotATree(format!("tree closes before position {i}")));
            }
            open = open - 1 + u64::from(xi);
        }
        if open != 0 {
            return Err(GwError::NotATree(format!("{open} children left unfilled")));
        }

        let mut first = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        for &xi in &offspring {
            first.push(acc);
            acc += xi;
        }
        first.push(acc);

        let mut parent = vec![0u32; n];
        let mut rank = vec![0u32; n];
        let mut children = vec![0u32; n - 1];
        // (node, children still to place)
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for (i, &xi) in offspring.iter().enumerate() {
            if let Some(top) = stack.last_mut() {
                let p = top.0 as usize;
                let r = offspring[p] - top.1 + 1;
                parent[i] = top.0;
                rank[i] = r;
                children[(first[p] + r - 1) as usize] = i as u32;
                top.1 -= 1;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            if xi > 0 {
                stack.push((i as u32, xi));
            }
        }
        let max_offspring = offspring.iter().copied().max().unwrap_or(0);
        Ok(GwTree {
            offspring,
            parent,
            rank,
            first,
            children,
            max_offspring,
        })
    }

    pub fn size(&self) -> usize {
        self.offspring.len()
    }

    pub fn offspring(&self) -> &[u32] {
        &self.offspring
    }

    pub fn children(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.children[self.first[v] as usize..self.first[v + 1] as usize]
    }

    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.size()];
        for v in 1..self.size() {
            depth[v] = depth[self.parent[v] as usize] + 1;
        }
        depth.into_iter().max().unwrap_or(0)
    }
}

impl AdjacencyOracle for GwTree {
    type Vertex = u32;

    fn max_degree(&self) -> usize {
        self.max_offspring as usize
    }

    fn adj(&self, v: &u32, j: usize) -> Option<u32> {
        self.children(*v).get(j - 1).copied()
    }

    fn parent(&self, v: &u32) -> Option<(u32, usize)> {
        let v = *v as usize;
        (v != 0).then(|| (self.parent[v], self.rank[v] as usize))
    }

    fn child(&self, v: &u32, j: usize) -> Option<u32> {
        self.adj(v, j)
    }
}

impl ReverseSearchProblem for GwTree {
    fn root_vertex(&self) -> u32 {
        0
    }

    fn encode_vertex(&self, v: &u32, out: &mut Vec<u8>) {
        out.extend_from_slice(&v.to_le_bytes());
    }

    fn decode_vertex(&self, r: &mut ByteReader<'_>) -> Result<u32, SearchError> {
        let v = r.u32()?;
        if v as usize >= self.size() {
            return Err(SearchError::Decode(format!(
                "node {v} outside a tree of size {}",
                self.size()
            )));
        }
        Ok(v)
    }

    /// Preorder position, 1-based.
    fn format_vertex(&self, v: &u32) -> String {
        (v + 1).to_string()
    }
}

/// Parameters for sampling one tree from a text file of the form
/// `<law> <n_lo> <n_hi>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwSpec {
    pub law: OffspringLaw,
    pub lo: usize,
    pub hi: usize,
}

impl GwSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let (line, body) = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .ok_or(InputError::Empty)?;
        let (law, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| InputError::Syntax {
                line,
                msg: "expected `<law> <n_lo> <n_hi>`".into(),
            })?;
        let law = law.parse().map_err(|e: GwError| InputError::Syntax {
            line,
            msg: e.to_string(),
        })?;
        let [lo, hi] = parse_ints::<2>(rest, line)?;
        if lo == 0 || lo > hi {
            return Err(InputError::Syntax {
                line,
                msg: GwError::EmptyWindow { lo, hi }.to_string(),
            });
        }
        Ok(GwSpec { law, lo, hi })
    }
}

/// A sampled tree wrapped as an engine application.
#[derive(Debug, Clone)]
pub struct GwEnumeration {
    tree: GwTree,
    prune: Option<PruneMode>,
}

impl GwEnumeration {
    pub fn new(tree: GwTree) -> Self {
        GwEnumeration { tree, prune: None }
    }

    pub fn sample(spec: &GwSpec, seed: u64) -> Result<Self, GwError> {
        Ok(Self::new(sample_gw_tree(spec.law, spec.lo, spec.hi, seed)?))
    }

    pub fn with_prune(mut self, prune: Option<PruneMode>) -> Self {
        self.prune = prune;
        self
    }

    pub fn tree(&self) -> &GwTree {
        &self.tree
    }
}

impl Application for GwEnumeration {
    fn descriptor(&self) -> ApplicationDescriptor {
        ApplicationDescriptor {
            name: "gwtree".into(),
            supports_shared_data: false,
            budget_kinds: vec![BudgetKind::Nodes],
            single_answer: false,
        }
    }

    fn root(&self) -> JobNode {
        reverse::root_job(&self.tree)
    }

    fn search(
        &self,
        node: &JobNode,
        budget: &Budget,
        _shared: &[SharedToken],
        mode: OutputMode,
    ) -> Result<SearchResult, SearchError> {
        reverse::search_job(&self.tree, node, budget, self.prune, mode)
    }
}

/// Totals of a FIFO run with a fixed nodes budget and no depth limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JobListRun {
    pub jobs: u64,
    /// Unexplored nodes returned across all jobs.
    pub returned: u64,
    pub visited: u64,
}

/// Runs the static-budget schedule sequentially. With a fixed budget the
/// set of jobs does not depend on how many workers execute them, so one
/// queue suffices.
pub fn joblist_run(tree: &GwTree, b: u64) -> Result<JobListRun, GwError> {
    if b == 0 {
        return Err(GwError::ZeroBudget);
    }
    let budget = Budget {
        max_depth: None,
        max_nodes: Some(b),
        kind: BudgetKind::Nodes,
    };
    let mut queue = std::collections::VecDeque::from([reverse::root_job(tree)]);
    let mut run = JobListRun {
        jobs: 0,
        returned: 0,
        visited: 0,
    };
    while let Some(job) = queue.pop_front() {
        let r = reverse::search_job(tree, &job, &budget, None, OutputMode::CountOnly)
            .map_err(|e| GwError::Search(e.to_string()))?;
        run.jobs += 1;
        run.returned += r.unexplored.len() as u64;
        run.visited += r.visited;
        queue.extend(r.unexplored);
    }
    Ok(run)
}

/// The limit of the returned fraction, `sqrt(pi * sigma2 / (8 b))`.
pub fn predicted_ratio(sigma2: f64, b: u64) -> f64 {
    (std::f64::consts::PI * sigma2 / (8.0 * b as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwExperiment {
    pub law: OffspringLaw,
    pub lo: usize,
    pub hi: usize,
    pub budget: u64,
    pub trials: usize,
    pub seed: u64,
    /// Overrides the law's nominal constant in the prediction.
    pub sigma2: Option<f64>,
}

impl GwExperiment {
    pub fn sigma2(&self) -> f64 {
        self.sigma2.unwrap_or_else(|| self.law.nominal_sigma2())
    }

    pub fn predicted(&self) -> f64 {
        predicted_ratio(self.sigma2(), self.budget)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub size: usize,
    pub budget: u64,
    pub jobs: u64,
    pub returned: u64,
    pub ratio: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub trials: Vec<TrialResult>,
    pub mean_ratio: f64,
    pub predicted: f64,
}

/// Samples `trials` trees in parallel (trial `t` uses seed `seed + t`) and
/// reports the returned-node fraction of each.
pub fn measure_joblist_ratio(exp: &GwExperiment) -> Result<ExperimentResult, GwError> {
    if exp.budget == 0 {
        return Err(GwError::ZeroBudget);
    }
    let predicted = exp.predicted();
    let trials = (0..exp.trials)
        .into_par_iter()
        .map(|t| {
            let tree = sample_gw_tree(exp.law, exp.lo, exp.hi, exp.seed.wrapping_add(t as u64))?;
            let run = joblist_run(&tree, exp.budget)?;
            debug_assert_eq!(run.visited as usize, tree.size());
            Ok(TrialResult {
                trial: t,
                size: tree.size(),
                budget: exp.budget,
                jobs: run.jobs,
                returned: run.returned,
                ratio: run.returned as f64 / tree.size() as f64,
                predicted,
            })
        })
        .collect::<Result<Vec<_>, GwError>>()?;
    let mean_ratio = if trials.is_empty() {
        0.0
    } else {
        trials.iter().map(|t| t.ratio).sum::<f64>() / trials.len() as f64
    };
    Ok(ExperimentResult {
        trials,
        mean_ratio,
        predicted,
    })
}

pub fn write_csv<W: Write>(exp: &GwExperiment, result: &ExperimentResult, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "# generator={GENERATOR} seed={} law={} sigma2={}",
        exp.seed,
        exp.law,
        exp.sigma2()
    )?;
    writeln!(out, "trial,size,b,jobs,ratio,predicted")?;
    for t in &result.trials {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            t.trial, t.size, t.budget, t.jobs, t.ratio, t.predicted
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    use mts_core::reverse::rs;
    use proptest::prelude::*;

    const ALL: [OffspringLaw; 6] = [
        OffspringLaw::Catalan,
        OffspringLaw::FullBinary,
        OffspringLaw::Geometric,
        OffspringLaw::Poisson,
        OffspringLaw::Binomial(3),
        OffspringLaw::Uniform(2),
    ];

    #[test]
    fn law_names_round_trip() {
        for law in ALL {
            assert_eq!(law.to_string().parse::<OffspringLaw>().unwrap(), law);
        }
        assert_eq!("binomial:4".parse::<OffspringLaw>().unwrap(), OffspringLaw::Binomial(4));
        for bad in ["uniform(3)", "binomial(1)", "normal", "catalan(2)"] {
            assert!(bad.parse::<OffspringLaw>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_variances() {
        assert_eq!(OffspringLaw::Catalan.variance(), 0.5);
        assert_eq!(OffspringLaw::FullBinary.variance(), 1.0);
        assert_eq!(OffspringLaw::Poisson.variance(), 1.0);
        assert_eq!(OffspringLaw::Geometric.variance(), 2.0);
        assert!((OffspringLaw::Uniform(2).variance() - 2.0 / 3.0).abs() < 1e-15);
        assert!((OffspringLaw::Binomial(3).variance() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(OffspringLaw::Catalan.nominal_sigma2(), 1.5);
    }

    #[test]
    fn empirical_moments_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        for law in ALL {
            let s = law.sampler();
            let xs: Vec<f64> = (0..n).map(|_| f64::from(s.draw(&mut rng))).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let se = (law.variance() / n as f64).sqrt();
            assert!((mean - 1.0).abs() < 4.0 * se, "{law}: mean {mean}");
            assert!((var - law.variance()).abs() < 0.05 * law.variance().max(1.0), "{law}: var {var}");
        }
    }

    #[test]
    fn predicted_constants() {
        let c = predicted_ratio(1.5, 5000);
        assert!((c - (3.0 * std::f64::consts::PI / 80_000.0).sqrt()).abs() < 1e-15);
        assert!((c - 0.0109).abs() < 1e-4);
        assert!((predicted_ratio(1.0, 5000) - 0.00886).abs() < 1e-5);
    }

    #[test]
    fn smallest_full_binary_tree() {
        let t = sample_gw_tree(OffspringLaw::FullBinary, 3, 3, 1).unwrap();
        assert_eq!(t.offspring(), &[2, 0, 0]);
        assert_eq!(t.children(0), &[1, 2]);
    }

    #[test]
    fn narrow_window_hits_retry_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // full binary trees have odd size
        let err = sample_offspring_sequence(OffspringLaw::FullBinary, 4, 4, &mut rng, 1000).unwrap_err();
        assert!(matches!(err, GwError::RetryCap { attempts: 1000, .. }));
        assert!(matches!(
            sample_gw_tree(OffspringLaw::Catalan, 5, 4, 0),
            Err(GwError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn bad_sequences_rejected() {
        assert!(GwTree::from_offspring(vec![]).is_err());
        assert!(GwTree::from_offspring(vec![2, 0]).is_err());
        assert!(GwTree::from_offspring(vec![0, 0]).is_err());
        assert!(GwTree::from_offspring(vec![1, 1, 0]).is_ok());
    }

    #[test]
    fn unbounded_budget_is_one_job() {
        let t = sample_gw_tree(OffspringLaw::Catalan, 500, 1000, 11).unwrap();
        let run = joblist_run(&t, u64::MAX).unwrap();
        assert_eq!(run.jobs, 1);
        assert_eq!(run.returned, 0);
        assert_eq!(run.visited as usize, t.size());
    }

    #[test]
    fn spec_parsing() {
        let s = GwSpec::parse("# law and window\ncatalan 100 200\n").unwrap();
        assert_eq!(
            s,
            GwSpec {
                law: OffspringLaw::Catalan,
                lo: 100,
                hi: 200
            }
        );
        assert!(GwSpec::parse("").is_err());
        assert!(GwSpec::parse("catalan 200 100").is_err());
        assert!(GwSpec::parse("cauchy 1 2").is_err());
    }

    #[test]
    fn csv_layout() {
        let exp = GwExperiment {
            law: OffspringLaw::FullBinary,
            lo: 101,
            hi: 301,
            budget: 10,
            trials: 3,
            seed: 5,
            sigma2: None,
        };
        let r = measure_joblist_ratio(&exp).unwrap();
        let mut buf = Vec::new();
        write_csv(&exp, &r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# generator=chacha8 seed=5 law=fullbinary sigma2=1");
        assert_eq!(lines[1], "trial,size,b,jobs,ratio,predicted");
        assert_eq!(lines.len(), 5);
        // same seed gives the same trees
        assert_eq!(measure_joblist_ratio(&exp).unwrap(), r);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn sampled_trees_are_consistent(seed in any::<u64>(), law_ix in 0usize..6, b in 1u64..40) {
            let law = ALL[law_ix];
            let t = sample_gw_tree(law, 20, 400, seed).unwrap();
            let n = t.size();
            prop_assert!((20..=400).contains(&n));
            prop_assert_eq!(t.offspring().iter().map(|&x| x as usize).sum::<usize>(), n - 1);
            prop_assert_eq!(rs(&t, 0, |_| {}).unwrap() as usize, n - 1);
            let run = joblist_run(&t, b).unwrap();
            prop_assert_eq!(run.visited as usize, n);
            prop_assert_eq!(run.jobs, run.returned + 1);
        }
    }
}
