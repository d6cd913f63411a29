//! A small CDCL solver with two watched literals, first-UIP learning and
//! budgeted search under assumptions.
//!
//! Branching is static by default: the lowest-index unassigned variable,
//! tried true first. Each assumption occupies its own decision level ahead
//! of the search decisions, so the search decisions on the trail are the
//! backtrack path used for splitting.

use std::ops::Not;

use super::dimacs::CnfFormula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn from_dimacs(d: i32) -> Lit {
        debug_assert!(d != 0);
        Lit(2 * (d.unsigned_abs() - 1) + u32::from(d < 0))
    }

    pub fn to_dimacs(self) -> i32 {
        let v = (self.0 >> 1) as i32 + 1;
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatBudgetKind {
    Decisions,
    Conflicts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatBudget {
    pub kind: SatBudgetKind,
    /// Decisions or conflicts allowed; `None` is unbounded.
    pub limit: Option<u64>,
    /// Search decisions allowed on the trail at once.
    pub max_depth: Option<u64>,
}

impl SatBudget {
    pub const UNBOUNDED: SatBudget = SatBudget {
        kind: SatBudgetKind::Decisions,
        limit: None,
        max_depth: None,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Branch on the most active variable instead of the lowest index.
    pub vsids: bool,
    pub restarts: bool,
    /// Conflicts before the first restart; later intervals grow by 1.5x.
    pub restart_base: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            vsids: false,
            restarts: false,
            restart_base: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A model, one signed literal per variable in variable order.
    Sat(Vec<i32>),
    /// No model extends the assumption.
    UnsatUnderAssumption,
    /// The formula itself (with the shared units) has no model.
    Unsat,
    /// Budget ran out; the report's splits cover what is left.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub verdict: Verdict,
    /// Assumptions for follow-up jobs, pairwise contradictory.
    pub splits: Vec<Vec<i32>>,
    /// Unit clauses learnt during this call.
    pub learnt_units: Vec<i32>,
    pub decisions: u64,
    pub conflicts: u64,
}

/// Result of unit propagation from a partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    /// Every assigned literal, in assignment order.
    Fixpoint(Vec<i32>),
    /// A clause with all literals false.
    Conflict(Vec<i32>),
}

/// First-UIP analysis of the first conflict met while making a sequence of
/// decisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConflictAnalysis {
    /// Learnt clause (asserting literal first) and the level to jump back to.
    Learnt { clause: Vec<i32>, backjump: usize },
    /// Conflict without any decision.
    TopLevel,
    /// The decisions led to no conflict.
    NoConflict,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    /// `watches[l]` lists clauses with `l` among their first two literals.
    watches: Vec<Vec<u32>>,
    value: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    /// Decision literal of each level; `None` for a satisfied assumption.
    level_decision: Vec<Option<Lit>>,
    qhead: usize,
    seen: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    /// A top-level contradiction was found.
    inconsistent: bool,
    pub decisions: u64,
    pub conflicts: u64,
    learnt_units: Vec<i32>,
}

impl Solver {
    /// Loads `f` plus extra unit facts.
    pub fn new(f: &CnfFormula, units: &[i32]) -> Self {
        let n = f.num_vars;
        let mut s = Solver {
            num_vars: n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![None; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            level_decision: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            activity: vec![0.0; n],
            var_inc: 1.0,
            inconsistent: false,
            decisions: 0,
            conflicts: 0,
            learnt_units: Vec::new(),
        };
        let mut facts = Vec::new();
        for c in &f.clauses {
            match c.len() {
                0 => s.inconsistent = true,
                1 => facts.push(Lit::from_dimacs(c[0])),
                _ => {
                    let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
                    s.attach(lits);
                }
            }
        }
        facts.extend(
            units
                .iter()
                .filter(|l| (l.unsigned_abs() as usize) <= n && **l != 0)
                .map(|&l| Lit::from_dimacs(l)),
        );
        for l in facts {
            match s.lit_value(l) {
                Some(true) => {}
                Some(false) => s.inconsistent = true,
                None => s.enqueue(l, None),
            }
        }
        s
    }

    fn attach(&mut self, lits: Vec<Lit>) -> u32 {
        let ci = self.clauses.len() as u32;
        self.watches[lits[0].index()].push(ci);
        self.watches[lits[1].index()].push(ci);
        self.clauses.push(lits);
        ci
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var()].map(|b| b != l.is_negative())
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var();
        debug_assert!(self.value[v].is_none());
        self.value[v] = Some(!l.is_negative());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn new_level(&mut self, decision: Option<Lit>) {
        self.trail_lim.push(self.trail.len());
        self.level_decision.push(decision);
        if let Some(l) = decision {
            self.enqueue(l, None);
        }
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let keep = self.trail_lim[lvl];
        for &l in &self.trail[keep..] {
            self.value[l.var()] = None;
            self.reason[l.var()] = None;
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(lvl);
        self.level_decision.truncate(lvl);
        self.qhead = keep;
    }

    /// Unit propagation to fixpoint; returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut it = ws.into_iter();
            for ci in it.by_ref() {
                let c = &mut self.clauses[ci as usize];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.value[first.var()].map(|b| b != first.is_negative()) == Some(true) {
                    kept.push(ci);
                    continue;
                }
                let value = &self.value;
                let replacement = (2..c.len()).find(|&k| {
                    let l = c[k];
                    value[l.var()].map(|b| b != l.is_negative()) != Some(false)
                });
                if let Some(k) = replacement {
                    c.swap(1, k);
                    let w = c[1];
                    self.watches[w.index()].push(ci);
                    continue;
                }
                kept.push(ci);
                match self.lit_value(first) {
                    Some(false) => {
                        conflict = Some(ci);
                        break;
                    }
                    _ => self.enqueue(first, Some(ci)),
                }
            }
            kept.extend(it);
            self.watches[false_lit.index()] = kept;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
    }

    /// First-UIP learning. Returns the learnt clause with the asserting
    /// literal first and, when longer than one literal, a literal of the
    /// backjump level second.
    fn analyze(&mut self, confl: u32) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut clause = confl;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let skip = usize::from(p.is_some());
            for k in skip..self.clauses[clause as usize].len() {
                let q = self.clauses[clause as usize][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var()] = false;
            path -= 1;
            p = Some(pl);
            if path == 0 {
                break;
            }
            clause = self.reason[pl.var()].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict has a current-level literal");
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut backjump = 0;
        if learnt.len() > 1 {
            let (k, lvl) = learnt[1..]
                .iter()
                .enumerate()
                .map(|(k, l)| (k + 1, self.level[l.var()]))
                .max_by_key(|&(_, lvl)| lvl)
                .expect("nonempty tail");
            learnt.swap(1, k);
            backjump = lvl as usize;
        }
        self.var_inc /= 0.95;
        (learnt, backjump)
    }

    /// Records a conflict; returns false on a top-level contradiction.
    fn resolve_conflict(&mut self, confl: u32) -> bool {
        self.conflicts += 1;
        if self.decision_level() == 0 {
            self.inconsistent = true;
            return false;
        }
        let (learnt, backjump) = self.analyze(confl);
        self.cancel_until(backjump);
        if learnt.len() == 1 {
            self.learnt_units.push(learnt[0].to_dimacs());
            self.enqueue(learnt[0], None);
        } else {
            let first = learnt[0];
            let ci = self.attach(learnt);
            self.enqueue(first, Some(ci));
        }
        true
    }

    fn pick_branch(&self, vsids: bool) -> Option<Lit> {
        let free = (0..self.num_vars).filter(|&v| self.value[v].is_none());
        let v = if vsids {
            free.fold(None, |best: Option<usize>, v| match best {
                Some(b) if self.activity[b] >= self.activity[v] => Some(b),
                _ => Some(v),
            })
        } else {
            free.min()
        }?;
        Some(Lit(2 * v as u32))
    }

    /// Search decisions on the trail, outermost first.
    fn search_path(&self, assumption_levels: usize) -> Vec<Lit> {
        self.level_decision[assumption_levels.min(self.level_decision.len())..]
            .iter()
            .map(|d| d.expect("search levels carry a decision"))
            .collect()
    }

    /// Splits for each flipped decision along the path, optionally
    /// preceded by the current path itself.
    fn backtrack_splits(assumption: &[i32], path: &[Lit], with_current: bool) -> Vec<Vec<i32>> {
        let mut out = Vec::new();
        if with_current {
            let mut cur = assumption.to_vec();
            cur.extend(path.iter().map(|l| l.to_dimacs()));
            out.push(cur);
        }
        for i in 0..path.len() {
            let mut s = assumption.to_vec();
            s.extend(path[..i].iter().map(|l| l.to_dimacs()));
            s.push((!path[i]).to_dimacs());
            out.push(s);
        }
        out
    }

    fn report(&mut self, verdict: Verdict, splits: Vec<Vec<i32>>) -> SolveReport {
        SolveReport {
            verdict,
            splits,
            learnt_units: std::mem::take(&mut self.learnt_units),
            decisions: self.decisions,
            conflicts: self.conflicts,
        }
    }

    /// Solves under `assumption` until a verdict or until the budget runs
    /// out at a decision point.
    ///
    /// On exhaustion with at least one search decision on the trail the
    /// job splits into the current path and each flipped decision along
    /// it. With none yet, one more decision is made first so that every
    /// split strictly extends the assumption.
    pub fn solve(&mut self, assumption: &[i32], budget: &SatBudget, opts: &SolverOptions) -> SolveReport {
        let mut splits = Vec::new();
        if self.inconsistent || self.propagate().is_some() {
            self.inconsistent = true;
            return self.report(Verdict::Unsat, splits);
        }
        let assumed: Vec<Lit> = assumption.iter().map(|&l| Lit::from_dimacs(l)).collect();
        let mut restart_limit = opts.restart_base.max(1) as f64;
        let mut conflicts_since_restart = 0u64;

        loop {
            if let Some(confl) = self.propagate() {
                if !self.resolve_conflict(confl) {
                    return self.report(Verdict::Unsat, splits);
                }
                conflicts_since_restart += 1;
                if opts.restarts && conflicts_since_restart as f64 >= restart_limit {
                    let path = self.search_path(assumed.len());
                    splits.extend(Self::backtrack_splits(assumption, &path, false));
                    self.cancel_until(0);
                    conflicts_since_restart = 0;
                    restart_limit *= 1.5;
                }
                continue;
            }

            let lvl = self.decision_level();
            if lvl < assumed.len() {
                let a = assumed[lvl];
                match self.lit_value(a) {
                    Some(true) => self.new_level(None),
                    Some(false) => return self.report(Verdict::UnsatUnderAssumption, splits),
                    None => self.new_level(Some(a)),
                }
                continue;
            }

            let Some(branch) = self.pick_branch(opts.vsids) else {
                let model = (0..self.num_vars)
                    .map(|v| {
                        let d = v as i32 + 1;
                        if self.value[v] == Some(true) {
                            d
                        } else {
                            -d
                        }
                    })
                    .collect();
                return self.report(Verdict::Sat(model), splits);
            };

            let depth = (lvl - assumed.len()) as u64;
            let used = match budget.kind {
                SatBudgetKind::Decisions => self.decisions,
                SatBudgetKind::Conflicts => self.conflicts,
            };
            let exhausted = budget.limit.is_some_and(|l| used >= l)
                || budget.max_depth.is_some_and(|d| depth >= d);
            if exhausted && depth > 0 {
                let path = self.search_path(assumed.len());
                splits.extend(Self::backtrack_splits(assumption, &path, true));
                return self.report(Verdict::Exhausted, splits);
            }
            self.decisions += 1;
            self.new_level(Some(branch));
        }
    }
}

/// Solves `f` under an assumption with shared unit facts and a budget.
pub fn solve_budgeted(
    f: &CnfFormula,
    assumption: &[i32],
    budget: &SatBudget,
    shared_units: &[i32],
    opts: &SolverOptions,
) -> SolveReport {
    Solver::new(f, shared_units).solve(assumption, budget, opts)
}

/// Propagates `partial` (treated as facts) through the clauses of `f`.
pub fn propagate(f: &CnfFormula, partial: &[i32]) -> Propagation {
    let mut s = Solver::new(f, &[]);
    if let Some(c) = f.clauses.iter().find(|c| c.is_empty()) {
        return Propagation::Conflict(c.clone());
    }
    let facts = f
        .clauses
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| c[0])
        .chain(partial.iter().copied());
    for l in facts {
        let lit = Lit::from_dimacs(l);
        match s.lit_value(lit) {
            Some(true) => continue,
            Some(false) => return Propagation::Conflict(vec![l]),
            None => {}
        }
        s.enqueue(lit, None);
        if let Some(ci) = s.propagate() {
            return Propagation::Conflict(s.clauses[ci as usize].iter().map(|l| l.to_dimacs()).collect());
        }
    }
    if let Some(ci) = s.propagate() {
        return Propagation::Conflict(s.clauses[ci as usize].iter().map(|l| l.to_dimacs()).collect());
    }
    Propagation::Fixpoint(s.trail.iter().map(|l| l.to_dimacs()).collect())
}

/// Makes `decisions` one level each, propagating after each, and learns
/// from the first conflict.
pub fn learn_conflict(f: &CnfFormula, decisions: &[i32]) -> ConflictAnalysis {
    let mut s = Solver::new(f, &[]);
    if s.inconsistent || s.propagate().is_some() {
        return ConflictAnalysis::TopLevel;
    }
    for &d in decisions {
        let lit = Lit::from_dimacs(d);
        match s.lit_value(lit) {
            // already decided by propagation
            Some(_) => continue,
            None => s.new_level(Some(lit)),
        }
        if let Some(ci) = s.propagate() {
            let (clause, backjump) = s.analyze(ci);
            return ConflictAnalysis::Learnt {
                clause: clause.iter().map(|l| l.to_dimacs()).collect(),
                backjump,
            };
        }
    }
    ConflictAnalysis::NoConflict
}
