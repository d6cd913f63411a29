//! Budgeted SAT solving as a search application.
//!
//! A job is an assumption (a list of decision literals). Each job runs the
//! solver under its assumption with the job budget; when the budget runs
//! out the job returns the backtrack-path splits as unexplored jobs. Learnt
//! unit clauses are shared through the engine so later jobs start with
//! them as facts. The first verdict ends the run.

pub mod dimacs;
pub mod oracle;
pub mod solver;

use std::collections::HashSet;

use mts_core::search::ByteReader;
use mts_core::{
    Application, ApplicationDescriptor, Budget, BudgetKind, JobNode, OutputMode, SearchError,
    SearchResult, SharedToken,
};

pub use dimacs::{parse_dimacs, CnfFormula};
pub use solver::{
    learn_conflict, propagate, solve_budgeted, ConflictAnalysis, Propagation, SatBudget,
    SatBudgetKind, SolveReport, SolverOptions, Verdict,
};

use crate::InputError;

pub const SAT_LINE: &str = "s SATISFIABLE";
pub const UNSAT_LINE: &str = "s UNSATISFIABLE";

#[derive(Debug, Clone)]
pub struct SatApp {
    formula: CnfFormula,
    options: SolverOptions,
}

impl SatApp {
    pub fn new(formula: CnfFormula, options: SolverOptions) -> Self {
        SatApp { formula, options }
    }

    pub fn parse(text: &str, options: SolverOptions) -> Result<Self, InputError> {
        Ok(Self::new(parse_dimacs(text)?, options))
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn encode_assumption(lits: &[i32], origin_depth: u32) -> JobNode {
        let mut payload = Vec::with_capacity(4 * lits.len());
        for l in lits {
            payload.extend_from_slice(&l.to_le_bytes());
        }
        JobNode {
            payload,
            origin_depth,
        }
    }

    pub fn decode_assumption(&self, node: &JobNode) -> Result<Vec<i32>, SearchError> {
        if !node.payload.len().is_multiple_of(4) {
            return Err(SearchError::Decode(format!(
                "assumption payload of {} bytes is not a whole number of literals",
                node.payload.len()
            )));
        }
        let mut r = ByteReader::new(&node.payload);
        let mut vars = HashSet::new();
        let mut lits = Vec::with_capacity(node.payload.len() / 4);
        while r.remaining() > 0 {
            let l = r.i32()?;
            let v = l.unsigned_abs() as usize;
            if l == 0 || v > self.formula.num_vars {
                return Err(SearchError::Decode(format!("literal {l} out of range")));
            }
            if !vars.insert(v) {
                return Err(SearchError::Decode(format!("variable {v} assumed twice")));
            }
            lits.push(l);
        }
        r.finish()?;
        Ok(lits)
    }

    fn decode_units(&self, shared: &[SharedToken]) -> Result<Vec<i32>, SearchError> {
        shared
            .iter()
            .map(|t| {
                let mut r = ByteReader::new(&t.0);
                let l = r.i32().map_err(|e| SearchError::SharedToken(e.to_string()))?;
                r.finish()
                    .map_err(|e| SearchError::SharedToken(e.to_string()))?;
                if l == 0 || l.unsigned_abs() as usize > self.formula.num_vars {
                    return Err(SearchError::SharedToken(format!("unit {l} out of range")));
                }
                Ok(l)
            })
            .collect()
    }

    pub fn unit_token(lit: i32) -> SharedToken {
        SharedToken(lit.to_le_bytes().to_vec())
    }

    pub fn model_line(model: &[i32]) -> String {
        let mut s = String::from("v");
        for l in model {
            s.push(' ');
            s.push_str(&l.to_string());
        }
        s.push_str(" 0");
        s
    }
}

impl Application for SatApp {
    fn descriptor(&self) -> ApplicationDescriptor {
        ApplicationDescriptor {
            name: "sat".into(),
            supports_shared_data: true,
            budget_kinds: vec![BudgetKind::Decisions, BudgetKind::Conflicts],
            single_answer: true,
        }
    }

    fn root(&self) -> JobNode {
        Self::encode_assumption(&[], 0)
    }

    /// A nodes budget is read as a decisions budget.
    fn search(
        &self,
        node: &JobNode,
        budget: &Budget,
        shared: &[SharedToken],
        mode: OutputMode,
    ) -> Result<SearchResult, SearchError> {
        let assumption = self.decode_assumption(node)?;
        let units = self.decode_units(shared)?;
        let kind = match budget.kind {
            BudgetKind::Conflicts => SatBudgetKind::Conflicts,
            BudgetKind::Nodes | BudgetKind::Decisions => SatBudgetKind::Decisions,
        };
        let sat_budget = SatBudget {
            kind,
            limit: budget.max_nodes,
            max_depth: budget.max_depth,
        };
        let report = solve_budgeted(&self.formula, &assumption, &sat_budget, &units, &self.options);

        let (lines, halt) = match &report.verdict {
            Verdict::Sat(model) => (vec![SAT_LINE.to_string(), Self::model_line(model)], true),
            Verdict::Unsat => (vec![UNSAT_LINE.to_string()], true),
            Verdict::UnsatUnderAssumption | Verdict::Exhausted => (Vec::new(), false),
        };
        let output_count = u64::from(!lines.is_empty());
        let unexplored = report
            .splits
            .iter()
            .map(|s| Self::encode_assumption(s, s.len() as u32))
            .collect();
        Ok(SearchResult {
            outputs: if mode == OutputMode::Full { lines } else { Vec::new() },
            output_count,
            unexplored,
            visited: match kind {
                SatBudgetKind::Decisions => report.decisions,
                SatBudgetKind::Conflicts => report.conflicts,
            },
            shared_delta: report.learnt_units.iter().map(|&l| Self::unit_token(l)).collect(),
            halt,
        })
    }

    /// Every job finished without a model: the formula is unsatisfiable.
    fn finish(&self, halted: bool, _shared: &[SharedToken]) -> Vec<String> {
        if halted {
            Vec::new()
        } else {
            vec![UNSAT_LINE.to_string()]
        }
    }
}
