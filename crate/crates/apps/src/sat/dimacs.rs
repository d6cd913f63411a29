//! DIMACS CNF input and a few formula builders.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::InputError;

/// A CNF formula over variables `1..=num_vars`, literals in DIMACS sign
/// convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    /// Each clause has distinct literals and never both `x` and `-x`.
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    /// Builds a formula, normalising each clause: duplicate literals are
    /// merged and tautologies dropped.
    pub fn new(num_vars: usize, clauses: impl IntoIterator<Item = Vec<i32>>) -> Self {
        let clauses = clauses.into_iter().filter_map(normalise).collect();
        CnfFormula { num_vars, clauses }
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    /// Whether a full assignment (`model[v - 1]` is the value of `v`)
    /// satisfies every clause.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| model.get(l.unsigned_abs() as usize - 1) == Some(&(l > 0)))
        })
    }

    /// Same check for a model given as signed literals.
    pub fn is_satisfied_by_lits(&self, lits: &[i32]) -> bool {
        let mut model = vec![false; self.num_vars];
        for &l in lits {
            match model.get_mut(l.unsigned_abs() as usize - 1) {
                Some(slot) => *slot = l > 0,
                None => return false,
            }
        }
        lits.len() == self.num_vars && self.is_satisfied_by(&model)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }

    /// Pigeonhole principle: `pigeons` pigeons into `holes` holes, one per
    /// hole. Unsatisfiable whenever `pigeons > holes`. Variable
    /// `p * holes + h + 1` says pigeon `p` sits in hole `h`.
    pub fn pigeonhole(pigeons: usize, holes: usize) -> Self {
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut clauses: Vec<Vec<i32>> = (0..pigeons)
            .map(|p| (0..holes).map(|h| var(p, h)).collect())
            .collect();
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    clauses.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        CnfFormula::new(pigeons * holes, clauses)
    }
}

fn normalise(clause: Vec<i32>) -> Option<Vec<i32>> {
    let set: BTreeSet<i32> = clause.into_iter().collect();
    if set.iter().any(|&l| set.contains(&-l)) {
        return None;
    }
    Some(set.into_iter().collect())
}

/// Parses DIMACS CNF: comment lines start with `c`, the header is
/// `p cnf V C`, clauses are zero-terminated and may span lines. A line
/// starting with `%` ends the clause section.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, InputError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('c') {
            continue;
        }
        if body.starts_with('%') {
            break;
        }
        last_line = line;
        let syntax = |msg: String| InputError::Syntax { line, msg };
        if body.starts_with('p') {
            if header.is_some() {
                return Err(syntax("second problem line".into()));
            }
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(syntax("expected `p cnf <vars> <clauses>`".into()));
            }
            let v = f[2]
                .parse()
                .map_err(|_| syntax(format!("bad variable count `{}`", f[2])))?;
            let c = f[3]
                .parse()
                .map_err(|_| syntax(format!("bad clause count `{}`", f[3])))?;
            if v > i32::MAX as usize {
                return Err(syntax("too many variables".into()));
            }
            header = Some((v, c, line));
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(syntax("clause before the problem line".into()));
        };
        for tok in body.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| syntax(format!("bad literal `{tok}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(syntax(format!(
                    "literal {lit} outside variables 1..={num_vars}"
                )));
            } else {
                current.push(lit as i32);
            }
        }
    }

    let (num_vars, declared, hline) = header.ok_or(InputError::Empty)?;
    if !current.is_empty() {
        return Err(InputError::Syntax {
            line: last_line,
            msg: "last clause is not terminated by 0".into(),
        });
    }
    if clauses.len() != declared {
        return Err(InputError::Syntax {
            line: hline,
            msg: format!("header declares {declared} clauses, found {}", clauses.len()),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses))
}
