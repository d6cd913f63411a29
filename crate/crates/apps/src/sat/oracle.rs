//! Exhaustive checks for small formulas, independent of the solver.
//!
//! Variables are assigned in index order and a branch is abandoned as soon
//! as some clause has all of its literals false, so formulas with a few
//! dozen variables stay cheap while every assignment is still accounted
//! for.

use super::dimacs::CnfFormula;

/// The first model in lexicographic order (false before true), if any.
pub fn find_model(f: &CnfFormula) -> Option<Vec<bool>> {
    if f.has_empty_clause() {
        return None;
    }
    // clauses grouped by their largest variable: checkable once it is set
    let mut by_last: Vec<Vec<&[i32]>> = vec![Vec::new(); f.num_vars + 1];
    for c in &f.clauses {
        let last = c.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        by_last[last].push(c);
    }
    let mut model = vec![false; f.num_vars];
    fn falsified(c: &[i32], model: &[bool]) -> bool {
        c.iter().all(|&l| model[l.unsigned_abs() as usize - 1] != (l > 0))
    }
    fn go(v: usize, model: &mut Vec<bool>, by_last: &[Vec<&[i32]>]) -> bool {
        if v > model.len() {
            return true;
        }
        for value in [false, true] {
            model[v - 1] = value;
            if !by_last[v].iter().any(|c| falsified(c, model)) && go(v + 1, model, by_last) {
                return true;
            }
        }
        false
    }
    go(1, &mut model, &by_last).then_some(model)
}

pub fn is_satisfiable(f: &CnfFormula) -> bool {
    find_model(f).is_some()
}

/// Whether every model of `f` makes `lit` true.
pub fn implies(f: &CnfFormula, lit: i32) -> bool {
    let mut g = f.clone();
    g.clauses.push(vec![-lit]);
    !is_satisfiable(&g)
}

/// Whether every model of `f` satisfies `clause`.
pub fn implies_clause(f: &CnfFormula, clause: &[i32]) -> bool {
    let mut g = f.clone();
    g.clauses.extend(clause.iter().map(|&l| vec![-l]));
    !is_satisfiable(&g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_full_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let m = rng.gen_range(0..=30);
            let clauses: Vec<Vec<i32>> = (0..m)
                .map(|_| {
                    (0..rng.gen_range(1..=3))
                        .map(|_| {
                            let v = rng.gen_range(1..=n) as i32;
                            if rng.gen() { v } else { -v }
                        })
                        .collect()
                })
                .collect();
            let f = CnfFormula::new(n, clauses);
            let full = (0u32..1 << n).any(|bits| {
                let model: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                f.is_satisfied_by(&model)
            });
            assert_eq!(is_satisfiable(&f), full);
            if let Some(m) = find_model(&f) {
                assert!(f.is_satisfied_by(&m));
            }
        }
    }

    #[test]
    fn pigeonhole_is_unsat() {
        assert!(!is_satisfiable(&CnfFormula::pigeonhole(3, 2)));
        assert!(!is_satisfiable(&CnfFormula::pigeonhole(4, 3)));
        assert!(is_satisfiable(&CnfFormula::pigeonhole(3, 3)));
    }

    #[test]
    fn implication() {
        let f = CnfFormula::new(2, [vec![1], vec![-1, 2]]);
        assert!(implies(&f, 2));
        assert!(!implies(&f, -2));
        assert!(implies_clause(&f, &[2, -1]));
    }
}
