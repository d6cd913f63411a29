//! Applications driven through the full engine.

use std::sync::Arc;

use mts_apps::gwtree::{sample_gw_tree, GwEnumeration, OffspringLaw};
use mts_apps::sat::{oracle, CnfFormula, SatApp, SolverOptions, SAT_LINE, UNSAT_LINE};
use mts_apps::spantree::{Graph, SpanningTrees};
use mts_apps::topsorts::{Poset, TopSorts};
use mts_core::reverse::PruneMode;
use mts_core::{run, Application, BudgetKind, OutputMode, SchedulerConfig};

fn config(workers: usize, depth: Option<u64>, nodes: u64) -> SchedulerConfig {
    SchedulerConfig {
        num_workers: workers,
        base_max_depth: depth,
        base_max_nodes: nodes,
        ..Default::default()
    }
}

fn lines(app: Arc<dyn Application>, cfg: &SchedulerConfig) -> (Vec<String>, Vec<u64>) {
    let out = run(app, cfg, Vec::new()).unwrap();
    let text = String::from_utf8(out.sink).unwrap();
    let mut ls: Vec<String> = text.lines().map(str::to_string).collect();
    ls.sort();
    (ls, out.report.frequencies)
}

#[test]
fn antichain_three_gives_six() {
    let app = Arc::new(TopSorts::new(&Poset::antichain(3)).unwrap());
    for workers in [1, 3] {
        let (ls, freq) = lines(app.clone(), &config(workers, Some(1), 1));
        assert_eq!(ls.len(), 6);
        assert_eq!(freq.iter().sum::<u64>(), 6);
    }
}

#[test]
fn k33_count_only() {
    let app = Arc::new(TopSorts::new(&Poset::complete_bipartite(3, 3)).unwrap());
    let cfg = SchedulerConfig {
        output_mode: OutputMode::CountOnly,
        ..config(4, Some(2), 5)
    };
    let out = run(app, &cfg, Vec::new()).unwrap();
    assert_eq!(String::from_utf8(out.sink).unwrap(), "count: 36\n");
    assert_eq!(out.report.total_output_count, 36);
}

#[test]
fn triangle_has_three_trees() {
    let app = Arc::new(SpanningTrees::new(Graph::cycle(3)));
    let (ls, _) = lines(app, &config(2, Some(2), 5000));
    assert_eq!(ls, vec!["1 2", "1 3", "2 3"]);
}

#[test]
fn pruned_runs_keep_counts() {
    let poset = Poset::complete_bipartite(3, 3);
    for prune in [PruneMode::Leaves, PruneMode::Paths] {
        let app = Arc::new(TopSorts::new(&poset).unwrap().with_prune(Some(prune)));
        let (ls, freq) = lines(app, &config(3, Some(2), 3));
        assert_eq!(ls.len(), 36);
        assert_eq!(freq.iter().sum::<u64>(), 36);
        let mut d = ls.clone();
        d.dedup();
        assert_eq!(d.len(), 36);
    }
    let app = Arc::new(SpanningTrees::new(Graph::complete(5)).with_prune(Some(PruneMode::Paths)));
    let (ls, _) = lines(app, &config(4, None, 7));
    assert_eq!(ls.len(), 125);
}

#[test]
fn gw_tree_partitions_under_engine() {
    let tree = sample_gw_tree(OffspringLaw::Catalan, 2000, 4000, 9).unwrap();
    let n = tree.size();
    let app = Arc::new(GwEnumeration::new(tree));
    let (ls, freq) = lines(app, &config(4, Some(2), 50));
    assert_eq!(ls.len(), n);
    assert_eq!(freq.iter().sum::<u64>() as usize, n);
}

fn verdict(formula: &CnfFormula, workers: usize, kind: BudgetKind, nodes: u64) -> Vec<String> {
    let app = Arc::new(SatApp::new(formula.clone(), SolverOptions::default()));
    let cfg = SchedulerConfig {
        budget_kind: kind,
        ..config(workers, Some(2), nodes)
    };
    let out = run(app, &cfg, Vec::new()).unwrap();
    String::from_utf8(out.sink)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn sat_verdicts_through_engine() {
    let php = CnfFormula::pigeonhole(4, 3);
    let sat = CnfFormula::pigeonhole(3, 3);
    for workers in [1, 4] {
        for kind in [BudgetKind::Decisions, BudgetKind::Conflicts] {
            assert_eq!(verdict(&php, workers, kind, 1), vec![UNSAT_LINE]);
            let ls = verdict(&sat, workers, kind, 1);
            assert_eq!(ls[0], SAT_LINE);
            let model: Vec<i32> = ls[1]
                .split_whitespace()
                .skip(1)
                .map(|t| t.parse().unwrap())
                .filter(|&l| l != 0)
                .collect();
            assert!(sat.is_satisfied_by_lits(&model));
            assert_eq!(ls.len(), 2);
        }
    }
    assert!(!oracle::is_satisfiable(&php));
}

#[test]
fn empty_clause_is_unsat_immediately() {
    let f = CnfFormula::new(2, [vec![1, 2], vec![]]);
    assert_eq!(verdict(&f, 2, BudgetKind::Decisions, 5), vec![UNSAT_LINE]);
}
