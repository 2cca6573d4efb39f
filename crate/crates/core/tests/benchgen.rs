//! Structure of the generated reachability benchmarks.

use cfl_core::benchgen::{emit_program, generate_dag, reach_atom, sample_query, BenchGraph};
use cfl_core::graph::{treewidth_exact_small, UGraph};
use cfl_core::inference::{marginal, Backend};
use cfl_core::parse::print_program;
use cfl_core::{Error, Formula};

fn in_degree(bg: &BenchGraph, v: usize) -> usize {
    bg.edges.iter().filter(|&&(_, b)| b == v).count()
}

#[test]
fn graphs_have_the_advertised_shape() {
    for n in [2, 3, 5, 10, 40] {
        for k in [1, 2, 4, 8] {
            for seed in 0..5 {
                let bg = generate_dag(n, k, seed).unwrap();
                assert_eq!(bg.vertices.len(), n + k + 1);
                assert_eq!(bg, generate_dag(n, k, seed).unwrap());
                // a tree rooted at s: every other tree vertex has one tree parent
                for v in 1..n {
                    let tree_parents = bg.edges.iter().filter(|&&(a, b)| b == v && a < n).count();
                    assert_eq!(tree_parents, 1, "n={n} k={k} seed={seed} v={v}");
                }
                assert_eq!(in_degree(&bg, 0), 0);
                for u in n..n + k {
                    assert!((2..=n.min(5)).contains(&in_degree(&bg, u)));
                    assert_eq!(bg.children(u), [bg.goal()]);
                }
                assert_eq!(in_degree(&bg, bg.goal()), k);
                let reach = bg.reachable_from(bg.start());
                assert!((1..=bg.goal()).all(|v| reach.contains(&v)));
            }
        }
    }
}

#[test]
fn rejects_degenerate_parameters() {
    assert!(matches!(generate_dag(1, 3, 0), Err(Error::BenchParams(_))));
    assert!(matches!(generate_dag(5, 0, 0), Err(Error::BenchParams(_))));
}

#[test]
fn small_programs_agree_across_backends() {
    let goal = Formula::atom(&reach_atom("g"));
    let mut compared = 0;
    for seed in 0..20 {
        let p = emit_program(&generate_dag(3, 1, seed).unwrap()).unwrap();
        assert!(print_program(&p).contains("r(s)"));
        let circuit = marginal(&p, &goal, Backend::Circuit).unwrap();
        assert!((0.0..=1.0).contains(&circuit));
        match marginal(&p, &goal, Backend::Enum) {
            Ok(e) => {
                assert!((e - circuit).abs() < 1e-9);
                compared += 1;
            }
            Err(Error::Guard { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(compared > 0);
}

#[test]
fn swip_safe_queries_keep_evidence_upstream() {
    for seed in 0..30 {
        let bg = generate_dag(15, 3, seed).unwrap();
        let Ok(q) = sample_query(&bg, 2, 2, seed, true) else { continue };
        let index = |name: &str| {
            let v = name.trim_start_matches("r(").trim_end_matches(')');
            bg.vertices.iter().position(|x| x == v).unwrap()
        };
        for (x, _) in &q.interventions {
            let below = bg.reachable_from(index(x));
            for (e, _) in &q.evidence {
                assert!(!below.contains(&index(e)), "{x} reaches {e}");
                assert_ne!(x, e);
            }
        }
    }
}

/// Exact treewidth of the moralized graph next to `min(n, k)`, printed
/// rather than asserted: the bound concerns the family, not each sample.
#[test]
fn treewidth_report() {
    println!("{:>2} {:>2} {:>8} {:>8}", "n", "k", "mean tw", "min(n,k)");
    for n in 2..=6 {
        for k in 1..=3 {
            let widths: Vec<usize> = (0..10)
                .map(|seed| {
                    let bg = generate_dag(n, k, seed).unwrap();
                    treewidth_exact_small(&UGraph::moral(&bg.to_digraph())).unwrap()
                })
                .collect();
            let mean = widths.iter().sum::<usize>() as f64 / widths.len() as f64;
            println!("{n:>2} {k:>2} {mean:>8.2} {:>8}", n.min(k));
            assert!(widths.iter().all(|&w| w >= 1 && w < n + k + 1));
        }
    }
}
