//! Random reachability benchmarks.
//!
//! A uniform random tree on `n` vertices rooted at `s` is extended with `k`
//! layer vertices, each fed by a few tree vertices, and a goal `g` fed by
//! every layer vertex. The emitted program models a random walk from `s`
//! that picks an outgoing edge uniformly and stops at trapped vertices:
//!
//! ```text
//! r(s).
//! 0.1::trap(Y) :- p(X,Y).
//! r(Y) :- p(X,Y).
//! 1/d(X)::p(X,Y1); ...; 1/d(X)::p(X,Yd) :- r(X), \+ trap(X).
//! ```

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lpad::{desugar_into, LpadClause};
use crate::prob::Prob;
use crate::program::{Assignment, Formula, Program, ProgramBuilder};

/// Probability that an incoming edge traps its target.
pub const TRAP_PROB: (i64, i64) = (1, 10);
/// Most evidence items and interventions per query.
pub const MAX_QUERY_ATOMS: usize = 5;

/// A benchmark DAG. Vertex 0 is `s`, the last vertex is `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchGraph {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub vertices: Vec<String>,
    /// Sorted, without duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl BenchGraph {
    /// A graph with explicit edges; `vertices[0]` is the start, the last
    /// vertex the goal.
    pub fn from_edges(vertices: Vec<String>, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::BenchParams("need a start and a goal vertex".into()));
        }
        edges.sort_unstable();
        edges.dedup();
        let bg = BenchGraph {
            n: vertices.len() - 1,
            k: 0,
            seed: 0,
            vertices,
            edges,
        };
        bg.check_acyclic()?;
        Ok(bg)
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn goal(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == v).map(|e| e.1).collect()
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == v).map(|e| e.0).collect()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    /// Vertices reachable from `v` by a non-empty path.
    pub fn reachable_from(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for c in self.children(x) {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen
    }

    pub fn to_digraph(&self) -> crate::graph::DiGraph {
        let mut g = crate::graph::DiGraph::new();
        for v in &self.vertices {
            g.add_node(v);
        }
        for &(a, b) in &self.edges {
            g.add_edge(a, b, true);
        }
        g
    }

    fn check_acyclic(&self) -> Result<()> {
        let g = self.to_digraph();
        match g.find_cycle() {
            None => Ok(()),
            Some(c) => Err(Error::Cyclic(c.into_iter().map(|v| g.name(v).to_string()).collect())),
        }
    }
}

/// Random benchmark DAG with `n` tree vertices (including `s`), `k` layer
/// vertices and the goal: `n + k + 1` vertices in total.
///
/// The tree is decoded from a uniform Prüfer sequence and oriented away from
/// `s`. Each layer vertex receives arcs from a uniformly sized random subset
/// of `2..=min(5, n)` tree vertices.
pub fn generate_dag(n: usize, k: usize, seed: u64) -> Result<BenchGraph> {
    if n < 2 || k < 1 {
        return Err(Error::BenchParams(format!("need n >= 2 and k >= 1, got n={n}, k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let undirected = decode_prufer(n, &prufer);

    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &undirected {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut edges = Vec::new();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                edges.push((v, w));
                queue.push_back(w);
            }
        }
    }

    let goal = n + k;
    for i in 0..k {
        let u = n + i;
        let size = rng.gen_range(2..=n.min(5));
        for t in sample(&mut rng, n, size).into_iter() {
            edges.push((t, u));
        }
        edges.push((u, goal));
    }
    edges.sort_unstable();

    let mut vertices = vec!["s".to_string()];
    vertices.extend((1..n).map(|i| format!("v{i}")));
    vertices.extend((1..=k).map(|i| format!("u{i}")));
    vertices.push("g".into());
    Ok(BenchGraph {
        n,
        k,
        seed,
        vertices,
        edges,
    })
}

fn decode_prufer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = *leaves.iter().next().expect("a leaf exists");
        leaves.remove(&leaf);
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

pub fn reach_atom(v: &str) -> String {
    format!("r({v})")
}

fn trap_atom(v: &str) -> String {
    format!("trap({v})")
}

fn edge_atom(x: &str, y: &str) -> String {
    format!("p({x},{y})")
}

/// The reachability program of `bg`. Every annotated disjunction and
/// probabilistic clause is desugared into plain facts and clauses.
///
/// A vertex without incoming edges can never be trapped, so its departure
/// rule omits the `\+ trap` literal instead of mentioning an atom that has
/// no definition.
pub fn emit_program(bg: &BenchGraph) -> Result<Program> {
    let mut b = ProgramBuilder::new();
    let name = |v: usize| bg.vertices[v].as_str();
    b.add_fact(&reach_atom(name(bg.start())), Prob::one())?;
    let trap = Prob::ratio(TRAP_PROB.0, TRAP_PROB.1)?;
    for &(x, y) in &bg.edges {
        let clause = LpadClause::new(
            vec![(trap_atom(name(y)), trap.clone())],
            vec![(edge_atom(name(x), name(y)), true)],
        )?;
        desugar_into(&mut b, &clause)?;
    }
    for x in 0..bg.vertices.len() {
        let children = bg.children(x);
        if children.is_empty() {
            continue;
        }
        let d = children.len() as i64;
        let heads = children
            .iter()
            .map(|&y| Ok((edge_atom(name(x), name(y)), Prob::ratio(1, d)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut body = vec![(reach_atom(name(x)), true)];
        if !bg.parents(x).is_empty() {
            body.push((trap_atom(name(x)), false));
        }
        desugar_into(&mut b, &LpadClause::new(heads, body)?)?;
    }
    for &(x, y) in &bg.edges {
        let head = reach_atom(name(y));
        let edge = edge_atom(name(x), name(y));
        b.add_clause(&head, &[(edge.as_str(), true)]);
    }
    b.build()
}

/// A counterfactual query over a benchmark program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub evidence: Vec<(String, bool)>,
    pub interventions: Vec<(String, bool)>,
    pub query: Formula,
    pub seed: u64,
}

impl QuerySpec {
    pub fn evidence_set(&self) -> Assignment {
        Assignment::from_pairs(self.evidence.iter().map(|(n, v)| (n.as_str(), *v))).expect("distinct atoms")
    }

    pub fn intervention(&self) -> Assignment {
        Assignment::from_pairs(self.interventions.iter().map(|(n, v)| (n.as_str(), *v))).expect("distinct atoms")
    }
}

/// Samples `¬r(v)` evidence and `r(v') := false` interventions on distinct
/// vertices other than `s` and `g`, with query `r(g)`. With `swip_safe`,
/// evidence is drawn first and interventions only among vertices that
/// cannot reach an evidence vertex.
///
/// Vertices whose reachability is certain (the only child of `s`) are never
/// used as evidence.
pub fn sample_query(bg: &BenchGraph, n_ev: usize, n_int: usize, seed: u64, swip_safe: bool) -> Result<QuerySpec> {
    sample_query_with(bg, n_ev, n_int, seed, swip_safe, false)
}

/// [`sample_query`] with the option of positive evidence and interventions,
/// each sign drawn uniformly.
pub fn sample_query_with(
    bg: &BenchGraph,
    n_ev: usize,
    n_int: usize,
    seed: u64,
    swip_safe: bool,
    positive: bool,
) -> Result<QuerySpec> {
    if n_ev > MAX_QUERY_ATOMS || n_int > MAX_QUERY_ATOMS {
        return Err(Error::BenchParams(format!(
            "at most {MAX_QUERY_ATOMS} evidence items and interventions"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner: Vec<usize> = (1..bg.goal()).collect();
    let certain = (bg.out_degree(bg.start()) == 1).then(|| bg.children(bg.start())[0]);
    let observable: Vec<usize> = inner.iter().copied().filter(|&v| Some(v) != certain).collect();
    let pick = |rng: &mut ChaCha8Rng, pool: &[usize], amount: usize| -> Result<Vec<usize>> {
        if pool.len() < amount {
            return Err(Error::NotEnoughVertices {
                needed: amount,
                available: pool.len(),
            });
        }
        let mut out: Vec<usize> = sample(rng, pool.len(), amount).into_iter().map(|i| pool[i]).collect();
        out.sort_unstable();
        Ok(out)
    };
    let (observed, intervened) = if swip_safe {
        // evidence first, then interventions that cannot reach it
        let observed = pick(&mut rng, &observable, n_ev)?;
        let pool: Vec<usize> = inner
            .iter()
            .copied()
            .filter(|&v| !observed.contains(&v) && !observed.iter().any(|o| bg.reachable_from(v).contains(o)))
            .collect();
        let intervened = pick(&mut rng, &pool, n_int)?;
        (observed, intervened)
    } else {
        let intervened = pick(&mut rng, &inner, n_int)?;
        let pool: Vec<usize> = observable.iter().copied().filter(|v| !intervened.contains(v)).collect();
        (pick(&mut rng, &pool, n_ev)?, intervened)
    };
    let sign = |rng: &mut ChaCha8Rng| positive && rng.gen_bool(0.5);
    let interventions = intervened
        .iter()
        .map(|&v| (reach_atom(&bg.vertices[v]), sign(&mut rng)))
        .collect();
    let evidence = observed
        .iter()
        .map(|&v| (reach_atom(&bg.vertices[v]), sign(&mut rng)))
        .collect();
    Ok(QuerySpec {
        evidence,
        interventions,
        query: Formula::atom(&reach_atom(&bg.vertices[bg.goal()])),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{marginal, Backend};

    #[test]
    fn small_instance_shape() {
        let bg = generate_dag(5, 2, 42).unwrap();
        assert_eq!(bg.vertices.len(), 8);
        assert_eq!(bg.parents(bg.goal()).len(), 2);
        assert!(bg.to_digraph().find_cycle().is_none());
        assert_eq!(generate_dag(5, 2, 42).unwrap(), bg);
        assert_ne!(generate_dag(5, 2, 43).unwrap().edges, bg.edges);
    }

    #[test]
    fn smallest_instance() {
        let bg = generate_dag(2, 1, 0).unwrap();
        assert_eq!(bg.vertices.len(), 4);
        assert!(bg.reachable_from(0).contains(&bg.goal()));
        assert!(generate_dag(1, 1, 0).is_err());
        assert!(generate_dag(3, 0, 0).is_err());
    }

    #[test]
    fn tree_is_spanning_and_rooted() {
        for seed in 0..20 {
            let bg = generate_dag(12, 3, seed).unwrap();
            for v in 1..12 {
                let tree_parents = bg.parents(v).into_iter().filter(|&p| p < 12).count();
                assert_eq!(tree_parents, 1, "seed {seed} vertex {v}");
            }
            assert_eq!(bg.edges.iter().filter(|e| e.1 < 12).count(), 11);
            for u in 12..15 {
                let d = bg.parents(u).len();
                assert!((2..=5).contains(&d));
            }
        }
    }

    #[test]
    fn two_vertex_program() {
        let bg = BenchGraph::from_edges(vec!["s".into(), "g".into()], vec![(0, 1)]).unwrap();
        let p = emit_program(&bg).unwrap();
        assert!(p.is_acyclic());
        // the trap on g is caused by the edge into g and only blocks leaving g
        assert_eq!(marginal(&p, &Formula::atom("r(g)"), Backend::Enum).unwrap(), 1.0);
        let bg = BenchGraph::from_edges(vec!["s".into(), "v".into(), "g".into()], vec![(0, 1), (1, 2)]).unwrap();
        let p = emit_program(&bg).unwrap();
        assert!((marginal(&p, &Formula::atom("r(g)"), Backend::Enum).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn disjunction_probabilities_are_uniform() {
        let bg = BenchGraph::from_edges(
            vec!["s".into(), "a".into(), "b".into(), "c".into(), "g".into()],
            vec![(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .unwrap();
        let p = emit_program(&bg).unwrap();
        for e in ["p(s,a)", "p(s,b)", "p(s,c)"] {
            let r = marginal(&p, &Formula::atom(e), Backend::Enum).unwrap();
            assert!((r - 1.0 / 3.0).abs() < 1e-12, "{e}");
        }
        let total: f64 = ["p(s,a)", "p(s,b)", "p(s,c)"]
            .iter()
            .map(|e| marginal(&p, &Formula::atom(e), Backend::Enum).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(p.atom("p(g,s)").is_none());
    }

    #[test]
    fn generated_programs_are_valid() {
        for seed in 0..10 {
            let bg = generate_dag(8, 2, seed).unwrap();
            let p = emit_program(&bg).unwrap();
            assert!(p.is_acyclic());
            let r = marginal(&p, &Formula::atom("r(g)"), Backend::Circuit).unwrap();
            assert!(r > 0.0 && r < 1.0, "seed {seed}: {r}");
        }
    }

    #[test]
    fn query_sampling() {
        let bg = generate_dag(10, 3, 7).unwrap();
        let q = sample_query(&bg, 0, 0, 1, true).unwrap();
        assert!(q.evidence.is_empty() && q.interventions.is_empty());
        assert_eq!(q.query, Formula::atom("r(g)"));
        for seed in 0..30 {
            let q = sample_query(&bg, 1, 1, seed, true).unwrap();
            assert_eq!(q, sample_query(&bg, 1, 1, seed, true).unwrap());
            let v = bg.vertices.iter().position(|n| reach_atom(n) == q.interventions[0].0).unwrap();
            let e = bg.vertices.iter().position(|n| reach_atom(n) == q.evidence[0].0).unwrap();
            assert!(!bg.reachable_from(v).contains(&e));
            assert!(!q.interventions[0].1 && !q.evidence[0].1);
        }
        assert!(sample_query(&bg, 6, 0, 0, false).is_err());
        let tiny = generate_dag(2, 1, 0).unwrap();
        assert!(matches!(
            sample_query(&tiny, 3, 0, 0, false),
            Err(Error::NotEnoughVertices { .. })
        ));
    }
}
