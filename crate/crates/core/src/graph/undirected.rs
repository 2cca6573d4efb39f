use std::collections::BTreeSet;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;

use super::digraph::{dot_id, DiGraph};
use crate::error::{Error, Result};
use crate::names;
use crate::program::Program;

/// Simple undirected graph over named vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UGraph {
    names: Vec<String>,
    index: FxHashMap<String, usize>,
    adj: Vec<BTreeSet<usize>>,
}

impl UGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.adj.push(BTreeSet::new());
        self.names.len() - 1
    }

    /// Self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn add_named_edge(&mut self, a: &str, b: &str) {
        let (a, b) = (self.add_vertex(a), self.add_vertex(b));
        self.add_edge(a, b);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as name pairs, each pair ordered.
    pub fn edges(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (a, ns) in self.adj.iter().enumerate() {
            for &b in ns {
                let (x, y) = (&self.names[a], &self.names[b]);
                if x < y {
                    out.insert((x.clone(), y.clone()));
                }
            }
        }
        out
    }

    /// Connected components, each sorted, in order of smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut k = 0;
            while k < members.len() {
                let v = members[k];
                k += 1;
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// The subgraph induced by `vertices`, which keep their relative order.
    pub fn induced(&self, vertices: &[usize]) -> UGraph {
        let mut g = UGraph::new();
        for &v in vertices {
            g.add_vertex(&self.names[v]);
        }
        for &v in vertices {
            for &w in &self.adj[v] {
                if let Some(j) = g.vertex(&self.names[w]) {
                    let i = g.vertex(&self.names[v]).expect("added above");
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Underlying undirected graph of a directed graph.
    pub fn skeleton(g: &DiGraph) -> UGraph {
        let mut u = UGraph::new();
        for n in g.names() {
            u.add_vertex(n);
        }
        for v in 0..g.len() {
            for &w in g.children(v) {
                u.add_edge(v, w);
            }
        }
        u
    }

    /// Skeleton plus edges between parents of a common child.
    pub fn moral(g: &DiGraph) -> UGraph {
        let mut u = UGraph::skeleton(g);
        for v in 0..g.len() {
            let ps = g.parents(v);
            for (i, &a) in ps.iter().enumerate() {
                for &b in &ps[i + 1..] {
                    u.add_edge(a, b);
                }
            }
        }
        u
    }

    pub fn complete(n: usize) -> UGraph {
        let mut g = UGraph::new();
        for i in 0..n {
            g.add_vertex(&format!("k{i}"));
        }
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn path(n: usize) -> UGraph {
        let mut g = UGraph::new();
        for i in 0..n {
            g.add_vertex(&format!("p{i}"));
        }
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for n in &self.names {
            let _ = writeln!(out, "  {};", dot_id(n));
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {} -- {};", dot_id(&a), dot_id(&b));
        }
        out.push_str("}\n");
        out
    }
}

/// Primal graph over the endogenous atoms (clause heads): each clause makes
/// a clique of its head and its endogenous body atoms, whatever their sign.
pub fn primal_graph(p: &Program) -> UGraph {
    let mut g = UGraph::new();
    for a in p.atoms() {
        if p.is_head(a) {
            g.add_vertex(p.name(a));
        }
    }
    for c in p.clauses() {
        let mut clique = vec![g.vertex(p.name(c.head)).expect("head vertex")];
        clique.extend(c.body.iter().filter_map(|l| g.vertex(p.name(l.atom))));
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Upper bound on treewidth by min-fill elimination, run per connected
/// component; the width of the empty graph is 0.
///
/// Ties go to the smallest name with any counterfactual suffix removed, so
/// a component and its primed copy are eliminated in the same order.
pub fn treewidth_estimate(g: &UGraph) -> usize {
    g.components()
        .iter()
        .map(|c| min_fill_width(&g.induced(c)))
        .max()
        .unwrap_or(0)
}

fn tie_key(name: &str) -> (String, &str) {
    (names::unprimed(name).unwrap_or_else(|| name.to_string()), name)
}

fn min_fill_width(g: &UGraph) -> usize {
    let n = g.len();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut alive = vec![true; n];
    let keys: Vec<_> = (0..n).map(|v| tie_key(g.name(v))).collect();
    let mut width = 0;
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let ns: Vec<usize> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for (i, &a) in ns.iter().enumerate() {
                fill += ns[i + 1..].iter().filter(|&&b| !adj[a].contains(&b)).count();
            }
            let better = match best {
                None => true,
                Some((bf, bv)) => fill < bf || (fill == bf && keys[v] < keys[bv]),
            };
            if better {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.expect("a live vertex remains");
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        width = width.max(ns.len());
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &ns {
            adj[a].remove(&v);
        }
        alive[v] = false;
    }
    width
}

/// Largest component the exact treewidth routine accepts.
pub const MAX_EXACT_VERTICES: usize = 15;

/// Exact treewidth by dynamic programming over vertex subsets, per
/// connected component of at most [`MAX_EXACT_VERTICES`] vertices.
pub fn treewidth_exact_small(g: &UGraph) -> Result<usize> {
    let mut width = 0;
    for c in g.components() {
        if c.len() > MAX_EXACT_VERTICES {
            return Err(Error::Guard {
                what: "exact treewidth component",
                size: c.len(),
                limit: MAX_EXACT_VERTICES,
            });
        }
        width = width.max(exact_width(&g.induced(&c)));
    }
    Ok(width)
}

/// `TW(S) = min_{v∈S} max(TW(S∖v), |Q(S∖v, v)|)` where `Q(S, v)` are the
/// vertices outside `S ∪ {v}` reachable from `v` through `S`.
fn exact_width(g: &UGraph) -> usize {
    let n = g.len();
    if n <= 1 {
        return 0;
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let q = |s: u32, v: usize| -> u32 {
        let mut reached = 1u32 << v;
        let mut frontier = reached;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let w = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[w];
            }
            next &= !reached;
            reached |= next;
            out |= next & !s;
            frontier = next & s;
        }
        (out & !(1 << v)).count_ones()
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![u8::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let cand = tw[without as usize].max(q(without, v) as u8);
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    tw[full as usize] as usize
}
