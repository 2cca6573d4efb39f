use std::collections::BTreeSet;

use super::digraph::DiGraph;
use super::undirected::UGraph;
use crate::error::{Error, Result};
use crate::names;
use crate::program::Program;
use crate::transform::{self, Intervention};

/// Vertex of a single-world intervention graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SwigNode {
    Plain(String),
    /// Factual half of an intervened atom: keeps the incoming edges.
    Factual(String),
    /// Fixed half of an intervened atom: keeps the outgoing edges.
    Fixed(String, bool),
}

/// A dependency graph with every intervened atom split in two. The fixed
/// half of `x` is named `fixed__x`, like the atom the single-world
/// transformation introduces for it.
#[derive(Clone, Debug)]
pub struct SwigGraph {
    graph: DiGraph,
    kinds: Vec<SwigNode>,
}

impl SwigGraph {
    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn kind(&self, v: usize) -> &SwigNode {
        &self.kinds[v]
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        matches!(self.kinds[v], SwigNode::Fixed(..))
    }

    /// d-separation with fixed halves treated as constants: they are removed
    /// before testing, so conditioning on them changes nothing.
    pub fn d_separated(&self, x: &str, y: &str, z: &[&str]) -> Result<bool> {
        for n in [x, y].iter().chain(z) {
            self.graph.require(n)?;
        }
        let mut g = DiGraph::new();
        for v in 0..self.graph.len() {
            if !self.is_fixed(v) {
                g.add_node(self.graph.name(v));
            }
        }
        for &(f, t, positive) in self.graph.signed_edges() {
            if !self.is_fixed(f) {
                g.add_named_edge(self.graph.name(f), self.graph.name(t), positive);
            }
        }
        let constant = |n: &&str| g.node(n).is_none();
        if constant(&x) || constant(&y) {
            return Ok(true);
        }
        let z: Vec<&str> = z.iter().copied().filter(|n| !constant(n)).collect();
        d_separated(&g, x, y, &z)
    }
}

/// Splits every intervened atom of `dependency_graph(p)`.
pub fn swig(p: &Program, fix: &Intervention) -> Result<SwigGraph> {
    p.topological_order()?;
    let dep = p.dependency_graph();
    let mut split = vec![None; dep.len()];
    for (name, v) in fix.iter() {
        p.require(name)?;
        split[dep.require(name)?] = Some(v);
    }
    let mut graph = DiGraph::new();
    let mut kinds = Vec::new();
    let mut add = |graph: &mut DiGraph, name: &str, kind: SwigNode| {
        let before = graph.len();
        let v = graph.add_node(name);
        if v == before {
            kinds.push(kind);
        }
    };
    for (v, &fixed) in split.iter().enumerate() {
        let name = dep.name(v);
        match fixed {
            None => add(&mut graph, name, SwigNode::Plain(name.to_string())),
            Some(value) => {
                add(&mut graph, name, SwigNode::Factual(name.to_string()));
                add(&mut graph, &names::fixed(name), SwigNode::Fixed(name.to_string(), value));
            }
        }
    }
    for &(f, t, positive) in dep.signed_edges() {
        let from = match split[f] {
            Some(_) => names::fixed(dep.name(f)),
            None => dep.name(f).to_string(),
        };
        graph.add_named_edge(&from, dep.name(t), positive);
    }
    Ok(SwigGraph { graph, kinds })
}

/// d-separation of `x` and `y` given `z`, by reachability in the moral
/// graph of the ancestral set of `{x, y} ∪ z` with `z` removed.
pub fn d_separated(g: &DiGraph, x: &str, y: &str, z: &[&str]) -> Result<bool> {
    let xv = g.require(x)?;
    let yv = g.require(y)?;
    let zv: Vec<usize> = z.iter().map(|n| g.require(n)).collect::<Result<_>>()?;
    if zv.contains(&xv) || zv.contains(&yv) {
        return Err(Error::BadQuery(format!("{x} and {y} must not be in the conditioning set")));
    }
    if xv == yv {
        return Ok(false);
    }
    let mut seeds = vec![xv, yv];
    seeds.extend(&zv);
    let mut keep: BTreeSet<usize> = g.ancestors(&seeds);
    keep.extend(&seeds);
    let mut sub = DiGraph::new();
    for &v in &keep {
        sub.add_node(g.name(v));
    }
    for &v in &keep {
        for &w in g.children(v) {
            if keep.contains(&w) {
                sub.add_named_edge(g.name(v), g.name(w), true);
            }
        }
    }
    let moral = UGraph::moral(&sub);
    let blocked: BTreeSet<usize> = z.iter().filter_map(|n| moral.vertex(n)).collect();
    let start = moral.vertex(x).expect("kept");
    let goal = moral.vertex(y).expect("kept");
    let mut seen = vec![false; moral.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if v == goal {
            return Ok(false);
        }
        for &w in moral.neighbors(v) {
            if !seen[w] && !blocked.contains(&w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    Ok(true)
}

/// Atoms reachable from `seeds`, excluding the seeds.
pub fn descendants(g: &DiGraph, seeds: &[&str]) -> Result<BTreeSet<String>> {
    let ids: Vec<usize> = seeds.iter().map(|n| g.require(n)).collect::<Result<_>>()?;
    Ok(g.descendants(&ids).into_iter().map(|v| g.name(v).to_string()).collect())
}

/// Whether the single-world program, simplified for `x`, `y` and the facts,
/// d-separates `x` from `y` without conditioning. An intervened `x` or `y`
/// stands for its fixed copy.
pub fn screening_independence(p: &Program, fix: &Intervention, x: &str, y: &str) -> Result<bool> {
    single_world_d_separated(p, fix, x, y, &[])
}

/// d-separation of `x` and `y` given `z` in the dependency graph of the
/// single-world program, simplified for `x`, `y`, `z` and the facts. With
/// an empty intervention the original program is used.
pub fn single_world_d_separated(p: &Program, fix: &Intervention, x: &str, y: &str, z: &[&str]) -> Result<bool> {
    for n in [x, y].iter().chain(z) {
        p.require(n)?;
    }
    let s = if fix.is_empty() {
        p.topological_order()?;
        p.clone()
    } else {
        transform::swift(p, fix)?.0
    };
    let map = |n: &str| if fix.contains(n) { names::fixed(n) } else { n.to_string() };
    let (x, y) = (map(x), map(y));
    let z: Vec<String> = z.iter().map(|n| map(n)).collect();
    let facts: Vec<&str> = s.facts().iter().map(|f| s.name(f.atom)).collect();
    let keep: Vec<&str> = [x.as_str(), y.as_str()]
        .into_iter()
        .chain(z.iter().map(String::as_str))
        .chain(facts)
        .collect();
    let simple = transform::simplify(&s, keep)?;
    let z: Vec<&str> = z.iter().map(String::as_str).collect();
    d_separated(&simple.dependency_graph(), &x, &y, &z)
}
