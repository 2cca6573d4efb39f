use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// A directed graph over named vertices. Edges carry the sign of the body
/// literal that produced them; parallel edges are collapsed in the
/// adjacency lists.
#[derive(Clone, Debug, Default)]
pub struct DiGraph {
    names: Vec<String>,
    index: FxHashMap<String, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, bool)>,
}

impl DiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        i
    }

    pub fn add_edge(&mut self, from: usize, to: usize, positive: bool) {
        self.edges.push((from, to, positive));
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
            self.pred[to].push(from);
        }
    }

    pub fn add_named_edge(&mut self, from: &str, to: &str, positive: bool) {
        let (f, t) = (self.add_node(from), self.add_node(to));
        self.add_edge(f, t, positive);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.node(name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    /// Signed edges in insertion order, duplicates included.
    pub fn signed_edges(&self) -> &[(usize, usize, bool)] {
        &self.edges
    }

    /// Distinct edges as name pairs, sorted.
    pub fn edge_set(&self) -> BTreeSet<(String, String)> {
        (0..self.len())
            .flat_map(|v| {
                self.succ[v]
                    .iter()
                    .map(move |&w| (self.names[v].clone(), self.names[w].clone()))
            })
            .collect()
    }

    /// Kahn's algorithm, ties broken by insertion index. `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    /// A directed cycle `[v0, v1, ..., v0]`, if one exists.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.len()];
        for root in 0..self.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&w) = self.succ[v].get(*next) {
                    *next += 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => {
                            let start = stack.iter().position(|&(u, _)| u == w)?;
                            let mut cycle: Vec<usize> =
                                stack[start..].iter().map(|&(u, _)| u).collect();
                            cycle.push(w);
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    fn reach(&self, seeds: &[usize], forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            let next = if forward { &self.succ[v] } else { &self.pred[v] };
            for &w in next {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Vertices reachable from `seeds` by a non-empty path, excluding the
    /// seeds themselves.
    pub fn descendants(&self, seeds: &[usize]) -> BTreeSet<usize> {
        let seen = self.reach(seeds, true);
        (0..self.len())
            .filter(|&v| seen[v] && !seeds.contains(&v))
            .collect()
    }

    /// Vertices with a path into some seed, excluding the seeds.
    pub fn ancestors(&self, seeds: &[usize]) -> BTreeSet<usize> {
        let seen = self.reach(seeds, false);
        (0..self.len())
            .filter(|&v| seen[v] && !seeds.contains(&v))
            .collect()
    }

    /// Whether `to` is reachable from `from` by a non-empty path.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reach(&[from], true)[to]
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.len() {
            let _ = writeln!(out, "  {};", dot_id(&self.names[v]));
        }
        for &(f, t, positive) in &self.edges {
            let style = if positive { "" } else { " [style=dashed]" };
            let _ = writeln!(out, "  {} -> {}{style};", dot_id(&self.names[f]), dot_id(&self.names[t]));
        }
        out.push_str("}\n");
        out
    }
}

/// Quotes names that are not plain DOT identifiers.
pub fn dot_id(name: &str) -> String {
    let plain = name
        .bytes()
        .next()
        .is_some_and(|b| b.is_ascii_alphabetic() || b == b'_')
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_');
    if plain {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)]) -> DiGraph {
        let mut g = DiGraph::new();
        for (a, b) in edges {
            g.add_named_edge(a, b, true);
        }
        g
    }

    #[test]
    fn finds_two_cycle() {
        let g = graph(&[("a", "b"), ("b", "a")]);
        let c: Vec<&str> = g.find_cycle().unwrap().iter().map(|&v| g.name(v)).collect();
        assert_eq!(c, ["a", "b", "a"]);
        assert!(g.topological_order().is_none());
    }

    #[test]
    fn cycle_witness_follows_edges() {
        let g = graph(&[("x", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]);
        let c = g.find_cycle().unwrap();
        assert_eq!(c.first(), c.last());
        for w in c.windows(2) {
            assert!(g.children(w[0]).contains(&w[1]));
        }
    }

    #[test]
    fn descendants_exclude_seeds() {
        let g = graph(&[("a", "c"), ("b", "c"), ("c", "d")]);
        let a = g.node("a").unwrap();
        let names: Vec<&str> = g.descendants(&[a]).iter().map(|&v| g.name(v)).collect();
        assert_eq!(names, ["c", "d"]);
        assert!(g.descendants(&[g.node("d").unwrap()]).is_empty());
        assert!(g.descendants(&[]).is_empty());
    }

    #[test]
    fn dot_quotes_compound_names() {
        assert_eq!(dot_id("c"), "c");
        assert_eq!(dot_id("r(v1)"), "\"r(v1)\"");
        let dot = graph(&[("p(s,v1)", "r(v1)")]).to_dot();
        assert!(dot.contains("\"p(s,v1)\" -> \"r(v1)\""));
    }
}
