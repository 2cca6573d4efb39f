//! Knowledge compilation of program queries into decision circuits.
//!
//! The relevant part of the program is encoded as the Clark completion in
//! CNF, with one variable per atom and one auxiliary variable per
//! multi-literal body of a multi-clause atom. Counting then branches only on
//! probabilistic facts: once every fact of an acyclic program is assigned,
//! unit propagation on the completion fixes every other variable, so each
//! branch closes without deciding internal atoms. After each decision the
//! residual clauses are split into variable-disjoint components, which are
//! compiled independently and cached under their canonical residual form.

use std::time::Instant;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::prob::{Prob, Weight};
use crate::program::{AtomId, Literal, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Circuit node. `fact` indexes [`Program::facts`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    False,
    True,
    /// Children mention pairwise disjoint facts.
    And(Vec<NodeId>),
    /// `fact ∧ high ∨ ¬fact ∧ low`; neither child mentions `fact`. A fact
    /// literal is the decision with constant children.
    Decision { fact: usize, high: NodeId, low: NodeId },
}

/// Resource limits for compilation.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub node_cap: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_cap: 20_000_000,
            deadline: None,
        }
    }
}

/// A compiled set of queries. Nodes are stored children first.
#[derive(Clone, Debug)]
pub struct Circuit {
    nodes: Vec<Node>,
    roots: Vec<NodeId>,
    probs: Vec<Prob>,
}

impl Circuit {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    /// One root per compiled query, in request order.
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 2
    }

    /// Longest chain of decisions below `root`.
    pub fn decision_depth(&self, root: NodeId) -> usize {
        let mut depth = vec![0usize; root.index() + 1];
        for (i, n) in self.nodes.iter().enumerate().take(root.index() + 1) {
            depth[i] = match n {
                Node::And(cs) => cs.iter().map(|c| depth[c.index()]).max().unwrap_or(0),
                Node::Decision { high, low, .. } => 1 + depth[high.index()].max(depth[low.index()]),
                _ => 0,
            };
        }
        depth[root.index()]
    }

    /// Weighted model count of every root with leaf weights `(π, 1 - π)`.
    pub fn counts<W: Weight>(&self) -> Vec<W> {
        let weights: Vec<W> = self.probs.iter().map(W::from_prob).collect();
        let mut value: Vec<W> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let v = match n {
                Node::False => W::zero(),
                Node::True => W::one(),
                Node::And(cs) => cs
                    .iter()
                    .fold(W::one(), |acc, c| acc * value[c.index()].clone()),
                Node::Decision { fact, high, low } => {
                    let w = weights[*fact].clone();
                    w.clone() * value[high.index()].clone() + (W::one() - w) * value[low.index()].clone()
                }
            };
            value.push(v);
        }
        self.roots.iter().map(|r| value[r.index()].clone()).collect()
    }

    /// Facts mentioned below `root`.
    pub fn facts_below(&self, root: NodeId) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            match &self.nodes[n.index()] {
                Node::And(cs) => stack.extend(cs),
                Node::Decision { fact, high, low } => {
                    out.push(*fact);
                    stack.push(*high);
                    stack.push(*low);
                }
                _ => {}
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Compiles `marginal(target)` for every target atom into one circuit.
pub fn compile_circuit(p: &Program, targets: &[AtomId], limits: &Limits) -> Result<Circuit> {
    let queries: Vec<Vec<Literal>> = targets.iter().map(|&a| vec![Literal::pos(a)]).collect();
    compile_queries(p, &queries, limits)
}

/// Compiles each conjunction of literals into its own root.
pub fn compile_queries(p: &Program, queries: &[Vec<Literal>], limits: &Limits) -> Result<Circuit> {
    let topo = p.topological_order()?;
    let mut c = Compiler::new(p, topo, queries, limits);
    let mut roots = Vec::with_capacity(queries.len());
    for q in queries {
        let lits: Vec<u32> = q.iter().map(|l| c.atom_lit(*l)).collect();
        roots.push(c.compile_root(&lits)?);
    }
    Ok(Circuit {
        nodes: c.nodes,
        roots,
        probs: p.facts().iter().map(|f| f.prob.clone()).collect(),
    })
}

/// The topological order that places every fact directly before the first
/// internal atom reading it, so that decisions follow the flow of the
/// program instead of deciding every source first.
fn lazy_topological_order(p: &Program, topo: &[AtomId]) -> Vec<AtomId> {
    let internal: Vec<AtomId> = topo.iter().copied().filter(|&a| !p.is_fact(a)).collect();
    let mut slot = vec![usize::MAX; p.atom_count()];
    for (i, &h) in internal.iter().enumerate() {
        slot[h.index()] = i;
        for c in p.clauses_for(h) {
            for l in &c.body {
                if p.is_fact(l.atom) {
                    slot[l.atom.index()] = slot[l.atom.index()].min(i);
                }
            }
        }
    }
    let mut order: Vec<AtomId> = topo.to_vec();
    order.sort_by_key(|&a| (slot[a.index()], !p.is_fact(a), a));
    order
}

const UNASSIGNED: u8 = 0;
const TRUE: u8 = 1;
const FALSE: u8 = 2;
const SEPARATOR: u32 = u32::MAX;

fn lit(var: u32, positive: bool) -> u32 {
    var << 1 | u32::from(!positive)
}

fn var_of(l: u32) -> u32 {
    l >> 1
}

fn negate(l: u32) -> u32 {
    l ^ 1
}

struct Compiler<'a> {
    limits: &'a Limits,
    clauses: Vec<Vec<u32>>,
    occ: Vec<Vec<u32>>,
    val: Vec<u8>,
    trail: Vec<u32>,
    /// Fact index for fact variables.
    fact: Vec<Option<u32>>,
    /// Decision priority (topological position) for fact variables.
    rank: Vec<u32>,
    atom_var: Vec<Option<u32>>,
    /// Deterministic facts and unconditional units; never undone.
    base_conflict: bool,
    nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeId>,
    cache: FxHashMap<Vec<u32>, NodeId>,
    uf: Vec<u32>,
}

impl<'a> Compiler<'a> {
    fn new(p: &Program, topo: &[AtomId], queries: &[Vec<Literal>], limits: &'a Limits) -> Self {
        // atoms the queries depend on
        let mut relevant = vec![false; p.atom_count()];
        let mut stack: Vec<AtomId> = queries.iter().flatten().map(|l| l.atom).collect();
        for a in &stack {
            relevant[a.index()] = true;
        }
        while let Some(a) = stack.pop() {
            for c in p.clauses_for(a) {
                for l in &c.body {
                    if !relevant[l.atom.index()] {
                        relevant[l.atom.index()] = true;
                        stack.push(l.atom);
                    }
                }
            }
        }

        let order = lazy_topological_order(p, topo);
        let mut atom_var = vec![None; p.atom_count()];
        let mut fact = Vec::new();
        let mut rank = Vec::new();
        for (pos, &a) in order.iter().enumerate() {
            if relevant[a.index()] {
                atom_var[a.index()] = Some(fact.len() as u32);
                fact.push(p.fact_index(a).map(|f| f as u32));
                rank.push(pos as u32);
            }
        }
        let mut c = Compiler {
            limits,
            clauses: Vec::new(),
            occ: Vec::new(),
            val: Vec::new(),
            trail: Vec::new(),
            fact,
            rank,
            atom_var,
            base_conflict: false,
            nodes: vec![Node::False, Node::True],
            unique: FxHashMap::default(),
            cache: FxHashMap::default(),
            uf: Vec::new(),
        };
        let mut units = Vec::new();
        for &a in topo {
            let Some(h) = c.atom_var[a.index()] else { continue };
            if let Some(fi) = p.fact_index(a) {
                let prob = &p.facts()[fi].prob;
                if prob.is_one() {
                    units.push(lit(h, true));
                } else if prob.is_zero() {
                    units.push(lit(h, false));
                }
                continue;
            }
            let bodies: Vec<Vec<u32>> = p
                .clauses_for(a)
                .map(|cl| cl.body.iter().map(|l| c.atom_lit(*l)).collect())
                .collect();
            if bodies.iter().any(Vec::is_empty) {
                units.push(lit(h, true));
                continue;
            }
            match bodies.len() {
                0 => units.push(lit(h, false)),
                1 => c.define_and(h, &bodies[0]),
                _ => {
                    let mut disjuncts = Vec::with_capacity(bodies.len());
                    for body in &bodies {
                        if body.len() == 1 {
                            disjuncts.push(body[0]);
                        } else {
                            let aux = c.new_var();
                            c.define_and(aux, body);
                            disjuncts.push(lit(aux, true));
                        }
                    }
                    let mut big = vec![lit(h, false)];
                    big.extend(&disjuncts);
                    c.add_clause(big);
                    for d in disjuncts {
                        c.add_clause(vec![lit(h, true), negate(d)]);
                    }
                }
            }
        }
        c.val = vec![UNASSIGNED; c.fact.len()];
        c.uf = (0..c.fact.len() as u32).collect();
        c.occ = vec![Vec::new(); c.fact.len()];
        for (i, cl) in c.clauses.iter().enumerate() {
            for &l in cl {
                c.occ[var_of(l) as usize].push(i as u32);
            }
        }
        for cl in &c.clauses {
            match cl.len() {
                0 => c.base_conflict = true,
                1 => units.push(cl[0]),
                _ => {}
            }
        }
        let start = c.trail.len();
        for u in units {
            if !c.assign(u) {
                c.base_conflict = true;
            }
        }
        if !c.base_conflict && !c.propagate(start) {
            c.base_conflict = true;
        }
        c
    }

    fn new_var(&mut self) -> u32 {
        self.fact.push(None);
        self.rank.push(u32::MAX);
        (self.fact.len() - 1) as u32
    }

    fn atom_lit(&self, l: Literal) -> u32 {
        let v = self.atom_var[l.atom.index()].expect("relevant atom has a variable");
        lit(v, l.positive)
    }

    /// `v ↔ ∧ body`.
    fn define_and(&mut self, v: u32, body: &[u32]) {
        if body.len() == 1 {
            self.add_clause(vec![lit(v, false), body[0]]);
            self.add_clause(vec![lit(v, true), negate(body[0])]);
            return;
        }
        for &l in body {
            self.add_clause(vec![lit(v, false), l]);
        }
        let mut back = vec![lit(v, true)];
        back.extend(body.iter().map(|&l| negate(l)));
        self.add_clause(back);
    }

    fn add_clause(&mut self, mut cl: Vec<u32>) {
        cl.sort_unstable();
        cl.dedup();
        if cl.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        self.clauses.push(cl);
    }

    fn value(&self, l: u32) -> u8 {
        match self.val[var_of(l) as usize] {
            UNASSIGNED => UNASSIGNED,
            v if (v == TRUE) == (l & 1 == 0) => TRUE,
            _ => FALSE,
        }
    }

    /// Returns false on conflict with an existing assignment.
    fn assign(&mut self, l: u32) -> bool {
        match self.value(l) {
            TRUE => true,
            FALSE => false,
            _ => {
                self.val[var_of(l) as usize] = if l & 1 == 0 { TRUE } else { FALSE };
                self.trail.push(var_of(l));
                true
            }
        }
    }

    /// Unit propagation over the trail suffix starting at `from`.
    fn propagate(&mut self, from: usize) -> bool {
        let mut head = from;
        while head < self.trail.len() {
            let v = self.trail[head] as usize;
            head += 1;
            for k in 0..self.occ[v].len() {
                let ci = self.occ[v][k] as usize;
                let mut unassigned = None;
                let mut count = 0;
                let mut satisfied = false;
                for &l in &self.clauses[ci] {
                    match self.value(l) {
                        TRUE => {
                            satisfied = true;
                            break;
                        }
                        UNASSIGNED => {
                            count += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match (count, unassigned) {
                    (0, _) => return false,
                    (1, Some(l)) => {
                        self.assign(l);
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.val[v as usize] = UNASSIGNED;
        }
    }

    fn push(&mut self, n: Node) -> Result<NodeId> {
        if let Some(&id) = self.unique.get(&n) {
            return Ok(id);
        }
        if self.nodes.len() >= self.limits.node_cap {
            return Err(Error::NodeCap(self.limits.node_cap));
        }
        if self.nodes.len() & 1023 == 0 {
            if let Some(d) = self.limits.deadline {
                if Instant::now() >= d {
                    return Err(Error::Timeout);
                }
            }
        }
        let id = NodeId(self.nodes.len() as u32);
        self.unique.insert(n.clone(), id);
        self.nodes.push(n);
        Ok(id)
    }

    fn mk_and(&mut self, mut children: Vec<NodeId>) -> Result<NodeId> {
        if children.contains(&NodeId::FALSE) {
            return Ok(NodeId::FALSE);
        }
        children.retain(|&c| c != NodeId::TRUE);
        children.sort_unstable();
        match children.len() {
            0 => Ok(NodeId::TRUE),
            1 => Ok(children[0]),
            _ => self.push(Node::And(children)),
        }
    }

    /// Unsatisfied clauses among `clauses`, split into components that
    /// share no unassigned variable.
    fn components(&mut self, clauses: &[u32]) -> Vec<Vec<u32>> {
        let mut residual = Vec::new();
        for &ci in clauses {
            let cl = &self.clauses[ci as usize];
            if cl.iter().any(|&l| self.value(l) == TRUE) {
                continue;
            }
            residual.push(ci);
        }
        let mut touched = Vec::new();
        for &ci in &residual {
            let mut first = None;
            for k in 0..self.clauses[ci as usize].len() {
                let l = self.clauses[ci as usize][k];
                if self.value(l) != UNASSIGNED {
                    continue;
                }
                let v = var_of(l);
                touched.push(v);
                match first {
                    None => first = Some(v),
                    Some(f) => self.union(f, v),
                }
            }
        }
        let mut group: FxHashMap<u32, usize> = FxHashMap::default();
        let mut out: Vec<Vec<u32>> = Vec::new();
        for &ci in &residual {
            let v = self.clauses[ci as usize]
                .iter()
                .find(|&&l| self.value(l) == UNASSIGNED)
                .map(|&l| var_of(l))
                .expect("propagated residual clause has an unassigned literal");
            let root = self.find(v);
            let g = *group.entry(root).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[g].push(ci);
        }
        for v in touched {
            self.uf[v as usize] = v;
        }
        out
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.uf[v as usize] != v {
            let parent = self.uf[v as usize];
            self.uf[v as usize] = self.uf[parent as usize];
            v = parent;
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.uf[hi as usize] = lo;
        }
    }

    fn key(&self, clauses: &[u32]) -> Vec<u32> {
        let mut residual: Vec<Vec<u32>> = clauses
            .iter()
            .map(|&ci| {
                self.clauses[ci as usize]
                    .iter()
                    .copied()
                    .filter(|&l| self.value(l) == UNASSIGNED)
                    .collect()
            })
            .collect();
        residual.sort_unstable();
        let mut key = Vec::with_capacity(residual.iter().map(|c| c.len() + 1).sum());
        for c in residual {
            key.extend(c);
            key.push(SEPARATOR);
        }
        key
    }

    /// Literal nodes for facts assigned on the trail after `from`.
    fn implied_leaves(&mut self, from: usize) -> Result<Vec<NodeId>> {
        let mut leaves = Vec::new();
        for k in from..self.trail.len() {
            let v = self.trail[k] as usize;
            if let Some(f) = self.fact[v] {
                let (high, low) = if self.val[v] == TRUE {
                    (NodeId::TRUE, NodeId::FALSE)
                } else {
                    (NodeId::FALSE, NodeId::TRUE)
                };
                leaves.push(self.push(Node::Decision {
                    fact: f as usize,
                    high,
                    low,
                })?);
            }
        }
        Ok(leaves)
    }

    fn compile_root(&mut self, query: &[u32]) -> Result<NodeId> {
        if self.base_conflict {
            return Ok(NodeId::FALSE);
        }
        let mark = self.trail.len();
        let ok = query.iter().all(|&l| self.assign(l)) && self.propagate(mark);
        let result = if ok { self.close_branch(mark, None) } else { Ok(NodeId::FALSE) };
        self.undo(mark);
        result
    }

    /// After propagation: implied leaves plus compiled components.
    fn close_branch(&mut self, mark: usize, within: Option<&[u32]>) -> Result<NodeId> {
        let mut children = self.implied_leaves(mark)?;
        let all: Vec<u32>;
        let scope = match within {
            Some(s) => s,
            None => {
                all = (0..self.clauses.len() as u32).collect();
                &all
            }
        };
        for comp in self.components(scope) {
            let node = self.compile_component(&comp)?;
            if node == NodeId::FALSE {
                return Ok(NodeId::FALSE);
            }
            children.push(node);
        }
        self.mk_and(children)
    }

    fn compile_component(&mut self, comp: &[u32]) -> Result<NodeId> {
        let key = self.key(comp);
        if let Some(&n) = self.cache.get(&key) {
            return Ok(n);
        }
        let var = comp
            .iter()
            .flat_map(|&ci| self.clauses[ci as usize].iter())
            .map(|&l| var_of(l))
            .filter(|&v| self.val[v as usize] == UNASSIGNED && self.fact[v as usize].is_some())
            .min_by_key(|&v| self.rank[v as usize])
            .expect("open component of an acyclic program contains an unassigned fact");
        let mut branch = [NodeId::FALSE; 2];
        for (i, positive) in [true, false].into_iter().enumerate() {
            let mark = self.trail.len();
            self.assign(lit(var, positive));
            branch[i] = if self.propagate(mark) {
                self.close_branch(mark + 1, Some(comp))?
            } else {
                NodeId::FALSE
            };
            self.undo(mark);
        }
        let node = if branch[0] == branch[1] {
            branch[0]
        } else {
            let fact = self.fact[var as usize].expect("decision on a fact") as usize;
            self.push(Node::Decision {
                fact,
                high: branch[0],
                low: branch[1],
            })?
        };
        self.cache.insert(key, node);
        Ok(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::parse::parse_program;

    fn count(p: &Program, atom: &str) -> f64 {
        let c = compile_circuit(p, &[p.require(atom).unwrap()], &Limits::default()).unwrap();
        c.counts::<f64>()[0]
    }

    #[test]
    fn single_fact_is_one_decision() {
        let p = parse_program("0.25::a.").unwrap();
        let c = compile_circuit(&p, &[p.require("a").unwrap()], &Limits::default()).unwrap();
        let root = c.roots()[0];
        assert_eq!(
            *c.node(root),
            Node::Decision {
                fact: 0,
                high: NodeId::TRUE,
                low: NodeId::FALSE
            }
        );
        assert_eq!(c.counts::<f64>()[0], 0.25);
    }

    #[test]
    fn power_failure_report() {
        assert!((count(&examples::power_failure(), "d") - 0.75).abs() < 1e-12);
        assert!((count(&examples::smoking(), "cancer") - 0.18).abs() < 1e-12);
    }

    #[test]
    fn independent_parts_decompose() {
        let p = parse_program("0.5::x. 0.5::y. a :- x. b :- y. g :- a, b.").unwrap();
        let c = compile_circuit(&p, &[p.require("g").unwrap()], &Limits::default()).unwrap();
        let root = c.roots()[0];
        assert!(matches!(c.node(root), Node::And(ch) if ch.len() == 2));
        assert_eq!(c.counts::<f64>()[0], 0.25);
    }

    #[test]
    fn node_cap_is_enforced() {
        let p = examples::figure3();
        let limits = Limits {
            node_cap: 3,
            deadline: None,
        };
        let r = compile_circuit(&p, &[p.require("h").unwrap()], &limits);
        assert!(matches!(r, Err(Error::NodeCap(3))));
    }

    #[test]
    fn decision_depth_bounded_by_facts() {
        let p = examples::figure3();
        let c = compile_circuit(&p, &[p.require("h").unwrap()], &Limits::default()).unwrap();
        assert!(c.decision_depth(c.roots()[0]) <= p.facts().len());
        assert!(c.facts_below(c.roots()[0]).len() <= p.facts().len());
    }
}
