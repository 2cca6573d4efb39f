//! Ground ProbLog programs and their distribution semantics.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::DiGraph;
use crate::prob::{Prob, Weight};

/// Interned atom, valid only for the [`Program`] that issued it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: AtomId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: AtomId) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: AtomId) -> Self {
        Literal { atom, positive: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbFact {
    pub atom: AtomId,
    pub prob: Prob,
}

/// `head :- body`. Bodies keep source order; semantics are set-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: AtomId,
    pub body: Vec<Literal>,
}

/// Position of a fact or clause in the source listing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Item {
    Fact(usize),
    Clause(usize),
}

/// A ground ProbLog program: probabilistic facts (the exogenous atoms) plus
/// normal clauses defining the internal atoms.
///
/// Atoms that are neither facts nor clause heads are allowed in programs
/// built through [`ProgramBuilder`] and are false in every world; the
/// parser rejects them unless asked to treat them as 0-probability facts.
#[derive(Clone)]
pub struct Program {
    names: Vec<String>,
    index: FxHashMap<String, AtomId>,
    facts: Vec<ProbFact>,
    clauses: Vec<Clause>,
    order: Vec<Item>,
    fact_of: Vec<Option<u32>>,
    clauses_of: Vec<Vec<u32>>,
    topo: Option<Vec<AtomId>>,
}

impl Program {
    pub fn empty() -> Self {
        ProgramBuilder::new().build().expect("empty program is valid")
    }

    pub fn atom_count(&self) -> usize {
        self.names.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.names.len() as u32).map(AtomId)
    }

    pub fn name(&self, a: AtomId) -> &str {
        &self.names[a.index()]
    }

    pub fn atom(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<AtomId> {
        self.atom(name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn facts(&self) -> &[ProbFact] {
        &self.facts
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn source_order(&self) -> &[Item] {
        &self.order
    }

    /// Index into [`Program::facts`] if `a` is a probabilistic fact.
    pub fn fact_index(&self, a: AtomId) -> Option<usize> {
        self.fact_of[a.index()].map(|i| i as usize)
    }

    pub fn is_fact(&self, a: AtomId) -> bool {
        self.fact_of[a.index()].is_some()
    }

    /// Indices of the clauses with head `a`.
    pub fn clauses_for(&self, a: AtomId) -> impl Iterator<Item = &Clause> + '_ {
        self.clauses_of[a.index()]
            .iter()
            .map(|&i| &self.clauses[i as usize])
    }

    pub fn clause_indices_for(&self, a: AtomId) -> &[u32] {
        &self.clauses_of[a.index()]
    }

    pub fn is_head(&self, a: AtomId) -> bool {
        !self.clauses_of[a.index()].is_empty()
    }

    /// `|P|`: facts plus clauses.
    pub fn size(&self) -> usize {
        self.facts.len() + self.clauses.len()
    }

    /// `L_max`: longest clause body, 0 for a program without clauses.
    pub fn max_body_len(&self) -> usize {
        self.clauses.iter().map(|c| c.body.len()).max().unwrap_or(0)
    }

    pub fn total_body_len(&self) -> usize {
        self.clauses.iter().map(|c| c.body.len()).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        self.topo.is_some()
    }

    /// Atoms in an order where every clause head follows its body atoms.
    pub fn topological_order(&self) -> Result<&[AtomId]> {
        match &self.topo {
            Some(t) => Ok(t),
            None => Err(Error::Cyclic(self.cycle_witness().unwrap_or_default())),
        }
    }

    /// Signed dependency graph: one vertex per atom (in id order), an edge
    /// `b -> h` for every body literal on `b` of a clause with head `h`.
    pub fn dependency_graph(&self) -> DiGraph {
        let mut g = DiGraph::new();
        for name in &self.names {
            g.add_node(name);
        }
        for c in &self.clauses {
            for l in &c.body {
                g.add_edge(l.atom.index(), c.head.index(), l.positive);
            }
        }
        g
    }

    /// `Ok(())` if the dependency graph is acyclic, otherwise a witness
    /// cycle `[a, b, ..., a]`.
    pub fn check_acyclic(&self) -> std::result::Result<(), Vec<String>> {
        match self.cycle_witness() {
            None => Ok(()),
            Some(c) => Err(c),
        }
    }

    fn cycle_witness(&self) -> Option<Vec<String>> {
        if self.topo.is_some() {
            return None;
        }
        let g = self.dependency_graph();
        g.find_cycle()
            .map(|c| c.into_iter().map(|v| g.name(v).to_string()).collect())
    }

    /// Builder seeded with this program's atoms, facts and clauses.
    pub fn to_builder(&self) -> ProgramBuilder {
        ProgramBuilder {
            names: self.names.clone(),
            index: self.index.clone(),
            facts: self.facts.clone(),
            clauses: self.clauses.clone(),
            order: self.order.clone(),
            fact_of: self.fact_of.clone(),
            lpad_clauses: 0,
        }
    }

    /// Structural identity by atom name: same facts and clauses in the same
    /// order.
    pub fn same_structure(&self, other: &Program) -> bool {
        let fact = |p: &Program, f: &ProbFact| (p.name(f.atom).to_string(), f.prob.clone());
        let clause = |p: &Program, c: &Clause| {
            (
                p.name(c.head).to_string(),
                c.body
                    .iter()
                    .map(|l| (p.name(l.atom).to_string(), l.positive))
                    .collect::<Vec<_>>(),
            )
        };
        self.facts.len() == other.facts.len()
            && self.clauses.len() == other.clauses.len()
            && self
                .facts
                .iter()
                .zip(&other.facts)
                .all(|(a, b)| fact(self, a) == fact(other, b))
            && self
                .clauses
                .iter()
                .zip(&other.clauses)
                .all(|(a, b)| clause(self, a) == clause(other, b))
    }

    pub(crate) fn literal_text(&self, l: &Literal) -> String {
        if l.positive {
            self.name(l.atom).to_string()
        } else {
            format!("\\+ {}", self.name(l.atom))
        }
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::print_program(self))
    }
}

/// Incremental construction of a [`Program`].
#[derive(Clone, Default)]
pub struct ProgramBuilder {
    names: Vec<String>,
    index: FxHashMap<String, AtomId>,
    facts: Vec<ProbFact>,
    clauses: Vec<Clause>,
    order: Vec<Item>,
    fact_of: Vec<Option<u32>>,
    pub(crate) lpad_clauses: usize,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `name` (assumed canonical) and returns its id.
    pub fn atom(&mut self, name: &str) -> AtomId {
        if let Some(&a) = self.index.get(name) {
            return a;
        }
        let a = AtomId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), a);
        self.fact_of.push(None);
        a
    }

    pub fn atom_len(&self) -> usize {
        self.names.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn name(&self, a: AtomId) -> &str {
        &self.names[a.index()]
    }

    pub fn add_fact(&mut self, name: &str, prob: Prob) -> Result<AtomId> {
        let atom = self.atom(name);
        self.add_fact_id(atom, prob)?;
        Ok(atom)
    }

    pub fn add_fact_id(&mut self, atom: AtomId, prob: Prob) -> Result<()> {
        if self.fact_of[atom.index()].is_some() {
            return Err(Error::DuplicateFact(self.names[atom.index()].clone()));
        }
        self.fact_of[atom.index()] = Some(self.facts.len() as u32);
        self.order.push(Item::Fact(self.facts.len()));
        self.facts.push(ProbFact { atom, prob });
        Ok(())
    }

    pub fn add_clause(&mut self, head: &str, body: &[(&str, bool)]) -> AtomId {
        let head = self.atom(head);
        let body = body
            .iter()
            .map(|&(n, positive)| Literal {
                atom: self.atom(n),
                positive,
            })
            .collect();
        self.add_clause_ids(head, body);
        head
    }

    pub fn add_clause_ids(&mut self, head: AtomId, body: Vec<Literal>) {
        self.order.push(Item::Clause(self.clauses.len()));
        self.clauses.push(Clause { head, body });
    }

    pub(crate) fn facts(&self) -> &[ProbFact] {
        &self.facts
    }

    pub(crate) fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Checks fact/head disjointness and distinct body atoms. Cyclic
    /// programs are accepted; see [`Program::topological_order`].
    pub fn build(self) -> Result<Program> {
        let n = self.names.len();
        let mut clauses_of = vec![Vec::new(); n];
        for (i, c) in self.clauses.iter().enumerate() {
            if self.fact_of[c.head.index()].is_some() {
                return Err(Error::FactHeadOverlap(self.names[c.head.index()].clone()));
            }
            for (j, l) in c.body.iter().enumerate() {
                if c.body[..j].iter().any(|m| m.atom == l.atom) {
                    return Err(Error::DuplicateBodyAtom {
                        head: self.names[c.head.index()].clone(),
                        atom: self.names[l.atom.index()].clone(),
                    });
                }
            }
            clauses_of[c.head.index()].push(i as u32);
        }
        let mut p = Program {
            names: self.names,
            index: self.index,
            facts: self.facts,
            clauses: self.clauses,
            order: self.order,
            fact_of: self.fact_of,
            clauses_of,
            topo: None,
        };
        p.topo = p
            .dependency_graph()
            .topological_order()
            .map(|t| t.into_iter().map(|v| AtomId(v as u32)).collect());
        Ok(p)
    }
}

/// Truth values of the probabilistic facts, indexed like
/// [`Program::facts`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct World {
    values: Vec<bool>,
}

impl World {
    pub fn new(p: &Program, values: Vec<bool>) -> Result<Self> {
        if values.len() != p.facts().len() {
            return Err(Error::Guard {
                what: "world",
                size: values.len(),
                limit: p.facts().len(),
            });
        }
        Ok(World { values })
    }

    /// The world whose i-th fact is the i-th bit of `bits`.
    pub fn from_bits(p: &Program, bits: u64) -> Self {
        World {
            values: (0..p.facts().len()).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    /// Builds a world from fact names; every fact must be assigned.
    pub fn from_names<'a>(p: &Program, pairs: impl IntoIterator<Item = (&'a str, bool)>) -> Result<Self> {
        let mut values = vec![None; p.facts().len()];
        for (name, v) in pairs {
            let a = p.require(name)?;
            let i = p.fact_index(a).ok_or_else(|| Error::UnknownAtom(name.to_string()))?;
            values[i] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::UnknownAtom(p.name(p.facts()[i].atom).to_string())))
            .collect::<Result<_>>()?;
        Ok(World { values })
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// Truth values of every atom of a program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    values: Vec<bool>,
}

impl Interpretation {
    pub fn value(&self, a: AtomId) -> bool {
        self.values[a.index()]
    }

    pub fn get(&self, p: &Program, name: &str) -> Option<bool> {
        p.atom(name).map(|a| self.value(a))
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn satisfies(&self, lits: &[Literal]) -> bool {
        lits.iter().all(|l| self.value(l.atom) == l.positive)
    }
}

/// Evaluates atoms in topological order into `out`. Atoms in `clamp` take
/// the clamped value and ignore their facts and clauses.
pub(crate) fn evaluate_into(
    p: &Program,
    topo: &[AtomId],
    fact_values: &[bool],
    clamp: &[Option<bool>],
    out: &mut [bool],
) {
    for &a in topo {
        let i = a.index();
        out[i] = if let Some(v) = clamp.get(i).copied().flatten() {
            v
        } else if let Some(f) = p.fact_index(a) {
            fact_values[f]
        } else {
            p.clause_indices_for(a).iter().any(|&c| {
                p.clauses[c as usize]
                    .body
                    .iter()
                    .all(|l| out[l.atom.index()] == l.positive)
            })
        };
    }
}

/// The unique supported model of an acyclic program in world `w`.
pub fn evaluate_world(p: &Program, w: &World) -> Result<Interpretation> {
    let topo = p.topological_order()?;
    if w.values.len() != p.facts().len() {
        return Err(Error::Guard {
            what: "world",
            size: w.values.len(),
            limit: p.facts().len(),
        });
    }
    let mut values = vec![false; p.atom_count()];
    evaluate_into(p, topo, &w.values, &[], &mut values);
    Ok(Interpretation { values })
}

/// Product of `π` over true facts and `1 - π` over false facts.
pub fn world_probability<W: Weight>(p: &Program, w: &World) -> W {
    p.facts()
        .iter()
        .zip(&w.values)
        .fold(W::one(), |acc, (f, &v)| {
            let fp = W::from_prob(&f.prob);
            acc * if v { fp } else { W::one() - fp }
        })
}

/// A truth assignment to named atoms. Used for interventions
/// (`X := x`) and evidence (`E = e`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails if an atom is given two different values.
    pub fn from_pairs<S: AsRef<str>>(pairs: impl IntoIterator<Item = (S, bool)>) -> Result<Self> {
        let mut a = Assignment::new();
        for (name, v) in pairs {
            a.insert(name.as_ref(), v)?;
        }
        Ok(a)
    }

    pub fn insert(&mut self, name: &str, value: bool) -> Result<()> {
        match self.0.insert(name.to_string(), value) {
            Some(old) if old != value => Err(Error::ConflictingLiterals(name.to_string())),
            _ => Ok(()),
        }
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.0.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> + '_ {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.keys().map(String::as_str)
    }

    /// Resolves every name against `p`.
    pub fn resolve(&self, p: &Program) -> Result<Vec<Literal>> {
        self.iter()
            .map(|(n, v)| {
                Ok(Literal {
                    atom: p.require(n)?,
                    positive: v,
                })
            })
            .collect()
    }

    /// Parses `a=true,b=false`. Whitespace around items is ignored.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut out = Assignment::new();
        for item in split_top_level(s) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let syntax = |message: &str| Error::Syntax {
                line: 1,
                column: 1,
                message: format!("{message}: `{item}`"),
            };
            let (name, value) = item.rsplit_once('=').ok_or_else(|| syntax("expected atom=true|false"))?;
            let value = match value.trim() {
                "true" => true,
                "false" => false,
                _ => return Err(syntax("expected true or false")),
            };
            let name = crate::names::canonical_atom(name).ok_or_else(|| syntax("bad atom"))?;
            out.insert(&name, value)?;
        }
        Ok(out)
    }
}

/// Splits on commas that are not inside parentheses.
pub(crate) fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|(n, v)| format!("{n}={v}")).collect();
        f.write_str(&items.join(","))
    }
}

/// A conjunction of literals over named atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formula(Assignment);

impl Formula {
    pub fn new<S: AsRef<str>>(lits: impl IntoIterator<Item = (S, bool)>) -> Result<Self> {
        Assignment::from_pairs(lits).map(Formula)
    }

    pub fn atom(name: &str) -> Self {
        Formula::new([(name, true)]).expect("single literal")
    }

    pub fn literals(&self) -> &Assignment {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Conjunction of two formulas; fails on contradictory literals.
    pub fn and(&self, other: &Assignment) -> Result<Formula> {
        let mut out = self.0.clone();
        for (n, v) in other.iter() {
            out.insert(n, v)?;
        }
        Ok(Formula(out))
    }

    /// Parses `a,\+b` or `a=true,b=false`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Assignment::new();
        for item in split_top_level(s) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            if item.contains('=') {
                for (n, v) in Assignment::parse_list(item)?.iter() {
                    out.insert(n, v)?;
                }
                continue;
            }
            let (raw, positive) = match item.strip_prefix("\\+") {
                Some(rest) => (rest, false),
                None => (item, true),
            };
            let name = crate::names::canonical_atom(raw).ok_or_else(|| Error::Syntax {
                line: 1,
                column: 1,
                message: format!("bad query literal `{item}`"),
            })?;
            out.insert(&name, positive)?;
        }
        Ok(Formula(out))
    }
}

impl From<Assignment> for Formula {
    fn from(a: Assignment) -> Self {
        Formula(a)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .0
            .iter()
            .map(|(n, v)| if v { n.to_string() } else { format!("\\+{n}") })
            .collect();
        f.write_str(&items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use num_rational::BigRational;

    #[test]
    fn power_failure_world_evaluation() {
        let p = examples::power_failure();
        let w = World::from_names(&p, [("u_a", true), ("u_b", false)]).unwrap();
        let i = evaluate_world(&p, &w).unwrap();
        let got: Vec<bool> = ["a", "b", "c", "d"].iter().map(|n| i.get(&p, n).unwrap()).collect();
        assert_eq!(got, [true, false, true, true]);
        assert_eq!(world_probability::<f64>(&p, &w), 0.25);
    }

    #[test]
    fn smoking_world_evaluation() {
        let p = examples::smoking();
        let w = World::from_names(&p, [("smokes", false), ("genetic_risk", true), ("lifestyle", true)]).unwrap();
        assert_eq!(evaluate_world(&p, &w).unwrap().get(&p, "cancer"), Some(false));
        let w = World::from_names(&p, [("smokes", true), ("genetic_risk", true), ("lifestyle", true)]).unwrap();
        assert_eq!(
            world_probability::<BigRational>(&p, &w),
            BigRational::new(54.into(), 1000.into())
        );
    }

    #[test]
    fn negation_evaluates_against_false_fact() {
        let mut b = ProgramBuilder::new();
        b.add_clause("a", &[("b", false)]);
        b.add_fact("b", Prob::ratio(2, 5).unwrap()).unwrap();
        let p = b.build().unwrap();
        let w = World::from_names(&p, [("b", false)]).unwrap();
        assert_eq!(evaluate_world(&p, &w).unwrap().get(&p, "a"), Some(true));
    }

    #[test]
    fn certain_facts_give_probability_one() {
        let mut b = ProgramBuilder::new();
        b.add_fact("x", Prob::one()).unwrap();
        b.add_fact("y", Prob::one()).unwrap();
        let p = b.build().unwrap();
        let w = World::from_bits(&p, 0b11);
        assert_eq!(world_probability::<f64>(&p, &w), 1.0);
    }

    #[test]
    fn dependency_graph_of_examples() {
        let g = examples::smoking().dependency_graph();
        let edges: Vec<_> = g.edge_set().into_iter().collect();
        assert_eq!(
            edges,
            [
                ("genetic_risk".to_string(), "cancer".to_string()),
                ("smokes".to_string(), "cancer".to_string())
            ]
        );
        let g = examples::power_failure().dependency_graph();
        let want: Vec<(String, String)> = [("u_a", "a"), ("u_b", "b"), ("a", "c"), ("b", "c"), ("c", "d")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        assert_eq!(g.edge_set(), want.into_iter().collect());

        let mut b = ProgramBuilder::new();
        b.add_fact("x", Prob::one()).unwrap();
        let g = b.build().unwrap().dependency_graph();
        assert_eq!(g.len(), 1);
        assert!(g.edge_set().is_empty());
    }

    #[test]
    fn check_acyclic_reports_witness() {
        assert!(examples::power_failure().check_acyclic().is_ok());
        assert!(Program::empty().check_acyclic().is_ok());
        let mut b = ProgramBuilder::new();
        b.add_clause("a", &[("b", true)]);
        b.add_clause("b", &[("a", true)]);
        let p = b.build().unwrap();
        assert_eq!(p.check_acyclic().unwrap_err(), ["a", "b", "a"]);
        assert!(matches!(p.topological_order(), Err(Error::Cyclic(_))));
    }

    #[test]
    fn builder_rejects_overlap_and_duplicates() {
        let mut b = ProgramBuilder::new();
        b.add_fact("a", Prob::one()).unwrap();
        assert!(matches!(b.add_fact("a", Prob::zero()), Err(Error::DuplicateFact(_))));
        b.add_clause("a", &[("c", true)]);
        assert!(matches!(b.build(), Err(Error::FactHeadOverlap(_))));

        let mut b = ProgramBuilder::new();
        b.add_clause("h", &[("c", true), ("c", false)]);
        assert!(matches!(b.build(), Err(Error::DuplicateBodyAtom { .. })));
    }

    #[test]
    fn assignment_lists() {
        let a = Assignment::parse_list("b=true, r(v1,v2)=false").unwrap();
        assert_eq!(a.get("b"), Some(true));
        assert_eq!(a.get("r(v1,v2)"), Some(false));
        assert!(Assignment::parse_list("b=maybe").is_err());
        assert!(Assignment::parse_list("b=true,b=false").is_err());
        let f = Formula::parse("d, \\+c").unwrap();
        assert_eq!(f.literals().get("c"), Some(false));
        assert!(Formula::parse("d,\\+d").is_err());
    }
}
