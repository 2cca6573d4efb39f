//! Logic programs with annotated disjunctions and their translations to and
//! from ProbLog.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::DiGraph;
use crate::prob::Prob;
use crate::program::{Literal, Program, ProgramBuilder};

/// `h1:π1 ; ... ; hl:πl :- body` with `Σ πi ≤ 1`. The remaining mass is the
/// probability that no head is selected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpadClause {
    heads: Vec<(String, Prob)>,
    body: Vec<(String, bool)>,
}

impl LpadClause {
    pub fn new(heads: Vec<(String, Prob)>, body: Vec<(String, bool)>) -> Result<Self> {
        for (i, (h, _)) in heads.iter().enumerate() {
            if heads[..i].iter().any(|(g, _)| g == h) {
                return Err(Error::DuplicateHead(h.clone()));
            }
        }
        let mass: BigRational = heads.iter().map(|(_, p)| p.exact().clone()).sum();
        if mass > BigRational::one() {
            return Err(Error::HeadMassExceeded(mass.to_string()));
        }
        Ok(LpadClause { heads, body })
    }

    /// `head:1 :- body`.
    pub fn deterministic(head: &str, body: Vec<(String, bool)>) -> Self {
        LpadClause {
            heads: vec![(head.to_string(), Prob::one())],
            body,
        }
    }

    pub fn heads(&self) -> &[(String, Prob)] {
        &self.heads
    }

    pub fn body(&self) -> &[(String, bool)] {
        &self.body
    }

    /// `1 - Σ πi`: weight of selecting no head.
    pub fn null_mass(&self) -> BigRational {
        BigRational::one() - self.heads.iter().map(|(_, p)| p.exact().clone()).sum::<BigRational>()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpadProgram {
    pub clauses: Vec<LpadClause>,
}

impl LpadProgram {
    pub fn new(clauses: Vec<LpadClause>) -> Self {
        LpadProgram { clauses }
    }

    /// Dependency graph of the union of all selections: body atom -> head.
    pub fn dependency_graph(&self) -> DiGraph {
        let mut g = DiGraph::new();
        for c in &self.clauses {
            for (h, _) in &c.heads {
                g.add_node(h);
            }
            for (b, _) in &c.body {
                g.add_node(b);
            }
            for (h, _) in &c.heads {
                for (b, positive) in &c.body {
                    g.add_named_edge(b, h, *positive);
                }
            }
        }
        g
    }

    pub fn check_acyclic(&self) -> Result<()> {
        let g = self.dependency_graph();
        match g.find_cycle() {
            None => Ok(()),
            Some(c) => Err(Error::Cyclic(c.into_iter().map(|v| g.name(v).to_string()).collect())),
        }
    }
}

/// Appends the ProbLog encoding of one LPAD clause.
///
/// Head `i` gets a choice fact `u_i` with probability
/// `π_i / (1 - Σ_{j<i} π_j)` (0 once the remaining mass is exhausted) and
/// fires when the body holds, `u_i` holds and no earlier head fired. Earlier
/// heads are tracked by auxiliary atoms; the last head, and the only head of
/// a single-head clause, is derived directly.
pub(crate) fn desugar_into(b: &mut ProgramBuilder, clause: &LpadClause) -> Result<()> {
    let arity = clause.heads.len();
    let k = loop {
        let k = b.lpad_clauses;
        b.lpad_clauses += 1;
        let taken = (1..=arity).any(|i| b.contains(&choice_name(k, i)) || b.contains(&aux_name(k, i)));
        if !taken {
            break k;
        }
    };
    let body: Vec<Literal> = clause
        .body
        .iter()
        .map(|(n, positive)| Literal {
            atom: b.atom(n),
            positive: *positive,
        })
        .collect();
    let mut used = BigRational::zero();
    let mut earlier = Vec::new();
    for (i, (head, p)) in clause.heads.iter().enumerate() {
        let remaining = BigRational::one() - &used;
        let choice_p = if remaining.is_zero() {
            Prob::zero()
        } else {
            Prob::new(p.exact() / &remaining)?
        };
        used += p.exact();
        let u = b.add_fact(&choice_name(k, i + 1), choice_p)?;
        let mut lits = body.clone();
        lits.extend(earlier.iter().map(|&a| Literal::neg(a)));
        lits.push(Literal::pos(u));
        let head_atom = b.atom(head);
        if i + 1 == arity {
            b.add_clause_ids(head_atom, lits);
        } else {
            let aux = b.atom(&aux_name(k, i + 1));
            b.add_clause_ids(aux, lits);
            b.add_clause_ids(head_atom, vec![Literal::pos(aux)]);
            earlier.push(aux);
        }
    }
    Ok(())
}

fn choice_name(k: usize, i: usize) -> String {
    format!("ad{k}_u{i}")
}

fn aux_name(k: usize, i: usize) -> String {
    format!("ad{k}_h{i}")
}

/// ProbLog program defining the same distribution over the LPAD's atoms.
pub fn lpad_to_problog(lp: &LpadProgram) -> Result<Program> {
    let mut b = ProgramBuilder::new();
    for c in &lp.clauses {
        desugar_into(&mut b, c)?;
    }
    b.build()
}

/// One `a:π :-` clause per fact and one `h:1 :- body` clause per rule.
pub fn problog_to_lpad(p: &Program) -> LpadProgram {
    let mut clauses = Vec::with_capacity(p.size());
    for item in p.source_order() {
        match *item {
            crate::program::Item::Fact(i) => {
                let f = &p.facts()[i];
                clauses.push(LpadClause {
                    heads: vec![(p.name(f.atom).to_string(), f.prob.clone())],
                    body: Vec::new(),
                });
            }
            crate::program::Item::Clause(i) => {
                let c = &p.clauses()[i];
                let body = c
                    .body
                    .iter()
                    .map(|l| (p.name(l.atom).to_string(), l.positive))
                    .collect();
                clauses.push(LpadClause::deterministic(p.name(c.head), body));
            }
        }
    }
    LpadProgram { clauses }
}
