//! Seeded random programs and counterfactual queries for property tests.
//!
//! Every generator is a pure function of its seed. Probabilities are small
//! rationals so exact and floating-point evaluation can be compared.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::DiGraph;
use crate::lpad::{LpadClause, LpadProgram};
use crate::prob::Prob;
use crate::program::{Assignment, Formula, Program, ProgramBuilder};

/// Shape limits for [`random_program_with`].
#[derive(Clone, Copy, Debug)]
pub struct ProgramShape {
    pub max_facts: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    /// Most clause heads (endogenous atoms).
    pub max_heads: usize,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            max_facts: 12,
            max_clauses: 25,
            max_body: 4,
            max_heads: 12,
        }
    }
}

/// Shape limits for [`random_lpad_with`].
#[derive(Clone, Copy, Debug)]
pub struct LpadShape {
    pub max_clauses: usize,
    pub max_arity: usize,
    pub max_body: usize,
    pub max_atoms: usize,
}

impl Default for LpadShape {
    fn default() -> Self {
        LpadShape {
            max_clauses: 10,
            max_arity: 3,
            max_body: 3,
            max_atoms: 8,
        }
    }
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// A probability `k/d` with a small denominator; 0 and 1 appear now and then.
fn random_prob(rng: &mut ChaCha8Rng) -> Prob {
    match rng.gen_range(0..20) {
        0 => Prob::zero(),
        1 => Prob::one(),
        _ => {
            let d = *[2i64, 3, 4, 5, 8, 10].choose(rng).expect("non-empty");
            Prob::ratio(rng.gen_range(1..d), d).expect("in range")
        }
    }
}

/// Random acyclic ground program with the default shape.
pub fn random_program(seed: u64) -> Program {
    random_program_with(&ProgramShape::default(), seed)
}

/// Facts `f0..`, heads `a0..` in topological order. Every head gets at
/// least one clause; bodies draw distinct atoms among the facts and earlier
/// heads, each with a random sign.
pub fn random_program_with(shape: &ProgramShape, seed: u64) -> Program {
    let mut rng = rng(seed, 1);
    let n_facts = rng.gen_range(1..=shape.max_facts.max(1));
    let n_heads = rng.gen_range(1..=shape.max_heads.min(shape.max_clauses).max(1));
    let n_clauses = rng.gen_range(n_heads..=shape.max_clauses.max(n_heads));

    let mut b = ProgramBuilder::new();
    let facts: Vec<String> = (0..n_facts).map(|i| format!("f{i}")).collect();
    for f in &facts {
        b.add_fact(f, random_prob(&mut rng)).expect("fresh fact");
    }
    let heads: Vec<String> = (0..n_heads).map(|i| format!("a{i}")).collect();
    let mut owner: Vec<usize> = (0..n_heads).collect();
    owner.extend((n_heads..n_clauses).map(|_| rng.gen_range(0..n_heads)));
    owner.sort_unstable();
    for h in owner {
        let pool: Vec<&String> = facts.iter().chain(&heads[..h]).collect();
        let len = rng.gen_range(0..=shape.max_body.min(pool.len()));
        // empty bodies are rare so that most heads stay uncertain
        let len = if len == 0 && rng.gen_bool(0.7) { 1.min(pool.len()) } else { len };
        let body: Vec<(&str, bool)> = pool
            .choose_multiple(&mut rng, len)
            .map(|n| (n.as_str(), rng.gen_bool(0.75)))
            .collect();
        b.add_clause(&heads[h], &body);
    }
    b.build().expect("generated program is valid")
}

/// Random acyclic LPAD with the default shape.
pub fn random_lpad(seed: u64) -> LpadProgram {
    random_lpad_with(&LpadShape::default(), seed)
}

/// Atoms `b0..` are ranked by creation. A clause reads atoms already in some
/// head and derives atoms ranked above all of them, fresh or reused, so the
/// program stays acyclic. Head masses are tenths summing to at most one.
pub fn random_lpad_with(shape: &LpadShape, seed: u64) -> LpadProgram {
    let mut rng = rng(seed, 2);
    let n_clauses = rng.gen_range(1..=shape.max_clauses.max(1));
    let mut atoms: Vec<String> = Vec::new();
    let mut clauses = Vec::with_capacity(n_clauses);
    for _ in 0..n_clauses {
        let len = rng.gen_range(0..=shape.max_body.min(atoms.len()));
        let body_ids: Vec<usize> = rand::seq::index::sample(&mut rng, atoms.len(), len).into_vec();
        let floor = body_ids.iter().max().map_or(0, |&m| m + 1);
        let arity = rng.gen_range(1..=shape.max_arity.max(1));
        let mut heads: Vec<usize> = Vec::new();
        for _ in 0..arity {
            let reusable: Vec<usize> = (floor..atoms.len()).filter(|i| !heads.contains(i)).collect();
            let fresh_allowed = atoms.len() < shape.max_atoms;
            let reuse = !reusable.is_empty() && (!fresh_allowed || rng.gen_bool(0.35));
            if reuse {
                heads.push(*reusable.choose(&mut rng).expect("non-empty"));
            } else if fresh_allowed {
                atoms.push(format!("b{}", atoms.len()));
                heads.push(atoms.len() - 1);
            }
        }
        if heads.is_empty() {
            continue;
        }
        let mut left = 10i64;
        let mut head_probs = Vec::with_capacity(heads.len());
        for (i, &h) in heads.iter().enumerate() {
            let tenths = if i + 1 == heads.len() && rng.gen_bool(0.3) {
                left
            } else {
                rng.gen_range(0..=left)
            };
            left -= tenths;
            head_probs.push((atoms[h].clone(), Prob::ratio(tenths, 10).expect("in range")));
        }
        let body = body_ids
            .into_iter()
            .map(|i| (atoms[i].clone(), rng.gen_bool(0.75)))
            .collect();
        clauses.push(LpadClause::new(head_probs, body).expect("distinct heads, mass at most one"));
    }
    LpadProgram::new(clauses)
}

/// A counterfactual query `π(φ_x | E = e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub fix: Assignment,
    pub evidence: Assignment,
    pub query: Formula,
}

/// A random case over the atoms of `g`: one to three interventions, up to
/// three evidence atoms that no intervened atom reaches (intervened atoms
/// themselves included) and a query of one or two literals.
pub fn random_case(g: &DiGraph, seed: u64) -> Case {
    random_case_sized(g, seed, 1..=3, 0..=3, true)
}

/// [`random_case`] with explicit sizes; without `upstream_only` evidence may
/// sit anywhere, downstream of the interventions included.
pub fn random_case_sized(
    g: &DiGraph,
    seed: u64,
    n_fix: RangeInclusive<usize>,
    n_ev: RangeInclusive<usize>,
    upstream_only: bool,
) -> Case {
    let mut rng = rng(seed, 3);
    let all: Vec<usize> = (0..g.len()).collect();
    let k = rng.gen_range(n_fix).min(all.len());
    let fixed: Vec<usize> = all.choose_multiple(&mut rng, k).copied().collect();
    // descendants of each intervened atom, other intervened atoms included
    let downstream: BTreeSet<usize> = if upstream_only {
        fixed.iter().flat_map(|&v| g.descendants(&[v])).collect()
    } else {
        BTreeSet::new()
    };
    let eligible: Vec<usize> = all.iter().copied().filter(|v| !downstream.contains(v)).collect();
    let e = rng.gen_range(n_ev).min(eligible.len());
    let observed: Vec<usize> = eligible.choose_multiple(&mut rng, e).copied().collect();
    let q = rng.gen_range(1..=2usize).min(all.len());
    let queried: Vec<usize> = all.choose_multiple(&mut rng, q).copied().collect();

    let mut assign = |vs: &[usize]| {
        Assignment::from_pairs(vs.iter().map(|&v| (g.name(v), rng.gen_bool(0.5)))).expect("distinct atoms")
    };
    let fix = assign(&fixed);
    let evidence = assign(&observed);
    let query = Formula::new(assign(&queried).iter()).expect("distinct atoms");
    Case { fix, evidence, query }
}
