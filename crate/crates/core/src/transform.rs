//! Counterfactual program transformations.
//!
//! * [`swift`] builds the single-world intervention program: clauses for
//!   intervened atoms are dropped and body occurrences are redirected to
//!   fresh `fixed__` atoms holding the intervened value.
//! * [`construct_twin`] builds the twin network: every clause is copied into
//!   a counterfactual world of `__cf` atoms, sharing the probabilistic facts.
//! * [`simplify`] propagates deterministic facts and removes atoms that do
//!   not feed the atoms of interest.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::names;
use crate::prob::Prob;
use crate::program::{Assignment, AtomId, Item, Literal, Program, ProgramBuilder};

/// Interventions `X := x`, for both `fix` and `do`.
pub type Intervention = Assignment;

/// Work counters reported by the transformations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TransformStats {
    pub clauses_visited: usize,
    pub literals_rewritten: usize,
    /// Facts plus clauses of the output program.
    pub output_size: usize,
}

struct Resolved {
    /// Intervened value per atom of the input program.
    value: Vec<Option<bool>>,
}

fn resolve(p: &Program, x: &Intervention) -> Result<Resolved> {
    let mut value = vec![None; p.atom_count()];
    for (name, v) in x.iter() {
        value[p.require(name)?.index()] = Some(v);
    }
    Ok(Resolved { value })
}

fn check_fresh(p: &Program, name: &str) -> Result<()> {
    match p.atom(name) {
        Some(_) => Err(Error::NameCollision(name.to_string())),
        None => Ok(()),
    }
}

/// Single-world intervention program for `fix(X := x)`.
pub fn swift(p: &Program, fix: &Intervention) -> Result<(Program, TransformStats)> {
    if fix.is_empty() {
        return Err(Error::EmptyIntervention);
    }
    p.topological_order()?;
    let x = resolve(p, fix)?;
    for (name, _) in fix.iter() {
        check_fresh(p, &names::fixed(name))?;
    }
    let mut b = ProgramBuilder::new();
    let mut stats = TransformStats::default();
    let mut fixed_atom = vec![None; p.atom_count()];
    for item in p.source_order() {
        match *item {
            Item::Fact(i) => {
                let f = &p.facts()[i];
                b.add_fact(p.name(f.atom), f.prob.clone())?;
            }
            Item::Clause(i) => {
                stats.clauses_visited += 1;
                let c = &p.clauses()[i];
                if x.value[c.head.index()].is_some() {
                    continue;
                }
                let head = b.atom(p.name(c.head));
                let body = c
                    .body
                    .iter()
                    .map(|l| {
                        let name = if x.value[l.atom.index()].is_some() {
                            stats.literals_rewritten += 1;
                            fixed_atom[l.atom.index()]
                                .get_or_insert_with(|| names::fixed(p.name(l.atom)))
                                .clone()
                        } else {
                            p.name(l.atom).to_string()
                        };
                        Literal {
                            atom: b.atom(&name),
                            positive: l.positive,
                        }
                    })
                    .collect();
                b.add_clause_ids(head, body);
            }
        }
    }
    for (name, v) in fix.iter() {
        b.add_fact(&names::fixed(name), Prob::from_bool(v))?;
    }
    let out = b.build()?;
    stats.output_size = out.size();
    Ok((out, stats))
}

/// How the twin network treats probabilistic facts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TwinVariant {
    /// Both worlds read the same facts; an intervened fact gets a
    /// deterministic counterfactual copy holding the intervened value, and an
    /// intervened internal atom gets a deterministic counterfactual fact.
    #[default]
    Shared,
    /// The construction exactly as usually printed: every fact is duplicated
    /// into an independent primed copy, intervened facts become `1.0::a` and
    /// `0.0::a'` regardless of the intervened value, and clauses for
    /// intervened heads are dropped from both worlds.
    Literal,
}

/// Name of the counterfactual counterpart of `name` in the twin of `p`.
pub fn twin_counterpart(p: &Program, do_: &Intervention, variant: TwinVariant, name: &str) -> String {
    let shared_fact = variant == TwinVariant::Shared
        && !do_.contains(name)
        && p.atom(name).is_some_and(|a| p.is_fact(a));
    if shared_fact {
        name.to_string()
    } else {
        names::primed(name)
    }
}

/// Twin network for `do(X := x)` with shared facts.
pub fn construct_twin(p: &Program, do_: &Intervention) -> Result<(Program, TransformStats)> {
    construct_twin_with(p, do_, TwinVariant::Shared)
}

pub fn construct_twin_with(
    p: &Program,
    do_: &Intervention,
    variant: TwinVariant,
) -> Result<(Program, TransformStats)> {
    p.topological_order()?;
    let x = resolve(p, do_)?;
    let counterpart: Vec<String> = p
        .atoms()
        .map(|a| twin_counterpart(p, do_, variant, p.name(a)))
        .collect();
    for (a, cf) in p.atoms().zip(&counterpart) {
        if cf != p.name(a) {
            check_fresh(p, cf)?;
        }
    }
    let mut b = ProgramBuilder::new();
    let mut stats = TransformStats::default();
    for item in p.source_order() {
        match *item {
            Item::Fact(i) => {
                let f = &p.facts()[i];
                let name = p.name(f.atom);
                match (variant, x.value[f.atom.index()]) {
                    (TwinVariant::Shared, None) => {
                        b.add_fact(name, f.prob.clone())?;
                    }
                    (TwinVariant::Shared, Some(v)) => {
                        b.add_fact(name, f.prob.clone())?;
                        b.add_fact(&counterpart[f.atom.index()], Prob::from_bool(v))?;
                    }
                    (TwinVariant::Literal, None) => {
                        b.add_fact(name, f.prob.clone())?;
                        b.add_fact(&counterpart[f.atom.index()], f.prob.clone())?;
                    }
                    (TwinVariant::Literal, Some(_)) => {
                        b.add_fact(name, Prob::one())?;
                        b.add_fact(&counterpart[f.atom.index()], Prob::zero())?;
                    }
                }
            }
            Item::Clause(i) => {
                stats.clauses_visited += 1;
                let c = &p.clauses()[i];
                let intervened = x.value[c.head.index()].is_some();
                if intervened && variant == TwinVariant::Literal {
                    continue;
                }
                let head = b.atom(p.name(c.head));
                let body: Vec<Literal> = c
                    .body
                    .iter()
                    .map(|l| Literal {
                        atom: b.atom(p.name(l.atom)),
                        positive: l.positive,
                    })
                    .collect();
                b.add_clause_ids(head, body);
                if intervened {
                    continue;
                }
                let head = b.atom(&counterpart[c.head.index()]);
                let body: Vec<Literal> = c
                    .body
                    .iter()
                    .map(|l| Literal {
                        atom: b.atom(&counterpart[l.atom.index()]),
                        positive: l.positive,
                    })
                    .collect();
                stats.literals_rewritten += body.len();
                b.add_clause_ids(head, body);
            }
        }
    }
    if variant == TwinVariant::Shared {
        for (name, v) in do_.iter() {
            let a = p.require(name)?;
            if !p.is_fact(a) {
                b.add_fact(&counterpart[a.index()], Prob::from_bool(v))?;
            }
        }
    }
    let out = b.build()?;
    stats.output_size = out.size();
    Ok((out, stats))
}

/// Propagates deterministic facts and drops everything that does not feed
/// an atom in `keep`. Marginals of the kept atoms are unchanged.
///
/// Probability-0/1 facts are substituted into bodies (true literals removed,
/// clauses with a false literal dropped); an internal atom whose clauses all
/// die is false, one with a clause whose body empties is true, and both
/// propagate further. Kept internal atoms that end up constant are emitted
/// as `1.0::`/`0.0::` facts.
pub fn simplify<'a>(p: &Program, keep: impl IntoIterator<Item = &'a str>) -> Result<Program> {
    let topo = p.topological_order()?;
    let keep: BTreeSet<AtomId> = keep
        .into_iter()
        .map(|n| p.require(n))
        .collect::<Result<_>>()?;

    let n = p.atom_count();
    let mut constant: Vec<Option<bool>> = vec![None; n];
    // residual body per clause; None when the clause is dead
    let mut residual: Vec<Option<Vec<Literal>>> = vec![None; p.clauses().len()];
    for &a in topo {
        if let Some(fi) = p.fact_index(a) {
            let prob = &p.facts()[fi].prob;
            if prob.is_one() {
                constant[a.index()] = Some(true);
            } else if prob.is_zero() {
                constant[a.index()] = Some(false);
            }
            continue;
        }
        let mut alive = false;
        let mut certain = false;
        for &ci in p.clause_indices_for(a) {
            let c = &p.clauses()[ci as usize];
            let mut body = Vec::with_capacity(c.body.len());
            let mut dead = false;
            for l in &c.body {
                match constant[l.atom.index()] {
                    Some(v) if v == l.positive => {}
                    Some(_) => {
                        dead = true;
                        break;
                    }
                    None => body.push(*l),
                }
            }
            if dead {
                continue;
            }
            alive = true;
            certain |= body.is_empty();
            residual[ci as usize] = Some(body);
        }
        if certain {
            constant[a.index()] = Some(true);
        } else if !alive {
            constant[a.index()] = Some(false);
        }
    }

    // atoms that (transitively) feed a kept atom
    let mut needed = vec![false; n];
    let mut stack: Vec<AtomId> = keep.iter().copied().collect();
    for &a in &stack {
        needed[a.index()] = true;
    }
    while let Some(a) = stack.pop() {
        if constant[a.index()].is_some() {
            continue;
        }
        for &ci in p.clause_indices_for(a) {
            for l in residual[ci as usize].iter().flatten() {
                if !needed[l.atom.index()] {
                    needed[l.atom.index()] = true;
                    stack.push(l.atom);
                }
            }
        }
    }

    let mut b = ProgramBuilder::new();
    let mut emitted_constant = vec![false; n];
    for item in p.source_order() {
        match *item {
            Item::Fact(i) => {
                let f = &p.facts()[i];
                if needed[f.atom.index()] {
                    b.add_fact(p.name(f.atom), f.prob.clone())?;
                }
            }
            Item::Clause(i) => {
                let c = &p.clauses()[i];
                let h = c.head.index();
                if !needed[h] {
                    continue;
                }
                if let Some(v) = constant[h] {
                    if !emitted_constant[h] {
                        emitted_constant[h] = true;
                        b.add_fact(p.name(c.head), Prob::from_bool(v))?;
                    }
                    continue;
                }
                if let Some(body) = &residual[i] {
                    let head = b.atom(p.name(c.head));
                    let body = body
                        .iter()
                        .map(|l| Literal {
                            atom: b.atom(p.name(l.atom)),
                            positive: l.positive,
                        })
                        .collect();
                    b.add_clause_ids(head, body);
                }
            }
        }
    }
    // kept atoms with neither facts nor clauses are constant false
    for &a in &keep {
        if !p.is_fact(a) && !p.is_head(a) && !b.contains(p.name(a)) {
            b.add_fact(p.name(a), Prob::zero())?;
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::parse::print_program;

    fn fix(pairs: &[(&str, bool)]) -> Intervention {
        Assignment::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn lines(p: &Program) -> Vec<String> {
        print_program(p).lines().map(str::to_string).collect()
    }

    #[test]
    fn swift_smoking_fix_false() {
        let (s, stats) = swift(&examples::smoking(), &fix(&[("smokes", false)])).unwrap();
        assert_eq!(
            lines(&s),
            [
                "0.3::lifestyle.",
                "0.3::smokes.",
                "0.6::genetic_risk.",
                "cancer :- fixed__smokes, genetic_risk.",
                "0.0::fixed__smokes."
            ]
        );
        assert_eq!(stats.clauses_visited, 1);
        assert_eq!(stats.literals_rewritten, 1);
        assert_eq!(stats.output_size, 5);
    }

    #[test]
    fn swift_power_failure_fix_b() {
        let (s, _) = swift(&examples::power_failure(), &fix(&[("b", true)])).unwrap();
        let l = lines(&s);
        assert!(!l.contains(&"b :- u_b.".to_string()));
        assert!(l.contains(&"c :- fixed__b.".to_string()));
        assert!(l.contains(&"c :- a.".to_string()));
        assert!(l.contains(&"d :- c.".to_string()));
        assert!(l.contains(&"1.0::fixed__b.".to_string()));
        assert!(s.is_acyclic());
    }

    #[test]
    fn swift_on_unreferenced_atom_only_adds_fixed_fact() {
        let p = examples::smoking();
        let (s, stats) = swift(&p, &fix(&[("lifestyle", true)])).unwrap();
        assert_eq!(stats.literals_rewritten, 0);
        assert_eq!(s.size(), p.size() + 1);
    }

    #[test]
    fn swift_errors() {
        let p = examples::power_failure();
        assert!(matches!(swift(&p, &Intervention::new()), Err(Error::EmptyIntervention)));
        assert!(matches!(swift(&p, &fix(&[("zz", true)])), Err(Error::UnknownAtom(_))));
    }

    #[test]
    fn twin_smoking_do_false() {
        let (t, stats) = construct_twin(&examples::smoking(), &fix(&[("smokes", false)])).unwrap();
        assert_eq!(
            lines(&t),
            [
                "0.3::lifestyle.",
                "0.3::smokes.",
                "0.0::smokes__cf.",
                "0.6::genetic_risk.",
                "cancer :- smokes, genetic_risk.",
                "cancer__cf :- smokes__cf, genetic_risk."
            ]
        );
        assert_eq!(stats.clauses_visited, 1);
    }

    #[test]
    fn twin_literal_variant_duplicates_facts() {
        let (t, _) =
            construct_twin_with(&examples::smoking(), &fix(&[("smokes", false)]), TwinVariant::Literal).unwrap();
        assert_eq!(
            lines(&t),
            [
                "0.3::lifestyle.",
                "0.3::lifestyle__cf.",
                "1.0::smokes.",
                "0.0::smokes__cf.",
                "0.6::genetic_risk.",
                "0.6::genetic_risk__cf.",
                "cancer :- smokes, genetic_risk.",
                "cancer__cf :- smokes__cf, genetic_risk__cf."
            ]
        );
    }

    #[test]
    fn twin_without_intervention_doubles_clauses() {
        let p = examples::power_failure();
        let (t, stats) = construct_twin(&p, &Intervention::new()).unwrap();
        assert_eq!(t.clauses().len(), 2 * p.clauses().len());
        assert_eq!(t.facts().len(), p.facts().len());
        assert_eq!(stats.clauses_visited, 5);
        let (t, _) = construct_twin_with(&p, &Intervention::new(), TwinVariant::Literal).unwrap();
        assert_eq!(t.facts().len(), 2 * p.facts().len());
    }

    #[test]
    fn twin_internal_intervention_gets_counterfactual_fact() {
        let (t, _) = construct_twin(&examples::power_failure(), &fix(&[("a", false)])).unwrap();
        let l = lines(&t);
        assert!(l.contains(&"a :- u_a.".to_string()));
        assert!(!l.iter().any(|s| s.starts_with("a__cf :-")));
        assert!(l.contains(&"0.0::a__cf.".to_string()));
        assert!(l.contains(&"c__cf :- a__cf.".to_string()));
    }

    #[test]
    fn twin_single_fact() {
        let p = crate::parse::parse_program("0.25::a.").unwrap();
        let (t, _) = construct_twin(&p, &fix(&[("a", true)])).unwrap();
        assert_eq!(lines(&t), ["0.25::a.", "1.0::a__cf."]);
    }

    #[test]
    fn simplify_screens_off_main_supply() {
        let (s, _) = swift(&examples::power_failure(), &fix(&[("b", true)])).unwrap();
        let simple = simplify(&s, ["d", "a"]).unwrap();
        assert_eq!(lines(&simple), ["0.5::u_a.", "a :- u_a.", "1.0::d."]);
        let g = simple.dependency_graph();
        assert!(!g.reaches(g.node("a").unwrap(), g.node("d").unwrap()));
    }

    #[test]
    fn simplify_fixed_point_and_empty_keep() {
        let p = examples::power_failure();
        let all: Vec<String> = p.atoms().map(|a| p.name(a).to_string()).collect();
        let s = simplify(&p, all.iter().map(String::as_str)).unwrap();
        assert!(s.same_structure(&p));
        assert_eq!(simplify(&p, []).unwrap().size(), 0);
    }
}
