//! Exact inference and the two counterfactual query evaluators.

mod circuit;
mod enumerate;

use std::fmt;
use std::str::FromStr;

pub use circuit::{compile_circuit, compile_queries, Circuit, Limits, Node, NodeId};
pub use enumerate::{enumerate, MAX_ENUM_FACTS};

use crate::error::{Error, Result};
use crate::names;
use crate::prob::Weight;
use crate::program::{Assignment, Formula, Literal, Program};
use crate::transform::{self, Intervention, TransformStats, TwinVariant};

/// Observed values `E = e`.
pub type EvidenceSet = Assignment;

/// Evidence probabilities below this are treated as zero.
pub const EVIDENCE_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    Enum,
    #[default]
    Circuit,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Enum => "enum",
            Backend::Circuit => "circuit",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "enum" => Ok(Backend::Enum),
            "circuit" => Ok(Backend::Circuit),
            _ => Err(format!("unknown backend `{s}` (expected enum or circuit)")),
        }
    }
}

/// Probability of each conjunction of literals. The circuit backend compiles
/// every query on its own, so each one only pays for the atoms it depends on.
pub fn probabilities<W: Weight>(
    p: &Program,
    queries: &[Vec<Literal>],
    backend: Backend,
    limits: &Limits,
) -> Result<Vec<W>> {
    match backend {
        Backend::Enum => enumerate(p, queries),
        Backend::Circuit => queries
            .iter()
            .map(|q| Ok(compile_queries(p, std::slice::from_ref(q), limits)?.counts::<W>().remove(0)))
            .collect(),
    }
}

/// `π_P(φ)`.
pub fn marginal(p: &Program, phi: &Formula, backend: Backend) -> Result<f64> {
    let q = phi.literals().resolve(p)?;
    Ok(probabilities::<f64>(p, &[q], backend, &Limits::default())?[0])
}

/// `π_P(φ | ev)`.
pub fn conditional(p: &Program, phi: &Formula, ev: &EvidenceSet, backend: Backend) -> Result<f64> {
    conditional_with(p, phi, ev, backend, &Limits::default())
}

pub fn conditional_with<W: Weight>(
    p: &Program,
    phi: &Formula,
    ev: &EvidenceSet,
    backend: Backend,
    limits: &Limits,
) -> Result<W> {
    let den = ev.resolve(p)?;
    let num = conjoin(phi.literals().resolve(p)?, &den);
    let prepared = Prepared {
        stats: TransformStats::default(),
        num_program: p.clone(),
        num,
        den_program: None,
        den,
    };
    prepared.evaluate(backend, limits)
}

/// `a ∧ b`, or `None` when they contain complementary literals.
fn conjoin(mut a: Vec<Literal>, b: &[Literal]) -> Option<Vec<Literal>> {
    for l in b {
        match a.iter().find(|m| m.atom == l.atom) {
            Some(m) if m.positive != l.positive => return None,
            Some(_) => {}
            None => a.push(*l),
        }
    }
    Some(a)
}

/// Options for the counterfactual evaluators.
#[derive(Clone, Copy, Debug, Default)]
pub struct QueryOptions {
    /// Simplify the transformed program for the query and evidence atoms.
    pub simplify: bool,
    /// SWIP only: condition inside the transformed program exactly as
    /// printed, without the evidence-placement guard.
    pub literal_alg4: bool,
    /// Twin only: fact handling of the twin construction.
    pub twin_variant: TwinVariant,
}

/// A counterfactual query reduced to `p2 / p1`, where `p2` is the
/// probability of `num` in `num_program` and `p1` the probability of `den`
/// in `den_program` (or in `num_program` when that is `None`).
#[derive(Clone, Debug)]
pub struct Prepared {
    pub stats: TransformStats,
    pub num_program: Program,
    /// `None` when the query contradicts the evidence.
    pub num: Option<Vec<Literal>>,
    pub den_program: Option<Program>,
    pub den: Vec<Literal>,
}

impl Prepared {
    /// The program handed to inference for the numerator.
    pub fn program(&self) -> &Program {
        &self.num_program
    }

    pub fn evaluate<W: Weight>(&self, backend: Backend, limits: &Limits) -> Result<W> {
        let (p1, p2) = match &self.den_program {
            Some(dp) => {
                let p1 = probabilities::<W>(dp, std::slice::from_ref(&self.den), backend, limits)?.remove(0);
                check_evidence(&p1)?;
                let p2 = match &self.num {
                    Some(n) => probabilities::<W>(&self.num_program, std::slice::from_ref(n), backend, limits)?.remove(0),
                    None => W::zero(),
                };
                (p1, p2)
            }
            None => {
                let mut queries = vec![self.den.clone()];
                queries.extend(self.num.iter().cloned());
                let mut r = probabilities::<W>(&self.num_program, &queries, backend, limits)?;
                let p1 = r.remove(0);
                check_evidence(&p1)?;
                (p1, r.pop().unwrap_or_else(W::zero))
            }
        };
        Ok(p2 / p1)
    }
}

fn check_evidence<W: Weight>(p1: &W) -> Result<()> {
    let v = p1.as_f64();
    if p1.is_zero() || v < EVIDENCE_FLOOR {
        return Err(Error::ZeroEvidence { probability: v });
    }
    Ok(())
}

fn resolve_names(p: &Program, lits: impl IntoIterator<Item = (String, bool)>) -> Result<Vec<Literal>> {
    lits.into_iter()
        .map(|(n, positive)| {
            Ok(Literal {
                atom: p.require(&n)?,
                positive,
            })
        })
        .collect()
}

/// Rejects evidence on atoms downstream of an intervention.
pub fn check_evidence_placement(p: &Program, fix: &Intervention, ev: &EvidenceSet) -> Result<()> {
    let g = p.dependency_graph();
    let mut seeds = Vec::new();
    for name in fix.names() {
        p.require(name)?;
        seeds.push((name, g.require(name)?));
    }
    for name in ev.names() {
        let e = g.require(name)?;
        if let Some((x, _)) = seeds.iter().find(|&&(_, s)| s != e && g.reaches(s, e)) {
            return Err(Error::EvidenceOnDescendant {
                atom: name.to_string(),
                intervened: x.to_string(),
            });
        }
    }
    Ok(())
}

/// Builds the single-world program for `π(φ_x | E = e)`.
///
/// Evidence on an intervened atom refers to its factual value, so the
/// clauses the transformation removed for such atoms are restored for
/// conditioning; nothing else reads them because all body occurrences were
/// redirected to the fixed copy.
pub fn prepare_swip(
    p: &Program,
    fix: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
    opts: &QueryOptions,
) -> Result<Prepared> {
    for name in phi.literals().names().chain(ev.names()) {
        p.require(name)?;
    }
    if !opts.literal_alg4 {
        check_evidence_placement(p, fix, ev)?;
    }
    let (mut s, stats) = if fix.is_empty() {
        p.topological_order()?;
        let stats = TransformStats {
            output_size: p.size(),
            ..TransformStats::default()
        };
        (p.clone(), stats)
    } else {
        transform::swift(p, fix)?
    };

    let mut ev_lits: Vec<(String, bool)> = Vec::new();
    let mut impossible = false;
    if opts.literal_alg4 {
        for (name, v) in ev.iter() {
            match s.atom(name) {
                Some(_) => ev_lits.push((name.to_string(), v)),
                // removed by the transformation: false in every world
                None => impossible |= v,
            }
        }
    } else {
        let restore: Vec<_> = ev
            .names()
            .filter(|n| fix.contains(n) && s.atom(n).is_none())
            .map(|n| p.require(n))
            .collect::<Result<_>>()?;
        if !restore.is_empty() {
            let mut b = s.to_builder();
            for a in restore {
                for c in p.clauses_for(a) {
                    let body: Vec<(&str, bool)> = c.body.iter().map(|l| (p.name(l.atom), l.positive)).collect();
                    b.add_clause(p.name(a), &body);
                }
            }
            s = b.build()?;
        }
        ev_lits.extend(ev.iter().map(|(n, v)| (n.to_string(), v)));
    }
    let phi_lits: Vec<(String, bool)> = phi
        .literals()
        .iter()
        .map(|(n, v)| {
            let name = if fix.contains(n) { names::fixed(n) } else { n.to_string() };
            (name, v)
        })
        .collect();
    if opts.simplify {
        let keep: Vec<&str> = phi_lits.iter().chain(&ev_lits).map(|(n, _)| n.as_str()).collect();
        s = transform::simplify(&s, keep)?;
    }
    let den = resolve_names(&s, ev_lits)?;
    if impossible {
        return Err(Error::ZeroEvidence { probability: 0.0 });
    }
    let num = conjoin(resolve_names(&s, phi_lits)?, &den);
    Ok(Prepared {
        stats,
        num_program: s,
        num,
        den_program: None,
        den,
    })
}

/// Builds the twin-network reduction of `π(φ_x | E = e)`: `p2` is the
/// primed query with unprimed evidence in the twin, `p1` the evidence in the
/// original program.
pub fn prepare_twin(
    p: &Program,
    do_: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
    opts: &QueryOptions,
) -> Result<Prepared> {
    for name in phi.literals().names().chain(ev.names()) {
        p.require(name)?;
    }
    let (mut t, stats) = transform::construct_twin_with(p, do_, opts.twin_variant)?;
    let ev_lits: Vec<(String, bool)> = ev.iter().map(|(n, v)| (n.to_string(), v)).collect();
    let phi_lits: Vec<(String, bool)> = phi
        .literals()
        .iter()
        .map(|(n, v)| (transform::twin_counterpart(p, do_, opts.twin_variant, n), v))
        .collect();
    let mut base = p.clone();
    if opts.simplify {
        let keep: Vec<&str> = phi_lits.iter().chain(&ev_lits).map(|(n, _)| n.as_str()).collect();
        t = transform::simplify(&t, keep)?;
        base = transform::simplify(p, ev_lits.iter().map(|(n, _)| n.as_str()))?;
    }
    let den = resolve_names(&base, ev_lits.iter().cloned())?;
    let num = conjoin(resolve_names(&t, phi_lits)?, &resolve_names(&t, ev_lits)?);
    Ok(Prepared {
        stats,
        num_program: t,
        num,
        den_program: Some(base),
        den,
    })
}

/// `π(φ_x | E = e)` through the single-world program.
pub fn evaluate_swip_query(
    p: &Program,
    fix: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
    backend: Backend,
) -> Result<f64> {
    prepare_swip(p, fix, ev, phi, &QueryOptions::default())?.evaluate(backend, &Limits::default())
}

/// `π(φ_x | E = e)` through the twin network.
pub fn evaluate_twin_query(
    p: &Program,
    do_: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
    backend: Backend,
) -> Result<f64> {
    prepare_twin(p, do_, ev, phi, &QueryOptions::default())?.evaluate(backend, &Limits::default())
}
