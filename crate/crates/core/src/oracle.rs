//! Brute-force reference semantics for counterfactual queries.
//!
//! [`oracle_counterfactual`] follows the structural-causal-model recipe
//! directly: for every assignment ε to the facts, the factual model decides
//! the evidence and the model with intervened atoms clamped decides the
//! query. [`lpad_counterfactual`] does the same over the selections of an
//! LPAD program.

use num_rational::BigRational;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::inference::{EvidenceSet, EVIDENCE_FLOOR};
use crate::lpad::LpadProgram;
use crate::prob::{Prob, Weight};
use crate::program::{evaluate_into, Formula, Literal, Program};
use crate::transform::Intervention;

/// Largest program (in facts) the world oracle accepts.
pub const MAX_ORACLE_FACTS: usize = 20;
/// Largest LPAD (in clauses) the selection oracle accepts.
pub const MAX_ORACLE_CLAUSES: usize = 12;

fn ratio<W: Weight>(num: W, den: W) -> Result<W> {
    let v = den.as_f64();
    if den.is_zero() || v < EVIDENCE_FLOOR {
        return Err(Error::ZeroEvidence { probability: v });
    }
    Ok(num / den)
}

/// `π(φ_x | E = e)` by enumerating fact assignments.
pub fn oracle_counterfactual(p: &Program, fix: &Intervention, ev: &EvidenceSet, phi: &Formula) -> Result<f64> {
    oracle_counterfactual_with(p, fix, ev, phi)
}

/// [`oracle_counterfactual`] in exact rational arithmetic.
pub fn oracle_counterfactual_exact(
    p: &Program,
    fix: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
) -> Result<BigRational> {
    oracle_counterfactual_with(p, fix, ev, phi)
}

pub fn oracle_counterfactual_with<W: Weight>(
    p: &Program,
    fix: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
) -> Result<W> {
    let topo = p.topological_order()?;
    if p.facts().len() > MAX_ORACLE_FACTS {
        return Err(Error::Guard {
            what: "oracle facts",
            size: p.facts().len(),
            limit: MAX_ORACLE_FACTS,
        });
    }
    let ev = ev.resolve(p)?;
    let phi = phi.literals().resolve(p)?;
    let mut clamp = vec![None; p.atom_count()];
    for l in fix.resolve(p)? {
        clamp[l.atom.index()] = Some(l.positive);
    }
    let holds = |model: &[bool], lits: &[Literal]| lits.iter().all(|l| model[l.atom.index()] == l.positive);

    let mut values: Vec<bool> = p.facts().iter().map(|f| f.prob.is_one()).collect();
    let free: Vec<usize> = (0..p.facts().len())
        .filter(|&i| !p.facts()[i].prob.is_zero() && !p.facts()[i].prob.is_one())
        .collect();
    let weights: Vec<W> = free.iter().map(|&i| W::from_prob(&p.facts()[i].prob)).collect();
    let mut factual = vec![false; p.atom_count()];
    let mut intervened = vec![false; p.atom_count()];
    let (mut num, mut den) = (W::zero(), W::zero());
    for bits in 0u64..1 << free.len() {
        let mut w = W::one();
        for (k, &i) in free.iter().enumerate() {
            values[i] = bits >> k & 1 == 1;
            w = w * if values[i] {
                weights[k].clone()
            } else {
                W::one() - weights[k].clone()
            };
        }
        evaluate_into(p, topo, &values, &[], &mut factual);
        if !holds(&factual, &ev) {
            continue;
        }
        den = den + w.clone();
        evaluate_into(p, topo, &values, &clamp, &mut intervened);
        if holds(&intervened, &phi) {
            num = num + w;
        }
    }
    ratio(num, den)
}

/// `π(φ_x)`: the counterfactual oracle without evidence.
pub fn oracle_interventional(p: &Program, fix: &Intervention, phi: &Formula) -> Result<f64> {
    oracle_counterfactual(p, fix, &EvidenceSet::new(), phi)
}

/// Head index chosen for each clause, `None` for the empty choice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Selection(pub Vec<Option<usize>>);

impl Selection {
    /// `Π chosen π_i · Π_{none} (1 - Σ π_i)`.
    pub fn weight<W: Weight>(&self, lp: &LpadProgram) -> W {
        self.0.iter().zip(&lp.clauses).fold(W::one(), |acc, (choice, c)| {
            acc * match choice {
                Some(i) => W::from_prob(&c.heads()[*i].1),
                None => W::from_prob(&Prob::new(c.null_mass()).expect("mass at most one")),
            }
        })
    }
}

/// Every selection of `lp` in odometer order, the empty choice last per
/// clause. The empty choice is included even when it has weight zero.
pub fn selections(lp: &LpadProgram) -> impl Iterator<Item = Selection> + '_ {
    let radix: Vec<usize> = lp.clauses.iter().map(|c| c.heads().len() + 1).collect();
    let mut digits = vec![0usize; radix.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let sel = Selection(
            digits
                .iter()
                .zip(&radix)
                .map(|(&d, &r)| (d + 1 < r).then_some(d))
                .collect(),
        );
        done = true;
        for (d, &r) in digits.iter_mut().zip(&radix) {
            *d += 1;
            if *d < r {
                done = false;
                break;
            }
            *d = 0;
        }
        Some(sel)
    })
}

struct LpadIndex {
    names: Vec<String>,
    index: FxHashMap<String, usize>,
    topo: Vec<usize>,
    /// (clause, head position) pairs per atom.
    heads_of: Vec<Vec<(usize, usize)>>,
    bodies: Vec<Vec<(usize, bool)>>,
}

impl LpadIndex {
    fn new(lp: &LpadProgram) -> Result<Self> {
        lp.check_acyclic()?;
        let g = lp.dependency_graph();
        let names = g.names().to_vec();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect::<FxHashMap<_, _>>();
        let topo = g.topological_order().expect("checked acyclic");
        let mut heads_of = vec![Vec::new(); names.len()];
        let mut bodies = Vec::with_capacity(lp.clauses.len());
        for (ci, c) in lp.clauses.iter().enumerate() {
            for (hi, (h, _)) in c.heads().iter().enumerate() {
                heads_of[index[h.as_str()]].push((ci, hi));
            }
            bodies.push(c.body().iter().map(|(b, v)| (index[b.as_str()], *v)).collect());
        }
        Ok(LpadIndex {
            names,
            index,
            topo,
            heads_of,
            bodies,
        })
    }

    fn resolve<'a>(&self, lits: impl Iterator<Item = (&'a str, bool)>) -> Result<Vec<(usize, bool)>> {
        lits.map(|(n, v)| {
            self.index
                .get(n)
                .map(|&i| (i, v))
                .ok_or_else(|| Error::UnknownAtom(n.to_string()))
        })
        .collect()
    }

    /// Supported model of the selected program with `clamp` applied.
    fn model(&self, choice: &[usize], clamp: &[Option<bool>], out: &mut [bool]) {
        for &a in &self.topo {
            out[a] = match clamp[a] {
                Some(v) => v,
                None => self.heads_of[a].iter().any(|&(ci, hi)| {
                    choice[ci] == hi && self.bodies[ci].iter().all(|&(b, v)| out[b] == v)
                }),
            };
        }
    }
}

/// `π(φ_x | E = e)` over the selections of an LPAD program: the factual
/// model of each selection decides the evidence and the same selection with
/// the fixed atoms clamped decides the query.
pub fn lpad_counterfactual(lp: &LpadProgram, fix: &Intervention, ev: &EvidenceSet, phi: &Formula) -> Result<f64> {
    lpad_counterfactual_with(lp, fix, ev, phi)
}

pub fn lpad_counterfactual_with<W: Weight>(
    lp: &LpadProgram,
    fix: &Intervention,
    ev: &EvidenceSet,
    phi: &Formula,
) -> Result<W> {
    if lp.clauses.len() > MAX_ORACLE_CLAUSES {
        return Err(Error::Guard {
            what: "oracle LPAD clauses",
            size: lp.clauses.len(),
            limit: MAX_ORACLE_CLAUSES,
        });
    }
    let ix = LpadIndex::new(lp)?;
    let ev = ix.resolve(ev.iter())?;
    let phi = ix.resolve(phi.literals().iter())?;
    let mut clamp = vec![None; ix.names.len()];
    for (a, v) in ix.resolve(fix.iter())? {
        clamp[a] = Some(v);
    }
    let arity: Vec<usize> = lp.clauses.iter().map(|c| c.heads().len()).collect();
    // weight of each choice, the empty choice at index `arity`
    let choice_w: Vec<Vec<W>> = lp
        .clauses
        .iter()
        .map(|c| {
            let mut ws: Vec<W> = c.heads().iter().map(|(_, p)| W::from_prob(p)).collect();
            // exact, so that a full head mass leaves the empty choice at zero
            ws.push(W::from_prob(&Prob::new(c.null_mass()).expect("mass at most one")));
            ws
        })
        .collect();
    let free = vec![None; ix.names.len()];
    let mut factual = vec![false; ix.names.len()];
    let mut intervened = vec![false; ix.names.len()];
    let holds = |m: &[bool], lits: &[(usize, bool)]| lits.iter().all(|&(a, v)| m[a] == v);
    let (mut num, mut den) = (W::zero(), W::zero());
    let mut choice = vec![0usize; arity.len()];
    loop {
        let w = choice
            .iter()
            .zip(&choice_w)
            .fold(W::one(), |acc, (&c, ws)| acc * ws[c].clone());
        ix.model(&choice, &free, &mut factual);
        if holds(&factual, &ev) {
            den = den + w.clone();
            ix.model(&choice, &clamp, &mut intervened);
            if holds(&intervened, &phi) {
                num = num + w;
            }
        }
        let mut carried = true;
        for (d, &a) in choice.iter_mut().zip(&arity) {
            *d += 1;
            if *d <= a {
                carried = false;
                break;
            }
            *d = 0;
        }
        if carried {
            break;
        }
    }
    ratio(num, den)
}
