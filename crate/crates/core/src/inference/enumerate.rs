//! Inference by enumerating every assignment to the probabilistic facts.

use crate::error::{Error, Result};
use crate::prob::Weight;
use crate::program::{evaluate_into, Literal, Program};

/// Largest number of non-deterministic facts enumerated.
pub const MAX_ENUM_FACTS: usize = 24;

/// Probability of each conjunction in `queries`.
///
/// Facts with probability 0 or 1 are fixed rather than enumerated.
pub fn enumerate<W: Weight>(p: &Program, queries: &[Vec<Literal>]) -> Result<Vec<W>> {
    let topo = p.topological_order()?;
    let mut values: Vec<bool> = p.facts().iter().map(|f| f.prob.is_one()).collect();
    let free: Vec<usize> = p
        .facts()
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.prob.is_zero() && !f.prob.is_one())
        .map(|(i, _)| i)
        .collect();
    if free.len() > MAX_ENUM_FACTS {
        return Err(Error::Guard {
            what: "enumerated facts",
            size: free.len(),
            limit: MAX_ENUM_FACTS,
        });
    }
    let weights: Vec<(W, W)> = free
        .iter()
        .map(|&i| {
            let w = W::from_prob(&p.facts()[i].prob);
            (w.clone(), W::one() - w)
        })
        .collect();
    let mut totals = vec![W::zero(); queries.len()];
    let mut model = vec![false; p.atom_count()];
    for bits in 0u64..1 << free.len() {
        let mut weight = W::one();
        for (k, &i) in free.iter().enumerate() {
            let v = bits >> k & 1 == 1;
            values[i] = v;
            weight = weight * if v { weights[k].0.clone() } else { weights[k].1.clone() };
        }
        evaluate_into(p, topo, &values, &[], &mut model);
        for (q, total) in queries.iter().zip(totals.iter_mut()) {
            if q.iter().all(|l| model[l.atom.index()] == l.positive) {
                *total = total.clone() + weight.clone();
            }
        }
    }
    Ok(totals)
}
