//! Fixed workloads for the criterion benches: reachability programs with a
//! query that both evaluators accept.

use cfl_core::benchgen::{emit_program, generate_dag, sample_query, QuerySpec};
use cfl_core::{Program, Result};

/// A benchmark program together with one counterfactual query.
pub struct Workload {
    pub label: String,
    pub program: Program,
    pub query: QuerySpec,
}

/// Builds the instance for `(n, k, seed)` and the first sampled query with
/// `k / 2` evidence atoms and `k / 2` interventions that the single-world
/// evaluator can answer.
pub fn workload(n: usize, k: usize, seed: u64) -> Result<Workload> {
    let bg = generate_dag(n, k, seed)?;
    let program = emit_program(&bg)?;
    let half = (k / 2).max(1);
    let mut last = None;
    for attempt in 0..32 {
        match sample_query(&bg, half, half, seed.wrapping_mul(1000) + attempt, true) {
            Ok(query) => {
                return Ok(Workload {
                    label: format!("n{n}-k{k}"),
                    program,
                    query,
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cfl_core::inference::{evaluate_swip_query, evaluate_twin_query, Backend};

    #[test]
    fn workloads_agree() {
        for (n, k) in [(10, 2), (20, 4)] {
            let w = workload(n, k, 1).unwrap();
            let (fix, ev) = (w.query.intervention(), w.query.evidence_set());
            let a = evaluate_swip_query(&w.program, &fix, &ev, &w.query.query, Backend::Circuit);
            let b = evaluate_twin_query(&w.program, &fix, &ev, &w.query.query, Backend::Circuit);
            match (a, b) {
                (Ok(a), Ok(b)) => assert!((a - b).abs() < 1e-9),
                (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
    }
}
