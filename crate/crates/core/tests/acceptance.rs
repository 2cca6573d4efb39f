//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cfl_core::benchgen::{emit_program, generate_dag, sample_query};
use cfl_core::corpus::{self, random_case, random_case_sized, Case, ProgramShape};
use cfl_core::examples;
use cfl_core::graph::{d_separated, primal_graph, screening_independence, treewidth_estimate, treewidth_exact_small};
use cfl_core::inference::{
    prepare_swip, prepare_twin, probabilities, Backend, Limits, Prepared, QueryOptions,
};
use cfl_core::lpad::{lpad_to_problog, problog_to_lpad, LpadProgram};
use cfl_core::oracle::{lpad_counterfactual, oracle_counterfactual, oracle_counterfactual_exact};
use cfl_core::parse::{parse_program, print_program};
use cfl_core::program::{world_probability, World};
use cfl_core::transform::{construct_twin, swift};
use cfl_core::{Assignment, Error, Formula, Literal, Program, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};

const TOL: f64 = 1e-9;
const PROGRAMS: u64 = 200;
const LPADS: u64 = 100;
/// Case seeds tried per program before giving up on positive evidence.
const ATTEMPTS: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn swip(p: &Program, c: &Case, backend: Backend) -> Result<f64> {
    prepare_swip(p, &c.fix, &c.evidence, &c.query, &QueryOptions::default())?.evaluate(backend, &Limits::default())
}

fn twin(p: &Program, c: &Case, backend: Backend) -> Result<f64> {
    prepare_twin(p, &c.fix, &c.evidence, &c.query, &QueryOptions::default())?.evaluate(backend, &Limits::default())
}

/// First case for `p` whose evidence has positive probability.
fn feasible_case(p: &Program, seed: u64, upstream_only: bool) -> Option<(Case, f64)> {
    let g = p.dependency_graph();
    (0..ATTEMPTS).find_map(|i| {
        let c = random_case_sized(&g, seed * ATTEMPTS + i, 1..=3, 0..=3, upstream_only);
        oracle_counterfactual(p, &c.fix, &c.evidence, &c.query).ok().map(|v| (c, v))
    })
}

fn criterion_1() -> Outcome {
    let (mut swip_err, mut twin_err, mut twin_any_err) = (0f64, 0f64, 0f64);
    let mut cases = 0;
    let mut failures = Vec::new();
    for seed in 0..PROGRAMS {
        let p = corpus::random_program(seed);
        let Some((c, truth)) = feasible_case(&p, seed, true) else {
            failures.push(format!("program {seed}: no feasible case"));
            continue;
        };
        cases += 1;
        match (swip(&p, &c, Backend::Circuit), twin(&p, &c, Backend::Circuit)) {
            (Ok(s), Ok(t)) => {
                swip_err = swip_err.max((s - truth).abs());
                twin_err = twin_err.max((t - truth).abs());
            }
            (s, t) => failures.push(format!("program {seed}: swip {s:?}, twin {t:?}")),
        }
        // the twin network also answers queries with downstream evidence
        if let Some((c, truth)) = feasible_case(&p, seed + 1_000_000, false) {
            match twin(&p, &c, Backend::Circuit) {
                Ok(t) => twin_any_err = twin_any_err.max((t - truth).abs()),
                Err(e) => failures.push(format!("program {seed}: twin {e}")),
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && cases >= PROGRAMS as usize && swip_err <= TOL && twin_err <= TOL && twin_any_err <= TOL,
        detail: format!(
            "{cases} programs; max |swip - oracle| = {swip_err:.2e}, max |twin - oracle| = {twin_err:.2e}, \
             twin with downstream evidence {twin_any_err:.2e}{}",
            summarize(&failures)
        ),
    }
}

fn summarize(failures: &[String]) -> String {
    match failures.first() {
        None => String::new(),
        Some(f) => format!("; {} failures, first: {f}", failures.len()),
    }
}

/// First case over the atoms of `lp` whose evidence has positive probability
/// under the selection semantics.
fn feasible_lpad_case(lp: &LpadProgram, seed: u64) -> Option<(Case, f64)> {
    let g = lp.dependency_graph();
    (0..ATTEMPTS).find_map(|i| {
        let c = random_case(&g, seed * ATTEMPTS + i);
        lpad_counterfactual(lp, &c.fix, &c.evidence, &c.query).ok().map(|v| (c, v))
    })
}

fn criterion_2() -> Outcome {
    let mut worst = [0f64; 2];
    let mut counts = [0usize; 2];
    let mut failures = Vec::new();
    for seed in 0..LPADS {
        // LPAD -> ProbLog
        let lp = corpus::random_lpad(seed);
        let p = lpad_to_problog(&lp).expect("translation");
        match feasible_lpad_case(&lp, seed) {
            Some((c, truth)) => match swip(&p, &c, Backend::Circuit) {
                Ok(v) => {
                    counts[0] += 1;
                    worst[0] = worst[0].max((v - truth).abs());
                }
                Err(e) => failures.push(format!("lpad {seed}: {e}")),
            },
            None => failures.push(format!("lpad {seed}: no feasible case")),
        }
        // ProbLog -> LPAD
        let shape = ProgramShape {
            max_facts: 5,
            max_clauses: 7,
            max_body: 3,
            max_heads: 5,
        };
        let p = corpus::random_program_with(&shape, seed);
        let lp = problog_to_lpad(&p);
        match feasible_lpad_case(&lp, seed + 1_000_000) {
            Some((c, truth)) => match swip(&p, &c, Backend::Circuit) {
                Ok(v) => {
                    counts[1] += 1;
                    worst[1] = worst[1].max((v - truth).abs());
                }
                Err(e) => failures.push(format!("problog {seed}: {e}")),
            },
            None => failures.push(format!("problog {seed}: no feasible case")),
        }
    }
    Outcome {
        pass: failures.is_empty() && counts.iter().all(|&n| n >= LPADS as usize) && worst.iter().all(|&w| w <= TOL),
        detail: format!(
            "LPAD->ProbLog {} programs, max diff {:.2e}; ProbLog->LPAD {} programs, max diff {:.2e}{}",
            counts[0],
            worst[0],
            counts[1],
            worst[1],
            summarize(&failures)
        ),
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn assignment(pairs: &[(&str, bool)]) -> Assignment {
    Assignment::from_pairs(pairs.iter().copied()).expect("distinct atoms")
}

fn criterion_3() -> Outcome {
    let smoking = examples::smoking();
    let power = examples::power_failure();
    let golden: Vec<(&str, &Program, Assignment, Assignment, &str, BigRational)> = vec![
        ("P(cancer)", &smoking, Assignment::new(), Assignment::new(), "cancer", ratio(18, 100)),
        ("P(cancer | fix smokes=false)", &smoking, assignment(&[("smokes", false)]), Assignment::new(), "cancer", BigRational::zero()),
        ("P(cancer | fix smokes=true)", &smoking, assignment(&[("smokes", true)]), Assignment::new(), "cancer", ratio(6, 10)),
        ("P(d)", &power, Assignment::new(), Assignment::new(), "d", ratio(3, 4)),
        ("P(d_{a:=false} | d)", &power, assignment(&[("a", false)]), assignment(&[("d", true)]), "d", ratio(2, 3)),
        (
            "P(cancer_{smokes:=true} | not cancer)",
            &smoking,
            assignment(&[("smokes", true)]),
            assignment(&[("cancer", false)]),
            "cancer",
            ratio(21, 41),
        ),
    ];
    let mut bad = Vec::new();
    for (label, p, fix, ev, q, want) in &golden {
        let phi = Formula::atom(q);
        let oracle = oracle_counterfactual_exact(p, fix, ev, &phi);
        let opts = QueryOptions::default();
        let exact = |prep: Result<Prepared>| prep.and_then(|pr| pr.evaluate::<BigRational>(Backend::Enum, &Limits::default()));
        let s = exact(prepare_swip(p, fix, ev, &phi, &opts));
        // evidence downstream of the intervention is out of reach for the
        // single-world evaluator, which must refuse instead of answering
        let s = match s {
            Err(Error::EvidenceOnDescendant { .. }) if ev.names().any(|e| fix.names().any(|x| reaches(p, x, e))) => {
                Ok(want.clone())
            }
            other => other,
        };
        let t = if fix.is_empty() {
            s.clone()
        } else {
            exact(prepare_twin(p, fix, ev, &phi, &opts))
        };
        for (who, got) in [("oracle", oracle), ("swip", s), ("twin", t)] {
            match got {
                Ok(v) if &v == want => {}
                other => bad.push(format!("{label} via {who}: {other:?}, want {want}")),
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{} examples in exact arithmetic{}", golden.len(), summarize(&bad)),
    }
}

fn reaches(p: &Program, from: &str, to: &str) -> bool {
    let g = p.dependency_graph();
    match (g.node(from), g.node(to)) {
        (Some(a), Some(b)) => g.descendants(&[a]).contains(&b),
        _ => false,
    }
}

fn criterion_4() -> Outcome {
    let p = examples::power_failure();
    let fix = assignment(&[("b", true)]);
    let screened = screening_independence(&p, &fix, "a", "d");
    let twin_sep = construct_twin(&p, &fix).and_then(|(t, _)| d_separated(&t.dependency_graph(), "a", "d__cf", &[]));
    Outcome {
        pass: matches!(screened, Ok(true)) && matches!(twin_sep, Ok(false)),
        detail: format!("single-world screening {screened:?}, twin d-separation of (a, d') {twin_sep:?}"),
    }
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in 0..PROGRAMS {
        let p = corpus::random_program(seed);
        let g = p.dependency_graph();
        for i in 0..5 {
            let fix = random_case(&g, seed * 5 + i).fix;
            let (s, ss) = swift(&p, &fix).expect("swift");
            let (t, ts) = construct_twin(&p, &fix).expect("twin");
            checked += 1;
            if s.size() > t.size() {
                bad.push(format!("program {seed}: size {} > {}", s.size(), t.size()));
            }
            if ts.clauses_visited != p.clauses().len() {
                bad.push(format!("program {seed}: twin visited {} of {}", ts.clauses_visited, p.clauses().len()));
            }
            if ss.literals_rewritten > p.total_body_len() {
                bad.push(format!("program {seed}: rewrote {} > {}", ss.literals_rewritten, p.total_body_len()));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{checked} program/intervention pairs{}", summarize(&bad)),
    }
}

fn criterion_6() -> Outcome {
    let (mut exact_checked, mut estimate_checked) = (0, 0);
    let mut bad = Vec::new();
    for seed in 0..PROGRAMS {
        let p = corpus::random_program(seed);
        let g = p.dependency_graph();
        let fix = random_case(&g, seed).fix;
        let (s, _) = swift(&p, &fix).expect("swift");
        let (t, _) = construct_twin(&p, &fix).expect("twin");
        let (gp, gs, gt) = (primal_graph(&p), primal_graph(&s), primal_graph(&t));
        estimate_checked += 1;
        let (ep, et) = (treewidth_estimate(&gp), treewidth_estimate(&gt));
        if ep != et {
            bad.push(format!("program {seed}: estimate {et} on twin, {ep} on original"));
        }
        if gp.len() <= 15 {
            exact_checked += 1;
            let w = |g| treewidth_exact_small(g).expect("small graph");
            let (wp, ws, wt) = (w(&gp), w(&gs), w(&gt));
            if !(ws <= wt && wt == wp) {
                bad.push(format!("program {seed}: widths swift {ws}, twin {wt}, original {wp}"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "exact order on {exact_checked} programs, estimate equality on {estimate_checked}{}",
            summarize(&bad)
        ),
    }
}

/// Best of three wall-clock runs of prepare plus evaluate.
fn timed(run: impl Fn() -> Result<f64>) -> Result<(Duration, f64)> {
    let mut best = Duration::MAX;
    let mut value = 0.0;
    for _ in 0..3 {
        let start = Instant::now();
        value = run()?;
        best = best.min(start.elapsed());
    }
    Ok((best, value))
}

fn criterion_7() -> Outcome {
    const QUERIES_PER_INSTANCE: u64 = 3;
    let mut ratios = Vec::new();
    let mut bad = Vec::new();
    let mut skipped = 0;
    let limits = Limits {
        deadline: None,
        ..Limits::default()
    };
    let opts = QueryOptions::default();
    for n in [20, 40, 80] {
        for k in [2, 4, 8] {
            for seed in 0..10u64 {
                let bg = generate_dag(n, k, seed).expect("valid parameters");
                let p = emit_program(&bg).expect("valid program");
                for q in 0..QUERIES_PER_INSTANCE {
                    let qseed = seed * 100 + q;
                    let n_ev = 1 + (qseed as usize * 7 + q as usize) % 5;
                    let n_int = 1 + (qseed as usize * 3 + 2 * q as usize) % 5;
                    let spec = match sample_query(&bg, n_ev, n_int, qseed, true) {
                        Ok(s) => s,
                        Err(Error::NotEnoughVertices { .. }) => {
                            skipped += 1;
                            continue;
                        }
                        Err(e) => {
                            bad.push(format!("n={n} k={k} seed={seed}: {e}"));
                            continue;
                        }
                    };
                    let (fix, ev) = (spec.intervention(), spec.evidence_set());
                    // evidence such as every child of `s` being unreached is impossible
                    if matches!(
                        prepare_swip(&p, &fix, &ev, &spec.query, &opts).and_then(|pr| pr.evaluate::<f64>(Backend::Circuit, &limits)),
                        Err(Error::ZeroEvidence { .. })
                    ) {
                        skipped += 1;
                        continue;
                    }
                    let s = timed(|| prepare_swip(&p, &fix, &ev, &spec.query, &opts)?.evaluate(Backend::Circuit, &limits));
                    let t = timed(|| prepare_twin(&p, &fix, &ev, &spec.query, &opts)?.evaluate(Backend::Circuit, &limits));
                    match (s, t) {
                        (Ok((ts, vs)), Ok((tt, vt))) => {
                            if (vs - vt).abs() > TOL {
                                bad.push(format!("n={n} k={k} seed={seed}: swip {vs} twin {vt}"));
                            }
                            ratios.push(ts.as_secs_f64() / tt.as_secs_f64());
                        }
                        (s, t) => bad.push(format!("n={n} k={k} seed={seed}: swip {s:?} twin {t:?}")),
                    }
                }
            }
        }
    }
    let wins = ratios.iter().filter(|&&r| r <= 1.0).count();
    let share = wins as f64 / ratios.len().max(1) as f64;
    ratios.sort_by(f64::total_cmp);
    let median = ratios.get(ratios.len() / 2).copied().unwrap_or(f64::NAN);
    Outcome {
        pass: bad.is_empty() && !ratios.is_empty() && share >= 0.9 && median < 1.0,
        detail: format!(
            "{} paired queries ({skipped} infeasible samples skipped); swip <= twin on {:.1}%, \
             median time ratio {median:.3} (published reference: ratio 0.65, a 35% reduction){}",
            ratios.len(),
            100.0 * share,
            summarize(&bad)
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let (mut triples, mut atoms) = (0usize, 0usize);
    for seed in 0..PROGRAMS {
        let p = corpus::random_program(seed);
        // normalization
        let total: BigRational = (0..1u64 << p.facts().len())
            .map(|bits| world_probability::<BigRational>(&p, &World::from_bits(&p, bits)))
            .sum();
        if !total.is_one() {
            bad.push(format!("program {seed}: worlds sum to {total}"));
        }
        // backend agreement on every atom
        let queries: Vec<Vec<Literal>> = p.atoms().map(|a| vec![Literal::pos(a)]).collect();
        atoms += queries.len();
        let limits = Limits::default();
        let e = probabilities::<f64>(&p, &queries, Backend::Enum, &limits).expect("enum");
        let c = probabilities::<f64>(&p, &queries, Backend::Circuit, &limits).expect("circuit");
        if let Some((i, (x, y))) = e.iter().zip(&c).enumerate().find(|(_, (x, y))| (*x - *y).abs() > TOL) {
            bad.push(format!("program {seed}: atom {} enum {x} circuit {y}", p.name(cfl_core::AtomId(i as u32))));
        }
        // d-separation soundness on sampled triples
        let g = p.dependency_graph();
        for i in 0..10u64 {
            let c = random_case_sized(&g, seed * 10 + i, 1..=1, 0..=0, false);
            let x = c.fix.names().next().expect("one atom").to_string();
            let y = c.query.literals().names().find(|&n| n != x).map(str::to_string);
            let Some(y) = y else { continue };
            let others: Vec<&str> = g.names().iter().map(String::as_str).filter(|&n| n != x && n != y).collect();
            let zr: Vec<&str> = others.iter().copied().cycle().skip((seed + i) as usize).take(((i % 3) as usize).min(others.len())).collect();
            if d_separated(&g, &x, &y, &zr).expect("known atoms") {
                triples += 1;
                if let Some(gap) = independence_gap(&p, &x, &y, &zr) {
                    if gap > TOL {
                        bad.push(format!("program {seed}: {x} _||_ {y} | {zr:?} off by {gap:.2e}"));
                    }
                }
            }
        }
        // parse/print round trip
        match parse_program(&print_program(&p)) {
            Ok(q) if q.same_structure(&p) => {}
            other => bad.push(format!("program {seed}: round trip {:?}", other.err())),
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{PROGRAMS} programs: normalization, {atoms} atom marginals on both backends, \
             {triples} d-separated triples, round trips{}",
            summarize(&bad)
        ),
    }
}

/// Largest `|P(x,y|z) - P(x|z) P(y|z)|` over value combinations of `z` with
/// positive probability.
fn independence_gap(p: &Program, x: &str, y: &str, z: &[&str]) -> Option<f64> {
    let limits = Limits::default();
    let lit = |n: &str, v: bool| Literal {
        atom: p.atom(n).expect("known atom"),
        positive: v,
    };
    let mut worst: Option<f64> = None;
    for bits in 0..1u32 << z.len() {
        let zl: Vec<Literal> = z.iter().enumerate().map(|(i, n)| lit(n, bits >> i & 1 == 1)).collect();
        let with = |extra: &[Literal]| {
            let mut q = zl.clone();
            q.extend_from_slice(extra);
            q
        };
        let (xl, yl) = (lit(x, true), lit(y, true));
        let qs = [with(&[]), with(&[xl]), with(&[yl]), with(&[xl, yl])];
        let r = probabilities::<f64>(p, &qs, Backend::Enum, &limits).expect("enum");
        if r[0] <= 0.0 {
            continue;
        }
        let gap = (r[3] / r[0] - (r[1] / r[0]) * (r[2] / r[0])).abs();
        worst = Some(worst.map_or(gap, |w| w.max(gap)));
    }
    worst
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("1 counterfactual engines agree with the oracle", criterion_1),
        ("2 LPAD selection semantics agree in both directions", criterion_2),
        ("3 worked examples in exact arithmetic", criterion_3),
        ("4 single-world screening vs twin d-connection", criterion_4),
        ("5 size and work bounds", criterion_5),
        ("6 treewidth ordering", criterion_6),
        ("7 benchmark runtime direction", criterion_7),
        ("8 semantics suite", criterion_8),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {name}: {} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
