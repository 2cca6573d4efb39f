use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use cfl_core::graph::{d_separated, primal_graph, single_world_d_separated, treewidth_estimate};
use cfl_core::inference::{prepare_swip, prepare_twin, Backend, Limits, Prepared, QueryOptions};
use cfl_core::names;
use cfl_core::oracle::oracle_counterfactual;
use cfl_core::parse::{parse_source, print_program, ParseOptions, Source};
use cfl_core::transform::{construct_twin_with, simplify, swift, twin_counterpart, Intervention, TwinVariant};
use cfl_core::{Assignment, Error, Formula, Program};

use crate::record::{millis, status_of, CliError, CliResult, ResultRecord};
use crate::{DsepArgs, GraphMethod, InterventionArgs, Method, QueryArgs, TransformArgs};

pub fn load(path: &Path) -> CliResult<Source> {
    let text = fs::read_to_string(path).map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    Ok(parse_source(&text, ParseOptions::default())?)
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

pub fn validate(path: &Path) -> CliResult {
    let src = load(path)?;
    let p = &src.program;
    let mut line = format!("ok: {}, {}", plural(p.facts().len(), "fact"), plural(p.clauses().len(), "clause"));
    if !p.clauses().is_empty() {
        line.push_str(&format!(", L_max={}", p.max_body_len()));
    }
    println!("{line}");
    println!("{}", plural(p.atom_count(), "atom"));
    Ok(())
}

/// The intervention from the flags, or else from the file's `fix/2` and
/// `do/2` directives (`fix` first for the single-world method).
fn intervention(args: &InterventionArgs, src: &Source, prefer_fix: bool) -> CliResult<Intervention> {
    let parse = |s: &Option<String>| s.as_deref().map(Assignment::parse_list).transpose().map_err(CliError::intervention);
    let (fix, do_) = (parse(&args.fix)?, parse(&args.do_)?);
    let chosen = match (fix, do_) {
        (Some(a), Some(b)) if a != b => return Err(CliError::new(3, "--fix and --do disagree")),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => match (src.fix.is_empty(), src.do_.is_empty(), prefer_fix) {
            (false, _, true) | (false, true, false) => src.fix.clone(),
            _ => src.do_.clone(),
        },
    };
    for name in chosen.names() {
        src.program.require(name).map_err(CliError::intervention)?;
    }
    Ok(chosen)
}

/// Comma-separated atoms; commas inside parentheses belong to the atom.
fn atom_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter()
        .map(|a| a.trim().to_string())
        .filter(|a| !a.is_empty())
        .map(|a| names::canonical_atom(&a).unwrap_or(a))
        .collect()
}

pub fn transform(a: &TransformArgs) -> CliResult {
    let src = load(&a.path)?;
    let p = &src.program;
    let fix = intervention(&a.intervention, &src, a.method == GraphMethod::Swip)?;
    let variant = TwinVariant::from(a.twin_variant);
    let (mut out, stats) = match a.method {
        GraphMethod::Swip => swift(p, &fix).map_err(CliError::intervention)?,
        GraphMethod::Twin => construct_twin_with(p, &fix, variant).map_err(CliError::intervention)?,
    };
    if a.simplify {
        let originals: Vec<String> = match &a.keep {
            Some(k) => atom_list(k),
            None if !src.queries.is_empty() || !src.evidence.is_empty() => {
                src.queries.iter().cloned().chain(src.evidence.names().map(str::to_string)).collect()
            }
            None => p.atoms().map(|x| p.name(x).to_string()).collect(),
        };
        let mut keep = Vec::new();
        for name in &originals {
            p.require(name)?;
            match a.method {
                GraphMethod::Swip if fix.contains(name) => keep.push(names::fixed(name)),
                GraphMethod::Swip => keep.push(name.clone()),
                GraphMethod::Twin => {
                    keep.push(name.clone());
                    keep.push(twin_counterpart(p, &fix, variant, name));
                }
            }
        }
        keep.retain(|n| out.atom(n).is_some());
        out = simplify(&out, keep.iter().map(String::as_str))?;
    }
    let text = print_program(&out);
    let stats = serde_json::to_string(&stats)?;
    match &a.out {
        Some(path) => {
            fs::write(path, text)?;
            println!("{stats}");
        }
        None => {
            print!("{text}");
            eprintln!("{stats}");
        }
    }
    Ok(())
}

/// Everything needed to answer one counterfactual query.
pub struct QueryJob<'a> {
    pub program: &'a Program,
    pub method: Method,
    pub backend: Backend,
    pub fix: &'a Intervention,
    pub evidence: &'a Assignment,
    pub query: &'a Formula,
    pub options: QueryOptions,
    pub timeout: Option<Duration>,
}

/// Runs one query and fills in the measured fields of a record; failures
/// become the record status.
pub fn run_query(job: &QueryJob, record: &mut ResultRecord) -> Result<f64, Error> {
    record.method = job.method.as_str().into();
    record.backend = job.backend.to_string();
    let start = Instant::now();
    let prepared: Result<Prepared, Error> = match job.method {
        Method::Swip => prepare_swip(job.program, job.fix, job.evidence, job.query, &job.options),
        Method::Twin => prepare_twin(job.program, job.fix, job.evidence, job.query, &job.options),
        Method::Oracle => {
            record.size = job.program.size();
            record.tw_estimate = treewidth_estimate(&primal_graph(job.program));
            record.backend = "enum".into();
            let r = oracle_counterfactual(job.program, job.fix, job.evidence, job.query);
            record.inference_ms = millis(start.elapsed());
            return finish(record, r, job.timeout);
        }
    };
    record.transform_ms = millis(start.elapsed());
    let prepared = match prepared {
        Ok(p) => p,
        Err(e) => return finish(record, Err(e), job.timeout),
    };
    record.size = prepared.program().size();
    record.tw_estimate = treewidth_estimate(&primal_graph(prepared.program()));
    let start = Instant::now();
    let limits = Limits {
        deadline: job.timeout.map(|t| start + t),
        ..Limits::default()
    };
    let r = prepared.evaluate::<f64>(job.backend, &limits);
    record.inference_ms = millis(start.elapsed());
    finish(record, r, job.timeout)
}

fn finish(record: &mut ResultRecord, r: Result<f64, Error>, timeout: Option<Duration>) -> Result<f64, Error> {
    match &r {
        Ok(v) => {
            record.probability = Some(*v);
            record.status = "ok".into();
        }
        Err(e) => {
            record.probability = None;
            record.status = status_of(e);
            if let (Error::Timeout, Some(t)) = (e, timeout) {
                record.inference_ms = millis(t);
            }
        }
    }
    r
}

pub fn query(a: &QueryArgs) -> CliResult {
    let src = load(&a.path)?;
    let p = &src.program;
    let fix = intervention(&a.intervention, &src, a.method != Method::Twin)?;
    let evidence = match &a.evidence {
        Some(s) => Assignment::parse_list(s)?,
        None => src.evidence.clone(),
    };
    let queries: Vec<Formula> = match &a.query {
        Some(q) => vec![Formula::parse(q)?],
        None if !src.queries.is_empty() => src.queries.iter().map(|q| Formula::atom(q)).collect(),
        None => return Err(CliError::new(2, "no query given (use --query or a query/1 directive)")),
    };
    let mut first_error: Option<CliError> = None;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for q in &queries {
        let job = QueryJob {
            program: p,
            method: a.method,
            backend: a.backend,
            fix: &fix,
            evidence: &evidence,
            query: q,
            options: QueryOptions {
                simplify: a.simplify,
                literal_alg4: a.literal_alg4,
                twin_variant: a.twin_variant.into(),
            },
            timeout: a.timeout.map(Duration::from_secs_f64),
        };
        let mut record = ResultRecord {
            instance: a.path.display().to_string(),
            ..ResultRecord::default()
        };
        let r = run_query(&job, &mut record);
        if a.json {
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        } else if let Ok(v) = r {
            if queries.len() == 1 {
                writeln!(out, "{v:.10}")?;
            } else {
                writeln!(out, "{}: {v:.10}", q.literals())?;
            }
        }
        if let Err(e) = r {
            let e = CliError::from(e);
            let e = CliError::new(e.code, format!("{}: {e}", q.literals()));
            if queries.len() > 1 {
                eprintln!("error: {e}");
            }
            first_error.get_or_insert(e);
        }
    }
    first_error.map_or(Ok(()), Err)
}

/// `d′`, `d'` and `d__cf` all name the counterfactual copy of `d`.
fn twin_name(p: &Program, do_: &Intervention, variant: TwinVariant, raw: &str) -> String {
    match raw.strip_suffix('\'').or_else(|| raw.strip_suffix('′')) {
        Some(base) => twin_counterpart(p, do_, variant, base.trim()),
        None => raw.trim().to_string(),
    }
}

pub fn dsep(a: &DsepArgs) -> CliResult {
    let src = load(&a.path)?;
    let p = &src.program;
    let fix = intervention(&a.intervention, &src, a.method == GraphMethod::Swip)?;
    let separated = match a.method {
        GraphMethod::Swip => {
            let given = atom_list(&a.given);
            let given: Vec<&str> = given.iter().map(String::as_str).collect();
            single_world_d_separated(p, &fix, a.x.trim(), a.y.trim(), &given)?
        }
        GraphMethod::Twin => {
            let variant = TwinVariant::from(a.twin_variant);
            let (t, _) = construct_twin_with(p, &fix, variant).map_err(CliError::intervention)?;
            let name = |raw: &str| twin_name(p, &fix, variant, raw);
            let given: Vec<String> = atom_list(&a.given).iter().map(|s| name(s)).collect();
            let given: Vec<&str> = given.iter().map(String::as_str).collect();
            d_separated(&t.dependency_graph(), &name(&a.x), &name(&a.y), &given)?
        }
    };
    println!("{}", if separated { "yes" } else { "no" });
    Ok(())
}
