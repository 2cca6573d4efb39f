//! Benchmark instances on disk, paired runs and summaries.
//!
//! Layout written by `gen`:
//!
//! ```text
//! <dir>/manifest.json
//! <dir>/n20-k4-s1/program.pl
//! <dir>/n20-k4-s1/queries.json
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use cfl_core::benchgen::{emit_program, generate_dag, sample_query_with, QuerySpec};
use cfl_core::inference::{probabilities, Backend, Limits, QueryOptions};
use cfl_core::parse::{parse_program, print_program};
use cfl_core::{Assignment, Error, Formula};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{run_query, QueryJob};
use crate::record::{CliError, CliResult, ResultRecord, CSV_HEADER};
use crate::Method;

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Instance seeds: `7`, `1..10` (inclusive) or `1,4,9`.
    #[arg(long, default_value = "1..10")]
    pub seeds: String,
    /// Queries sampled per instance.
    #[arg(long, default_value_t = 3)]
    pub queries: usize,
    /// Most evidence items per query (at most 5).
    #[arg(long, default_value_t = 5)]
    pub max_evidence: usize,
    /// Most interventions per query (at most 5).
    #[arg(long, default_value_t = 5)]
    pub max_interventions: usize,
    /// Draw the sign of each evidence item and intervention at random
    /// instead of using `false` throughout.
    #[arg(long)]
    pub positive: bool,
    /// Seed for query sampling; `CFL_SEED` overrides it.
    #[arg(long, default_value_t = 0)]
    pub query_seed: u64,
    #[arg(long, short, default_value = "bench")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RunArgs {
    /// Directory written by `bench gen`.
    #[arg(long, default_value = "bench")]
    pub dir: PathBuf,
    /// Comma-separated methods.
    #[arg(long, default_value = "swip,twin", value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long, default_value = "circuit")]
    pub backend: Backend,
    /// Wall-clock limit per query, in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Worker threads; `CFL_WORKERS` when absent, else 1.
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV file to append to; created with a header when missing.
    #[arg(long, short, default_value = "results.csv")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SummaryArgs {
    /// CSV file written by `bench run`.
    pub results: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub instances: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub vertices: usize,
    pub edges: usize,
    pub queries: usize,
}

/// A query as stored in `queries.json`; assignments use the flag syntax.
#[derive(Debug, Serialize, Deserialize)]
pub struct StoredQuery {
    pub evidence: String,
    pub interventions: String,
    pub query: String,
    pub seed: u64,
}

impl From<&QuerySpec> for StoredQuery {
    fn from(q: &QuerySpec) -> Self {
        StoredQuery {
            evidence: q.evidence_set().to_string(),
            interventions: q.intervention().to_string(),
            query: q.query.literals().to_string(),
            seed: q.seed,
        }
    }
}

pub fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::new(2, format!("bad seed list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn env_number<T: std::str::FromStr>(name: &str) -> CliResult<Option<T>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::new(2, format!("{name} must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Samples queries until `count` have evidence of positive probability.
fn sample_queries(
    bg: &cfl_core::benchgen::BenchGraph,
    p: &cfl_core::Program,
    a: &GenArgs,
    base: u64,
) -> CliResult<Vec<QuerySpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(base ^ bg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut out = Vec::new();
    let attempts = 50 * a.queries.max(1);
    for _ in 0..attempts {
        if out.len() == a.queries {
            break;
        }
        let n_ev = rng.gen_range(1..=a.max_evidence.max(1));
        let n_int = rng.gen_range(1..=a.max_interventions.max(1));
        let seed = rng.gen();
        let q = match sample_query_with(bg, n_ev, n_int, seed, true, a.positive) {
            Ok(q) => q,
            Err(Error::NotEnoughVertices { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let ev = q.evidence_set().resolve(p)?;
        let pe = probabilities::<f64>(p, &[ev], Backend::Circuit, &Limits::default())?[0];
        if pe > 0.0 {
            out.push(q);
        }
    }
    Ok(out)
}

pub fn gen(a: &GenArgs) -> CliResult {
    let base = env_number::<u64>("CFL_SEED")?.unwrap_or(a.query_seed);
    fs::create_dir_all(&a.out)?;
    let mut manifest = Manifest { instances: Vec::new() };
    for seed in parse_seeds(&a.seeds)? {
        let bg = generate_dag(a.n, a.k, seed)?;
        let p = emit_program(&bg)?;
        let queries = sample_queries(&bg, &p, a, base)?;
        let id = format!("n{}-k{}-s{}", a.n, a.k, seed);
        let dir = a.out.join(&id);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("program.pl"), print_program(&p))?;
        let stored: Vec<StoredQuery> = queries.iter().map(StoredQuery::from).collect();
        fs::write(dir.join("queries.json"), serde_json::to_string_pretty(&stored)?)?;
        manifest.instances.push(ManifestEntry {
            id,
            n: a.n,
            k: a.k,
            seed,
            vertices: bg.vertices.len(),
            edges: bg.edges.len(),
            queries: stored.len(),
        });
    }
    // merge with instances generated earlier into the same directory
    let path = a.out.join("manifest.json");
    if let Ok(text) = fs::read_to_string(&path) {
        let old: Manifest = serde_json::from_str(&text)?;
        let fresh: Vec<String> = manifest.instances.iter().map(|e| e.id.clone()).collect();
        let mut merged: Vec<ManifestEntry> = old.instances.into_iter().filter(|e| !fresh.contains(&e.id)).collect();
        merged.append(&mut manifest.instances);
        manifest.instances = merged;
    }
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    println!("wrote {} instances to {}", manifest.instances.len(), a.out.display());
    Ok(())
}

fn read_manifest(dir: &Path) -> CliResult<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn run_instance(dir: &Path, entry: &ManifestEntry, a: &RunArgs) -> CliResult<Vec<ResultRecord>> {
    let base = dir.join(&entry.id);
    let p = parse_program(&fs::read_to_string(base.join("program.pl"))?)?;
    let stored: Vec<StoredQuery> = serde_json::from_str(&fs::read_to_string(base.join("queries.json"))?)?;
    let mut rows = Vec::new();
    for (qi, q) in stored.iter().enumerate() {
        let fix = Assignment::parse_list(&q.interventions)?;
        let evidence = Assignment::parse_list(&q.evidence)?;
        let query = Formula::parse(&q.query)?;
        for &method in &a.methods {
            let job = QueryJob {
                program: &p,
                method,
                backend: a.backend,
                fix: &fix,
                evidence: &evidence,
                query: &query,
                options: QueryOptions::default(),
                timeout: Some(Duration::from_secs_f64(a.timeout)),
            };
            let mut record = ResultRecord {
                instance: format!("{}/q{qi}", entry.id),
                n: Some(entry.n),
                k: Some(entry.k),
                seed: Some(entry.seed),
                ..ResultRecord::default()
            };
            // failures are recorded in the row, the run goes on
            let _ = run_query(&job, &mut record);
            rows.push(record);
        }
    }
    Ok(rows)
}

pub fn run(a: &RunArgs) -> CliResult {
    let manifest = read_manifest(&a.dir)?;
    let workers = match a.workers {
        Some(w) => w,
        None => env_number::<usize>("CFL_WORKERS")?.unwrap_or(1),
    }
    .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::new(1, e.to_string()))?;
    let results: Vec<CliResult<Vec<ResultRecord>>> =
        pool.install(|| manifest.instances.par_iter().map(|e| run_instance(&a.dir, e, a)).collect());

    let fresh = !a.out.exists() || fs::metadata(&a.out)?.len() == 0;
    let file = fs::OpenOptions::new().create(true).append(true).open(&a.out)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(CSV_HEADER)?;
    }
    let mut rows = 0;
    for r in results {
        for record in r? {
            w.serialize(&record)?;
            rows += 1;
        }
    }
    w.flush()?;
    println!("appended {rows} rows to {}", a.out.display());
    Ok(())
}

/// Paired comparison of single-world and twin rows.
#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub pairs: usize,
    pub median_inference_ratio: Option<f64>,
    pub median_total_ratio: Option<f64>,
    /// Share of pairs whose single-world total time is at most the twin's.
    pub swip_not_slower: Option<f64>,
    pub max_probability_gap: Option<f64>,
    pub timeouts: usize,
    pub errors: usize,
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug, Serialize)]
pub struct GroupSummary {
    pub n: usize,
    pub k: usize,
    pub pairs: usize,
    pub median_inference_ratio: f64,
    pub median_total_ratio: f64,
    pub mean_tw_swip: f64,
    pub mean_tw_twin: f64,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

pub fn summarize(records: &[ResultRecord]) -> Summary {
    let mut by_instance: BTreeMap<&str, (Option<&ResultRecord>, Option<&ResultRecord>)> = BTreeMap::new();
    let mut s = Summary::default();
    for r in records {
        match r.status.as_str() {
            "ok" => {}
            "timeout" => s.timeouts += 1,
            _ => s.errors += 1,
        }
        let slot = by_instance.entry(&r.instance).or_default();
        match r.method.as_str() {
            "swip" => slot.0 = Some(r),
            "twin" => slot.1 = Some(r),
            _ => {}
        }
    }
    let mut pairs: BTreeMap<(usize, usize), Vec<(&ResultRecord, &ResultRecord)>> = BTreeMap::new();
    for (sw, tw) in by_instance.values().filter_map(|&(a, b)| Some((a?, b?))) {
        // a timeout counts with its capped time, as the run recorded it
        let timed = |r: &ResultRecord| r.status == "ok" || r.status == "timeout";
        if timed(sw) && timed(tw) {
            pairs.entry((sw.n.unwrap_or(0), sw.k.unwrap_or(0))).or_default().push((sw, tw));
        }
    }
    let total = |r: &ResultRecord| r.transform_ms + r.inference_ms;
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 1.0 };
    let all: Vec<_> = pairs.values().flatten().collect();
    s.pairs = all.len();
    s.median_inference_ratio = median(all.iter().map(|(a, b)| ratio(a.inference_ms, b.inference_ms)).collect());
    s.median_total_ratio = median(all.iter().map(|(a, b)| ratio(total(a), total(b))).collect());
    if !all.is_empty() {
        let wins = all.iter().filter(|(a, b)| total(a) <= total(b)).count();
        s.swip_not_slower = Some(wins as f64 / all.len() as f64);
    }
    s.max_probability_gap = all
        .iter()
        .filter_map(|(a, b)| Some((a.probability? - b.probability?).abs()))
        .reduce(f64::max);
    for (&(n, k), ps) in &pairs {
        let mean = |f: &dyn Fn(&(&ResultRecord, &ResultRecord)) -> f64| ps.iter().map(f).sum::<f64>() / ps.len() as f64;
        s.groups.push(GroupSummary {
            n,
            k,
            pairs: ps.len(),
            median_inference_ratio: median(ps.iter().map(|(a, b)| ratio(a.inference_ms, b.inference_ms)).collect())
                .unwrap_or(f64::NAN),
            median_total_ratio: median(ps.iter().map(|(a, b)| ratio(total(a), total(b))).collect()).unwrap_or(f64::NAN),
            mean_tw_swip: mean(&|(a, _)| a.tw_estimate as f64),
            mean_tw_twin: mean(&|(_, b)| b.tw_estimate as f64),
        });
    }
    s
}

pub fn summary(a: &SummaryArgs) -> CliResult {
    let mut reader = csv::Reader::from_path(&a.results)?;
    let records: Vec<ResultRecord> = reader.deserialize().collect::<Result<_, _>>()?;
    let s = summarize(&records);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s)?);
        return Ok(());
    }
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
    println!("pairs: {}", s.pairs);
    println!("median inference_ms swip/twin: {}", show(s.median_inference_ratio));
    println!("median total time swip/twin: {}", show(s.median_total_ratio));
    println!("swip total <= twin total: {}", show(s.swip_not_slower.map(|x| 100.0 * x)) + "%");
    println!("max |p_swip - p_twin|: {}", s.max_probability_gap.map_or("n/a".into(), |g| format!("{g:.2e}")));
    println!("timeouts: {}, errors: {}", s.timeouts, s.errors);
    if !s.groups.is_empty() {
        println!("{:>5} {:>3} {:>6} {:>10} {:>10} {:>8} {:>8}", "n", "k", "pairs", "inf ratio", "tot ratio", "tw swip", "tw twin");
        for g in &s.groups {
            println!(
                "{:>5} {:>3} {:>6} {:>10.3} {:>10.3} {:>8.2} {:>8.2}",
                g.n, g.k, g.pairs, g.median_inference_ratio, g.median_total_ratio, g.mean_tw_swip, g.mean_tw_twin
            );
        }
    }
    Ok(())
}
