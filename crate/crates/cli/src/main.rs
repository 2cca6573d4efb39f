//! `cfl`: validate, transform and query counterfactual ProbLog programs, and
//! run the reachability benchmarks.
//!
//! Exit codes: 0 ok, 1 I/O failure, 2 parse or validation error, 3 bad
//! intervention, 4 zero-probability evidence, 5 evidence downstream of an
//! intervention (single-world method), 6 resource guard or timeout.

mod bench;
mod commands;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use cfl_core::inference::Backend;
use cfl_core::transform::TwinVariant;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cfl", version, about = "Counterfactual inference for ground ProbLog programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and report its size.
    Validate { path: PathBuf },
    /// Write the single-world or twin program for an intervention.
    Transform(TransformArgs),
    /// Evaluate a counterfactual query.
    Query(QueryArgs),
    /// Test d-separation in the single-world or twin dependency graph.
    Dsep(DsepArgs),
    /// Generate, run and summarize reachability benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Swip,
    Twin,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Swip => "swip",
            Method::Twin => "twin",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphMethod {
    Swip,
    Twin,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    #[default]
    Shared,
    Literal,
}

impl From<Variant> for TwinVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Shared => TwinVariant::Shared,
            Variant::Literal => TwinVariant::Literal,
        }
    }
}

/// Intervention flags shared by several commands. `--fix` and `--do` are
/// synonyms; giving both is accepted when they agree.
#[derive(Args, Clone, Debug, Default)]
pub struct InterventionArgs {
    /// Intervention for the single-world method, `atom=true|false,...`.
    #[arg(long)]
    pub fix: Option<String>,
    /// Intervention for the twin method, `atom=true|false,...`.
    #[arg(long = "do")]
    pub do_: Option<String>,
}

#[derive(Args)]
pub struct TransformArgs {
    pub path: PathBuf,
    #[arg(long, value_enum)]
    pub method: GraphMethod,
    #[command(flatten)]
    pub intervention: InterventionArgs,
    /// Output file; standard output when absent (statistics then go to
    /// standard error).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Propagate constants and drop rules the kept atoms do not depend on.
    #[arg(long)]
    pub simplify: bool,
    /// Atoms kept by `--simplify` (original names); defaults to the query
    /// and evidence directives of the file, or every atom.
    #[arg(long)]
    pub keep: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub twin_variant: Variant,
}

#[derive(Args)]
pub struct QueryArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "swip")]
    pub method: Method,
    #[arg(long, default_value = "circuit")]
    pub backend: Backend,
    #[command(flatten)]
    pub intervention: InterventionArgs,
    /// Evidence `atom=true|false,...`; overrides the file's directives.
    #[arg(long)]
    pub evidence: Option<String>,
    /// Query conjunction `a,\+b` or `a=true,b=false`; overrides the file's
    /// `query/1` directives.
    #[arg(long)]
    pub query: Option<String>,
    /// Print the full result record as JSON.
    #[arg(long)]
    pub json: bool,
    /// Simplify the transformed program before inference.
    #[arg(long)]
    pub simplify: bool,
    /// Condition inside the single-world program exactly as written,
    /// without the downstream-evidence guard.
    #[arg(long)]
    pub literal_alg4: bool,
    #[arg(long, value_enum, default_value_t)]
    pub twin_variant: Variant,
    /// Wall-clock limit for circuit compilation, in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
}

#[derive(Args)]
pub struct DsepArgs {
    pub path: PathBuf,
    #[arg(long, value_enum)]
    pub method: GraphMethod,
    #[command(flatten)]
    pub intervention: InterventionArgs,
    /// First atom; in the twin graph a trailing `'` selects the
    /// counterfactual copy.
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Conditioning atoms, comma-separated.
    #[arg(long, default_value = "")]
    pub given: String,
    #[arg(long, value_enum, default_value_t)]
    pub twin_variant: Variant,
}

#[derive(Subcommand)]
pub enum BenchCommand {
    /// Write benchmark instances and a manifest.
    Gen(bench::GenArgs),
    /// Run every query of every instance and append CSV rows.
    Run(bench::RunArgs),
    /// Pair single-world and twin rows of a results file.
    Summary(bench::SummaryArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { path } => commands::validate(&path),
        Command::Transform(a) => commands::transform(&a),
        Command::Query(a) => commands::query(&a),
        Command::Dsep(a) => commands::dsep(&a),
        Command::Bench(BenchCommand::Gen(a)) => bench::gen(&a),
        Command::Bench(BenchCommand::Run(a)) => bench::run(&a),
        Command::Bench(BenchCommand::Summary(a)) => bench::summary(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
