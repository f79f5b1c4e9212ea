use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use degpack::embed::{EmbedOutcome, EmbeddingMap, PipelineInput, PipelineParams};
use degpack::harness::{self, ExperimentConfig, Mode, Summary};
use degpack::{
    build_bounded_realization, check_embedding, decompose_unbalanced, embed_backtracking, embed_pipeline,
    star_decompose, verify_bounded_structure, DegreeSequence, Error, SimpleGraph, UnbalancedBipartiteSeq,
};

/// Realize degree sequences with small components and embed them into dense
/// host graphs.
///
/// Exit status: 0 success, 1 negative result, 2 invalid input, 3 timeout.
#[derive(Parser)]
#[command(name = "degpack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a realization and print its structure report.
    Realize(RealizeArgs),
    /// Cover a graph with vertex-disjoint stars.
    Stars(StarsArgs),
    /// Embed a sequence into a host with the staged pipeline.
    Embed(EmbedArgs),
    /// Run a seeded campaign and write its CSV.
    Experiment(ExperimentArgs),
    /// Verify that a map embeds a pattern into a host.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RealizeMode {
    Gadgets,
    Unbalanced,
}

#[derive(Args)]
struct SeqSource {
    /// Sequence file: a JSON array, or `{"side_s": [...], "side_t": [...],
    /// "q": k}` for unbalanced input.
    #[arg(long, conflicts_with = "degrees")]
    seq: Option<PathBuf>,
    /// Inline comma-separated degrees.
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
}

#[derive(Args)]
struct RealizeArgs {
    #[command(flatten)]
    source: SeqSource,
    #[arg(long, value_enum, default_value = "gadgets")]
    mode: RealizeMode,
    /// Degree bound D for the unbalanced decomposition.
    #[arg(long)]
    max_degree: Option<usize>,
    /// Write the edge list here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StarsArgs {
    /// Graph edge-list file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Host edge-list file.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    source: SeqSource,
    /// Treat the sequence file as an unbalanced bipartite sequence.
    #[arg(long)]
    unbalanced: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, default_value_t = 6)]
    cluster_size: usize,
    /// Re-check a pipeline failure with exact search.
    #[arg(long)]
    oracle: bool,
    /// Node budget for exact searches.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Write the map (JSON array) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the realization (edge list) here.
    #[arg(long)]
    pattern_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    cluster_size: Option<usize>,
    #[arg(long)]
    min_frac: Option<f64>,
    /// Record per-trial wall time (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Pattern edge-list file.
    #[arg(long)]
    pattern: PathBuf,
    /// Host edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Map file (JSON array).
    #[arg(long)]
    map: PathBuf,
}

enum Failure {
    Negative(String),
    Invalid(String),
    Timeout(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Timeout(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Negative(m) | Failure::Invalid(m) | Failure::Timeout(m) => m,
        }
    }
}

type CliResult = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn read_degrees(src: &SeqSource) -> Result<DegreeSequence, Failure> {
    match (&src.seq, &src.degrees) {
        (Some(p), None) => Ok(harness::read_json(p)?),
        (None, Some(d)) => Ok(DegreeSequence::new(d.clone())),
        _ => Err(Failure::Invalid("give exactly one of --seq or --degrees".into())),
    }
}

fn read_unbalanced(src: &SeqSource) -> Result<UnbalancedBipartiteSeq, Failure> {
    match &src.seq {
        Some(p) => Ok(harness::read_json(p)?),
        None => Err(Failure::Invalid("unbalanced input needs --seq".into())),
    }
}

#[derive(Serialize)]
struct RealizeReport<'a> {
    a_size_bounded: bool,
    outside_balanced_complete: bool,
    a_three_colorable: bool,
    no_cross_edges: bool,
    degrees_match: bool,
    set_a: &'a [usize],
    type1_components: &'a [Vec<usize>],
}

fn realize(args: RealizeArgs) -> CliResult {
    match args.mode {
        RealizeMode::Gadgets => {
            let seq = read_degrees(&args.source)?;
            let r = build_bounded_realization(&seq).map_err(|e| match e {
                Error::NotGraphic => Failure::Negative(e.to_string()),
                other => Failure::Invalid(other.to_string()),
            })?;
            let s = verify_bounded_structure(&r, &seq);
            emit(args.out.as_deref(), &harness::format_graph(&r.graph))?;
            eprint!(
                "{}",
                json(&RealizeReport {
                    a_size_bounded: s.a_size_bounded,
                    outside_balanced_complete: s.outside_balanced_complete,
                    a_three_colorable: s.a_three_colorable,
                    no_cross_edges: s.no_cross_edges,
                    degrees_match: s.degrees_match,
                    set_a: &r.set_a,
                    type1_components: &r.type1_components,
                })
            );
            if s.all_hold() {
                Ok(())
            } else {
                Err(Failure::Negative("structure checks failed".into()))
            }
        }
        RealizeMode::Unbalanced => {
            let seq = read_unbalanced(&args.source)?;
            let d = args.max_degree.unwrap_or_else(|| seq.max_degree());
            let list = decompose_unbalanced(&seq, d)?;
            emit(args.out.as_deref(), &harness::format_graph(&list.union_graph(seq.len())))?;
            let sizes: Vec<usize> = list.components.iter().map(|c| c.vertex_count()).collect();
            eprintln!("components {} sizes {:?} bound {}", sizes.len(), sizes, 4 * d * d);
            Ok(())
        }
    }
}

fn stars(args: StarsArgs) -> CliResult {
    let g = harness::read_graph(&args.graph)?;
    match star_decompose(&g, args.q) {
        Ok(d) => emit(args.out.as_deref(), &json(&d.stars)),
        Err(Error::Stuck(v)) => Err(Failure::Negative(format!("stuck at vertex {v}"))),
        Err(e) => Err(e.into()),
    }
}

fn embed(args: EmbedArgs) -> CliResult {
    let host = harness::read_graph(&args.graph)?;
    let input = if args.unbalanced {
        PipelineInput::Unbalanced(read_unbalanced(&args.source)?)
    } else {
        PipelineInput::Graphic(read_degrees(&args.source)?)
    };
    let params = PipelineParams {
        cluster_size: args.cluster_size,
        density: args.density,
        eta: args.eta,
        q: args.q,
        seed: args.seed,
        max_degree: args.max_degree,
        star_budget: args.budget,
        completion_budget: args.budget,
        ..PipelineParams::default()
    };
    let write_pattern = |p: &SimpleGraph| -> CliResult {
        if let Some(path) = &args.pattern_out {
            harness::write_graph(path, p)?;
        }
        Ok(())
    };
    match embed_pipeline(&host, &input, &params) {
        Ok(ok) => {
            write_pattern(&ok.pattern)?;
            emit(args.out.as_deref(), &json(&ok.map))
        }
        Err(fail) => {
            eprintln!("{fail}");
            let Some(pattern) = fail.pattern.filter(|_| args.oracle) else {
                return Err(Failure::Negative(format!("failed at stage {}", fail.stage)));
            };
            match embed_backtracking(&pattern, &host, args.budget) {
                EmbedOutcome::Found(map) => {
                    eprintln!("exact search found a map");
                    write_pattern(&pattern)?;
                    emit(args.out.as_deref(), &json(&map))
                }
                EmbedOutcome::Absent => Err(Failure::Negative("exact search: absent".into())),
                EmbedOutcome::Timeout => Err(Failure::Timeout("exact search: budget exhausted".into())),
            }
        }
    }
}

fn experiment(args: ExperimentArgs) -> CliResult {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::read(p)?,
        None => {
            let mode: Mode = args
                .mode
                .as_deref()
                .ok_or_else(|| Failure::Invalid("--mode or --config is required".into()))?
                .parse()?;
            ExperimentConfig::new(mode, args.n.unwrap_or(36), args.trials.unwrap_or(10), 0)
        }
    };
    if let Some(m) = &args.mode {
        cfg.mode = m.parse()?;
    }
    macro_rules! set {
        ($($field:ident),*) => {$(if let Some(v) = args.$field { cfg.$field = v; })*};
    }
    set!(n, trials, seed, q, max_degree, eta, density, cluster_size);
    if args.min_frac.is_some() {
        cfg.min_frac = args.min_frac;
    }
    cfg.timing |= args.timing;
    cfg.validate()?;
    let records = harness::run_experiment(&cfg)?;
    match &args.out {
        Some(p) => harness::write_csv(p, &records)?,
        None => print!("{}", harness::records_to_csv(&records)?),
    }
    eprintln!("{}", Summary::of(&cfg, &records));
    Ok(())
}

fn check(args: CheckArgs) -> CliResult {
    let pattern = harness::read_graph(&args.pattern)?;
    let host = harness::read_graph(&args.graph)?;
    let map: EmbeddingMap = harness::read_json(&args.map)?;
    match check_embedding(&pattern, &host, &map) {
        Ok(()) => {
            println!("valid");
            Ok(())
        }
        Err(v) => Err(Failure::Negative(format!("invalid: {v}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Realize(a) => realize(a),
        Command::Stars(a) => stars(a),
        Command::Embed(a) => embed(a),
        Command::Experiment(a) => experiment(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("degpack: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
