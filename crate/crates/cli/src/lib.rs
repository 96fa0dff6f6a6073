//! `scuba` command-line front end.
//!
//! Exit status: 0 on success, 1 for usage errors (unknown flags, out-of-range
//! parameters), 2 for runtime and I/O failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scuba_core::experiments::{
    self, neutral_degree_stats, neutral_mutation_profile, run_sweep, step_stats, ExperimentError,
    SweepConfig,
};
use scuba_core::heuristics::{
    generic_scuba, GenericScubaConfig, HeuristicKind, NeutralImprover, NeutralStop, RunResult,
    DEFAULT_STEP_MAX,
};
use scuba_core::landscape::MAX_K;
use scuba_core::pathgraph::{self, AnnotationKind, Census};
use scuba_core::seed::stable_mix;
use scuba_core::{EpistasisMode, EvalCounter, Genotype, NkqLandscape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

const LANDSCAPE_FORMAT: &str = "\
Landscape file format (text):
  # nkq-landscape
  format-version = 1
  n = <loci>
  k = <epistasis>
  q = <neutrality>
  mode = adjacent|random
  seed = <u64>
  <locus> <k link indices> <2^(k+1) table entries>     (one line per locus, 0..n-1)
Component index: own allele is bit 0, link j is bit j+1.";

const SWEEP_FORMAT: &str = "\
Sweep CSV columns:
  heuristic,n,k,q,runs,mean_fitness,std_fitness,mean_evals,mean_steps,mean_flat,mean_gate
Records CSV (--records): one row per run with seeds, terminal fitness and counters.
Profile CSV (--profile): heuristic,n,k,q,degn,steps,neutral_steps,p_step,states,neutral_states,p_state
Step CSV (--steps): n,k,q,runs,mean_steps,mean_flat (Scuba runs only).";

const GRAPH_FORMAT: &str = "\
Output is a DOT digraph. Nodes are genotypes labelled by integer value (locus i = bit i),
shaded from black (lowest fitness) to white (highest). Solid edges are fitness-improving
moves, dotted edges neutral moves; dir=none marks undirected edges.
--census writes one CSV row: n,k,q,seed,v_local,v2_local,scuba_terminals,neutral_networks";

#[derive(Debug, Parser)]
#[command(
    name = "scuba",
    version,
    about = "Neutral-network local search on NKq fitness landscapes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a landscape and write it as a text document.
    #[command(after_help = LANDSCAPE_FORMAT)]
    Gen(GenArgs),
    /// Perform one heuristic run and print its summary.
    #[command(after_help = LANDSCAPE_FORMAT)]
    Run(RunArgs),
    /// Run heuristics over a (K, q) grid and write per-cell statistics as CSV.
    #[command(after_help = SWEEP_FORMAT)]
    Sweep(SweepArgs),
    /// Mean neutral degree over a (K, q) grid, as CSV.
    #[command(after_help = "CSV columns: n,k,q,instances,samples,mean_degn,std_error")]
    Degn(DegnArgs),
    /// Render a small landscape as an annotated hypercube graph in DOT.
    #[command(after_help = GRAPH_FORMAT)]
    Graph(GraphArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Adjacent,
    Random,
}

impl From<ModeArg> for EpistasisMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Adjacent => EpistasisMode::Adjacent,
            ModeArg::Random => EpistasisMode::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    Hc,
    Hc2,
    Nc,
    Ss,
    /// Generic two-phase Scuba (see --improve1, --budget).
    Gss,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Improve1Arg {
    Greedy,
    Drift,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphHeuristicArg {
    Hc,
    Hc2,
    Nc,
    Ss,
    Cube,
}

impl From<GraphHeuristicArg> for AnnotationKind {
    fn from(h: GraphHeuristicArg) -> Self {
        match h {
            GraphHeuristicArg::Hc => AnnotationKind::HillClimb,
            GraphHeuristicArg::Hc2 => AnnotationKind::HillClimb2,
            GraphHeuristicArg::Nc => AnnotationKind::Netcrawler,
            GraphHeuristicArg::Ss => AnnotationKind::Scuba,
            GraphHeuristicArg::Cube => AnnotationKind::Hypercube,
        }
    }
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Number of loci N.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Epistasis degree K (0 <= K <= N-1).
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Neutrality parameter q (>= 2).
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// How epistatic links are chosen.
    #[arg(long, value_enum, default_value_t = ModeArg::Random)]
    pub mode: ModeArg,
    /// Base seed; drawn from system entropy and printed to stderr when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub landscape: LandscapeArgs,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub heuristic: HeuristicArg,
    #[command(flatten)]
    pub landscape: LandscapeArgs,
    /// Load the landscape from this file instead of generating one.
    #[arg(long)]
    pub landscape_file: Option<PathBuf>,
    /// Start genotype as a bit string (locus 0 first); random when absent.
    #[arg(long)]
    pub start: Option<String>,
    /// Netcrawler step budget.
    #[arg(long, default_value_t = DEFAULT_STEP_MAX)]
    pub step_max: u64,
    /// Neutral-phase improver for `gss`.
    #[arg(long, value_enum, default_value_t = Improve1Arg::Greedy)]
    pub improve1: Improve1Arg,
    /// Neutral moves allowed per phase for `gss`; unlimited (stop at a
    /// local-neutral maximum) when absent.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Print every visited point.
    #[arg(long)]
    pub trace: bool,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Comma-separated K values.
    #[arg(long, value_delimiter = ',', default_value = "0,2,4,8,12,16")]
    pub k: Vec<usize>,
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,100")]
    pub q: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Random)]
    pub mode: ModeArg,
    /// Comma-separated heuristics (hc, hc2, nc, ss).
    #[arg(long, value_delimiter = ',', default_value = "hc,hc2,nc,ss")]
    pub heuristics: Vec<String>,
    /// Runs per heuristic and cell.
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Landscape instances per cell; runs are spread evenly over them.
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    #[arg(long, default_value_t = DEFAULT_STEP_MAX)]
    pub step_max: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-cell CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-run records CSV.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Neutral-mutation profile CSV (keeps traces; slower).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Scuba step statistics CSV.
    #[arg(long)]
    pub steps: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DegnArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,2,4,8,12,16")]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,100")]
    pub q: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Random)]
    pub mode: ModeArg,
    /// Random genotypes sampled per instance.
    #[arg(long, default_value_t = 50_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub instances: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub landscape: LandscapeArgs,
    #[arg(long)]
    pub landscape_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphHeuristicArg::Ss)]
    pub heuristic: GraphHeuristicArg,
    /// DOT output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the census CSV (header and one row) to this file.
    #[arg(long)]
    pub census: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn check_landscape_flags(n: usize, ks: &[usize], qs: &[u32]) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if ks.is_empty() {
        return Err(usage("--k needs at least one value"));
    }
    if qs.is_empty() {
        return Err(usage("--q needs at least one value"));
    }
    if let Some(k) = ks.iter().find(|&&k| k >= n) {
        return Err(usage(format!("--k {k} must be at most n-1 = {}", n - 1)));
    }
    if let Some(k) = ks.iter().find(|&&k| k > MAX_K) {
        return Err(usage(format!(
            "--k {k} exceeds the supported maximum {MAX_K}"
        )));
    }
    if let Some(q) = qs.iter().find(|&&q| q < 2) {
        return Err(usage(format!("--q {q} must be at least 2")));
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}

fn csv_output<F>(path: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), ExperimentError>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    write_output(path, &String::from_utf8(buf).expect("csv output is utf-8"))
}

fn load_or_generate(args: &LandscapeArgs, file: Option<&Path>) -> Result<NkqLandscape, CliError> {
    match file {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
            NkqLandscape::from_text(&text)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))
        }
        None => {
            check_landscape_flags(args.n, &[args.k], &[args.q])?;
            let seed = resolve_seed(args.seed);
            NkqLandscape::generate(args.n, args.k, args.q, args.mode.into(), seed)
                .map_err(|e| usage(e.to_string()))
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let l = load_or_generate(&args.landscape, None)?;
    write_output(args.out.as_deref(), &l.to_text())
}

fn summarize(
    label: &str,
    l: &NkqLandscape,
    start: &Genotype,
    run_seed: u64,
    r: &RunResult,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "heuristic: {label}");
    let _ = writeln!(
        out,
        "landscape: n={} k={} q={} mode={} seed={}",
        l.n(),
        l.k(),
        l.q(),
        l.mode(),
        l.seed()
    );
    let _ = writeln!(out, "run_seed: {run_seed}");
    let _ = writeln!(out, "start: {start}");
    let _ = writeln!(out, "terminal: {}", r.terminal);
    let _ = writeln!(
        out,
        "fitness: {}/{} ({:.6})",
        r.fitness.total,
        r.fitness.scale,
        r.fitness.normalized()
    );
    let _ = writeln!(out, "steps: {}", r.steps);
    let _ = writeln!(out, "flat_count: {}", r.flat_count);
    let _ = writeln!(out, "gate_count: {}", r.gate_count);
    let _ = writeln!(out, "evaluations: {}", r.evaluations);
    match r.last_improvement {
        Some(s) => {
            let _ = writeln!(out, "last_improvement: {s}");
        }
        None => out.push_str("last_improvement: none\n"),
    }
    if let Some(trace) = &r.trace {
        out.push_str("trace: index kind total degn evaluations genotype\n");
        for (i, e) in trace.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i} {:?} {} {} {} {}",
                e.kind, e.total, e.neutral_degree, e.evaluations, e.genotype
            );
        }
    }
    out
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    if args.heuristic == HeuristicArg::Nc && args.step_max == 0 {
        return Err(usage("--step-max must be positive"));
    }
    let base_seed = match (&args.landscape_file, args.landscape.seed) {
        (Some(_), Some(s)) => s,
        (Some(_), None) => resolve_seed(None),
        (None, _) => 0,
    };
    let l = load_or_generate(&args.landscape, args.landscape_file.as_deref())?;
    let run_seed = if args.landscape_file.is_some() {
        stable_mix(&[base_seed, 4])
    } else {
        stable_mix(&[l.seed(), 4])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    let start = match &args.start {
        Some(bits) => {
            let g: Genotype = bits.parse().map_err(|e| usage(format!("--start: {e}")))?;
            if g.len() != l.n() {
                return Err(usage(format!(
                    "--start has {} loci, the landscape has {}",
                    g.len(),
                    l.n()
                )));
            }
            g
        }
        None => Genotype::random(l.n(), &mut rng),
    };
    let mut counter = EvalCounter::new();
    let (label, result) = match args.heuristic {
        HeuristicArg::Gss => {
            let config = GenericScubaConfig {
                improve1: match args.improve1 {
                    Improve1Arg::Greedy => NeutralImprover::GreedyEvolvability,
                    Improve1Arg::Drift => NeutralImprover::NeutralDrift,
                },
                stop1: match (args.budget, args.improve1) {
                    (Some(b), _) => NeutralStop::Budget(b),
                    (None, Improve1Arg::Greedy) => NeutralStop::LocalNeutralMaximum,
                    (None, Improve1Arg::Drift) => {
                        return Err(usage("--improve1 drift requires --budget"))
                    }
                },
                ..GenericScubaConfig::default()
            };
            (
                "gss",
                generic_scuba(&l, &start, &config, &mut rng, &mut counter, args.trace),
            )
        }
        h => {
            let kind = match h {
                HeuristicArg::Hc => HeuristicKind::HillClimb,
                HeuristicArg::Hc2 => HeuristicKind::HillClimb2,
                HeuristicArg::Nc => HeuristicKind::Netcrawler,
                _ => HeuristicKind::Scuba,
            };
            (
                kind.label(),
                kind.run(
                    &l,
                    &start,
                    &mut rng,
                    &mut counter,
                    args.step_max,
                    args.trace,
                ),
            )
        }
    };
    let result = result.map_err(|e| CliError::Runtime(e.to_string()))?;
    write_output(
        args.out.as_deref(),
        &summarize(label, &l, &start, run_seed, &result),
    )
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    check_landscape_flags(args.n, &args.k, &args.q)?;
    let heuristics = args
        .heuristics
        .iter()
        .map(|h| {
            h.parse::<HeuristicKind>()
                .map_err(|e| usage(format!("--heuristics: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if heuristics.is_empty() {
        return Err(usage("--heuristics needs at least one value"));
    }
    if args.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    if args.instances == 0 {
        return Err(usage("--instances must be at least 1"));
    }
    if args.step_max == 0 {
        return Err(usage("--step-max must be positive"));
    }
    let config = SweepConfig {
        n: args.n,
        ks: args.k.clone(),
        qs: args.q.clone(),
        mode: args.mode.into(),
        heuristics,
        runs: args.runs,
        instances: args.instances,
        base_seed: resolve_seed(args.seed),
        step_max: args.step_max,
        keep_traces: args.profile.is_some(),
    };
    let report = run_sweep(&config)?;
    csv_output(args.out.as_deref(), |w| experiments::write_csv(&report, w))?;
    if let Some(p) = &args.records {
        csv_output(Some(p), |w| {
            experiments::write_records_csv(&report.records, w)
        })?;
    }
    if let Some(p) = &args.profile {
        let rows = neutral_mutation_profile(&report.records);
        csv_output(Some(p), |w| experiments::write_profile_csv(&rows, w))?;
    }
    if let Some(p) = &args.steps {
        let rows = step_stats(&report.records);
        csv_output(Some(p), |w| experiments::write_step_stats_csv(&rows, w))?;
    }
    Ok(())
}

fn cmd_degn(args: &DegnArgs) -> Result<(), CliError> {
    check_landscape_flags(args.n, &args.k, &args.q)?;
    if args.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    if args.instances == 0 {
        return Err(usage("--instances must be at least 1"));
    }
    let seed = resolve_seed(args.seed);
    let mut rows = Vec::new();
    for &q in &args.q {
        for &k in &args.k {
            rows.push(neutral_degree_stats(
                args.n,
                k,
                q,
                args.mode.into(),
                args.samples,
                args.instances,
                seed,
            )?);
        }
    }
    csv_output(args.out.as_deref(), |w| {
        experiments::write_degn_csv(&rows, w)
    })
}

fn cmd_graph(args: &GraphArgs) -> Result<(), CliError> {
    if args.landscape_file.is_none() && args.landscape.n > pathgraph::MAX_GRAPH_N {
        return Err(usage(format!(
            "--n {} is too large for a path graph (at most {})",
            args.landscape.n,
            pathgraph::MAX_GRAPH_N
        )));
    }
    let l = load_or_generate(&args.landscape, args.landscape_file.as_deref())?;
    let graph = pathgraph::build_graph(&l).map_err(|e| usage(e.to_string()))?;
    let dot = pathgraph::to_dot(&pathgraph::annotate(&graph, args.heuristic.into()));
    write_output(args.out.as_deref(), &dot)?;
    if let Some(p) = &args.census {
        let c = pathgraph::census(&l).map_err(|e| usage(e.to_string()))?;
        write_output(Some(p), &format!("{}\n{}\n", Census::HEADER, c.csv_row()))?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Degn(a) => cmd_degn(a),
        Command::Graph(a) => cmd_graph(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            EXIT_RUNTIME
        }
    }
}
