//! Seeded sweep harness.
//!
//! A sweep covers every `(q, K)` pair of a grid. For each pair it generates
//! `instances` landscapes, shared by all heuristics, and performs `runs` runs
//! per heuristic; run `r` uses instance `r % instances`. Every landscape and
//! run draws from its own seed:
//!
//! ```text
//! landscape_seed = stable_mix([base, 0, K, q, instance])
//! run_seed       = stable_mix([base, 1, K, q, heuristic_id, instance, run])
//! ```
//!
//! where `run` is the run's index within its instance. The run seed drives
//! both the uniform start point and the heuristic's tie-breaking. Runs execute
//! in parallel but results are collected in grid order, so the report does not
//! depend on scheduling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::genotype::Genotype;
use crate::heuristics::{HeuristicError, HeuristicKind, MoveKind, RunResult, DEFAULT_STEP_MAX};
use crate::landscape::{EpistasisMode, LandscapeError, NkqLandscape};
use crate::neighborhood::{EvalCounter, FlipScan};
use crate::seed::stable_mix;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n: usize,
    pub ks: Vec<usize>,
    pub qs: Vec<u32>,
    pub mode: EpistasisMode,
    pub heuristics: Vec<HeuristicKind>,
    /// Runs per heuristic and grid cell, spread over the instances.
    pub runs: usize,
    /// Landscapes per grid cell.
    pub instances: usize,
    pub base_seed: u64,
    pub step_max: u64,
    /// Keep per-run traces (needed for neutral-mutation profiles).
    pub keep_traces: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 64,
            ks: vec![0, 2, 4, 8, 12, 16],
            qs: vec![2, 3, 4, 100],
            mode: EpistasisMode::Random,
            heuristics: HeuristicKind::ALL.to_vec(),
            runs: 100,
            instances: 10,
            base_seed: 0,
            step_max: DEFAULT_STEP_MAX,
            keep_traces: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidConfig(m));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.instances == 0 {
            return bad("instances must be at least 1".into());
        }
        if self.step_max == 0 && self.heuristics.contains(&HeuristicKind::Netcrawler) {
            return bad("step_max must be positive".into());
        }
        for &k in &self.ks {
            for &q in &self.qs {
                // Parameter checks only; no tables are drawn here.
                if k >= self.n || q < 2 || self.n == 0 || k > crate::landscape::MAX_K {
                    return bad(format!(
                        "cell n={} k={k} q={q} is not a valid landscape",
                        self.n
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn landscape_seed(base: u64, k: usize, q: u32, instance: usize) -> u64 {
    stable_mix(&[base, 0, k as u64, q as u64, instance as u64])
}

pub fn run_seed(
    base: u64,
    k: usize,
    q: u32,
    heuristic: HeuristicKind,
    instance: usize,
    run: usize,
) -> u64 {
    stable_mix(&[
        base,
        1,
        k as u64,
        q as u64,
        heuristic.id(),
        instance as u64,
        run as u64,
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub heuristic: HeuristicKind,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub instance: usize,
    pub run: usize,
    pub landscape_seed: u64,
    pub run_seed: u64,
    pub result: RunResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub heuristic: HeuristicKind,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub runs: usize,
    pub mean_fitness: f64,
    /// Sample standard deviation; zero for a single run.
    pub std_fitness: f64,
    pub mean_evals: f64,
    pub mean_steps: f64,
    pub mean_flat: f64,
    pub mean_gate: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values.iter().copied());
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

impl CellStats {
    /// Aggregates the records of one cell. Panics on an empty slice.
    pub fn from_records(records: &[RunRecord]) -> Self {
        let first = &records[0];
        let fitness: Vec<f64> = records
            .iter()
            .map(|r| r.result.fitness.normalized())
            .collect();
        Self {
            heuristic: first.heuristic,
            n: first.n,
            k: first.k,
            q: first.q,
            runs: records.len(),
            mean_fitness: mean(fitness.iter().copied()),
            std_fitness: sample_std(&fitness),
            mean_evals: mean(records.iter().map(|r| r.result.evaluations as f64)),
            mean_steps: mean(records.iter().map(|r| r.result.steps as f64)),
            mean_flat: mean(records.iter().map(|r| r.result.flat_count as f64)),
            mean_gate: mean(records.iter().map(|r| r.result.gate_count as f64)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub cells: Vec<CellStats>,
    /// Every run, in cell order.
    pub records: Vec<RunRecord>,
}

impl SweepReport {
    pub fn cell(&self, heuristic: HeuristicKind, k: usize, q: u32) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.heuristic == heuristic && c.k == k && c.q == q)
    }

    pub fn records_for(
        &self,
        heuristic: HeuristicKind,
        k: usize,
        q: u32,
    ) -> impl Iterator<Item = &RunRecord> {
        self.records
            .iter()
            .filter(move |r| r.heuristic == heuristic && r.k == k && r.q == q)
    }
}

/// Runs every heuristic on every `(q, K)` cell of the grid.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, ExperimentError> {
    config.validate()?;
    let grid: Vec<(u32, usize)> = config
        .qs
        .iter()
        .flat_map(|&q| config.ks.iter().map(move |&k| (q, k)))
        .collect();

    let landscapes: Vec<Vec<NkqLandscape>> = grid
        .par_iter()
        .map(|&(q, k)| {
            (0..config.instances)
                .map(|i| {
                    NkqLandscape::generate(
                        config.n,
                        k,
                        q,
                        config.mode,
                        landscape_seed(config.base_seed, k, q, i),
                    )
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let tasks: Vec<(usize, HeuristicKind, usize)> = (0..grid.len())
        .flat_map(|cell| {
            config
                .heuristics
                .iter()
                .flat_map(move |&h| (0..config.runs).map(move |r| (cell, h, r)))
        })
        .collect();

    let records: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(cell, heuristic, r)| {
            let (q, k) = grid[cell];
            let instance = r % config.instances;
            let run = r / config.instances;
            let landscape = &landscapes[cell][instance];
            let seed = run_seed(config.base_seed, k, q, heuristic, instance, run);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = Genotype::random(config.n, &mut rng);
            let result = heuristic.run(
                landscape,
                &start,
                &mut rng,
                &mut EvalCounter::new(),
                config.step_max,
                config.keep_traces,
            )?;
            Ok(RunRecord {
                heuristic,
                n: config.n,
                k,
                q,
                instance,
                run,
                landscape_seed: landscape.seed(),
                run_seed: seed,
                result,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let cells = records
        .chunks(config.runs)
        .map(CellStats::from_records)
        .collect();
    Ok(SweepReport { cells, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegnStats {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub instances: usize,
    pub samples: usize,
    pub mean: f64,
    /// Standard error of `mean`: across instance means when there are several
    /// instances, across sampled genotypes otherwise.
    pub std_error: f64,
}

/// Mean neutral degree of uniformly random genotypes, averaged over instances.
pub fn neutral_degree_stats(
    n: usize,
    k: usize,
    q: u32,
    mode: EpistasisMode,
    samples: usize,
    instances: usize,
    seed: u64,
) -> Result<DegnStats, ExperimentError> {
    if samples == 0 || instances == 0 {
        return Err(ExperimentError::InvalidConfig(
            "samples and instances must be at least 1".into(),
        ));
    }
    let per_instance: Vec<Vec<f64>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let l = NkqLandscape::generate(
                n,
                k,
                q,
                mode,
                stable_mix(&[seed, 2, k as u64, q as u64, i as u64]),
            )?;
            let mut rng =
                ChaCha8Rng::seed_from_u64(stable_mix(&[seed, 3, k as u64, q as u64, i as u64]));
            let mut counter = EvalCounter::new();
            Ok((0..samples)
                .map(|_| {
                    let s = Genotype::random(n, &mut rng);
                    let total = l.total_of(&s);
                    FlipScan::new(&l, &s, total, &mut counter).neutral_degree() as f64
                })
                .collect())
        })
        .collect::<Result<_, ExperimentError>>()?;

    let means: Vec<f64> = per_instance
        .iter()
        .map(|v| mean(v.iter().copied()))
        .collect();
    let std_error = if instances >= 2 {
        sample_std(&means) / (instances as f64).sqrt()
    } else {
        sample_std(&per_instance[0]) / (samples as f64).sqrt()
    };
    Ok(DegnStats {
        n,
        k,
        q,
        instances,
        samples,
        mean: mean(means.iter().copied()),
        std_error,
    })
}

/// One bin of a neutral-mutation profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub heuristic: HeuristicKind,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub degree: usize,
    /// Transitions (moves, or proposals for Netcrawler) leaving a state of this degree.
    pub steps: u64,
    pub neutral_steps: u64,
    /// `neutral_steps / steps`; absent when no transition left such a state.
    pub p_step: Option<f64>,
    /// Distinct visits to states of this degree, terminal states included.
    pub states: u64,
    /// Visits that ended with a neutral move.
    pub neutral_states: u64,
    pub p_state: f64,
}

/// Probability of a neutral move as a function of the source state's `Degn`,
/// binned per heuristic and grid cell. Records without traces are skipped.
pub fn neutral_mutation_profile(records: &[RunRecord]) -> Vec<ProfileRow> {
    #[derive(Default)]
    struct Bin {
        steps: u64,
        neutral_steps: u64,
        states: u64,
        neutral_states: u64,
    }
    let mut bins: BTreeMap<(HeuristicKind, usize, u32, usize, usize), Bin> = BTreeMap::new();

    for record in records {
        let Some(trace) = &record.result.trace else {
            continue;
        };
        let key = |d: usize| (record.heuristic, record.k, record.q, d, record.n);
        for w in trace.windows(2) {
            let bin = bins.entry(key(w[0].neutral_degree)).or_default();
            bin.steps += 1;
            bin.neutral_steps += u64::from(w[1].kind == MoveKind::Neutral);
        }
        let visits: Vec<usize> = trace
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind != MoveKind::Rejected)
            .map(|(i, _)| i)
            .collect();
        for (v, &idx) in visits.iter().enumerate() {
            let bin = bins.entry(key(trace[idx].neutral_degree)).or_default();
            bin.states += 1;
            if let Some(&next) = visits.get(v + 1) {
                bin.neutral_states += u64::from(trace[next].kind == MoveKind::Neutral);
            }
        }
    }

    bins.into_iter()
        .map(|((heuristic, k, q, degree, n), b)| ProfileRow {
            heuristic,
            n,
            k,
            q,
            degree,
            steps: b.steps,
            neutral_steps: b.neutral_steps,
            p_step: (b.steps > 0).then(|| b.neutral_steps as f64 / b.steps as f64),
            states: b.states,
            neutral_states: b.neutral_states,
            p_state: b.neutral_states as f64 / b.states as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepStats {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub runs: usize,
    /// Mean of `flat_count + gate_count`.
    pub mean_steps: f64,
    pub mean_flat: f64,
}

/// Mean Scuba step counts per `(q, K)`, ordered by `q` then `K`.
pub fn step_stats(records: &[RunRecord]) -> Vec<StepStats> {
    let mut groups: BTreeMap<(u32, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.heuristic == HeuristicKind::Scuba)
    {
        groups.entry((r.q, r.k)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((q, k), rs)| StepStats {
            n: rs[0].n,
            k,
            q,
            runs: rs.len(),
            mean_steps: mean(
                rs.iter()
                    .map(|r| (r.result.flat_count + r.result.gate_count) as f64),
            ),
            mean_flat: mean(rs.iter().map(|r| r.result.flat_count as f64)),
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 11] = [
    "heuristic",
    "n",
    "k",
    "q",
    "runs",
    "mean_fitness",
    "std_fitness",
    "mean_evals",
    "mean_steps",
    "mean_flat",
    "mean_gate",
];

/// Writes one row per cell under [`SWEEP_HEADER`]. Fitness columns use six
/// decimals, the other means three.
pub fn write_csv<W: Write>(report: &SweepReport, out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for c in &report.cells {
        w.write_record([
            c.heuristic.label().to_string(),
            c.n.to_string(),
            c.k.to_string(),
            c.q.to_string(),
            c.runs.to_string(),
            format!("{:.6}", c.mean_fitness),
            format!("{:.6}", c.std_fitness),
            format!("{:.3}", c.mean_evals),
            format!("{:.3}", c.mean_steps),
            format!("{:.3}", c.mean_flat),
            format!("{:.3}", c.mean_gate),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One line per run: seeds, terminal fitness and counters.
pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "heuristic",
        "n",
        "k",
        "q",
        "instance",
        "run",
        "landscape_seed",
        "run_seed",
        "fitness_total",
        "fitness",
        "evaluations",
        "steps",
        "flat",
        "gate",
    ])?;
    for r in records {
        w.write_record([
            r.heuristic.label().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.q.to_string(),
            r.instance.to_string(),
            r.run.to_string(),
            r.landscape_seed.to_string(),
            r.run_seed.to_string(),
            r.result.fitness.total.to_string(),
            format!("{:.6}", r.result.fitness.normalized()),
            r.result.evaluations.to_string(),
            r.result.steps.to_string(),
            r.result.flat_count.to_string(),
            r.result.gate_count.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_profile_csv<W: Write>(rows: &[ProfileRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "heuristic",
        "n",
        "k",
        "q",
        "degn",
        "steps",
        "neutral_steps",
        "p_step",
        "states",
        "neutral_states",
        "p_state",
    ])?;
    for r in rows {
        w.write_record([
            r.heuristic.label().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.q.to_string(),
            r.degree.to_string(),
            r.steps.to_string(),
            r.neutral_steps.to_string(),
            r.p_step.map(|p| format!("{p:.6}")).unwrap_or_default(),
            r.states.to_string(),
            r.neutral_states.to_string(),
            format!("{:.6}", r.p_state),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_step_stats_csv<W: Write>(rows: &[StepStats], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "k", "q", "runs", "mean_steps", "mean_flat"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.q.to_string(),
            r.runs.to_string(),
            format!("{:.3}", r.mean_steps),
            format!("{:.3}", r.mean_flat),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_degn_csv<W: Write>(rows: &[DegnStats], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "k",
        "q",
        "instances",
        "samples",
        "mean_degn",
        "std_error",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.q.to_string(),
            r.instances.to_string(),
            r.samples.to_string(),
            format!("{:.4}", r.mean),
            format!("{:.4}", r.std_error),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Creates `path` and hands a buffered writer to `write`, attaching the path
/// to any I/O failure.
pub fn write_to_path<F>(path: &Path, write: F) -> Result<(), ExperimentError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), ExperimentError>,
{
    let io = |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = BufWriter::new(File::create(path).map_err(io)?);
    match write(&mut file) {
        Err(ExperimentError::Csv(e)) if e.is_io_error() => match e.into_kind() {
            csv::ErrorKind::Io(source) => Err(io(source)),
            _ => unreachable!(),
        },
        other => other,
    }?;
    file.flush().map_err(io)
}

/// Writes the sweep CSV to a file.
pub fn write_csv_file(report: &SweepReport, path: &Path) -> Result<(), ExperimentError> {
    write_to_path(path, |w| write_csv(report, w))
}
