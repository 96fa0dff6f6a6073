//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines are visible under `cargo test`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use scuba_core::experiments::{
    neutral_degree_stats, run_sweep, step_stats, DegnStats, SweepConfig, SweepReport,
};
use scuba_core::heuristics::{hill_climb, hill_climb2, netcrawler_proposal, scuba};
use scuba_core::neighborhood::{self, FlipScan, NeighborhoodKind, Objective};
use scuba_core::pathgraph::{self, AnnotationKind, EdgeStyle};
use scuba_core::{EpistasisMode, EvalCounter, Genotype, HeuristicKind, NkqLandscape};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 oracle equivalence",
            Duration::from_secs(60),
            oracle_equivalence,
        ),
        (
            "2 neutral-degree oracle",
            Duration::from_secs(120),
            neutral_degree_oracle,
        ),
        (
            "3 fitness ordering",
            Duration::from_secs(600),
            fitness_ordering,
        ),
        (
            "4 evaluation accounting",
            Duration::from_secs(600),
            evaluation_accounting,
        ),
        (
            "5 netcrawler neutrality law",
            Duration::from_secs(600),
            netcrawler_neutrality,
        ),
        (
            "6 scuba step profile",
            Duration::from_secs(600),
            scuba_step_profile,
        ),
        (
            "7 path-graph structure",
            Duration::from_secs(30),
            path_graph_structure,
        ),
        (
            "8 cli determinism",
            Duration::from_secs(600),
            cli_determinism,
        ),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, limit, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = check().and_then(|detail| {
            if t.elapsed() <= limit {
                Ok(detail)
            } else {
                Err(format!(
                    "{detail}; took {:.1?}, limit {limit:?}",
                    t.elapsed()
                ))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({:.1?}): {detail}", t.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.1?}): {detail}", t.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracle over the whole genotype space.

struct Space {
    n: usize,
    totals: Vec<u64>,
}

impl Space {
    /// Totals read directly from the landscape's tables, no library evaluation.
    fn enumerate(l: &NkqLandscape) -> Self {
        let n = l.n();
        let totals = (0..1usize << n)
            .map(|v| {
                (0..n)
                    .map(|i| {
                        let mut idx = (v >> i) & 1;
                        for (j, &m) in l.links()[i].iter().enumerate() {
                            idx |= ((v >> m) & 1) << (j + 1);
                        }
                        u64::from(l.tables()[i][idx])
                    })
                    .sum()
            })
            .collect();
        Self { n, totals }
    }

    fn within(&self, v: usize, lo: u32, hi: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.totals.len()).filter(move |&u| (lo..=hi).contains(&(u ^ v).count_ones()))
    }

    fn evol(&self, v: usize) -> u64 {
        self.within(v, 1, 1)
            .map(|u| self.totals[u])
            .fold(self.totals[v], u64::max)
    }

    fn evol2(&self, v: usize) -> u64 {
        self.within(v, 1, 2)
            .map(|u| self.totals[u])
            .fold(self.totals[v], u64::max)
    }

    fn degn(&self, v: usize) -> usize {
        self.within(v, 1, 1)
            .filter(|&u| self.totals[u] == self.totals[v])
            .count()
    }

    fn members(&self, v: usize, w: NeighborhoodKind) -> Vec<usize> {
        match w {
            NeighborhoodKind::V => self.within(v, 1, 1).collect(),
            NeighborhoodKind::Vn => self
                .within(v, 1, 1)
                .filter(|&u| self.totals[u] == self.totals[v])
                .collect(),
            NeighborhoodKind::V2 => self.within(v, 1, 2).collect(),
        }
    }

    fn is_local(&self, v: usize, g: Objective, w: NeighborhoodKind) -> bool {
        let value = |u: usize| match g {
            Objective::Fitness => self.totals[u],
            Objective::Evolvability => self.evol(u),
        };
        self.members(v, w).into_iter().all(|u| value(u) <= value(v))
    }

    fn genotype(&self, v: usize) -> Genotype {
        Genotype::from_index(v as u64, self.n)
    }

    /// Neutral-network label per node (smallest member), by flood fill.
    fn neutral_networks(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.totals.len()];
        for root in 0..self.totals.len() {
            if label[root] != usize::MAX {
                continue;
            }
            let mut stack = vec![root];
            label[root] = root;
            while let Some(u) = stack.pop() {
                for v in self.members(u, NeighborhoodKind::Vn) {
                    if label[v] == usize::MAX {
                        label[v] = root;
                        stack.push(v);
                    }
                }
            }
        }
        label
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0u64;
    for inst in 0..20u64 {
        let n = rng.gen_range(4..=10);
        let k = rng.gen_range(0..=(n - 1).min(4));
        let q = rng.gen_range(2..=4);
        let mode = if inst % 2 == 0 {
            EpistasisMode::Random
        } else {
            EpistasisMode::Adjacent
        };
        let l = NkqLandscape::generate(n, k, q, mode, 1000 + inst).map_err(|e| e.to_string())?;
        let space = Space::enumerate(&l);
        let tag = format!("instance {inst} (n={n} k={k} q={q} {mode})");
        let mut c = EvalCounter::new();
        for v in 0..space.totals.len() {
            let s = space.genotype(v);
            let f = l.evaluate(&s, &mut c).map_err(|e| e.to_string())?;
            ensure(f.total == space.totals[v], || {
                format!("{tag}: evaluate({s})")
            })?;
            ensure(
                neighborhood::evol(&l, &s, f, &mut c).total == space.evol(v),
                || format!("{tag}: evol({s})"),
            )?;
            ensure(
                neighborhood::evol2(&l, &s, f, &mut c).total == space.evol2(v),
                || format!("{tag}: evol2({s})"),
            )?;
            ensure(
                neighborhood::neutral_degree(&l, &s, f, &mut c) == space.degn(v),
                || format!("{tag}: Degn({s})"),
            )?;
            for i in 0..n {
                ensure(
                    l.delta_evaluate(&s, f.total, i, &mut c).total == space.totals[v ^ (1 << i)],
                    || format!("{tag}: delta_evaluate({s}, {i})"),
                )?;
            }
            for g in [Objective::Fitness, Objective::Evolvability] {
                for w in [
                    NeighborhoodKind::V,
                    NeighborhoodKind::Vn,
                    NeighborhoodKind::V2,
                ] {
                    ensure(
                        neighborhood::is_local(&l, &s, f, g, w, &mut c) == space.is_local(v, g, w),
                        || format!("{tag}: is_local({s}, {g:?}, {w:?})"),
                    )?;
                    checked += 1;
                }
            }
            let r = scuba(&l, &s, &mut rng, &mut c, false).map_err(|e| e.to_string())?;
            let end = r.terminal.to_index().expect("small genotype") as usize;
            ensure(
                space.is_local(end, Objective::Fitness, NeighborhoodKind::V),
                || format!("{tag}: scuba from {s} ended at non-local {}", r.terminal),
            )?;
        }
    }
    Ok(format!(
        "20 landscapes, {checked} is_local combinations, zero mismatches"
    ))
}

// ---------------------------------------------------------------------------

const N: usize = 64;
const KS: [usize; 6] = [0, 2, 4, 8, 12, 16];
const QS: [u32; 4] = [2, 3, 4, 100];

/// Adjacent-cell non-increase along `seq`; at most one rise, and only within
/// two combined standard errors.
fn non_increasing(seq: &[&DegnStats]) -> Result<usize, String> {
    let mut rises = 0;
    for w in seq.windows(2) {
        let diff = w[1].mean - w[0].mean;
        if diff > 0.0 {
            let tol = 2.0 * w[0].std_error.hypot(w[1].std_error);
            if diff > tol {
                return Err(format!(
                    "Degn rises from {:.3} (k={} q={}) to {:.3} (k={} q={})",
                    w[0].mean, w[0].k, w[0].q, w[1].mean, w[1].k, w[1].q
                ));
            }
            rises += 1;
        }
    }
    Ok(rises)
}

fn neutral_degree_oracle() -> Outcome {
    let mut detail = Vec::new();
    for q in [2u32, 3, 4] {
        // At K=0, Degn is the same for every genotype of an instance, so the
        // spread is all between instances.
        let s = neutral_degree_stats(N, 0, q, EpistasisMode::Random, 1000, 400, 7)
            .map_err(|e| e.to_string())?;
        let expected = N as f64 / q as f64;
        let rel = (s.mean - expected).abs() / expected;
        ensure(rel <= 0.05, || {
            format!("K=0 q={q}: mean Degn {:.3}, expected {expected:.3}", s.mean)
        })?;
        detail.push(format!("q={q}: {:.2} vs {expected:.2}", s.mean));
    }

    let mut grid = Vec::new();
    for &q in &QS {
        for &k in &KS {
            grid.push(
                neutral_degree_stats(N, k, q, EpistasisMode::Random, 1000, 50, 8)
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    let cell = |k: usize, q: u32| {
        grid.iter()
            .find(|s| s.k == k && s.q == q)
            .expect("grid cell")
    };
    let mut rises = 0;
    for &q in &QS {
        let row: Vec<_> = KS.iter().map(|&k| cell(k, q)).collect();
        let r = non_increasing(&row)?;
        ensure(r <= 1, || format!("q={q}: {r} rises across K"))?;
        rises += r;
    }
    for &k in &KS {
        let col: Vec<_> = QS.iter().map(|&q| cell(k, q)).collect();
        let r = non_increasing(&col)?;
        ensure(r <= 1, || format!("K={k}: {r} rises across q"))?;
        rises += r;
    }
    Ok(format!(
        "K=0 {}; grid monotone with {rises} tolerated rises",
        detail.join(", ")
    ))
}

// ---------------------------------------------------------------------------

fn sweep(
    ks: &[usize],
    qs: &[u32],
    heuristics: &[HeuristicKind],
    runs: usize,
    seed: u64,
) -> Result<SweepReport, String> {
    run_sweep(&SweepConfig {
        n: N,
        ks: ks.to_vec(),
        qs: qs.to_vec(),
        mode: EpistasisMode::Random,
        heuristics: heuristics.to_vec(),
        runs,
        instances: 10,
        base_seed: seed,
        step_max: 300,
        keep_traces: false,
    })
    .map_err(|e| e.to_string())
}

fn fitnesses(report: &SweepReport, h: HeuristicKind, k: usize, q: u32) -> Vec<f64> {
    report
        .records_for(h, k, q)
        .map(|r| r.result.fitness.normalized())
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// One-sided Welch test of `mean(a) > mean(b)`; returns the p-value.
fn welch_greater(a: &[f64], b: &[f64]) -> f64 {
    let (va, vb) = (variance(a) / a.len() as f64, variance(b) / b.len() as f64);
    let se = (va + vb).sqrt();
    let diff = mean(a) - mean(b);
    if se == 0.0 {
        return if diff > 0.0 { 0.0 } else { 1.0 };
    }
    let df = (va + vb).powi(2) / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let t = StudentsT::new(0.0, 1.0, df).expect("valid degrees of freedom");
    1.0 - t.cdf(diff / se)
}

fn fitness_ordering() -> Outcome {
    let mut passed = Vec::new();
    let mut failed = Vec::new();
    let report = sweep(&[2, 4, 8], &[2], &HeuristicKind::ALL, 200, 11)?;
    for k in [2, 4, 8] {
        let ss = fitnesses(&report, HeuristicKind::Scuba, k, 2);
        for other in [
            HeuristicKind::HillClimb,
            HeuristicKind::HillClimb2,
            HeuristicKind::Netcrawler,
        ] {
            let o = fitnesses(&report, other, k, 2);
            let p = welch_greater(&ss, &o);
            let line = format!(
                "q=2 K={k} SS {:.4} > {} {:.4} (p={p:.1e})",
                mean(&ss),
                other.label(),
                mean(&o)
            );
            if p < 0.01 {
                passed.push(line)
            } else {
                failed.push(line)
            }
        }
    }
    let report = sweep(
        &[4, 8],
        &[100],
        &[
            HeuristicKind::HillClimb,
            HeuristicKind::Netcrawler,
            HeuristicKind::Scuba,
        ],
        200,
        12,
    )?;
    for k in [4, 8] {
        let ss = mean(&fitnesses(&report, HeuristicKind::Scuba, k, 100));
        let hc = mean(&fitnesses(&report, HeuristicKind::HillClimb, k, 100));
        let nc = mean(&fitnesses(&report, HeuristicKind::Netcrawler, k, 100));
        let line = format!("q=100 K={k} |SS {ss:.4} - HC {hc:.4}| < 0.01");
        if (ss - hc).abs() < 0.01 {
            passed.push(line)
        } else {
            failed.push(line)
        }
        let line = format!("q=100 K={k} NC {nc:.4} < HC {hc:.4}");
        if nc < hc {
            passed.push(line)
        } else {
            failed.push(line)
        }
    }
    if failed.is_empty() {
        Ok(passed.join("; "))
    } else {
        Err(format!(
            "failed: {}; passed: {}",
            failed.join("; "),
            passed.join("; ")
        ))
    }
}

// ---------------------------------------------------------------------------

/// Per-run cost identities, checked against the run's trace.
fn accounting_identities(l: &NkqLandscape, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = l.n() as u64;
    let s0 = Genotype::random(l.n(), rng);

    let r = hill_climb(l, &s0, rng, &mut EvalCounter::new(), false).map_err(|e| e.to_string())?;
    ensure(r.evaluations == n * (r.steps + 1), || {
        format!("HC: {} evaluations for {} steps", r.evaluations, r.steps)
    })?;

    let r = hill_climb2(l, &s0, rng, &mut EvalCounter::new(), true).map_err(|e| e.to_string())?;
    let pair = n * (n - 1) / 2;
    let trace = r.trace.expect("trace requested");
    let mut bounds: Vec<u64> = trace.iter().map(|e| e.evaluations).collect();
    bounds.push(r.evaluations);
    for w in bounds.windows(2) {
        let cost = w[1] - w[0];
        ensure(cost >= pair && cost <= pair + n, || {
            format!("HC2 step cost {cost} outside [{pair}, {}]", pair + n)
        })?;
    }

    let r = scuba(l, &s0, rng, &mut EvalCounter::new(), true).map_err(|e| e.to_string())?;
    let trace = r.trace.expect("trace requested");
    let mut ends: Vec<u64> = trace[1..].iter().map(|e| e.evaluations).collect();
    ends.push(r.evaluations);
    for (e, end) in trace.iter().zip(ends) {
        let cost = end - e.evaluations;
        ensure(cost == (1 + e.neutral_degree as u64) * n, || {
            format!("SS state with Degn {} cost {cost}", e.neutral_degree)
        })?;
    }
    Ok(())
}

fn evaluation_accounting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (i, (k, q)) in [(0, 2), (2, 2), (4, 3), (8, 4), (4, 100)]
        .into_iter()
        .enumerate()
    {
        for inst in 0..4 {
            let l =
                NkqLandscape::generate(N, k, q, EpistasisMode::Random, 400 + 10 * i as u64 + inst)
                    .map_err(|e| e.to_string())?;
            accounting_identities(&l, &mut rng)?;
        }
    }
    let report = sweep(
        &[0],
        &[2],
        &[HeuristicKind::HillClimb, HeuristicKind::Scuba],
        1000,
        13,
    )?;
    let evals = |h| {
        let v: Vec<f64> = report
            .records_for(h, 0, 2)
            .map(|r| r.result.evaluations as f64)
            .collect();
        mean(&v)
    };
    let (hc, ss) = (evals(HeuristicKind::HillClimb), evals(HeuristicKind::Scuba));
    ensure((700.0..=1300.0).contains(&hc), || {
        format!("mean HC evaluations {hc:.1}")
    })?;
    ensure((20000.0..=55000.0).contains(&ss), || {
        format!("mean SS evaluations {ss:.1}")
    })?;
    Ok(format!(
        "identities hold on 20 instances; N=64 q=2 K=0: HC {hc:.1}, SS {ss:.1}"
    ))
}

// ---------------------------------------------------------------------------

fn netcrawler_neutrality() -> Outcome {
    const PROPOSALS: u64 = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for state in 0..20u64 {
        let k = KS[state as usize % KS.len()];
        let q = QS[state as usize % QS.len()];
        let l = NkqLandscape::generate(N, k, q, EpistasisMode::Random, 500 + state)
            .map_err(|e| e.to_string())?;
        let s = Genotype::random(N, &mut rng);
        let mut c = EvalCounter::new();
        let total = l.evaluate(&s, &mut c).map_err(|e| e.to_string())?.total;
        let p = FlipScan::new(&l, &s, total, &mut c).neutral_degree() as f64 / N as f64;
        let hits = (0..PROPOSALS)
            .filter(|_| netcrawler_proposal(&l, &s, total, &mut rng, &mut c).total == total)
            .count() as f64;
        let expected = p * PROPOSALS as f64;
        let sigma = (PROPOSALS as f64 * p * (1.0 - p)).sqrt();
        let dev = (hits - expected).abs();
        if sigma == 0.0 {
            ensure(dev == 0.0, || {
                format!("state {state}: {hits} neutral proposals, expected {expected}")
            })?;
        } else {
            ensure(dev <= 3.0 * sigma, || {
                format!("state {state} (k={k} q={q}): {hits} neutral proposals, expected {expected:.0} ± {sigma:.1}")
            })?;
            worst = worst.max(dev / sigma);
        }
    }
    Ok(format!("20 states, largest deviation {worst:.2} sigma"))
}

// ---------------------------------------------------------------------------

fn scuba_step_profile() -> Outcome {
    let report = sweep(&KS, &[3], &[HeuristicKind::Scuba], 200, 16)?;
    let stats = step_stats(&report.records);
    ensure(stats.len() == KS.len(), || {
        format!("{} step rows", stats.len())
    })?;
    let mut failed = Vec::new();
    for w in stats.windows(2) {
        if w[1].mean_steps >= w[0].mean_steps {
            failed.push(format!("steps at K={} not below K={}", w[1].k, w[0].k));
        }
    }
    let argmax = stats
        .iter()
        .max_by(|a, b| a.mean_flat.total_cmp(&b.mean_flat))
        .expect("non-empty");
    if argmax.k == 0 || argmax.k == 16 {
        failed.push(format!("flatCount peaks at K={}", argmax.k));
    }
    let steps: Vec<String> = stats
        .iter()
        .map(|s| format!("K={} {:.2}", s.k, s.mean_steps))
        .collect();
    let detail = format!(
        "mean steps [{}], flatCount peak at K={}",
        steps.join(", "),
        argmax.k
    );
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failed.join("; ")))
    }
}

// ---------------------------------------------------------------------------

/// Components of the dotted edges, labelled by smallest node.
fn dotted_components(nodes: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..nodes).collect();
    loop {
        let mut changed = false;
        for &(u, v) in edges {
            let m = label[u].min(label[v]);
            if label[u] != m || label[v] != m {
                label[u] = m;
                label[v] = m;
                changed = true;
            }
        }
        if !changed {
            return label;
        }
    }
}

fn path_graph_structure() -> Outcome {
    let mut parsed = 0;
    for inst in 0..10u64 {
        let l = NkqLandscape::generate(5, 2, 2, EpistasisMode::Random, 700 + inst)
            .map_err(|e| e.to_string())?;
        let space = Space::enumerate(&l);
        let g = pathgraph::build_graph(&l).map_err(|e| e.to_string())?;
        let tag = format!("instance {inst}");
        ensure(g.node_count() == 32, || {
            format!("{tag}: {} nodes", g.node_count())
        })?;
        ensure(g.totals() == space.totals.as_slice(), || {
            format!("{tag}: node fitness differs")
        })?;

        let hc = pathgraph::annotate(&g, AnnotationKind::HillClimb);
        for v in 0..32 {
            let d = hc.out_degree(v);
            let local = space.is_local(v, Objective::Fitness, NeighborhoodKind::V);
            ensure(d <= 1 && (d == 0) == local, || {
                format!("{tag}: HC out-degree {d} at node {v}, local={local}")
            })?;
        }
        let v_local = (0..32)
            .filter(|&v| space.is_local(v, Objective::Fitness, NeighborhoodKind::V))
            .count();
        let v2_local = (0..32)
            .filter(|&v| space.is_local(v, Objective::Fitness, NeighborhoodKind::V2))
            .count();
        ensure(v2_local <= v_local, || {
            format!("{tag}: {v2_local} V2-local > {v_local} V-local")
        })?;
        let census = pathgraph::census(&l).map_err(|e| e.to_string())?;
        ensure(
            census.v_local == v_local && census.v2_local == v2_local,
            || format!("{tag}: census {census:?}"),
        )?;

        let nc = pathgraph::annotate(&g, AnnotationKind::Netcrawler);
        let dotted: Vec<(usize, usize)> = nc
            .arrows
            .iter()
            .filter(|a| a.style == EdgeStyle::Dotted)
            .map(|a| (a.from, a.to))
            .collect();
        let networks = space.neutral_networks();
        ensure(dotted_components(32, &dotted) == networks, || {
            format!("{tag}: dotted components differ")
        })?;
        ensure(pathgraph::neutral_networks(&g) == networks, || {
            format!("{tag}: neutral_networks differs")
        })?;

        for kind in [
            AnnotationKind::Hypercube,
            AnnotationKind::HillClimb,
            AnnotationKind::HillClimb2,
            AnnotationKind::Netcrawler,
            AnnotationKind::Scuba,
        ] {
            let annotated = pathgraph::annotate(&g, kind);
            let dot = pathgraph::to_dot(&annotated);
            let edges = parse_dot(&dot).map_err(|e| format!("{tag} {kind}: DOT rejected: {e}"))?;
            let expected: BTreeSet<(usize, usize)> =
                annotated.arrows.iter().map(|a| (a.from, a.to)).collect();
            ensure(edges == expected, || {
                format!("{tag} {kind}: parsed edges differ")
            })?;
            parsed += 1;
        }
    }
    Ok(format!("10 instances, {parsed} DOT documents parsed"))
}

/// Parses with a standard DOT grammar; returns the digraph's edges. Every
/// genotype must be declared as a node.
fn parse_dot(dot: &str) -> Result<BTreeSet<(usize, usize)>, String> {
    use graphviz_rust::dot_structures::{EdgeTy, Graph, Id, NodeId, Stmt, Vertex};

    let Graph::DiGraph { stmts, .. } = graphviz_rust::parse(dot)? else {
        return Err("not a digraph".into());
    };
    let node = |id: &NodeId| match &id.0 {
        Id::Plain(s) => s.parse::<usize>().map_err(|e| format!("node id {s}: {e}")),
        other => Err(format!("unexpected node id {other:?}")),
    };
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for stmt in &stmts {
        match stmt {
            Stmt::Node(n) => {
                nodes.insert(node(&n.id)?);
            }
            Stmt::Edge(e) => match &e.ty {
                EdgeTy::Pair(Vertex::N(a), Vertex::N(b)) => {
                    edges.insert((node(a)?, node(b)?));
                }
                other => return Err(format!("unexpected edge {other:?}")),
            },
            _ => {}
        }
    }
    ensure(nodes.len() == 32 && nodes.iter().copied().eq(0..32), || {
        format!("{} node statements", nodes.len())
    })?;
    Ok(edges)
}

// ---------------------------------------------------------------------------

fn scuba_bin(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_scuba"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "scuba {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn run_into(dir: &Path, args: &[&str], outputs: &[&str]) -> Result<Vec<Vec<u8>>, String> {
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    for (flag, name) in outputs
        .iter()
        .map(|o| o.split_once('=').expect("flag=file"))
    {
        full.push(flag.to_string());
        full.push(dir.join(name).display().to_string());
    }
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    scuba_bin(&refs)?;
    outputs
        .iter()
        .map(|o| {
            fs::read(dir.join(o.split_once('=').expect("flag=file").1)).map_err(|e| e.to_string())
        })
        .collect()
}

fn cli_determinism() -> Outcome {
    let invocations: [(&[&str], &[&str]); 6] = [
        (
            &["gen", "--n", "64", "--k", "4", "--q", "3", "--seed", "42"],
            &["--out=l.txt"],
        ),
        (
            &[
                "sweep",
                "--n",
                "32",
                "--k",
                "0,2,4",
                "--q",
                "2,100",
                "--runs",
                "20",
                "--instances",
                "4",
                "--seed",
                "42",
            ],
            &[
                "--out=sweep.csv",
                "--records=records.csv",
                "--profile=profile.csv",
                "--steps=steps.csv",
            ],
        ),
        (
            &[
                "degn",
                "--n",
                "32",
                "--k",
                "0,4",
                "--q",
                "2,3",
                "--samples",
                "500",
                "--instances",
                "3",
                "--seed",
                "42",
            ],
            &["--out=degn.csv"],
        ),
        (
            &[
                "graph",
                "--n",
                "5",
                "--k",
                "2",
                "--q",
                "2",
                "--mode",
                "random",
                "--seed",
                "3",
                "--heuristic",
                "ss",
            ],
            &["--out=g.dot", "--census=census.csv"],
        ),
        (
            &[
                "run",
                "--heuristic",
                "ss",
                "--n",
                "8",
                "--k",
                "2",
                "--q",
                "2",
                "--seed",
                "7",
                "--trace",
            ],
            &["--out=run.txt"],
        ),
        (
            &[
                "run",
                "--heuristic",
                "nc",
                "--n",
                "32",
                "--k",
                "2",
                "--q",
                "3",
                "--seed",
                "7",
                "--trace",
            ],
            &["--out=nc.txt"],
        ),
    ];
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (args, outputs) in invocations {
        let first = run_into(a.path(), args, outputs)?;
        let second = run_into(b.path(), args, outputs)?;
        for ((x, y), name) in first.iter().zip(&second).zip(outputs) {
            ensure(!x.is_empty(), || {
                format!("{} wrote an empty {name}", args[0])
            })?;
            ensure(x == y, || {
                format!(
                    "{} output {name} differs between identical invocations",
                    args[0]
                )
            })?;
            files += 1;
        }
    }
    let landscape = a.path().join("l.txt").display().to_string();
    let first = run_into(
        a.path(),
        &[
            "run",
            "--heuristic",
            "hc2",
            "--landscape-file",
            &landscape,
            "--seed",
            "9",
        ],
        &["--out=r1.txt"],
    )?;
    let second = run_into(
        b.path(),
        &[
            "run",
            "--heuristic",
            "hc2",
            "--landscape-file",
            &landscape,
            "--seed",
            "9",
        ],
        &["--out=r1.txt"],
    )?;
    ensure(first == second, || {
        "run from a landscape file is not reproducible".into()
    })?;
    Ok(format!(
        "{} files byte-identical across repeated invocations",
        files + 1
    ))
}
