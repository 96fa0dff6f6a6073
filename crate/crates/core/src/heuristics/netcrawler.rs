use rand::Rng;

use super::{start_total, HeuristicError, MoveKind, Recorder, RunResult};
use crate::genotype::Genotype;
use crate::landscape::NkqLandscape;
use crate::neighborhood::{EvalCounter, FlipScan};

/// Step budget used in the reference experiments.
pub const DEFAULT_STEP_MAX: u64 = 300;

/// Outcome of one uniformly drawn one-bit proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proposal {
    pub locus: usize,
    pub total: u64,
}

/// Draws one uniform one-bit mutant of `s` and evaluates it (one query).
pub fn netcrawler_proposal<R: Rng + ?Sized>(
    l: &NkqLandscape,
    s: &Genotype,
    total: u64,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> Proposal {
    let locus = rng.gen_range(0..l.n());
    Proposal {
        locus,
        total: l.delta_evaluate(s, total, locus, counter).total,
    }
}

/// Netcrawler with one-bit mutation: `step_max` uniform proposals, each
/// accepted when it is at least as fit as the current point.
///
/// `steps` is the number of iterations (`step_max`), `flat_count` and
/// `gate_count` count accepted neutral and improving moves. With tracing on,
/// the trace holds one entry per proposal; the `Degn` it reports is computed
/// outside the run's counter.
pub fn netcrawler<R: Rng + ?Sized>(
    l: &NkqLandscape,
    start: &Genotype,
    rng: &mut R,
    step_max: u64,
    counter: &mut EvalCounter,
    trace: bool,
) -> Result<RunResult, HeuristicError> {
    if step_max == 0 {
        return Err(HeuristicError::EmptyBudget);
    }
    let mut total = start_total(l, start)?;
    let mut s = start.clone();
    let mut rec = Recorder::new(trace, counter);
    let degree = |s: &Genotype, total: u64| {
        FlipScan::new(l, s, total, &mut EvalCounter::new()).neutral_degree()
    };
    rec.visit(&s, total, MoveKind::Start, counter);
    if rec.enabled() {
        rec.set_degree(degree(&s, total));
    }
    let (mut flat, mut gate) = (0, 0);
    let mut last_improvement = None;
    let mut current_degree = None;

    for step in 1..=step_max {
        let p = netcrawler_proposal(l, &s, total, rng, counter);
        let kind = if p.total < total {
            MoveKind::Rejected
        } else {
            s.flip(p.locus);
            current_degree = None;
            if p.total == total {
                flat += 1;
                MoveKind::Neutral
            } else {
                gate += 1;
                last_improvement = Some(step);
                MoveKind::Improving
            }
        };
        total = p.total.max(total);
        rec.visit(&s, total, kind, counter);
        if rec.enabled() {
            let d = *current_degree.get_or_insert_with(|| degree(&s, total));
            rec.set_degree(d);
        }
    }

    Ok(RunResult {
        fitness: l.fitness(total),
        terminal: s,
        steps: step_max,
        flat_count: flat,
        gate_count: gate,
        evaluations: rec.spent(counter),
        last_improvement,
        trace: rec.finish(),
    })
}
