use rand::Rng;

use super::scuba::{evolvability_gain, neutral_evolvability};
use super::{pick, start_total, HeuristicError, MoveKind, Recorder, RunResult};
use crate::genotype::Genotype;
use crate::landscape::NkqLandscape;
use crate::neighborhood::{EvalCounter, FlipScan};

/// Fitness-preserving move on the neutral network (first phase).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeutralImprover {
    /// Move to a neutral mutant of strictly maximal evolvability.
    GreedyEvolvability,
    /// Move to a uniformly chosen neutral mutant.
    NeutralDrift,
}

/// When the first phase ends. It also ends whenever the improver has no move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeutralStop {
    /// The point is a local-neutral maximum: no neutral mutant has higher evolvability.
    LocalNeutralMaximum,
    /// At most this many neutral moves per phase.
    Budget(u64),
}

/// Fitness-increasing jump (second phase).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpImprover {
    /// Jump to a mutant whose fitness equals the point's evolvability.
    BestImprovement,
    /// Jump to a uniformly chosen strictly fitter mutant.
    RandomImprovement,
}

/// When the whole search ends, checked before each jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    LocalMaximum,
    /// Local maximum, or this many jumps made.
    GateBudget(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenericScubaConfig {
    pub improve1: NeutralImprover,
    pub stop1: NeutralStop,
    pub improve2: JumpImprover,
    pub stop2: Termination,
}

/// The default configuration reproduces [`super::scuba`] exactly.
impl Default for GenericScubaConfig {
    fn default() -> Self {
        Self {
            improve1: NeutralImprover::GreedyEvolvability,
            stop1: NeutralStop::LocalNeutralMaximum,
            improve2: JumpImprover::BestImprovement,
            stop2: Termination::LocalMaximum,
        }
    }
}

impl GenericScubaConfig {
    /// Uniform neutral drift for up to `budget` moves between jumps.
    pub fn drift(budget: u64) -> Self {
        Self {
            improve1: NeutralImprover::NeutralDrift,
            stop1: NeutralStop::Budget(budget),
            ..Self::default()
        }
    }

    fn needs_neutral_evolvability(&self) -> bool {
        self.improve1 == NeutralImprover::GreedyEvolvability
            || self.stop1 == NeutralStop::LocalNeutralMaximum
    }
}

/// Two-phase search with pluggable neutral and jump steps.
///
/// Each visited point is scanned once (`N` queries); the neutral mutants'
/// evolvability is computed only when the configuration uses it.
pub fn generic_scuba<R: Rng + ?Sized>(
    l: &NkqLandscape,
    start: &Genotype,
    config: &GenericScubaConfig,
    rng: &mut R,
    counter: &mut EvalCounter,
    trace: bool,
) -> Result<RunResult, HeuristicError> {
    let mut total = start_total(l, start)?;
    let mut s = start.clone();
    let mut rec = Recorder::new(trace, counter);
    rec.visit(&s, total, MoveKind::Start, counter);
    let (mut flat, mut gate) = (0u64, 0u64);
    let mut last_improvement = None;

    loop {
        let mut phase_moves = 0u64;
        let scan = loop {
            let scan = FlipScan::new(l, &s, total, counter);
            rec.set_degree(scan.neutral_degree());
            let own = scan.evol();
            let gain = if config.needs_neutral_evolvability() {
                evolvability_gain(&neutral_evolvability(l, &mut s, &scan, counter), own)
            } else {
                None
            };
            let stop = match config.stop1 {
                NeutralStop::LocalNeutralMaximum => gain.is_none(),
                NeutralStop::Budget(b) => phase_moves >= b,
            };
            if stop {
                break scan;
            }
            let next = match config.improve1 {
                NeutralImprover::GreedyEvolvability => gain.map(|best| pick(&best, rng)),
                NeutralImprover::NeutralDrift => {
                    let neutral = scan.neutral_loci();
                    (!neutral.is_empty()).then(|| pick(&neutral, rng))
                }
            };
            match next {
                Some(locus) => {
                    s.flip(locus);
                    flat += 1;
                    phase_moves += 1;
                    rec.visit(&s, total, MoveKind::Neutral, counter);
                }
                None => break scan,
            }
        };

        let done = match config.stop2 {
            Termination::LocalMaximum => scan.is_local(),
            Termination::GateBudget(b) => scan.is_local() || gate >= b,
        };
        if done {
            break;
        }
        let candidates = match config.improve2 {
            JumpImprover::BestImprovement => scan.loci_with(scan.evol()),
            JumpImprover::RandomImprovement => {
                (0..l.n()).filter(|&i| scan.flips[i] > total).collect()
            }
        };
        if candidates.is_empty() {
            return Err(HeuristicError::JumpFailed(s));
        }
        let locus = pick(&candidates, rng);
        s.flip(locus);
        total = scan.flips[locus];
        gate += 1;
        last_improvement = Some(flat + gate);
        rec.visit(&s, total, MoveKind::Improving, counter);
    }

    Ok(RunResult {
        fitness: l.fitness(total),
        terminal: s,
        steps: flat + gate,
        flat_count: flat,
        gate_count: gate,
        evaluations: rec.spent(counter),
        last_improvement,
        trace: rec.finish(),
    })
}
