//! Local search heuristics over NKq landscapes.
//!
//! All heuristics take the start point, a seeded generator and the run's
//! evaluation counter. Ties between equally good moves are broken uniformly at
//! random with that generator, so a run is reproducible from its seed. The
//! start point's own fitness is computed outside the counter; every later
//! fitness query is counted.

mod generic;
mod hill_climb;
mod netcrawler;
mod scuba;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::genotype::Genotype;
use crate::landscape::{Fitness, LandscapeError, NkqLandscape};
use crate::neighborhood::EvalCounter;

pub use generic::{
    generic_scuba, GenericScubaConfig, JumpImprover, NeutralImprover, NeutralStop, Termination,
};
pub use hill_climb::{hill_climb, hill_climb2};
pub use netcrawler::{netcrawler, netcrawler_proposal, Proposal, DEFAULT_STEP_MAX};
pub use scuba::scuba;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeuristicError {
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error("step budget must be positive")]
    EmptyBudget,
    #[error("jump improver found no fitter neighbor of non-local point {0}")]
    JumpFailed(Genotype),
}

/// How a trace entry was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Start,
    /// Moved to a strictly fitter point.
    Improving,
    /// Moved to a point of equal fitness.
    Neutral,
    /// Moved to a less fit point (two-step hill climbing only).
    Worsening,
    /// Proposal refused; the state is unchanged (Netcrawler only).
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub genotype: Genotype,
    pub total: u64,
    pub kind: MoveKind,
    /// `Degn` of `genotype`.
    pub neutral_degree: usize,
    /// Run evaluations already spent when this entry was reached.
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub terminal: Genotype,
    pub fitness: Fitness,
    pub steps: u64,
    /// Neutral moves.
    pub flat_count: u64,
    /// Fitness-improving moves.
    pub gate_count: u64,
    pub evaluations: u64,
    /// Step index of the last strict improvement, if any.
    pub last_improvement: Option<u64>,
    pub trace: Option<Vec<TraceEntry>>,
}

/// The four heuristics compared in sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeuristicKind {
    HillClimb,
    HillClimb2,
    Netcrawler,
    Scuba,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 4] = [
        HeuristicKind::HillClimb,
        HeuristicKind::HillClimb2,
        HeuristicKind::Netcrawler,
        HeuristicKind::Scuba,
    ];

    pub fn label(self) -> &'static str {
        match self {
            HeuristicKind::HillClimb => "hc",
            HeuristicKind::HillClimb2 => "hc2",
            HeuristicKind::Netcrawler => "nc",
            HeuristicKind::Scuba => "ss",
        }
    }

    /// Stable numeric id used in seed derivation.
    pub fn id(self) -> u64 {
        match self {
            HeuristicKind::HillClimb => 0,
            HeuristicKind::HillClimb2 => 1,
            HeuristicKind::Netcrawler => 2,
            HeuristicKind::Scuba => 3,
        }
    }

    pub fn run<R: Rng + ?Sized>(
        self,
        l: &NkqLandscape,
        start: &Genotype,
        rng: &mut R,
        counter: &mut EvalCounter,
        step_max: u64,
        trace: bool,
    ) -> Result<RunResult, HeuristicError> {
        match self {
            HeuristicKind::HillClimb => hill_climb(l, start, rng, counter, trace),
            HeuristicKind::HillClimb2 => hill_climb2(l, start, rng, counter, trace),
            HeuristicKind::Netcrawler => netcrawler(l, start, rng, step_max, counter, trace),
            HeuristicKind::Scuba => scuba(l, start, rng, counter, trace),
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HeuristicKind::ALL
            .into_iter()
            .find(|h| h.label() == s)
            .ok_or_else(|| format!("unknown heuristic `{s}` (expected hc|hc2|nc|ss)"))
    }
}

/// Optional trace collection plus run-relative evaluation bookkeeping.
pub(crate) struct Recorder {
    base: u64,
    entries: Option<Vec<TraceEntry>>,
}

impl Recorder {
    pub(crate) fn new(enabled: bool, counter: &EvalCounter) -> Self {
        Self {
            base: counter.count(),
            entries: enabled.then(Vec::new),
        }
    }

    pub(crate) fn enabled(&self) -> bool {
        self.entries.is_some()
    }

    pub(crate) fn visit(
        &mut self,
        s: &Genotype,
        total: u64,
        kind: MoveKind,
        counter: &EvalCounter,
    ) {
        if let Some(entries) = &mut self.entries {
            entries.push(TraceEntry {
                genotype: s.clone(),
                total,
                kind,
                neutral_degree: 0,
                evaluations: counter.count() - self.base,
            });
        }
    }

    /// Fills in `Degn` of the most recent entry once its scan is known.
    pub(crate) fn set_degree(&mut self, degree: usize) {
        if let Some(last) = self.entries.as_mut().and_then(|e| e.last_mut()) {
            last.neutral_degree = degree;
        }
    }

    pub(crate) fn spent(&self, counter: &EvalCounter) -> u64 {
        counter.count() - self.base
    }

    pub(crate) fn finish(self) -> Option<Vec<TraceEntry>> {
        self.entries
    }
}

pub(crate) fn start_total(l: &NkqLandscape, start: &Genotype) -> Result<u64, HeuristicError> {
    l.check_genotype(start)?;
    Ok(l.total_of(start))
}

pub(crate) fn pick<R: Rng + ?Sized>(candidates: &[usize], rng: &mut R) -> usize {
    *candidates.choose(rng).expect("non-empty candidate set")
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::landscape::EpistasisMode;

    pub fn onemax(n: usize) -> NkqLandscape {
        NkqLandscape::from_parts(
            0,
            2,
            EpistasisMode::Random,
            0,
            vec![vec![]; n],
            vec![vec![0, 1]; n],
        )
        .unwrap()
    }

    pub fn flat(n: usize) -> NkqLandscape {
        NkqLandscape::from_parts(
            0,
            4,
            EpistasisMode::Random,
            0,
            vec![vec![]; n],
            vec![vec![2, 2]; n],
        )
        .unwrap()
    }

    pub fn is_f_local(l: &NkqLandscape, s: &Genotype) -> bool {
        let t = l.total_of(s);
        (0..l.n()).all(|i| l.total_of(&s.flipped(i)) <= t)
    }

    pub fn is_f_local2(l: &NkqLandscape, s: &Genotype) -> bool {
        let t = l.total_of(s);
        (0..l.n()).all(|i| {
            let a = s.flipped(i);
            l.total_of(&a) <= t && (0..l.n()).all(|j| j == i || l.total_of(&a.flipped(j)) <= t)
        })
    }
}
