//! One-bit-flip neighborhoods, evolvability and neutrality predicates.
//!
//! `V(s)` is `s` plus its `N` one-bit mutants; only the mutants are ever
//! evaluated, `f(s)` is always supplied by the caller. `Vn(s)` keeps the
//! members of `V(s)` with exactly the same total, and `V2(s)` is the union of
//! `V` over `V(s)`, i.e. every point within Hamming distance 2.
//!
//! Every fitness query through [`NkqLandscape::evaluate`] or
//! [`NkqLandscape::delta_evaluate`] ticks the caller's [`EvalCounter`]; nothing
//! is cached between calls.

use crate::genotype::Genotype;
use crate::landscape::{Fitness, NkqLandscape};

/// Number of fitness queries issued during a run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounter {
    count: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    pub(crate) fn tick(&mut self) {
        self.count += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborhoodKind {
    /// `s` and its one-bit mutants.
    V,
    /// The members of `V(s)` with the same fitness as `s`.
    Vn,
    /// Every point within Hamming distance 2.
    V2,
}

/// The function compared by [`is_local`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Fitness,
    Evolvability,
}

/// The `N` one-bit mutants of `s`, in locus order.
pub fn flip_neighbors(s: &Genotype) -> impl Iterator<Item = Genotype> + '_ {
    (0..s.len()).map(move |i| s.flipped(i))
}

/// Totals of every one-bit mutant of a point, from a single `N`-query scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipScan {
    pub total: u64,
    pub flips: Vec<u64>,
}

impl FlipScan {
    /// Scans the `N` mutants of `s`, whose total is `total`. Costs `N` queries.
    pub fn new(l: &NkqLandscape, s: &Genotype, total: u64, counter: &mut EvalCounter) -> Self {
        let flips = (0..l.n())
            .map(|i| l.delta_evaluate(s, total, i, counter).total)
            .collect();
        Self { total, flips }
    }

    /// `evol(s)`: best total over `V(s)`, including `s` itself.
    pub fn evol(&self) -> u64 {
        self.flips.iter().copied().fold(self.total, u64::max)
    }

    /// Loci whose flip leaves the total unchanged.
    pub fn neutral_loci(&self) -> Vec<usize> {
        self.loci_with(self.total)
    }

    pub fn neutral_degree(&self) -> usize {
        self.flips.iter().filter(|&&t| t == self.total).count()
    }

    /// Loci whose flip reaches exactly `total`.
    pub fn loci_with(&self, total: u64) -> Vec<usize> {
        self.flips
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == total)
            .map(|(i, _)| i)
            .collect()
    }

    /// `isLocal(s, f, V)`: no mutant is strictly fitter.
    pub fn is_local(&self) -> bool {
        self.flips.iter().all(|&t| t <= self.total)
    }
}

/// Best fitness over `V(s)`. Costs `N` queries.
pub fn evol(l: &NkqLandscape, s: &Genotype, f_s: Fitness, counter: &mut EvalCounter) -> Fitness {
    l.fitness(FlipScan::new(l, s, f_s.total, counter).evol())
}

/// Best fitness over `V2(s)`. Costs `N + N(N-1)/2` queries: each distance-1
/// and distance-2 point once.
pub fn evol2(l: &NkqLandscape, s: &Genotype, f_s: Fitness, counter: &mut EvalCounter) -> Fitness {
    let mut scratch = s.clone();
    let mut best = f_s.total;
    for i in 0..l.n() {
        let t_i = l.delta_evaluate(&scratch, f_s.total, i, counter).total;
        best = best.max(t_i);
        scratch.flip(i);
        for j in i + 1..l.n() {
            best = best.max(l.delta_evaluate(&scratch, t_i, j, counter).total);
        }
        scratch.flip(i);
    }
    l.fitness(best)
}

/// Members of `Vn(s) \ {s}` in locus order. Costs `N` queries.
pub fn neutral_neighbors(
    l: &NkqLandscape,
    s: &Genotype,
    f_s: Fitness,
    counter: &mut EvalCounter,
) -> Vec<Genotype> {
    FlipScan::new(l, s, f_s.total, counter)
        .neutral_loci()
        .into_iter()
        .map(|i| s.flipped(i))
        .collect()
}

/// `Degn(s)`, the number of neutral one-bit mutants. Costs `N` queries.
pub fn neutral_degree(
    l: &NkqLandscape,
    s: &Genotype,
    f_s: Fitness,
    counter: &mut EvalCounter,
) -> usize {
    FlipScan::new(l, s, f_s.total, counter).neutral_degree()
}

/// Members of `W(s)` other than `s` itself, each with its total.
fn members(
    l: &NkqLandscape,
    s: &Genotype,
    total: u64,
    w: NeighborhoodKind,
    counter: &mut EvalCounter,
) -> Vec<(Genotype, u64)> {
    match w {
        NeighborhoodKind::V => {
            let scan = FlipScan::new(l, s, total, counter);
            scan.flips
                .iter()
                .enumerate()
                .map(|(i, &t)| (s.flipped(i), t))
                .collect()
        }
        NeighborhoodKind::Vn => {
            let scan = FlipScan::new(l, s, total, counter);
            scan.neutral_loci()
                .into_iter()
                .map(|i| (s.flipped(i), total))
                .collect()
        }
        NeighborhoodKind::V2 => {
            let mut out = Vec::with_capacity(l.n() * (l.n() + 1) / 2);
            for i in 0..l.n() {
                let near = s.flipped(i);
                let t_i = l.delta_evaluate(s, total, i, counter).total;
                for j in i + 1..l.n() {
                    let t_ij = l.delta_evaluate(&near, t_i, j, counter).total;
                    out.push((near.flipped(j), t_ij));
                }
                out.push((near, t_i));
            }
            out
        }
    }
}

/// `isLocal(s, g, W)`: every `s'` in `W(s)` has `g(s') <= g(s)`.
///
/// `isLocal(s, f, Vn)` holds by definition and is answered without queries.
/// With `g = evol`, each inspected point costs an additional `N` queries.
pub fn is_local(
    l: &NkqLandscape,
    s: &Genotype,
    f_s: Fitness,
    g: Objective,
    w: NeighborhoodKind,
    counter: &mut EvalCounter,
) -> bool {
    if g == Objective::Fitness && w == NeighborhoodKind::Vn {
        return true;
    }
    let points = members(l, s, f_s.total, w, counter);
    match g {
        Objective::Fitness => points.iter().all(|&(_, t)| t <= f_s.total),
        Objective::Evolvability => {
            let own = FlipScan::new(l, s, f_s.total, counter).evol();
            points
                .iter()
                .all(|(p, t)| FlipScan::new(l, p, *t, counter).evol() <= own)
        }
    }
}
