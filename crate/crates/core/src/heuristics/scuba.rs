use rand::Rng;

use super::{pick, start_total, HeuristicError, MoveKind, Recorder, RunResult};
use crate::genotype::Genotype;
use crate::landscape::NkqLandscape;
use crate::neighborhood::{EvalCounter, FlipScan};

/// `evol` of every neutral mutant of `s`, as `(locus, evol)` pairs in locus
/// order. Costs `N` queries per neutral mutant.
pub(super) fn neutral_evolvability(
    l: &NkqLandscape,
    s: &mut Genotype,
    scan: &FlipScan,
    counter: &mut EvalCounter,
) -> Vec<(usize, u64)> {
    scan.neutral_loci()
        .into_iter()
        .map(|i| {
            s.flip(i);
            let e = FlipScan::new(l, s, scan.total, counter).evol();
            s.flip(i);
            (i, e)
        })
        .collect()
}

/// Best neutral-neighbor evolvability and the loci reaching it, if it beats `own`.
pub(super) fn evolvability_gain(neutral: &[(usize, u64)], own: u64) -> Option<Vec<usize>> {
    let best = neutral.iter().map(|&(_, e)| e).max()?;
    (best > own).then(|| {
        neutral
            .iter()
            .filter(|&&(_, e)| e == best)
            .map(|&(i, _)| i)
            .collect()
    })
}

/// Scuba Search.
///
/// At every point the mutants are scanned once (`N` queries) and each neutral
/// mutant's own evolvability is computed (`N` queries each), so a visited
/// point costs `(1 + Degn(s)) N` queries.
///
/// While some neutral mutant has strictly higher evolvability than the
/// current point, move to one of the best such mutants (`flat_count`). Once
/// the point is a local-neutral maximum, stop if it is also a local maximum,
/// otherwise jump to a mutant whose fitness equals the point's evolvability
/// (`gate_count`).
pub fn scuba<R: Rng + ?Sized>(
    l: &NkqLandscape,
    start: &Genotype,
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
        let scan = FlipScan::new(l, &s, total, counter);
        rec.set_degree(scan.neutral_degree());
        let own = scan.evol();
        let neutral = neutral_evolvability(l, &mut s, &scan, counter);

        if let Some(best) = evolvability_gain(&neutral, own) {
            s.flip(pick(&best, rng));
            flat += 1;
            rec.visit(&s, total, MoveKind::Neutral, counter);
            continue;
        }
        if scan.is_local() {
            break;
        }
        s.flip(pick(&scan.loci_with(own), rng));
        total = own;
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

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::landscape::EpistasisMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_landscape_is_terminal_at_start() {
        let l = flat(9);
        let s0: Genotype = "101010101".parse().unwrap();
        let r = scuba(
            &l,
            &s0,
            &mut ChaCha8Rng::seed_from_u64(0),
            &mut EvalCounter::new(),
            false,
        )
        .unwrap();
        assert_eq!(r.terminal, s0);
        assert_eq!((r.flat_count, r.gate_count, r.steps), (0, 0, 0));
        assert_eq!(r.evaluations, (1 + 9) * 9);
    }

    #[test]
    fn onemax_behaves_like_hill_climbing() {
        let l = onemax(12);
        let r = scuba(
            &l,
            &Genotype::zeros(12),
            &mut ChaCha8Rng::seed_from_u64(0),
            &mut EvalCounter::new(),
            false,
        )
        .unwrap();
        assert_eq!(r.terminal, Genotype::ones(12));
        assert_eq!((r.flat_count, r.gate_count), (0, 12));
        assert_eq!(r.evaluations, 13 * 12);
    }

    #[test]
    fn per_state_cost_and_move_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for seed in 0..20 {
            let l = NkqLandscape::generate(24, 3, 2, EpistasisMode::Random, seed).unwrap();
            let s0 = Genotype::random(24, &mut rng);
            let r = scuba(&l, &s0, &mut rng, &mut EvalCounter::new(), true).unwrap();
            assert_eq!(r.steps, r.flat_count + r.gate_count);
            assert!(is_f_local(&l, &r.terminal));
            let trace = r.trace.unwrap();
            let mut ends: Vec<u64> = trace[1..].iter().map(|e| e.evaluations).collect();
            ends.push(r.evaluations);
            for (e, end) in trace.iter().zip(ends) {
                assert_eq!(end - e.evaluations, (1 + e.neutral_degree as u64) * 24);
            }
            let evol = |g: &Genotype| {
                let t = l.total_of(g);
                (0..24).map(|i| l.total_of(&g.flipped(i))).fold(t, u64::max)
            };
            for w in trace.windows(2) {
                match w[1].kind {
                    MoveKind::Neutral => {
                        assert_eq!(w[0].total, w[1].total);
                        assert!(evol(&w[1].genotype) > evol(&w[0].genotype));
                    }
                    MoveKind::Improving => assert!(w[1].total > w[0].total),
                    other => panic!("unexpected move {other:?}"),
                }
            }
        }
    }
}
