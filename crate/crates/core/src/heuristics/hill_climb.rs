use rand::Rng;

use super::{pick, start_total, HeuristicError, MoveKind, Recorder, RunResult};
use crate::genotype::Genotype;
use crate::landscape::NkqLandscape;
use crate::neighborhood::{EvalCounter, FlipScan};

/// Best-improvement hill climbing on the one-bit neighborhood.
///
/// Stops as soon as no mutant is strictly fitter (plateaus stop the climb).
/// Each visited point costs one `N`-query scan, so a run spends exactly
/// `N * (steps + 1)` evaluations.
pub fn hill_climb<R: Rng + ?Sized>(
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
    let mut steps = 0;

    loop {
        let scan = FlipScan::new(l, &s, total, counter);
        rec.set_degree(scan.neutral_degree());
        if scan.is_local() {
            break;
        }
        let best = scan.evol();
        let locus = pick(&scan.loci_with(best), rng);
        s.flip(locus);
        total = best;
        steps += 1;
        rec.visit(&s, total, MoveKind::Improving, counter);
    }

    Ok(RunResult {
        fitness: l.fitness(total),
        terminal: s,
        steps,
        flat_count: 0,
        gate_count: steps,
        evaluations: rec.spent(counter),
        last_improvement: (steps > 0).then_some(steps),
        trace: rec.finish(),
    })
}

/// Hill climbing over the distance-2 neighborhood, moving one bit at a time.
///
/// At each point the full distance-2 ball is scanned (`N + N(N-1)/2`
/// queries). If the best point of the ball is a direct mutant the climber
/// moves there; otherwise it moves to a mutant whose own neighborhood holds
/// that best point, which may be less fit than the current point. Stops once
/// nothing within distance 2 is strictly fitter.
pub fn hill_climb2<R: Rng + ?Sized>(
    l: &NkqLandscape,
    start: &Genotype,
    rng: &mut R,
    counter: &mut EvalCounter,
    trace: bool,
) -> Result<RunResult, HeuristicError> {
    let n = l.n();
    let mut total = start_total(l, start)?;
    let mut s = start.clone();
    let mut rec = Recorder::new(trace, counter);
    rec.visit(&s, total, MoveKind::Start, counter);
    let (mut steps, mut flat, mut gate) = (0, 0, 0);
    let mut last_improvement = None;

    let mut flips = vec![0u64; n];
    // Per mutant `i`: the best total over the ball around it, i.e. `evol(s ^ i)`.
    let mut mutant_evol = vec![0u64; n];

    loop {
        for (i, slot) in flips.iter_mut().enumerate() {
            *slot = l.delta_evaluate(&s, total, i, counter).total;
        }
        for i in 0..n {
            mutant_evol[i] = total.max(flips[i]);
        }
        for i in 0..n {
            s.flip(i);
            for j in i + 1..n {
                let t = l.delta_evaluate(&s, flips[i], j, counter).total;
                mutant_evol[i] = mutant_evol[i].max(t);
                mutant_evol[j] = mutant_evol[j].max(t);
            }
            s.flip(i);
        }
        rec.set_degree(flips.iter().filter(|&&t| t == total).count());

        let evol = flips.iter().copied().fold(total, u64::max);
        let evol2 = mutant_evol.iter().copied().fold(evol, u64::max);
        if evol2 <= total {
            break;
        }
        let candidates: Vec<usize> = if evol == evol2 {
            (0..n).filter(|&i| flips[i] == evol2).collect()
        } else {
            (0..n).filter(|&i| mutant_evol[i] == evol2).collect()
        };
        let locus = pick(&candidates, rng);
        let next = flips[locus];
        let kind = match next.cmp(&total) {
            std::cmp::Ordering::Greater => {
                gate += 1;
                MoveKind::Improving
            }
            std::cmp::Ordering::Equal => {
                flat += 1;
                MoveKind::Neutral
            }
            std::cmp::Ordering::Less => MoveKind::Worsening,
        };
        s.flip(locus);
        steps += 1;
        if next > total {
            last_improvement = Some(steps);
        }
        total = next;
        rec.visit(&s, total, kind, counter);
    }

    Ok(RunResult {
        fitness: l.fitness(total),
        terminal: s,
        steps,
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
    fn hc_onemax_from_zeros() {
        let l = onemax(10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut c = EvalCounter::new();
        let r = hill_climb(&l, &Genotype::zeros(10), &mut rng, &mut c, true).unwrap();
        assert_eq!(r.terminal, Genotype::ones(10));
        assert_eq!(r.steps, 10);
        assert_eq!(r.evaluations, 10 * 11);
        assert_eq!(c.count(), 110);
        assert_eq!(r.trace.unwrap().len(), 11);
    }

    #[test]
    fn hc_stops_immediately_on_flat_landscape() {
        let l = flat(7);
        let s0: Genotype = "0101100".parse().unwrap();
        let r = hill_climb(
            &l,
            &s0,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut EvalCounter::new(),
            false,
        )
        .unwrap();
        assert_eq!(r.terminal, s0);
        assert_eq!(r.steps, 0);
        assert_eq!(r.evaluations, 7);
    }

    #[test]
    fn hc_rejects_wrong_length() {
        let l = onemax(5);
        let err = hill_climb(
            &l,
            &Genotype::zeros(4),
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut EvalCounter::new(),
            false,
        );
        assert!(matches!(err, Err(HeuristicError::Landscape(_))));
    }

    #[test]
    fn hc2_onemax_from_zeros() {
        let l = onemax(6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = hill_climb2(
            &l,
            &Genotype::zeros(6),
            &mut rng,
            &mut EvalCounter::new(),
            true,
        )
        .unwrap();
        assert_eq!(r.terminal, Genotype::ones(6));
        assert_eq!(r.steps, 6);
        assert_eq!(r.evaluations, 7 * (6 + 15));
        let trace = r.trace.unwrap();
        assert!(trace.windows(2).all(|w| w[1].total == w[0].total + 1));
    }

    #[test]
    fn terminals_are_local_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..10 {
            let l = NkqLandscape::generate(10, 3, 2, EpistasisMode::Random, seed).unwrap();
            let s0 = Genotype::random(10, &mut rng);
            let hc = hill_climb(&l, &s0, &mut rng, &mut EvalCounter::new(), false).unwrap();
            assert!(is_f_local(&l, &hc.terminal));
            let hc2 = hill_climb2(&l, &s0, &mut rng, &mut EvalCounter::new(), false).unwrap();
            assert!(is_f_local2(&l, &hc2.terminal));
            assert!(is_f_local(&l, &hc2.terminal));
            assert!(hc2.fitness.total >= l.total_of(&s0));
        }
    }

    #[test]
    fn hc2_can_step_down_to_cross_a_valley() {
        // f: 00 -> 3, 10 -> 0, 01 -> 0, 11 -> 4 over two loci, built from a
        // single K=1 component on locus 0 and a zero component on locus 1.
        let l = NkqLandscape::from_parts(
            1,
            5,
            EpistasisMode::Random,
            0,
            vec![vec![1], vec![0]],
            vec![vec![3, 0, 0, 4], vec![0, 0, 0, 0]],
        )
        .unwrap();
        let r = hill_climb2(
            &l,
            &Genotype::zeros(2),
            &mut ChaCha8Rng::seed_from_u64(0),
            &mut EvalCounter::new(),
            true,
        )
        .unwrap();
        assert_eq!(r.terminal, Genotype::ones(2));
        let kinds: Vec<MoveKind> = r.trace.unwrap().iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            [MoveKind::Start, MoveKind::Worsening, MoveKind::Improving]
        );
        let hc = hill_climb(
            &l,
            &Genotype::zeros(2),
            &mut ChaCha8Rng::seed_from_u64(0),
            &mut EvalCounter::new(),
            false,
        )
        .unwrap();
        assert_eq!(hc.terminal, Genotype::zeros(2));
    }

    #[test]
    fn same_seed_same_run() {
        let l = NkqLandscape::generate(32, 4, 3, EpistasisMode::Random, 9).unwrap();
        let s0 = Genotype::random(32, &mut ChaCha8Rng::seed_from_u64(3));
        let a = hill_climb2(
            &l,
            &s0,
            &mut ChaCha8Rng::seed_from_u64(4),
            &mut EvalCounter::new(),
            true,
        )
        .unwrap();
        let b = hill_climb2(
            &l,
            &s0,
            &mut ChaCha8Rng::seed_from_u64(4),
            &mut EvalCounter::new(),
            true,
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
