mod support;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpn_core::semantics::enabled_steps;
use rpn_core::{fire, force_reverse, validate, Direction};
use support::*;

#[test]
fn corpus_nets_are_valid() {
    for net in corpus() {
        assert_eq!(validate(&net), vec![]);
        assert!(net.place_count() <= 6 && net.transition_count() <= 4 && net.base_count() <= 8);
    }
}

#[test]
fn fire_then_force_reverse_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0usize;
    for net in corpus() {
        walk(&net, &mut rng, 12, |before, _, _| {
            for t in net.transitions() {
                if let Ok(after) = fire(&net, before, t) {
                    let back = force_reverse(&net, &after, t).expect("just fired");
                    assert_eq!(&back, before, "{}", net.transition_name(t));
                    checked += 1;
                }
            }
        });
    }
    assert!(checked >= 1000, "only {checked} round trips");
}

#[test]
fn random_steps_preserve_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let nets = corpus();
    let mut total = 0;
    for net in nets.iter().cycle() {
        if total >= 10_000 {
            break;
        }
        total += walk(net, &mut rng, 25, |before, after, step| {
            marking_ok(net, &after.marking).unwrap();
            history_ok(after).unwrap();
            if step.direction == Direction::Forward {
                assert_eq!(after.history.global_max(), before.history.global_max() + 1);
                assert_eq!(step.key, after.history.global_max());
            }
        });
    }
}

#[test]
fn enabled_steps_match_definitions_on_small_nets() {
    let (mut states, mut nets, mut reversible) = (0usize, 0usize, 0usize);
    for net in corpus()
        .into_iter()
        .filter(|n| n.transition_count() <= 3 && n.base_count() <= 5)
    {
        nets += 1;
        for s in reachable(&net, 400) {
            let engine: BTreeSet<_> = enabled_steps(&net, &s).unwrap().into_iter().collect();
            let oracle = oracle_steps(&net, &s);
            reversible += oracle.iter().any(|(_, d)| *d == Direction::Reverse) as usize;
            assert_eq!(engine, oracle);
            states += 1;
        }
    }
    eprintln!("{nets} nets, {states} states, {reversible} with a reverse step");
    assert!(nets > 0 && states > nets && reversible > 0);
}
