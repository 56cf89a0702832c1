use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::format::{dump_marking_inline, load_str, save};
use crate::model::validate;
use crate::semantics::{enabled_steps, step, Direction};

const FIG1B: &str = include_str!("../../../../nets/fig1b.rpn");

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// det of a 3x3 complex matrix by cofactor expansion along the first row.
fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn capacity_by_cofactors(h: &ChannelMatrix, rho: f64, n_ts: usize, n_r: usize) -> f64 {
    let scale = rho * n_r as f64 / n_ts as f64;
    let mut g = [[c(0.0, 0.0); 3]; 3];
    for (a, row) in g.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let mut s = c(0.0, 0.0);
            for u in 0..n_r {
                s += h.get(a, u) * h.get(b, u).conj();
            }
            *entry = s * scale + if a == b { c(1.0, 0.0) } else { c(0.0, 0.0) };
        }
    }
    let d = det3(&g);
    assert!(d.im.abs() < 1e-9 * d.re.abs());
    d.re.log2()
}

#[test]
fn zero_channel_has_zero_capacity() {
    for rows in 1..5 {
        let h = ChannelMatrix::zeros(rows, 3);
        assert_eq!(capacity(&h, 10.0, rows, 3, &[1.0; 3]).unwrap(), 0.0);
    }
}

#[test]
fn identity_channel_closed_form() {
    for n in 1..6 {
        for rho in [0.5, 1.0, 10.0, 100.0] {
            let got = capacity(&ChannelMatrix::identity(n), rho, n, n, &vec![1.0; n]).unwrap();
            let want = n as f64 * (1.0 + rho * n as f64 / n as f64).log2();
            assert!((got - want).abs() < 1e-9, "n={n} rho={rho}");
        }
    }
}

#[test]
fn matches_cofactor_expansion() {
    let mut r = rng(42);
    for _ in 0..200 {
        let h = ChannelMatrix::rayleigh(3, 2, &mut r);
        let got = capacity(&h, 10.0, 3, 2, &[1.0, 1.0]).unwrap();
        let want = capacity_by_cofactors(&h, 10.0, 3, 2);
        assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn single_user_closed_form() {
    let mut r = rng(3);
    for rows in 1..6 {
        let h = ChannelMatrix::rayleigh(rows, 1, &mut r);
        let energy: f64 = (0..rows).map(|i| h.squared_row_norm(i)).sum();
        let got = capacity(&h, 10.0, rows, 1, &[1.0]).unwrap();
        let want = (1.0 + 10.0 * (1.0 / rows as f64) * energy).log2();
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn row_permutations_do_not_matter() {
    let mut r = rng(9);
    let h = ChannelMatrix::rayleigh(5, 3, &mut r);
    let base = capacity(&h, 5.0, 5, 3, &[1.0; 3]).unwrap();
    for order in [[4, 3, 2, 1, 0], [1, 0, 3, 2, 4], [2, 4, 0, 1, 3]] {
        let permuted = capacity(&h.select_rows(&order), 5.0, 5, 3, &[1.0; 3]).unwrap();
        assert!((permuted - base).abs() < 1e-9);
    }
}

#[test]
fn zero_rows_are_neutral() {
    let mut r = rng(10);
    let h = ChannelMatrix::rayleigh(2, 2, &mut r);
    let mut padded = ChannelMatrix::zeros(4, 2);
    padded.row_mut(1).copy_from_slice(h.row(0));
    padded.row_mut(3).copy_from_slice(h.row(1));
    let a = capacity(&h, 10.0, 2, 2, &[1.0, 1.0]).unwrap();
    let b = capacity(&padded, 10.0, 2, 2, &[1.0, 1.0]).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn power_weights_users() {
    // With one user switched off, only the other column contributes.
    let h = ChannelMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 2.0)]]);
    let got = capacity(&h, 1.0, 1, 2, &[1.0, 0.0]).unwrap();
    assert!((got - 3f64.log2()).abs() < 1e-12);
}

#[test]
fn hc_collects_active_rows() {
    let anet = four_ring(&[0, 2], rng(1));
    let m = anet.net.initial_marking();
    // Antennas 0 and 2 are homed in the first neighborhood.
    let hc = build_hc(m, anet.hood_places[0], &anet.antenna_bases, &anet.channel);
    for i in 0..4 {
        let expected = if i == 0 || i == 2 {
            anet.channel.row(i).to_vec()
        } else {
            vec![c(0.0, 0.0); 2]
        };
        assert_eq!(hc.row(i), &expected[..]);
    }
    // A_1 holds only the power token of the switched-on antenna 0.
    let empty = build_hc(m, anet.antenna_places[0], &anet.antenna_bases, &anet.channel);
    assert_eq!(empty, ChannelMatrix::zeros(4, 2));
}

fn four_ring(on: &[usize], mut r: ChaCha8Rng) -> AntennaNet {
    let top = Topology::ring(4, 3, 2, on.iter().copied()).unwrap();
    let h = ChannelMatrix::rayleigh(4, 2, &mut r);
    build_net(&top, &h, &CapacityParams::new(10.0, on.len(), 2)).unwrap()
}

#[test]
fn ring_topologies() {
    assert_eq!(ring_neighborhoods(4, 3, 2).unwrap(), vec![vec![0, 1, 2], vec![0, 2, 3]]);
    assert_eq!(
        ring_neighborhoods(16, 8, 4).unwrap(),
        vec![
            (0..8).collect::<Vec<_>>(),
            (4..12).collect(),
            (8..16).collect(),
            vec![0, 1, 2, 3, 12, 13, 14, 15]
        ]
    );
    assert_eq!(ring_neighborhoods(5, 8, 4).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
    assert!(ring_neighborhoods(4, 0, 1).is_err());
}

#[test]
fn topology_rejects_bad_input() {
    let hoods = vec![vec![0, 1], vec![2, 3]];
    assert!(Topology::new(4, hoods.clone(), [(0, 2)], [0]).is_err());
    assert!(Topology::new(4, hoods.clone(), [(1, 1)], [0]).is_err());
    assert!(Topology::new(4, hoods.clone(), [(0, 1)], [7]).is_err());
    assert!(Topology::new(4, vec![vec![0, 9]], [], [0]).is_err());
    assert!(Topology::new(4, vec![vec![0, 1]], [], [3]).is_err());
    let ok = Topology::new(4, hoods, [(1, 0), (2, 3)], [0, 3]).unwrap();
    assert_eq!(ok.links().iter().copied().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
}

#[test]
fn build_net_checks_dimensions() {
    let top = Topology::ring(4, 3, 2, [0]).unwrap();
    let h = ChannelMatrix::zeros(3, 2);
    assert!(matches!(
        build_net(&top, &h, &CapacityParams::new(1.0, 1, 2)),
        Err(AntennaError::InvalidTopology(_))
    ));
    let h = ChannelMatrix::zeros(4, 2);
    assert!(matches!(
        build_net(&top, &h, &CapacityParams::new(1.0, 2, 2)),
        Err(AntennaError::InvalidTopology(_))
    ));
}

/// The transition block of `name` in the canonical text of `net`.
fn block(text: &str, name: &str) -> String {
    let start = text.find(&format!("  {name}:\n")).unwrap();
    let rest = &text[start..];
    let end = rest[3..].find("\n  t").map_or(rest.len(), |i| i + 4);
    rest[..end].to_owned()
}

#[test]
fn two_antennas_give_the_two_antenna_mechanism() {
    let h = ChannelMatrix::from_rows(&[vec![c(0.5, 0.0)], vec![c(1.0, 0.0)]]);
    let top = Topology::fully_linked(2, vec![vec![0, 1]], [0]).unwrap();
    let params = CapacityParams::new(10.0, 1, 1);
    let built = build_net(&top, &h, &params).unwrap();
    assert!(validate(&built.net).is_empty());
    assert_eq!(built.net.transition_count(), 2);

    let reference = load_str(FIG1B, Arc::new(capacity_registry(&params))).unwrap();
    let rename = |s: &str| {
        s.replace("t_ij", "t_1_2_1_1")
            .replace("A_i", "A_1")
            .replace("A_j", "A_2")
            .replace("M_k", "M_1")
            .replace("a_i", "a_1")
            .replace("a_j", "a_2")
            .replace("m_k", "m_1")
            .replace("{p}", "{p_1}")
            .replace("p;", "p_1;")
    };
    assert_eq!(
        block(&save(&built.net), "t_1_2_1_1"),
        rename(&block(&save(&reference), "t_ij"))
    );
    assert_eq!(
        dump_marking_inline(&built.net, built.net.initial_marking()),
        rename(&dump_marking_inline(&reference, reference.initial_marking()))
    );

    // Same behavior: one firing moves the power token to the stronger antenna.
    let t = built.net.transition_id("t_1_2_1_1").unwrap();
    let s0 = built.net.initial_state();
    assert_eq!(enabled_steps(&built.net, &s0).unwrap(), vec![(t, Direction::Forward)]);
    let (s1, _) = step(&built.net, &s0, t, Direction::Forward).unwrap();
    assert_eq!(built.selected(&s1.marking), vec![1]);
    assert!(enabled_steps(&built.net, &s1).unwrap().is_empty());
}

#[test]
fn all_antennas_on_is_stuck() {
    let anet = four_ring(&[0, 1, 2, 3], rng(5));
    assert!(validate(&anet.net).is_empty());
    assert!(enabled_steps(&anet.net, &anet.net.initial_state()).unwrap().is_empty());
}

#[test]
fn built_nets_are_well_formed() {
    for (seed, on) in [(1, vec![0]), (2, vec![1, 3]), (3, vec![0, 1, 2])] {
        let anet = four_ring(&on, rng(seed));
        assert_eq!(validate(&anet.net), vec![]);
        assert_eq!(anet.selected(anet.net.initial_marking()), on);
    }
    let top = Topology::ring(16, 8, 4, [0, 5, 9, 14]).unwrap();
    let h = ChannelMatrix::rayleigh(16, 4, &mut rng(4));
    let anet = build_net(&top, &h, &CapacityParams::new(10.0, 4, 4)).unwrap();
    assert_eq!(validate(&anet.net), vec![]);
}

#[test]
fn link_names_round_trip() {
    assert_eq!(parse_link_name(&link_transition(0, 11, 3, 7)), Some((0, 11, 3, 7)));
    assert_eq!(parse_link_name("t_1_2_3"), None);
    assert_eq!(parse_link_name("t_0_1_1_1"), None);
    assert_eq!(parse_link_name("x_1_2_3_4"), None);
}

#[test]
fn guard_text() {
    assert_eq!(
        guard_for(0, 1, 2).to_string(),
        "capacity_with(tokens_in(M_3, radio), a_1, a_2) < capacity_with(tokens_in(M_3, radio), a_2, a_1)"
    );
}

fn exhaustive_oracle(h: &ChannelMatrix, params: &CapacityParams) -> f64 {
    let n = h.rows();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != params.n_ts {
            continue;
        }
        let rows: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        best = best.max(params.capacity_of(h, &rows).unwrap());
    }
    best
}

#[test]
fn greedy_first_pick_is_strongest_row_for_one_user() {
    let mut r = rng(77);
    for _ in 0..50 {
        let h = ChannelMatrix::rayleigh(6, 1, &mut r);
        let g = greedy_baseline(&h, &CapacityParams::new(10.0, 1, 1)).unwrap();
        let strongest = (0..6)
            .max_by(|a, b| h.squared_row_norm(*a).total_cmp(&h.squared_row_norm(*b)))
            .unwrap();
        assert_eq!(g.selected, vec![strongest]);
    }
}

#[test]
fn greedy_never_beats_exhaustive() {
    let mut r = rng(78);
    let mut optimal = 0;
    for _ in 0..100 {
        let h = ChannelMatrix::rayleigh(4, 2, &mut r);
        let params = CapacityParams::new(10.0, 2, 2);
        let g = greedy_baseline(&h, &params).unwrap();
        let best = exhaustive_oracle(&h, &params);
        let e = exhaustive_optimum(&h, &params, EXHAUSTIVE_LIMIT).unwrap().unwrap();
        assert!((e.capacity - best).abs() < 1e-12);
        assert!(g.capacity <= best + 1e-12);
        assert_eq!(g.selected.len(), 2);
        if (g.capacity - best).abs() < 1e-12 {
            optimal += 1;
        }
    }
    assert!(optimal > 50, "greedy optimal on {optimal}/100");
}

#[test]
fn greedy_with_everything_selected() {
    let h = ChannelMatrix::rayleigh(5, 3, &mut rng(79));
    let params = CapacityParams::new(10.0, 5, 3);
    let g = greedy_baseline(&h, &params).unwrap();
    assert_eq!(g.selected, vec![0, 1, 2, 3, 4]);
    assert!((g.capacity - capacity(&h, 10.0, 5, 3, &[1.0; 3]).unwrap()).abs() < 1e-12);
}

#[test]
fn exhaustive_respects_limit() {
    let h = ChannelMatrix::rayleigh(20, 2, &mut rng(80));
    assert!(exhaustive_optimum(&h, &CapacityParams::new(1.0, 10, 2), 1000)
        .unwrap()
        .is_none());
}

#[test]
fn two_antenna_experiment_picks_stronger_antenna() {
    for seed in 0..20 {
        let mut cfg = ExperimentConfig::new(2, 1, 1, 10.0);
        cfg.runs = 1;
        cfg.channel_seed = seed;
        cfg.sched_seed = seed + 100;
        let out = run_realization(&cfg, 0).unwrap();
        let h = &out.channel;
        let strongest = if h.squared_row_norm(1) > h.squared_row_norm(0) {
            1
        } else {
            0
        };
        assert_eq!(out.runs[0].result.selected, vec![strongest]);
        assert!(out.runs[0].result.converged);
    }
}

#[test]
fn experiment_runs_are_consistent() {
    let mut cfg = ExperimentConfig::new(8, 2, 3, 10.0);
    cfg.realizations = 3;
    cfg.window = 4;
    cfg.stride = 2;
    cfg.channel_seed = 1;
    cfg.sched_seed = 2;
    let outcomes = run_experiment(&cfg).unwrap();
    assert_eq!(outcomes.len(), 3);
    for o in &outcomes {
        assert_eq!(o.runs.len(), 5);
        let exhaustive = o.exhaustive.as_ref().unwrap().capacity;
        for r in &o.runs {
            assert_eq!(r.result.selected.len(), 3);
            assert!(r.result.capacity <= o.best_capacity());
            assert!(r.result.capacity <= exhaustive + 1e-9);
            replay_is_monotone(&cfg, o, r);
        }
        assert!(o.greedy.capacity <= exhaustive + 1e-9);
    }
    let csv = experiment_csv(&cfg, &outcomes);
    assert_eq!(csv.lines().count(), 1 + 3 * 5);
    assert!(csv.starts_with(EXPERIMENT_HEADER));
    assert_eq!(csv, experiment_csv(&cfg, &run_experiment(&cfg).unwrap()));
}

fn replay_is_monotone(cfg: &ExperimentConfig, o: &RealizationOutcome, r: &RunOutcome) {
    let anet = run_net(cfg, &o.channel, &r.initial_on).unwrap();
    let mut s = anet.net.initial_state();
    for st in &r.trace {
        let link = *anet.link(st.transition).unwrap();
        let before = anet.local_capacity(&s.marking, link.hood).unwrap();
        let (next, _) = step(&anet.net, &s, st.transition, st.direction).unwrap();
        let after = anet.local_capacity(&next.marking, link.hood).unwrap();
        match st.direction {
            Direction::Forward => assert!(after > before),
            Direction::Reverse => assert!(after >= before),
        }
        s = next;
    }
    assert_eq!(anet.selected(&s.marking), r.result.selected);
}

#[test]
fn config_validation() {
    assert!(ExperimentConfig::new(4, 2, 0, 1.0).validate().is_err());
    assert!(ExperimentConfig::new(4, 2, 5, 1.0).validate().is_err());
    assert!(ExperimentConfig::new(4, 0, 2, 1.0).validate().is_err());
    let mut cfg = ExperimentConfig::new(4, 2, 2, 1.0);
    cfg.realizations = 0;
    assert!(cfg.validate().is_err());
    let mut cfg = ExperimentConfig::new(4, 2, 2, 1.0);
    cfg.power = Some(vec![1.0]);
    assert!(cfg.validate().is_err());
    assert_eq!(ExperimentConfig::new(4, 2, 2, 1.0).max_steps(), 200);
}
