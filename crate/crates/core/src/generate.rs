//! Seeded generation of small random well-formed nets, for property tests and benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::cond::{CmpOp, CondExpr};
use crate::model::{
    tokens_of, validate, ArcLabel, Bond, Contents, ElemSpec, Net, NetBuilder, PlaceId, TokenValue, TransitionSpec,
    ValueKind,
};

/// Size limits for [`random_net`]. Every generated net has at least one place, one
/// transition and one base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_bases: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_places: 6,
            max_transitions: 4,
            max_bases: 8,
        }
    }
}

/// Draws nets until one is well-formed and split-safe (see [`split_safe`]).
pub fn random_net<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Net {
    loop {
        if let Some(net) = attempt(rng, cfg) {
            if validate(&net).is_empty() && split_safe(&net) {
                return net;
            }
        }
    }
}

/// True when no transition can scatter one connected component over several places.
///
/// The bonds that may ever exist are the initial ones plus every produced one. For each
/// transition, with the bonds it breaks removed, tokens it sends to different output
/// places must lie in different components of that graph; likewise for the input places
/// that reversal sends tokens back to. Executing such a net never duplicates or drops
/// a base.
pub fn split_safe(net: &Net) -> bool {
    let mut possible: BTreeSet<Bond> = net
        .initial_marking()
        .iter()
        .flat_map(|(_, c)| c.bonds.iter().copied())
        .collect();
    for t in net.transitions() {
        possible.extend(net.transition(t).post().bonds.iter().copied());
    }
    let separated = |broken: &Contents, arcs: &BTreeMap<PlaceId, ArcLabel>| {
        let graph: Vec<Bond> = possible.iter().copied().filter(|b| !broken.contains_bond(*b)).collect();
        let component = components(net.base_count(), &graph);
        let mut owner: BTreeMap<usize, PlaceId> = BTreeMap::new();
        arcs.iter().all(|(p, label)| {
            tokens_of(label)
                .into_iter()
                .all(|a| *owner.entry(component[a.index()]).or_insert(*p) == *p)
        })
    };
    net.transitions().all(|t| {
        let tr = net.transition(t);
        separated(tr.pre(), &tr.outputs) && separated(tr.post(), &tr.inputs)
    })
}

fn components(n: usize, bonds: &[Bond]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    for bond in bonds {
        let (a, b) = bond.endpoints();
        let (ra, rb) = (find(&mut parent, a.index()), find(&mut parent, b.index()));
        parent[ra] = rb;
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}

fn attempt<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Option<Net> {
    let n_places = rng.random_range(1..=cfg.max_places.max(1));
    let n_bases = rng.random_range(1..=cfg.max_bases.max(1));
    let n_trans = rng.random_range(1..=cfg.max_transitions.max(1));
    let place = |i: usize| format!("P{i}");
    let base = |i: usize| format!("b{i}");

    let mut b = NetBuilder::new();
    b.token_type("r", ValueKind::Real).token_type("u", ValueKind::Unit);
    let mut values = Vec::with_capacity(n_bases);
    for i in 0..n_bases {
        if rng.random_bool(0.5) {
            let v = (rng.random::<f64>() * 100.0).round() / 100.0;
            values.push(Some(v));
            b.base(base(i), "r", TokenValue::Real(v));
        } else {
            values.push(None);
            b.base(base(i), "u", TokenValue::Unit);
        }
    }
    for p in 0..n_places {
        b.place(place(p));
    }

    let home: Vec<usize> = (0..n_bases).map(|_| rng.random_range(0..n_places)).collect();
    for (i, p) in home.iter().enumerate() {
        b.mark(base(i), place(*p));
    }
    for i in 0..n_bases {
        for j in i + 1..n_bases {
            if home[i] == home[j] && rng.random_bool(0.2) {
                b.mark_bond(base(i), base(j), place(home[i]));
            }
        }
    }

    for t in 0..n_trans {
        let k = rng.random_range(1..=n_bases.min(3));
        let mut tokens: Vec<usize> = (0..n_bases).collect();
        tokens.shuffle(rng);
        tokens.truncate(k);

        let mut spec = TransitionSpec::new(format!("t{t}"));
        let inputs = split(rng, &tokens, |rng, a| {
            if rng.random_bool(0.7) {
                home[a]
            } else {
                rng.random_range(0..n_places)
            }
        });
        for (p, group) in &inputs {
            let mut label: Vec<ElemSpec> = group.iter().map(|a| ElemSpec::base(base(*a))).collect();
            if group.len() >= 2 && rng.random_bool(0.3) {
                label.push(ElemSpec::bond(base(group[0]), base(group[1])));
            }
            if rng.random_bool(0.15) {
                let other = rng.random_range(0..n_bases);
                if !group.contains(&other) {
                    label.push(ElemSpec::neg_base(base(other)));
                }
            }
            spec = spec.input(place(*p), label);
        }
        let outputs = split(rng, &tokens, |rng, _| rng.random_range(0..n_places));
        for (p, group) in &outputs {
            let mut label: Vec<ElemSpec> = group.iter().map(|a| ElemSpec::base(base(*a))).collect();
            if group.len() >= 2 && rng.random_bool(0.5) {
                label.push(ElemSpec::bond(base(group[0]), base(group[1])));
            }
            spec = spec.output(place(*p), label);
        }
        spec = spec.guard(random_guard(rng, n_bases, n_places, &values));
        b.transition(spec);
    }
    b.build().ok()
}

/// Assigns each token to a place chosen by `pick`, grouped by place.
fn split<R: Rng + ?Sized>(
    rng: &mut R,
    tokens: &[usize],
    mut pick: impl FnMut(&mut R, usize) -> usize,
) -> BTreeMap<usize, Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &a in tokens {
        let p = pick(rng, a);
        groups.entry(p).or_default().push(a);
    }
    groups
}

fn random_guard<R: Rng + ?Sized>(rng: &mut R, n_bases: usize, n_places: usize, values: &[Option<f64>]) -> CondExpr {
    let base = format!("b{}", rng.random_range(0..n_bases));
    let place = format!("P{}", rng.random_range(0..n_places));
    match rng.random_range(0..10) {
        0 => CondExpr::In { base, place },
        1 => CondExpr::negate(CondExpr::In { base, place }),
        2 if n_bases >= 2 => {
            let other = format!("b{}", rng.random_range(0..n_bases));
            if other == base {
                return CondExpr::Bool(true);
            }
            CondExpr::negate(CondExpr::Bonded {
                a: base,
                b: other,
                place,
            })
        }
        3 => {
            let reals: Vec<usize> = (0..n_bases).filter(|i| values[*i].is_some()).collect();
            match reals.choose(rng) {
                Some(i) => CondExpr::compare(CmpOp::Lt, CondExpr::Val(format!("b{i}")), CondExpr::Num(0.5)),
                None => CondExpr::Bool(true),
            }
        }
        _ => CondExpr::Bool(true),
    }
}
