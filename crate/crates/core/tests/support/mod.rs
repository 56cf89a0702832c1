//! Shared fixtures for property tests: a seeded corpus of random nets and a literal,
//! independently written enabledness oracle.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpn_core::cond::{eval, EvalContext, Value};
use rpn_core::generate::{random_net, GenConfig};
use rpn_core::model::{ArcLabel, BaseId, Bond, Contents, Marking};
use rpn_core::semantics::enabled_steps;
use rpn_core::{step, Direction, Net, State, TransitionId};

pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const CORPUS_SIZE: usize = 1000;

pub fn corpus() -> Vec<Net> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| random_net(&mut rng, &GenConfig::default()))
        .collect()
}

/// Every base exactly once, every bond closed in its place and placed once.
pub fn marking_ok(net: &Net, m: &Marking) -> Result<(), String> {
    let mut seen_bases = vec![0usize; net.base_count()];
    let mut seen_bonds = HashSet::new();
    for (p, c) in m.iter() {
        for b in &c.bases {
            seen_bases[b.index()] += 1;
        }
        for bond in &c.bonds {
            let (a, b) = bond.endpoints();
            if !(c.bases.contains(&a) && c.bases.contains(&b)) {
                return Err(format!(
                    "bond {} not closed in {}",
                    net.bond_name(*bond),
                    net.place_name(p)
                ));
            }
            if !seen_bonds.insert(*bond) {
                return Err(format!("bond {} placed twice", net.bond_name(*bond)));
            }
        }
    }
    match seen_bases.iter().position(|n| *n != 1) {
        Some(i) => Err(format!("a base occurs {} times", seen_bases[i])),
        None => Ok(()),
    }
}

pub fn history_ok(s: &State) -> Result<(), String> {
    let mut keys = HashSet::new();
    for (_, ks) in s.history.iter() {
        for k in ks {
            if *k == 0 || !keys.insert(*k) {
                return Err(format!("history key {k} repeated or zero"));
            }
        }
    }
    Ok(())
}

fn closure(label: &Contents) -> Contents {
    let mut out = label.clone();
    for bond in &label.bonds {
        let (a, b) = bond.endpoints();
        out.bases.insert(a);
        out.bases.insert(b);
    }
    out
}

fn tokens(label: &ArcLabel) -> BTreeSet<BaseId> {
    closure(&label.positive).bases
}

/// Reachability through bonds lying entirely inside `c`, computed as a fixpoint.
fn component(a: BaseId, c: &Contents) -> Contents {
    let mut out = Contents::default();
    if !c.bases.contains(&a) {
        return out;
    }
    out.bases.insert(a);
    let mut changed = true;
    while changed {
        changed = false;
        for bond in &c.bonds {
            let (x, y) = bond.endpoints();
            if c.bases.contains(&x)
                && c.bases.contains(&y)
                && (out.bases.contains(&x) || out.bases.contains(&y))
                && out.bonds.insert(*bond)
            {
                out.bases.insert(x);
                out.bases.insert(y);
                changed = true;
            }
        }
    }
    out
}

fn guard(net: &Net, m: &Marking, t: TransitionId) -> bool {
    let ctx = EvalContext { net, marking: m };
    match eval(&net.transition(t).guard, &ctx) {
        Ok(Value::Bool(b)) => b,
        other => panic!("guard of {} did not evaluate: {other:?}", net.transition_name(t)),
    }
}

/// Forward enabledness read directly off its definition.
pub fn oracle_forward(net: &Net, s: &State, t: TransitionId) -> bool {
    let tr = net.transition(t);
    for (x, label) in &tr.inputs {
        let m = s.marking.get(*x);
        if !label.positive.bases.iter().all(|a| m.bases.contains(a))
            || !label.positive.bonds.iter().all(|b| m.bonds.contains(b))
        {
            return false;
        }
        if label.negative.bases.iter().any(|a| m.bases.contains(a))
            || label.negative.bonds.iter().any(|b| m.bonds.contains(b))
        {
            return false;
        }
    }
    let produced: BTreeSet<Bond> = tr
        .outputs
        .values()
        .flat_map(|l| l.positive.bonds.iter().copied())
        .collect();
    for beta in &produced {
        for (y, label) in &tr.inputs {
            if s.marking.get(*y).bonds.contains(beta) && !label.positive.bonds.contains(beta) {
                return false;
            }
        }
    }
    guard(net, &s.marking, t)
}

/// Co-enabledness read directly off its definition.
pub fn oracle_reverse(net: &Net, s: &State, t: TransitionId) -> bool {
    let Some(&k) = s.history.keys(t).iter().max() else {
        return false;
    };
    let tr = net.transition(t);
    let later: Vec<Contents> = net
        .transitions()
        .filter(|t2| s.history.keys(*t2).iter().max().is_some_and(|m| *m > k))
        .map(|t2| {
            let mut c = Contents::default();
            for l in net.transition(t2).outputs.values() {
                let cl = closure(&l.positive);
                c.bases.extend(cl.bases);
                c.bonds.extend(cl.bonds);
            }
            c
        })
        .collect();
    for (y, label) in &tr.outputs {
        let m = s.marking.get(*y);
        for a in tokens(label) {
            if !m.bases.contains(&a) {
                return false;
            }
            let comp = component(a, m);
            for post in &later {
                if !comp.bases.is_disjoint(&post.bases) || !comp.bonds.is_disjoint(&post.bonds) {
                    return false;
                }
            }
        }
    }
    !guard(net, &s.marking, t)
}

pub fn oracle_steps(net: &Net, s: &State) -> BTreeSet<(TransitionId, Direction)> {
    let mut out = BTreeSet::new();
    for t in net.transitions() {
        if oracle_forward(net, s, t) {
            out.insert((t, Direction::Forward));
        }
        if oracle_reverse(net, s, t) {
            out.insert((t, Direction::Reverse));
        }
    }
    out
}

/// Breadth-first enumeration of reachable states (at most `limit`).
pub fn reachable(net: &Net, limit: usize) -> Vec<State> {
    let s0 = net.initial_state();
    let mut seen = HashSet::from([s0.clone()]);
    let mut order = vec![s0.clone()];
    let mut queue = VecDeque::from([s0]);
    while let Some(s) = queue.pop_front() {
        for (t, d) in oracle_steps(net, &s) {
            let (next, _) = step(net, &s, t, d).expect("oracle-enabled step executes");
            if order.len() < limit && seen.insert(next.clone()) {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    order
}

/// A random walk of up to `steps` engine steps; `visit` sees each (before, after, step).
pub fn walk<R: Rng>(
    net: &Net,
    rng: &mut R,
    steps: usize,
    mut visit: impl FnMut(&State, &State, rpn_core::Step),
) -> usize {
    let mut s = net.initial_state();
    for taken in 0..steps {
        let enabled = enabled_steps(net, &s).expect("guards evaluate");
        if enabled.is_empty() {
            return taken;
        }
        let (t, d) = enabled[rng.random_range(0..enabled.len())];
        let (next, record) = step(net, &s, t, d).expect("enabled step executes");
        visit(&s, &next, record);
        s = next;
    }
    steps
}
