//! Operational semantics: forward execution and causal-order reversal.
//!
//! All operations are pure functions of an immutable [`Net`] and a [`State`] value.

mod run;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::cond::{eval, EvalContext, EvalError, Kind, Value};
use crate::model::{tokens_of, ArcLabel, BaseId, Contents, Marking, Net, PlaceId, State, TransitionId};

pub use run::{run, RunResult, SchedulerPolicy, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One executed step. `key` is the occurrence number added (forward) or removed (reverse).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub transition: TransitionId,
    pub direction: Direction,
    pub key: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("guard of `{transition}` evaluated to a {found} value, expected bool")]
    ConditionType { transition: String, found: Kind },
    #[error("guard of `{transition}`: {source}")]
    Eval {
        transition: String,
        #[source]
        source: EvalError,
    },
    #[error("transition `{0}` is not forward-enabled")]
    NotEnabled(String),
    #[error("transition `{0}` is not co-enabled")]
    NotCoEnabled(String),
    #[error("executing `{transition}` would duplicate or drop base `{base}`")]
    Inconsistent { transition: String, base: String },
}

/// The connected component of `a` within `c`: bases reachable through bonds of `c` whose
/// endpoints are both in `c`, plus those bonds. Empty when `a` is not in `c`.
pub fn con(a: BaseId, c: &Contents) -> Contents {
    let mut out = Contents::new();
    if !c.contains_base(a) {
        return out;
    }
    out.bases.insert(a);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for bond in c.bonds.iter().filter(|b| b.touches(x)) {
            let Some(y) = bond.other(x) else { continue };
            if !c.contains_base(y) {
                continue;
            }
            out.bonds.insert(*bond);
            if out.bases.insert(y) {
                queue.push_back(y);
            }
        }
    }
    out
}

fn guard_value(net: &Net, marking: &Marking, t: TransitionId) -> Result<bool, SemanticsError> {
    let tr = net.transition(t);
    let ctx = EvalContext { net, marking };
    match eval(&tr.guard, &ctx) {
        Ok(Value::Bool(b)) => Ok(b),
        Ok(other) => Err(SemanticsError::ConditionType {
            transition: tr.name.clone(),
            found: other.kind(),
        }),
        Err(source) => Err(SemanticsError::Eval {
            transition: tr.name.clone(),
            source,
        }),
    }
}

/// Clauses 1 and 2 of forward enabledness (everything except the guard).
pub fn forward_structurally_enabled(net: &Net, marking: &Marking, t: TransitionId) -> bool {
    let tr = net.transition(t);
    for (x, label) in &tr.inputs {
        let here = marking.get(*x);
        if !label.positive.bases.is_subset(&here.bases) || !label.positive.bonds.is_subset(&here.bonds) {
            return false;
        }
        if !label.negative.bases.is_disjoint(&here.bases) || !label.negative.bonds.is_disjoint(&here.bonds) {
            return false;
        }
    }
    // A bond produced by t that already exists at an input place must be consumed there.
    for bond in &tr.post().bonds {
        for (y, label) in &tr.inputs {
            if marking.get(*y).contains_bond(*bond) && !label.positive.contains_bond(*bond) {
                return false;
            }
        }
    }
    true
}

pub fn forward_enabled(net: &Net, s: &State, t: TransitionId) -> Result<bool, SemanticsError> {
    if !forward_structurally_enabled(net, &s.marking, t) {
        return Ok(false);
    }
    guard_value(net, &s.marking, t)
}

/// Clause 1 of co-enabledness: t has fired, its produced tokens are in place, and no
/// later unreversed transition has touched their components.
pub fn co_structurally_enabled(net: &Net, s: &State, t: TransitionId) -> bool {
    let Some(k) = s.history.max_of(t) else {
        return false;
    };
    let tr = net.transition(t);
    let later: Vec<TransitionId> = s
        .history
        .iter()
        .filter(|(_, keys)| keys.last().is_some_and(|m| *m > k))
        .map(|(t2, _)| t2)
        .collect();
    for (y, label) in &tr.outputs {
        let here = s.marking.get(*y);
        for a in tokens_of(label) {
            if !here.contains_base(a) {
                return false;
            }
            if later.is_empty() {
                continue;
            }
            let component = con(a, here);
            if later
                .iter()
                .any(|t2| component.intersects(net.transition(*t2).post_closure()))
            {
                return false;
            }
        }
    }
    true
}

pub fn co_enabled(net: &Net, s: &State, t: TransitionId) -> Result<bool, SemanticsError> {
    if !co_structurally_enabled(net, s, t) {
        return Ok(false);
    }
    Ok(!guard_value(net, &s.marking, t)?)
}

fn check_conservation(net: &Net, before: &Marking, after: &Marking, t: TransitionId) -> Result<(), SemanticsError> {
    let a = before.base_occurrences(net.base_count());
    let b = after.base_occurrences(net.base_count());
    match a.iter().zip(&b).position(|(x, y)| x != y) {
        None => Ok(()),
        Some(i) => Err(SemanticsError::Inconsistent {
            transition: net.transition_name(t).to_owned(),
            base: net.base_name(BaseId::from_index(i)).to_owned(),
        }),
    }
}

/// Moves the components of `from` labels out and the components rebuilt around `to`
/// labels in. Shared by both directions: forward uses (inputs, outputs, pre), reverse
/// uses (outputs, inputs, post).
fn relocate<'a>(
    marking: &Marking,
    from: impl Iterator<Item = (&'a PlaceId, &'a ArcLabel)> + Clone,
    to: impl Iterator<Item = (&'a PlaceId, &'a ArcLabel)>,
    consumed: &Contents,
) -> Marking {
    let mut next = marking.clone();
    for (x, label) in from.clone() {
        let here = marking.get(*x);
        let target = next.get_mut(*x);
        for a in tokens_of(label) {
            let component = con(a, here);
            for b in &component.bases {
                target.bases.remove(b);
            }
            for b in &component.bonds {
                target.bonds.remove(b);
            }
        }
    }
    let remainders: Vec<Contents> = from.map(|(y, _)| marking.get(*y).minus(consumed)).collect();
    for (x, label) in to {
        let produced = label.positive.closure();
        let mut arriving = Contents::new();
        for rest in &remainders {
            let mut scope = rest.clone();
            scope.extend(&produced);
            for a in &produced.bases {
                arriving.extend(&con(*a, &scope));
            }
        }
        next.get_mut(*x).extend(&arriving);
    }
    next
}

/// Executes `t` forward. Fails with [`SemanticsError::NotEnabled`] unless forward-enabled.
pub fn fire(net: &Net, s: &State, t: TransitionId) -> Result<State, SemanticsError> {
    if !forward_enabled(net, s, t)? {
        return Err(SemanticsError::NotEnabled(net.transition_name(t).to_owned()));
    }
    let tr = net.transition(t);
    let marking = relocate(&s.marking, tr.inputs.iter(), tr.outputs.iter(), tr.pre());
    check_conservation(net, &s.marking, &marking, t)?;
    let mut history = s.history.clone();
    history.insert(t, s.history.global_max() + 1);
    Ok(State { marking, history })
}

fn reverse_unchecked(net: &Net, s: &State, t: TransitionId) -> Result<State, SemanticsError> {
    let tr = net.transition(t);
    let k = s.history.max_of(t).expect("co-enabled transition has a history");
    let marking = relocate(&s.marking, tr.outputs.iter(), tr.inputs.iter(), tr.post());
    check_conservation(net, &s.marking, &marking, t)?;
    let mut history = s.history.clone();
    history.remove(t, k);
    Ok(State { marking, history })
}

/// Undoes the most recent occurrence of `t`. Requires co-enabledness, guard included.
pub fn reverse(net: &Net, s: &State, t: TransitionId) -> Result<State, SemanticsError> {
    if !co_enabled(net, s, t)? {
        return Err(SemanticsError::NotCoEnabled(net.transition_name(t).to_owned()));
    }
    reverse_unchecked(net, s, t)
}

/// Like [`reverse`] but ignores the guard; only the causal clause is checked.
pub fn force_reverse(net: &Net, s: &State, t: TransitionId) -> Result<State, SemanticsError> {
    if !co_structurally_enabled(net, s, t) {
        return Err(SemanticsError::NotCoEnabled(net.transition_name(t).to_owned()));
    }
    reverse_unchecked(net, s, t)
}

/// Executes one step in the given direction, returning the new state and its trace record.
pub fn step(net: &Net, s: &State, t: TransitionId, direction: Direction) -> Result<(State, Step), SemanticsError> {
    match direction {
        Direction::Forward => {
            let next = fire(net, s, t)?;
            let key = next.history.max_of(t).expect("fire records a key");
            Ok((
                next,
                Step {
                    transition: t,
                    direction,
                    key,
                },
            ))
        }
        Direction::Reverse => {
            let key = s.history.max_of(t).unwrap_or(0);
            let next = reverse(net, s, t)?;
            Ok((
                next,
                Step {
                    transition: t,
                    direction,
                    key,
                },
            ))
        }
    }
}

/// Every (transition, direction) pair executable in `s`, ordered by transition id.
pub fn enabled_steps(net: &Net, s: &State) -> Result<Vec<(TransitionId, Direction)>, SemanticsError> {
    let mut out = Vec::new();
    for t in net.transitions() {
        if forward_enabled(net, s, t)? {
            out.push((t, Direction::Forward));
        }
        if co_enabled(net, s, t)? {
            out.push((t, Direction::Reverse));
        }
    }
    Ok(out)
}
