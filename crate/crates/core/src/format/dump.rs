use std::fmt::Write as _;

use crate::model::{BaseId, Marking, Net, PlaceId};
use crate::semantics::Step;

pub const TRACE_HEADER: &str = "step_index,transition_id,direction,occurrence_key";

fn place_line(net: &Net, marking: &Marking, p: PlaceId) -> String {
    let contents = marking.get(p);
    let mut bases: Vec<BaseId> = contents.bases.iter().copied().collect();
    // Grouped by token type, then by id.
    bases.sort_by(|a, b| {
        net.type_name(net.base_type(*a))
            .cmp(net.type_name(net.base_type(*b)))
            .then_with(|| net.base_name(*a).cmp(net.base_name(*b)))
    });
    let bases: Vec<&str> = bases.iter().map(|b| net.base_name(*b)).collect();
    let bonds: Vec<String> = contents.bonds.iter().map(|b| net.bond_name(*b)).collect();
    let mut line = format!("{}:", net.place_name(p));
    if !contents.is_empty() {
        line.push(' ');
        line.push_str(&bases.join(","));
        if !bonds.is_empty() {
            line.push(';');
            line.push_str(&bonds.join(","));
        }
    }
    line
}

/// One line per place, `place: base,...;bond,...`, places in lexicographic order.
pub fn dump_marking(net: &Net, marking: &Marking) -> String {
    let mut out = String::new();
    for p in net.places() {
        let _ = writeln!(out, "{}", place_line(net, marking, p));
    }
    out
}

/// The same place entries joined on one line with `"; "`.
pub fn dump_marking_inline(net: &Net, marking: &Marking) -> String {
    net.places()
        .map(|p| place_line(net, marking, p))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Trace as CSV with a header row; `step_index` counts from 0.
pub fn trace_csv(net: &Net, trace: &[Step]) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (i, step) in trace.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i,
            net.transition_name(step.transition),
            step.direction,
            step.key
        );
    }
    out
}
