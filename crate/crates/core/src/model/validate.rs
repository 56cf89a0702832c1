use std::collections::BTreeSet;
use std::fmt;

use super::ids::Bond;
use super::net::{tokens_of, Net};
use crate::cond::{typecheck_guard, TypeError};

/// One well-formedness failure. Codes V1..V7 identify the rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// V1: the bases consumed and produced by a transition differ.
    ErasesTokens {
        transition: String,
        only_in_pre: Vec<String>,
        only_in_post: Vec<String>,
    },
    /// V2: two output arcs of one transition share an element.
    ClonedOutput {
        transition: String,
        places: (String, String),
        shared: Vec<String>,
    },
    /// V3: a base does not occur exactly once in the initial marking.
    BaseOccurrence { base: String, count: usize },
    /// V4: a bond of the initial marking lacks an endpoint in its place, or sits in two places.
    UnclosedBond { place: String, bond: String },
    /// V5: a guard does not type check to a boolean.
    GuardType { transition: String, error: TypeError },
    /// V6: an output arc carries a negative element.
    NegativeOutput { transition: String, place: String },
    /// V7: an output bond that is always present but not consumed, so the transition can never fire.
    DeadBondOutput { transition: String, bond: String },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::ErasesTokens { .. } => "V1",
            Violation::ClonedOutput { .. } => "V2",
            Violation::BaseOccurrence { .. } => "V3",
            Violation::UnclosedBond { .. } => "V4",
            Violation::GuardType { .. } => "V5",
            Violation::NegativeOutput { .. } => "V6",
            Violation::DeadBondOutput { .. } => "V7",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match self {
            Violation::ErasesTokens {
                transition,
                only_in_pre,
                only_in_post,
            } => write!(
                f,
                "transition `{transition}` does not preserve tokens (consumed only: [{}]; produced only: [{}])",
                only_in_pre.join(","),
                only_in_post.join(",")
            ),
            Violation::ClonedOutput {
                transition,
                places,
                shared,
            } => write!(
                f,
                "transition `{transition}` sends [{}] to both `{}` and `{}`",
                shared.join(","),
                places.0,
                places.1
            ),
            Violation::BaseOccurrence { base, count } => {
                write!(f, "base `{base}` occurs {count} times in the initial marking")
            }
            Violation::UnclosedBond { place, bond } => {
                write!(f, "bond `{bond}` in `{place}` is not closed or is duplicated")
            }
            Violation::GuardType { transition, error } => {
                write!(f, "guard of `{transition}`: {error}")
            }
            Violation::NegativeOutput { transition, place } => {
                write!(
                    f,
                    "transition `{transition}` has a negative element on its arc to `{place}`"
                )
            }
            Violation::DeadBondOutput { transition, bond } => write!(
                f,
                "transition `{transition}` can never fire: output bond `{bond}` is permanently present but not consumed"
            ),
        }
    }
}

/// Lists every well-formedness violation of `net`; an empty list means well-formed.
pub fn validate(net: &Net) -> Vec<Violation> {
    let mut out = Vec::new();
    let names = |set: &BTreeSet<_>| set.iter().map(|b| net.base_name(*b).to_owned()).collect::<Vec<_>>();

    // Bonds present initially that no transition ever consumes without re-producing.
    let initial_bonds: BTreeSet<Bond> = net
        .initial_marking()
        .iter()
        .flat_map(|(_, c)| c.bonds.iter().copied())
        .collect();
    let permanent: BTreeSet<Bond> = initial_bonds
        .iter()
        .copied()
        .filter(|b| {
            net.transitions().all(|t| {
                let tr = net.transition(t);
                !tr.pre().contains_bond(*b) || tr.post().contains_bond(*b)
            })
        })
        .collect();

    for t in net.transitions() {
        let tr = net.transition(t);
        let pre = tr.pre().closure();
        let post = tr.post_closure();

        if pre.bases != post.bases {
            out.push(Violation::ErasesTokens {
                transition: tr.name.clone(),
                only_in_pre: names(&pre.bases.difference(&post.bases).copied().collect()),
                only_in_post: names(&post.bases.difference(&pre.bases).copied().collect()),
            });
        }

        let outs: Vec<_> = tr.outputs.iter().collect();
        for (i, (x, lx)) in outs.iter().enumerate() {
            for (y, ly) in &outs[i + 1..] {
                let cx = lx.positive.closure();
                let cy = ly.positive.closure();
                let mut shared: Vec<String> = cx
                    .bases
                    .intersection(&cy.bases)
                    .map(|b| net.base_name(*b).to_owned())
                    .collect();
                shared.extend(cx.bonds.intersection(&cy.bonds).map(|b| net.bond_name(*b)));
                if !shared.is_empty() {
                    out.push(Violation::ClonedOutput {
                        transition: tr.name.clone(),
                        places: (net.place_name(**x).to_owned(), net.place_name(**y).to_owned()),
                        shared,
                    });
                }
            }
        }

        if let Err(error) = typecheck_guard(&tr.guard, net) {
            out.push(Violation::GuardType {
                transition: tr.name.clone(),
                error,
            });
        }

        for (x, label) in &tr.outputs {
            if label.has_negative() {
                out.push(Violation::NegativeOutput {
                    transition: tr.name.clone(),
                    place: net.place_name(*x).to_owned(),
                });
            }
        }

        let consumed = tr.inputs.values().flat_map(tokens_of).collect::<BTreeSet<_>>();
        for bond in &tr.post().bonds {
            let (a, b) = bond.endpoints();
            if permanent.contains(bond)
                && !tr.pre().contains_bond(*bond)
                && consumed.contains(&a)
                && consumed.contains(&b)
            {
                out.push(Violation::DeadBondOutput {
                    transition: tr.name.clone(),
                    bond: net.bond_name(*bond),
                });
            }
        }
    }

    let counts = net.initial_marking().base_occurrences(net.base_count());
    for b in net.bases() {
        if counts[b.index()] != 1 {
            out.push(Violation::BaseOccurrence {
                base: net.base_name(b).to_owned(),
                count: counts[b.index()],
            });
        }
    }

    let mut seen = BTreeSet::new();
    for (p, contents) in net.initial_marking().iter() {
        for bond in &contents.bonds {
            let (a, b) = bond.endpoints();
            let closed = contents.contains_base(a) && contents.contains_base(b);
            if !closed || !seen.insert(*bond) {
                out.push(Violation::UnclosedBond {
                    place: net.place_name(p).to_owned(),
                    bond: net.bond_name(*bond),
                });
            }
        }
    }

    out
}
