use std::collections::BTreeSet;

use super::ids::{BaseId, Bond, PlaceId, TransitionId};

/// A set of bases and bonds: the contents of one place, or an arc label's positive part.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Contents {
    pub bases: BTreeSet<BaseId>,
    pub bonds: BTreeSet<Bond>,
}

impl Contents {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty() && self.bonds.is_empty()
    }

    pub fn contains_base(&self, base: BaseId) -> bool {
        self.bases.contains(&base)
    }

    pub fn contains_bond(&self, bond: Bond) -> bool {
        self.bonds.contains(&bond)
    }

    pub fn extend(&mut self, other: &Contents) {
        self.bases.extend(other.bases.iter().copied());
        self.bonds.extend(other.bonds.iter().copied());
    }

    /// Set difference on both bases and bonds.
    pub fn minus(&self, other: &Contents) -> Contents {
        Contents {
            bases: self.bases.difference(&other.bases).copied().collect(),
            bonds: self.bonds.difference(&other.bonds).copied().collect(),
        }
    }

    pub fn intersects(&self, other: &Contents) -> bool {
        !self.bases.is_disjoint(&other.bases) || !self.bonds.is_disjoint(&other.bonds)
    }

    /// Bases listed directly plus every bond endpoint.
    pub fn closure(&self) -> Contents {
        let mut bases = self.bases.clone();
        for bond in &self.bonds {
            let (a, b) = bond.endpoints();
            bases.insert(a);
            bases.insert(b);
        }
        Contents {
            bases,
            bonds: self.bonds.clone(),
        }
    }

    /// True when every bond's endpoints are also present.
    pub fn is_bond_closed(&self) -> bool {
        self.bonds.iter().all(|b| {
            let (x, y) = b.endpoints();
            self.bases.contains(&x) && self.bases.contains(&y)
        })
    }
}

/// Assignment of bases and bonds to places, indexed by [`PlaceId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Marking {
    places: Vec<Contents>,
}

impl Marking {
    pub fn empty(place_count: usize) -> Self {
        Self {
            places: vec![Contents::default(); place_count],
        }
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn get(&self, place: PlaceId) -> &Contents {
        &self.places[place.index()]
    }

    pub fn get_mut(&mut self, place: PlaceId) -> &mut Contents {
        &mut self.places[place.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, &Contents)> {
        self.places.iter().enumerate().map(|(i, c)| (PlaceId::from_index(i), c))
    }

    /// First place holding `base`.
    pub fn locate(&self, base: BaseId) -> Option<PlaceId> {
        self.iter().find(|(_, c)| c.contains_base(base)).map(|(p, _)| p)
    }

    /// Number of places holding each base, indexed by base.
    pub fn base_occurrences(&self, base_count: usize) -> Vec<usize> {
        let mut counts = vec![0; base_count];
        for contents in &self.places {
            for b in &contents.bases {
                if let Some(c) = counts.get_mut(b.index()) {
                    *c += 1;
                }
            }
        }
        counts
    }

    pub fn is_bond_closed(&self) -> bool {
        self.places.iter().all(Contents::is_bond_closed)
    }

    /// True when no bond is present in more than one place.
    pub fn bonds_unique(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.places.iter().flat_map(|c| c.bonds.iter()).all(|b| seen.insert(*b))
    }
}

/// Occurrence keys of the unreversed executions of each transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct History {
    keys: Vec<BTreeSet<u64>>,
}

impl History {
    pub fn empty(transition_count: usize) -> Self {
        Self {
            keys: vec![BTreeSet::new(); transition_count],
        }
    }

    pub fn keys(&self, t: TransitionId) -> &BTreeSet<u64> {
        &self.keys[t.index()]
    }

    pub fn max_of(&self, t: TransitionId) -> Option<u64> {
        self.keys[t.index()].last().copied()
    }

    /// Largest key over all transitions, 0 when nothing has fired.
    pub fn global_max(&self) -> u64 {
        self.keys.iter().filter_map(|k| k.last().copied()).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TransitionId, &BTreeSet<u64>)> {
        self.keys
            .iter()
            .enumerate()
            .map(|(i, k)| (TransitionId::from_index(i), k))
    }

    pub fn is_empty(&self) -> bool {
        self.keys.iter().all(BTreeSet::is_empty)
    }

    /// True when no key is shared between (or repeated within) transitions.
    pub fn keys_unique(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.keys.iter().flatten().all(|k| *k > 0 && seen.insert(*k))
    }

    pub(crate) fn insert(&mut self, t: TransitionId, key: u64) {
        self.keys[t.index()].insert(key);
    }

    pub(crate) fn remove(&mut self, t: TransitionId, key: u64) -> bool {
        self.keys[t.index()].remove(&key)
    }
}

/// A marking paired with a history.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    pub marking: Marking,
    pub history: History,
}
