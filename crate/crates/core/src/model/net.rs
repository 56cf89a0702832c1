use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::ids::{BaseId, Bond, PlaceId, TransitionId, TypeId};
use super::state::{Contents, History, Marking, State};
use crate::cond::{CondExpr, HostRegistry};

/// Value kinds a token type may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Unit,
    Boolean,
    Real,
    /// Fixed-length real vector. Complex rows are stored as interleaved (re, im) pairs.
    RealVector(usize),
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueKind::Unit => f.write_str("unit"),
            ValueKind::Boolean => f.write_str("bool"),
            ValueKind::Real => f.write_str("real"),
            ValueKind::RealVector(d) => write!(f, "real[{d}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenValue {
    Unit,
    Bool(bool),
    Real(f64),
    Vector(Vec<f64>),
}

impl TokenValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            TokenValue::Unit => ValueKind::Unit,
            TokenValue::Bool(_) => ValueKind::Boolean,
            TokenValue::Real(_) => ValueKind::Real,
            TokenValue::Vector(v) => ValueKind::RealVector(v.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenType {
    pub name: String,
    pub kind: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Base {
    pub name: String,
    pub ty: TypeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcElement {
    Base(BaseId),
    NegBase(BaseId),
    Bond(Bond),
    NegBond(Bond),
}

/// Label of one directed arc: required (or produced) elements and, on input arcs,
/// elements whose absence is required.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArcLabel {
    pub positive: Contents,
    pub negative: Contents,
}

impl ArcLabel {
    /// Builds a label, rejecting a base or bond that occurs both positively and negatively.
    pub fn from_elements(elements: impl IntoIterator<Item = ArcElement>) -> Result<Self, ArcElement> {
        let mut label = ArcLabel::default();
        for e in elements {
            match e {
                ArcElement::Base(b) => label.positive.bases.insert(b),
                ArcElement::NegBase(b) => label.negative.bases.insert(b),
                ArcElement::Bond(b) => label.positive.bonds.insert(b),
                ArcElement::NegBond(b) => label.negative.bonds.insert(b),
            };
        }
        if let Some(b) = label.positive.bases.intersection(&label.negative.bases).next() {
            return Err(ArcElement::NegBase(*b));
        }
        if let Some(b) = label.positive.bonds.intersection(&label.negative.bonds).next() {
            return Err(ArcElement::NegBond(*b));
        }
        Ok(label)
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn has_negative(&self) -> bool {
        !self.negative.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = ArcElement> + '_ {
        let p = &self.positive;
        let n = &self.negative;
        p.bases
            .iter()
            .map(|b| ArcElement::Base(*b))
            .chain(n.bases.iter().map(|b| ArcElement::NegBase(*b)))
            .chain(p.bonds.iter().map(|b| ArcElement::Bond(*b)))
            .chain(n.bonds.iter().map(|b| ArcElement::NegBond(*b)))
    }
}

/// Bases of a label: positive bases plus endpoints of positive bonds.
pub fn tokens_of(label: &ArcLabel) -> BTreeSet<BaseId> {
    label.positive.closure().bases
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub name: String,
    pub inputs: BTreeMap<PlaceId, ArcLabel>,
    pub outputs: BTreeMap<PlaceId, ArcLabel>,
    pub guard: CondExpr,
    pre: Contents,
    post: Contents,
    post_closure: Contents,
}

impl Transition {
    /// Positive elements over all input arcs.
    pub fn pre(&self) -> &Contents {
        &self.pre
    }

    /// Positive elements over all output arcs.
    pub fn post(&self) -> &Contents {
        &self.post
    }

    /// `post` with bond endpoints added.
    pub fn post_closure(&self) -> &Contents {
        &self.post_closure
    }

    pub fn input(&self, place: PlaceId) -> Option<&ArcLabel> {
        self.inputs.get(&place)
    }

    pub fn output(&self, place: PlaceId) -> Option<&ArcLabel> {
        self.outputs.get(&place)
    }
}

/// Immutable net structure. Every entity is numbered in lexicographic order of its name,
/// so two nets built from the same declarations in any order are equal.
#[derive(Debug, Clone)]
pub struct Net {
    types: Vec<TokenType>,
    bases: Vec<Base>,
    places: Vec<String>,
    transitions: Vec<Transition>,
    bonds: BTreeSet<Bond>,
    values: Vec<TokenValue>,
    initial: Marking,
    registry: Arc<HostRegistry>,
    type_index: HashMap<String, TypeId>,
    base_index: HashMap<String, BaseId>,
    place_index: HashMap<String, PlaceId>,
    transition_index: HashMap<String, TransitionId>,
}

impl PartialEq for Net {
    fn eq(&self, other: &Self) -> bool {
        self.types == other.types
            && self.bases == other.bases
            && self.places == other.places
            && self.transitions == other.transitions
            && self.bonds == other.bonds
            && self.values == other.values
            && self.initial == other.initial
            && self.registry.names().eq(other.registry.names())
    }
}

impl Net {
    pub fn types(&self) -> impl Iterator<Item = (TypeId, &TokenType)> {
        self.types.iter().enumerate().map(|(i, t)| (TypeId::from_index(i), t))
    }

    pub fn bases(&self) -> impl Iterator<Item = BaseId> {
        (0..self.bases.len()).map(BaseId::from_index)
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId::from_index)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId::from_index)
    }

    pub fn base_count(&self) -> usize {
        self.bases.len()
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.index()]
    }

    pub fn base(&self, b: BaseId) -> &Base {
        &self.bases[b.index()]
    }

    pub fn base_name(&self, b: BaseId) -> &str {
        &self.bases[b.index()].name
    }

    pub fn base_type(&self, b: BaseId) -> TypeId {
        self.bases[b.index()].ty
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.types[t.index()].name
    }

    pub fn type_kind(&self, t: TypeId) -> ValueKind {
        self.types[t.index()].kind
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.index()]
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.transitions[t.index()].name
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.type_index.get(name).copied()
    }

    pub fn base_id(&self, name: &str) -> Option<BaseId> {
        self.base_index.get(name).copied()
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.place_index.get(name).copied()
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transition_index.get(name).copied()
    }

    pub fn bond_by_names(&self, a: &str, b: &str) -> Option<Bond> {
        Bond::new(self.base_id(a)?, self.base_id(b)?)
    }

    /// The value assigned to a base.
    pub fn value(&self, b: BaseId) -> &TokenValue {
        &self.values[b.index()]
    }

    /// The declared bond universe (informational; bonds outside it may still form).
    pub fn declared_bonds(&self) -> &BTreeSet<Bond> {
        &self.bonds
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn initial_state(&self) -> State {
        State {
            marking: self.initial.clone(),
            history: History::empty(self.transitions.len()),
        }
    }

    pub fn registry(&self) -> &HostRegistry {
        &self.registry
    }

    pub fn bond_name(&self, bond: Bond) -> String {
        let (a, b) = bond.endpoints();
        format!("({},{})", self.base_name(a), self.base_name(b))
    }

    /// A copy of this net with a different value assignment. Kinds must match.
    pub fn with_values(&self, values: Vec<TokenValue>) -> Result<Net, BuildError> {
        if values.len() != self.bases.len() {
            return Err(BuildError::ValueCount {
                expected: self.bases.len(),
                found: values.len(),
            });
        }
        for (b, v) in self.bases.iter().zip(&values) {
            let want = self.types[b.ty.index()].kind;
            if v.kind() != want {
                return Err(BuildError::ValueKindMismatch {
                    base: b.name.clone(),
                    expected: want,
                    found: v.kind(),
                });
            }
        }
        Ok(Net { values, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown {kind} `{name}`")]
    UnknownIdentifier { kind: &'static str, name: String },
    #[error("value of base `{base}` has kind {found}, its type declares {expected}")]
    ValueKindMismatch {
        base: String,
        expected: ValueKind,
        found: ValueKind,
    },
    #[error("expected {expected} values, found {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("bond `({0},{0})` joins a base to itself")]
    SelfBond(String),
    #[error("transition `{transition}`: arc at `{place}` lists `{element}` both positively and negatively")]
    ConflictingElement {
        transition: String,
        place: String,
        element: String,
    },
    #[error("transition `{transition}` has two {direction} arcs at `{place}`")]
    DuplicateArc {
        transition: String,
        place: String,
        direction: &'static str,
    },
}

/// A label element written with names, resolved at [`NetBuilder::build`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ElemSpec {
    Base(String),
    NegBase(String),
    Bond(String, String),
    NegBond(String, String),
}

impl ElemSpec {
    pub fn base(name: impl Into<String>) -> Self {
        ElemSpec::Base(name.into())
    }

    pub fn neg_base(name: impl Into<String>) -> Self {
        ElemSpec::NegBase(name.into())
    }

    pub fn bond(a: impl Into<String>, b: impl Into<String>) -> Self {
        ElemSpec::Bond(a.into(), b.into())
    }

    pub fn neg_bond(a: impl Into<String>, b: impl Into<String>) -> Self {
        ElemSpec::NegBond(a.into(), b.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSpec {
    pub name: String,
    pub inputs: Vec<(String, Vec<ElemSpec>)>,
    pub outputs: Vec<(String, Vec<ElemSpec>)>,
    pub guard: CondExpr,
}

impl TransitionSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            guard: CondExpr::Bool(true),
        }
    }

    pub fn input(mut self, place: impl Into<String>, label: Vec<ElemSpec>) -> Self {
        self.inputs.push((place.into(), label));
        self
    }

    pub fn output(mut self, place: impl Into<String>, label: Vec<ElemSpec>) -> Self {
        self.outputs.push((place.into(), label));
        self
    }

    pub fn guard(mut self, guard: CondExpr) -> Self {
        self.guard = guard;
        self
    }
}

/// Collects named declarations and resolves them into a [`Net`].
#[derive(Debug, Clone, Default)]
pub struct NetBuilder {
    types: Vec<(String, ValueKind)>,
    bases: Vec<(String, String, TokenValue)>,
    places: Vec<String>,
    bonds: Vec<(String, String)>,
    marked_bases: Vec<(String, String)>,
    marked_bonds: Vec<(String, String, String)>,
    transitions: Vec<TransitionSpec>,
    registry: Arc<HostRegistry>,
}

fn index_names<I: Copy>(
    kind: &'static str,
    names: impl Iterator<Item = String>,
    make: impl Fn(usize) -> I,
) -> Result<HashMap<String, I>, BuildError> {
    let mut index = HashMap::new();
    for (i, name) in names.enumerate() {
        if index.insert(name.clone(), make(i)).is_some() {
            return Err(BuildError::DuplicateName { kind, name });
        }
    }
    Ok(index)
}

fn lookup<I: Copy>(index: &HashMap<String, I>, kind: &'static str, name: &str) -> Result<I, BuildError> {
    index.get(name).copied().ok_or_else(|| BuildError::UnknownIdentifier {
        kind,
        name: name.to_owned(),
    })
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn registry(&mut self, registry: Arc<HostRegistry>) -> &mut Self {
        self.registry = registry;
        self
    }

    pub fn token_type(&mut self, name: impl Into<String>, kind: ValueKind) -> &mut Self {
        self.types.push((name.into(), kind));
        self
    }

    pub fn base(&mut self, name: impl Into<String>, ty: impl Into<String>, value: TokenValue) -> &mut Self {
        self.bases.push((name.into(), ty.into(), value));
        self
    }

    pub fn place(&mut self, name: impl Into<String>) -> &mut Self {
        self.places.push(name.into());
        self
    }

    /// Declares a bond in the universe without placing it.
    pub fn bond(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        self.bonds.push((a.into(), b.into()));
        self
    }

    /// Puts a base into a place of the initial marking.
    pub fn mark(&mut self, base: impl Into<String>, place: impl Into<String>) -> &mut Self {
        self.marked_bases.push((base.into(), place.into()));
        self
    }

    /// Puts a bond into a place of the initial marking (and declares it).
    pub fn mark_bond(&mut self, a: impl Into<String>, b: impl Into<String>, place: impl Into<String>) -> &mut Self {
        self.marked_bonds.push((a.into(), b.into(), place.into()));
        self
    }

    pub fn transition(&mut self, spec: TransitionSpec) -> &mut Self {
        self.transitions.push(spec);
        self
    }

    pub fn build(&self) -> Result<Net, BuildError> {
        let mut types = self.types.clone();
        types.sort_by(|a, b| a.0.cmp(&b.0));
        let type_index = index_names("type", types.iter().map(|t| t.0.clone()), TypeId::from_index)?;

        let mut places = self.places.clone();
        places.sort();
        let place_index = index_names("place", places.iter().cloned(), PlaceId::from_index)?;

        let mut bases_decl = self.bases.clone();
        bases_decl.sort_by(|a, b| a.0.cmp(&b.0));
        let base_index = index_names("base", bases_decl.iter().map(|b| b.0.clone()), BaseId::from_index)?;

        let mut bases = Vec::with_capacity(bases_decl.len());
        let mut values = Vec::with_capacity(bases_decl.len());
        for (name, ty, value) in bases_decl {
            let ty = lookup(&type_index, "type", &ty)?;
            let want = types[ty.index()].1;
            if value.kind() != want {
                return Err(BuildError::ValueKindMismatch {
                    base: name,
                    expected: want,
                    found: value.kind(),
                });
            }
            bases.push(Base { name, ty });
            values.push(value);
        }

        let bond = |a: &str, b: &str| -> Result<Bond, BuildError> {
            let x = lookup(&base_index, "base", a)?;
            let y = lookup(&base_index, "base", b)?;
            Bond::new(x, y).ok_or_else(|| BuildError::SelfBond(a.to_owned()))
        };

        let mut universe = BTreeSet::new();
        for (a, b) in &self.bonds {
            universe.insert(bond(a, b)?);
        }

        let mut initial = Marking::empty(places.len());
        for (b, p) in &self.marked_bases {
            let b = lookup(&base_index, "base", b)?;
            let p = lookup(&place_index, "place", p)?;
            initial.get_mut(p).bases.insert(b);
        }
        for (a, b, p) in &self.marked_bonds {
            let beta = bond(a, b)?;
            let p = lookup(&place_index, "place", p)?;
            initial.get_mut(p).bonds.insert(beta);
            universe.insert(beta);
        }

        let mut specs: Vec<&TransitionSpec> = self.transitions.iter().collect();
        specs.sort_by(|a, b| a.name.cmp(&b.name));
        let transition_index = index_names(
            "transition",
            specs.iter().map(|t| t.name.clone()),
            TransitionId::from_index,
        )?;

        let base_names: Vec<&str> = bases.iter().map(|b| b.name.as_str()).collect();
        let element_name = |e: ArcElement| match e {
            ArcElement::Base(b) | ArcElement::NegBase(b) => base_names[b.index()].to_owned(),
            ArcElement::Bond(b) | ArcElement::NegBond(b) => {
                let (x, y) = b.endpoints();
                format!("({},{})", base_names[x.index()], base_names[y.index()])
            }
        };

        let mut transitions = Vec::with_capacity(specs.len());
        for spec in specs {
            let arcs = |entries: &[(String, Vec<ElemSpec>)], direction: &'static str| {
                let mut map = BTreeMap::new();
                for (place, elems) in entries {
                    let p = lookup(&place_index, "place", place)?;
                    let mut resolved = Vec::with_capacity(elems.len());
                    for e in elems {
                        resolved.push(match e {
                            ElemSpec::Base(b) => ArcElement::Base(lookup(&base_index, "base", b)?),
                            ElemSpec::NegBase(b) => ArcElement::NegBase(lookup(&base_index, "base", b)?),
                            ElemSpec::Bond(a, b) => ArcElement::Bond(bond(a, b)?),
                            ElemSpec::NegBond(a, b) => ArcElement::NegBond(bond(a, b)?),
                        });
                    }
                    let label = ArcLabel::from_elements(resolved).map_err(|e| BuildError::ConflictingElement {
                        transition: spec.name.clone(),
                        place: place.clone(),
                        element: element_name(e),
                    })?;
                    if label.is_empty() {
                        continue;
                    }
                    if map.insert(p, label).is_some() {
                        return Err(BuildError::DuplicateArc {
                            transition: spec.name.clone(),
                            place: place.clone(),
                            direction,
                        });
                    }
                }
                Ok::<_, BuildError>(map)
            };
            let inputs = arcs(&spec.inputs, "input")?;
            let outputs = arcs(&spec.outputs, "output")?;
            let mut pre = Contents::new();
            for label in inputs.values() {
                pre.extend(&label.positive);
            }
            let mut post = Contents::new();
            for label in outputs.values() {
                post.extend(&label.positive);
            }
            let post_closure = post.closure();
            transitions.push(Transition {
                name: spec.name.clone(),
                inputs,
                outputs,
                guard: spec.guard.clone(),
                pre,
                post,
                post_closure,
            });
        }

        Ok(Net {
            types: types.into_iter().map(|(name, kind)| TokenType { name, kind }).collect(),
            bases,
            places,
            transitions,
            bonds: universe,
            values,
            initial,
            registry: self.registry.clone(),
            type_index,
            base_index,
            place_index,
            transition_index,
        })
    }
}
