use std::collections::BTreeSet;
use std::sync::Arc;

use super::capacity::{capacity, CapacityError};
use super::channel::{complex_row, ChannelMatrix};
use super::AntennaError;
use crate::cond::{parse, CondExpr, HostFunction, HostRegistry, Kind, Value};
use crate::model::{
    BaseId, ElemSpec, Marking, Net, NetBuilder, PlaceId, TokenValue, TransitionId, TransitionSpec, ValueKind,
};

/// Name of the host function the selection guards call.
pub const CAPACITY_FN: &str = "capacity_with";
pub const ANTENNA_TYPE: &str = "radio";
pub const POWER_TYPE: &str = "power";
pub const HOOD_TYPE: &str = "neighborhood";

/// Antennas, overlapping neighborhoods, links and the initially powered antennas.
/// Antenna and neighborhood indices are 0-based; net names are 1-based (`A_1`, `M_1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_t: usize,
    neighborhoods: Vec<Vec<usize>>,
    links: BTreeSet<(usize, usize)>,
    initial_on: BTreeSet<usize>,
}

impl Topology {
    /// `links` are unordered pairs; each must lie within at least one neighborhood.
    pub fn new(
        n_t: usize,
        neighborhoods: Vec<Vec<usize>>,
        links: impl IntoIterator<Item = (usize, usize)>,
        initial_on: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AntennaError> {
        let invalid = |m: String| Err(AntennaError::InvalidTopology(m));
        if n_t == 0 {
            return invalid("no antennas".into());
        }
        for (k, hood) in neighborhoods.iter().enumerate() {
            if hood.is_empty() {
                return invalid(format!("neighborhood {} is empty", k + 1));
            }
            if let Some(i) = hood.iter().find(|i| **i >= n_t) {
                return invalid(format!("neighborhood {} names antenna {} of {n_t}", k + 1, i + 1));
            }
        }
        let mut normalized = BTreeSet::new();
        for (i, j) in links {
            if i == j {
                return invalid(format!("link from antenna {} to itself", i + 1));
            }
            let (i, j) = (i.min(j), i.max(j));
            if !neighborhoods.iter().any(|h| h.contains(&i) && h.contains(&j)) {
                return invalid(format!("antennas {} and {} share no neighborhood", i + 1, j + 1));
            }
            normalized.insert((i, j));
        }
        let initial_on: BTreeSet<usize> = initial_on.into_iter().collect();
        for &i in &initial_on {
            if i >= n_t {
                return invalid(format!("initially-on antenna {} of {n_t}", i + 1));
            }
            if !neighborhoods.iter().any(|h| h.contains(&i)) {
                return invalid(format!("initially-on antenna {} is in no neighborhood", i + 1));
            }
        }
        Ok(Self {
            n_t,
            neighborhoods,
            links: normalized,
            initial_on,
        })
    }

    /// Every pair of antennas sharing a neighborhood is linked.
    pub fn fully_linked(
        n_t: usize,
        neighborhoods: Vec<Vec<usize>>,
        initial_on: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AntennaError> {
        let mut links = BTreeSet::new();
        for hood in &neighborhoods {
            for (x, &i) in hood.iter().enumerate() {
                for &j in &hood[x + 1..] {
                    if i != j {
                        links.insert((i.min(j), i.max(j)));
                    }
                }
            }
        }
        Self::new(n_t, neighborhoods, links, initial_on)
    }

    /// A ring of antennas covered by windows of `window` consecutive antennas every
    /// `stride` positions (wrapping), fully linked within each window.
    pub fn ring(
        n_t: usize,
        window: usize,
        stride: usize,
        initial_on: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AntennaError> {
        Self::fully_linked(n_t, ring_neighborhoods(n_t, window, stride)?, initial_on)
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn neighborhoods(&self) -> &[Vec<usize>] {
        &self.neighborhoods
    }

    pub fn links(&self) -> &BTreeSet<(usize, usize)> {
        &self.links
    }

    pub fn initial_on(&self) -> &BTreeSet<usize> {
        &self.initial_on
    }

    /// The neighborhood whose knowledge place an initially-on antenna starts bonded in:
    /// the lowest-indexed one containing it.
    pub fn home(&self, antenna: usize) -> Option<usize> {
        self.neighborhoods.iter().position(|h| h.contains(&antenna))
    }

    pub fn with_initial_on(&self, initial_on: impl IntoIterator<Item = usize>) -> Result<Self, AntennaError> {
        Self::new(
            self.n_t,
            self.neighborhoods.clone(),
            self.links.iter().copied(),
            initial_on,
        )
    }
}

/// Overlapping ring windows, duplicates removed.
pub fn ring_neighborhoods(n_t: usize, window: usize, stride: usize) -> Result<Vec<Vec<usize>>, AntennaError> {
    if n_t == 0 || window == 0 || stride == 0 {
        return Err(AntennaError::InvalidTopology(
            "ring needs positive antenna count, window and stride".into(),
        ));
    }
    let width = window.min(n_t);
    let mut hoods: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    while start < n_t {
        let mut hood: Vec<usize> = (0..width).map(|o| (start + o) % n_t).collect();
        hood.sort_unstable();
        if !hoods.contains(&hood) {
            hoods.push(hood);
        }
        start += stride;
    }
    Ok(hoods)
}

/// Parameters of the capacity expression shared by guards and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityParams {
    /// Linear signal-to-noise ratio.
    pub rho: f64,
    pub n_ts: usize,
    pub n_r: usize,
    /// Diagonal of the power matrix.
    pub power: Vec<f64>,
}

impl CapacityParams {
    pub fn new(rho: f64, n_ts: usize, n_r: usize) -> Self {
        Self {
            rho,
            n_ts,
            n_r,
            power: vec![1.0; n_r],
        }
    }

    pub fn capacity_of(&self, h: &ChannelMatrix, rows: &[usize]) -> Result<f64, CapacityError> {
        capacity(&h.select_rows(rows), self.rho, self.n_ts, self.n_r, &self.power)
    }
}

/// Registers `capacity_with(active, include, exclude)`: the capacity of the rows of
/// `active` with `exclude` removed and `include` added, rows taken from token values.
pub fn capacity_registry(params: &CapacityParams) -> HostRegistry {
    let params = params.clone();
    let mut registry = HostRegistry::new();
    registry.register(HostFunction::new(
        CAPACITY_FN,
        vec![Kind::BaseList, Kind::Base, Kind::Base],
        Kind::Real,
        move |ctx, args| {
            let (Value::BaseList(active), Value::Base(include), Value::Base(exclude)) = (&args[0], &args[1], &args[2])
            else {
                return Err("expected (base list, base, base)".into());
            };
            let mut members: Vec<BaseId> = active.iter().copied().filter(|b| b != exclude).collect();
            if !members.contains(include) {
                members.push(*include);
            }
            let mut rows = Vec::with_capacity(members.len());
            for b in members {
                let row = match ctx.net.value(b) {
                    TokenValue::Vector(v) => complex_row(v),
                    _ => None,
                }
                .ok_or_else(|| format!("`{}` does not carry a channel row", ctx.net.base_name(b)))?;
                rows.push(row);
            }
            let hc = if rows.is_empty() {
                ChannelMatrix::zeros(0, params.n_r)
            } else {
                ChannelMatrix::from_rows(&rows)
            };
            capacity(&hc, params.rho, params.n_ts, params.n_r, &params.power)
                .map(Value::Real)
                .map_err(|e| e.to_string())
        },
    ));
    registry
}

pub fn antenna_place(i: usize) -> String {
    format!("A_{}", i + 1)
}

pub fn antenna_base(i: usize) -> String {
    format!("a_{}", i + 1)
}

pub fn hood_place(k: usize) -> String {
    format!("M_{}", k + 1)
}

pub fn hood_base(k: usize) -> String {
    format!("m_{}", k + 1)
}

pub fn power_base(n: usize) -> String {
    format!("p_{}", n + 1)
}

/// Transition moving power token `n` from antenna `i` to antenna `j` within neighborhood `k`.
pub fn link_transition(i: usize, j: usize, k: usize, n: usize) -> String {
    format!("t_{}_{}_{}_{}", i + 1, j + 1, k + 1, n + 1)
}

/// Guard of the transition moving power from antenna `i` to antenna `j` in neighborhood
/// `k`: true iff swapping `i` out for `j` strictly increases the neighborhood capacity.
pub fn guard_for(i: usize, j: usize, k: usize) -> CondExpr {
    let hood = hood_place(k);
    let (ai, aj) = (antenna_base(i), antenna_base(j));
    let text = format!(
        "{CAPACITY_FN}(tokens_in({hood}, {ANTENNA_TYPE}), {ai}, {aj}) < {CAPACITY_FN}(tokens_in({hood}, {ANTENNA_TYPE}), {aj}, {ai})"
    );
    parse(&text).expect("generated guard parses")
}

/// One selection transition: moves power token `power` from antenna `from` to antenna
/// `to`, attached to neighborhood `hood`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkTransition {
    pub id: TransitionId,
    pub from: usize,
    pub to: usize,
    pub hood: usize,
    pub power: usize,
}

/// A selection net plus the index maps needed to interpret its markings.
#[derive(Debug, Clone)]
pub struct AntennaNet {
    pub net: Net,
    pub topology: Topology,
    pub channel: ChannelMatrix,
    pub params: CapacityParams,
    pub antenna_bases: Vec<BaseId>,
    pub antenna_places: Vec<PlaceId>,
    pub hood_places: Vec<PlaceId>,
    pub hood_bases: Vec<BaseId>,
    pub power_bases: Vec<BaseId>,
    pub links: Vec<LinkTransition>,
}

impl AntennaNet {
    /// Antennas currently holding a power token, ascending.
    pub fn selected(&self, marking: &Marking) -> Vec<usize> {
        self.antenna_places
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let here = marking.get(**p);
                self.power_bases.iter().any(|b| here.contains_base(*b))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Antennas whose tokens sit in neighborhood place `k`, ascending.
    pub fn active_in(&self, marking: &Marking, k: usize) -> Vec<usize> {
        let here = marking.get(self.hood_places[k]);
        (0..self.antenna_bases.len())
            .filter(|i| here.contains_base(self.antenna_bases[*i]))
            .collect()
    }

    pub fn local_capacity(&self, marking: &Marking, k: usize) -> Result<f64, CapacityError> {
        self.params.capacity_of(&self.channel, &self.active_in(marking, k))
    }

    pub fn global_capacity(&self, marking: &Marking) -> Result<f64, CapacityError> {
        self.params.capacity_of(&self.channel, &self.selected(marking))
    }

    pub fn link(&self, t: TransitionId) -> Option<&LinkTransition> {
        self.links.iter().find(|l| l.id == t)
    }
}

/// Builds the selection net: antenna places `A_i`, neighborhood places `M_k`, power
/// tokens on the initially-on antennas, and one transition per ordered link per shared
/// neighborhood wired as `A_i:{p} A_j:{a_j} M_k:{(a_i,m_k)} -> A_i:{a_i} A_j:{p} M_k:{(a_j,m_k)}`.
pub fn build_net(
    topology: &Topology,
    channel: &ChannelMatrix,
    params: &CapacityParams,
) -> Result<AntennaNet, AntennaError> {
    let n_t = topology.n_t();
    if channel.rows() != n_t || channel.cols() != params.n_r {
        return Err(AntennaError::InvalidTopology(format!(
            "channel is {}x{}, expected {n_t}x{}",
            channel.rows(),
            channel.cols(),
            params.n_r
        )));
    }
    if topology.initial_on().len() != params.n_ts {
        return Err(AntennaError::InvalidTopology(format!(
            "{} antennas initially on, expected {}",
            topology.initial_on().len(),
            params.n_ts
        )));
    }
    if !channel.is_finite() {
        return Err(AntennaError::InvalidTopology("channel has non-finite entries".into()));
    }

    let mut b = NetBuilder::new();
    b.registry(Arc::new(capacity_registry(params)));
    b.token_type(ANTENNA_TYPE, ValueKind::RealVector(2 * params.n_r))
        .token_type(POWER_TYPE, ValueKind::Unit)
        .token_type(HOOD_TYPE, ValueKind::Unit);

    for i in 0..n_t {
        b.place(antenna_place(i)).base(
            antenna_base(i),
            ANTENNA_TYPE,
            TokenValue::Vector(channel.row_as_reals(i)),
        );
    }
    for (k, hood) in topology.neighborhoods().iter().enumerate() {
        b.place(hood_place(k))
            .base(hood_base(k), HOOD_TYPE, TokenValue::Unit)
            .mark(hood_base(k), hood_place(k));
        for &i in hood {
            b.bond(antenna_base(i), hood_base(k));
        }
    }
    for (n, &i) in topology.initial_on().iter().enumerate() {
        let k = topology.home(i).expect("checked by Topology::new");
        b.base(power_base(n), POWER_TYPE, TokenValue::Unit)
            .mark(power_base(n), antenna_place(i))
            .mark(antenna_base(i), hood_place(k))
            .mark_bond(antenna_base(i), hood_base(k), hood_place(k));
    }
    for i in (0..n_t).filter(|i| !topology.initial_on().contains(i)) {
        b.mark(antenna_base(i), antenna_place(i));
    }

    // Arcs name a specific power token, so each (i, j, k) wiring is replicated once per
    // power token; only the copy whose token currently sits on A_i can fire.
    for &(x, y) in topology.links() {
        for (k, hood) in topology.neighborhoods().iter().enumerate() {
            if !(hood.contains(&x) && hood.contains(&y)) {
                continue;
            }
            for (i, j) in [(x, y), (y, x)] {
                for n in 0..params.n_ts {
                    let p = power_base(n);
                    b.transition(
                        TransitionSpec::new(link_transition(i, j, k, n))
                            .input(antenna_place(i), vec![ElemSpec::base(&p)])
                            .input(antenna_place(j), vec![ElemSpec::base(antenna_base(j))])
                            .input(hood_place(k), vec![ElemSpec::bond(antenna_base(i), hood_base(k))])
                            .output(antenna_place(i), vec![ElemSpec::base(antenna_base(i))])
                            .output(antenna_place(j), vec![ElemSpec::base(&p)])
                            .output(hood_place(k), vec![ElemSpec::bond(antenna_base(j), hood_base(k))])
                            .guard(guard_for(i, j, k)),
                    );
                }
            }
        }
    }
    let net = b.build()?;

    let lookup_place = |name: String| net.place_id(&name).expect("declared place");
    let lookup_base = |name: String| net.base_id(&name).expect("declared base");
    let mut links = Vec::new();
    for t in net.transitions() {
        let (from, to, hood, power) = parse_link_name(net.transition_name(t)).expect("generated transition name");
        links.push(LinkTransition {
            id: t,
            from,
            to,
            hood,
            power,
        });
    }
    Ok(AntennaNet {
        antenna_bases: (0..n_t).map(|i| lookup_base(antenna_base(i))).collect(),
        antenna_places: (0..n_t).map(|i| lookup_place(antenna_place(i))).collect(),
        hood_places: (0..topology.neighborhoods().len())
            .map(|k| lookup_place(hood_place(k)))
            .collect(),
        hood_bases: (0..topology.neighborhoods().len())
            .map(|k| lookup_base(hood_base(k)))
            .collect(),
        power_bases: (0..params.n_ts).map(|n| lookup_base(power_base(n))).collect(),
        links,
        topology: topology.clone(),
        channel: channel.clone(),
        params: params.clone(),
        net,
    })
}

/// Recovers 0-based `(i, j, k, n)` from a name produced by [`link_transition`].
pub fn parse_link_name(name: &str) -> Option<(usize, usize, usize, usize)> {
    let parts: Vec<usize> = name
        .strip_prefix("t_")?
        .split('_')
        .map(|s| s.parse::<usize>().ok().filter(|v| *v > 0).map(|v| v - 1))
        .collect::<Option<_>>()?;
    match parts[..] {
        [i, j, k, n] => Some((i, j, k, n)),
        _ => None,
    }
}
