//! Distributed transmit-antenna selection driven by a reversing Petri net.
//!
//! Each antenna `i` has a place `A_i`; each neighborhood `k` has a knowledge place `M_k`
//! holding a neighborhood token `m_k` bonded to the antennas it currently powers. A
//! transition moves a power token from antenna `i` to antenna `j` when doing so raises
//! the neighborhood's sum capacity; once that stops being true it becomes reversible.

mod capacity;
mod channel;
mod experiment;
mod greedy;
mod net;

use thiserror::Error;

use crate::model::BuildError;
use crate::semantics::SemanticsError;

pub use capacity::{build_hc, capacity, log2_det_hpd, CapacityError};
pub use channel::{complex_row, ChannelMatrix};
pub use experiment::{
    experiment_csv, run_experiment, run_net, run_realization, ExperimentConfig, RealizationOutcome, RunOutcome,
    Scheduler, EXPERIMENT_HEADER,
};
pub use greedy::{binomial, exhaustive_optimum, greedy_baseline, SelectionResult, EXHAUSTIVE_LIMIT};
pub use net::{
    antenna_base, antenna_place, build_net, capacity_registry, guard_for, hood_base, hood_place, link_transition,
    parse_link_name, power_base, ring_neighborhoods, AntennaNet, CapacityParams, LinkTransition, Topology,
    ANTENNA_TYPE, CAPACITY_FN, HOOD_TYPE, POWER_TYPE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AntennaError {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[cfg(test)]
mod tests;
