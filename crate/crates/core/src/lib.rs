//! Reversing Petri nets with conditional reversibility.
//!
//! - [`model`]: nets, markings, histories and well-formedness checks.
//! - [`cond`]: the guard language (parser, type checker, evaluator, host functions).
//! - [`semantics`]: forward firing, causal-order reversal and schedulers.
//! - [`format`]: the `.rpn` text format, marking dumps and trace CSV.
//! - [`antenna`]: the antenna-selection case study built on top of the engine.
//! - [`generate`]: seeded random well-formed nets for property testing.

pub mod antenna;
pub mod cond;
pub mod format;
pub mod generate;
pub mod model;
pub mod semantics;

pub use cond::{parse, CondExpr, HostFunction, HostRegistry, Kind, Value};
pub use format::{dump_marking, dump_marking_inline, load, load_str, save, trace_csv, LoadError};
pub use model::{
    validate, BaseId, Bond, Contents, History, Marking, Net, NetBuilder, PlaceId, State, TransitionId, Violation,
};
pub use semantics::{
    enabled_steps, fire, force_reverse, reverse, run, step, Direction, RunResult, SchedulerPolicy, SemanticsError,
    Step, Termination,
};
