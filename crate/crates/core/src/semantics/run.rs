use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{enabled_steps, step, Direction, SemanticsError, Step};
use crate::model::{Net, State, TransitionId};

/// How a run picks the next step among the enabled ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchedulerPolicy {
    /// Uniform over all enabled (transition, direction) pairs.
    RandomUniform(u64),
    /// Uniform over forward-enabled pairs; reverse pairs only when no forward pair exists.
    ForwardFirst(u64),
    /// Executes the listed steps in order, stopping early if one is not enabled.
    FixedSequence(Vec<(TransitionId, Direction)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// No step was enabled.
    Stuck,
    StepLimit,
    /// A fixed sequence ran to its end.
    SequenceDone,
    /// The next step of a fixed sequence was not enabled.
    SequenceBlocked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub state: State,
    pub trace: Vec<Step>,
    pub termination: Termination,
}

/// Runs from `s0` until no step is enabled or `max_steps` steps have executed.
pub fn run(net: &Net, s0: &State, policy: &SchedulerPolicy, max_steps: usize) -> Result<RunResult, SemanticsError> {
    let mut state = s0.clone();
    let mut trace = Vec::new();
    let mut rng = match policy {
        SchedulerPolicy::RandomUniform(seed) | SchedulerPolicy::ForwardFirst(seed) => {
            Some(ChaCha8Rng::seed_from_u64(*seed))
        }
        SchedulerPolicy::FixedSequence(_) => None,
    };

    let termination = loop {
        if trace.len() >= max_steps {
            break Termination::StepLimit;
        }
        let choice = match policy {
            SchedulerPolicy::FixedSequence(seq) => {
                let Some(&(t, dir)) = seq.get(trace.len()) else {
                    break Termination::SequenceDone;
                };
                if !enabled_steps(net, &state)?.contains(&(t, dir)) {
                    break Termination::SequenceBlocked;
                }
                (t, dir)
            }
            SchedulerPolicy::RandomUniform(_) => {
                let enabled = enabled_steps(net, &state)?;
                if enabled.is_empty() {
                    break Termination::Stuck;
                }
                let rng = rng.as_mut().expect("seeded policy");
                enabled[rng.random_range(0..enabled.len())]
            }
            SchedulerPolicy::ForwardFirst(_) => {
                let enabled = enabled_steps(net, &state)?;
                if enabled.is_empty() {
                    break Termination::Stuck;
                }
                let forward: Vec<_> = enabled
                    .iter()
                    .copied()
                    .filter(|(_, d)| *d == Direction::Forward)
                    .collect();
                let pool = if forward.is_empty() { &enabled } else { &forward };
                let rng = rng.as_mut().expect("seeded policy");
                pool[rng.random_range(0..pool.len())]
            }
        };
        let (next, record) = step(net, &state, choice.0, choice.1)?;
        state = next;
        trace.push(record);
    };

    Ok(RunResult {
        state,
        trace,
        termination,
    })
}
