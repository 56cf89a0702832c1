use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::channel::ChannelMatrix;
use super::greedy::{exhaustive_optimum, greedy_baseline, SelectionResult, EXHAUSTIVE_LIMIT};
use super::net::{build_net, ring_neighborhoods, AntennaNet, CapacityParams, Topology};
use super::AntennaError;
use crate::semantics::{run, SchedulerPolicy, Step, Termination};

pub const EXPERIMENT_HEADER: &str =
    "realization,nts,run_index,run_capacity,best_capacity,greedy_capacity,exhaustive_capacity_or_blank,steps,converged";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheduler {
    #[default]
    RandomUniform,
    ForwardFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub n_ts: usize,
    /// Linear signal-to-noise ratio.
    pub rho: f64,
    pub channel_seed: u64,
    pub sched_seed: u64,
    pub runs: usize,
    pub realizations: usize,
    /// Defaults to `50 * n_t`.
    pub max_steps: Option<usize>,
    pub scheduler: Scheduler,
    /// Ring neighborhood width and stride.
    pub window: usize,
    pub stride: usize,
    /// Diagonal of the power matrix; all ones when `None`.
    pub power: Option<Vec<f64>>,
    pub exhaustive_limit: u64,
}

impl ExperimentConfig {
    pub fn new(n_t: usize, n_r: usize, n_ts: usize, rho: f64) -> Self {
        Self {
            n_t,
            n_r,
            n_ts,
            rho,
            channel_seed: 0,
            sched_seed: 0,
            runs: 5,
            realizations: 1,
            max_steps: None,
            scheduler: Scheduler::default(),
            window: 8,
            stride: 4,
            power: None,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<(), AntennaError> {
        let bad = |m: &str| Err(AntennaError::InvalidConfig(m.into()));
        if self.n_ts == 0 || self.n_ts > self.n_t {
            return bad("need 1 <= nts <= nt");
        }
        if self.n_r == 0 {
            return bad("need at least one user");
        }
        if self.realizations == 0 || self.runs == 0 {
            return bad("need at least one realization and one run");
        }
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return bad("rho must be finite and nonnegative");
        }
        if let Some(p) = &self.power {
            if p.len() != self.n_r {
                return bad("power diagonal must have one entry per user");
            }
        }
        Ok(())
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps.unwrap_or(50 * self.n_t)
    }

    pub fn params(&self) -> CapacityParams {
        let mut params = CapacityParams::new(self.rho, self.n_ts, self.n_r);
        if let Some(p) = &self.power {
            params.power = p.clone();
        }
        params
    }

    pub fn topology(&self, initial_on: &[usize]) -> Result<Topology, AntennaError> {
        Topology::fully_linked(
            self.n_t,
            ring_neighborhoods(self.n_t, self.window, self.stride)?,
            initial_on.iter().copied(),
        )
    }

    /// The channel of realization `r`.
    pub fn channel(&self, realization: usize) -> ChannelMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.channel_seed);
        rng.set_stream(realization as u64);
        ChannelMatrix::rayleigh(self.n_t, self.n_r, &mut rng)
    }

    /// Initial-on set and scheduler seed of run `run` in realization `realization`.
    pub fn run_setup(&self, realization: usize, run: usize) -> (Vec<usize>, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.sched_seed);
        rng.set_stream((realization as u64) << 32 | run as u64);
        let mut on = sample(&mut rng, self.n_t, self.n_ts).into_vec();
        on.sort_unstable();
        (on, rng.random())
    }

    fn policy(&self, seed: u64) -> SchedulerPolicy {
        match self.scheduler {
            Scheduler::RandomUniform => SchedulerPolicy::RandomUniform(seed),
            Scheduler::ForwardFirst => SchedulerPolicy::ForwardFirst(seed),
        }
    }
}

/// One simulated selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub run_index: usize,
    pub initial_on: Vec<usize>,
    pub scheduler_seed: u64,
    pub result: SelectionResult,
    pub trace: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub realization: usize,
    pub channel: ChannelMatrix,
    pub runs: Vec<RunOutcome>,
    pub greedy: SelectionResult,
    pub exhaustive: Option<SelectionResult>,
}

impl RealizationOutcome {
    pub fn best_capacity(&self) -> f64 {
        self.runs
            .iter()
            .map(|r| r.result.capacity)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds the selection net of one run.
pub fn run_net(
    cfg: &ExperimentConfig,
    channel: &ChannelMatrix,
    initial_on: &[usize],
) -> Result<AntennaNet, AntennaError> {
    build_net(&cfg.topology(initial_on)?, channel, &cfg.params())
}

fn simulate(
    cfg: &ExperimentConfig,
    channel: &ChannelMatrix,
    realization: usize,
    run_index: usize,
) -> Result<RunOutcome, AntennaError> {
    let (initial_on, scheduler_seed) = cfg.run_setup(realization, run_index);
    let anet = run_net(cfg, channel, &initial_on)?;
    let s0 = anet.net.initial_state();
    let outcome = run(&anet.net, &s0, &cfg.policy(scheduler_seed), cfg.max_steps())?;
    let selected = anet.selected(&outcome.state.marking);
    let capacity = cfg.params().capacity_of(channel, &selected)?;
    Ok(RunOutcome {
        run_index,
        initial_on,
        scheduler_seed,
        result: SelectionResult {
            selected,
            capacity,
            steps: outcome.trace.len(),
            converged: outcome.termination == Termination::Stuck,
        },
        trace: outcome.trace,
    })
}

pub fn run_realization(cfg: &ExperimentConfig, realization: usize) -> Result<RealizationOutcome, AntennaError> {
    cfg.validate()?;
    let channel = cfg.channel(realization);
    let runs = (0..cfg.runs)
        .into_par_iter()
        .map(|r| simulate(cfg, &channel, realization, r))
        .collect::<Result<Vec<_>, _>>()?;
    let params = cfg.params();
    Ok(RealizationOutcome {
        realization,
        greedy: greedy_baseline(&channel, &params)?,
        exhaustive: exhaustive_optimum(&channel, &params, cfg.exhaustive_limit)?,
        channel,
        runs,
    })
}

/// Runs every realization; results are ordered by realization index regardless of
/// how the work was scheduled.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RealizationOutcome>, AntennaError> {
    cfg.validate()?;
    (0..cfg.realizations)
        .into_par_iter()
        .map(|r| run_realization(cfg, r))
        .collect()
}

/// CSV report, one row per run of each realization.
pub fn experiment_csv(cfg: &ExperimentConfig, outcomes: &[RealizationOutcome]) -> String {
    let mut out = String::new();
    out.push_str(EXPERIMENT_HEADER);
    out.push('\n');
    for o in outcomes {
        let best = o.best_capacity();
        let exhaustive = o
            .exhaustive
            .as_ref()
            .map(|e| format!("{:.9}", e.capacity))
            .unwrap_or_default();
        for r in &o.runs {
            let _ = writeln!(
                out,
                "{},{},{},{:.9},{:.9},{:.9},{},{},{}",
                o.realization,
                cfg.n_ts,
                r.run_index,
                r.result.capacity,
                best,
                o.greedy.capacity,
                exhaustive,
                r.result.steps,
                r.result.converged
            );
        }
    }
    out
}
