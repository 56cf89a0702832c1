use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rpn_core::antenna::{
    capacity_registry, experiment_csv, run_experiment, run_net, AntennaError, CapacityParams, ExperimentConfig,
    RealizationOutcome, Scheduler,
};
use rpn_core::{
    dump_marking, load, run, trace_csv, Direction, LoadError, Net, SchedulerPolicy, SemanticsError, Termination,
};

#[derive(Parser)]
#[command(
    name = "rpn",
    version,
    about = "Reversing Petri nets: validation, simulation and antenna selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Parameters of the `capacity_with` host function available to guards.
#[derive(clap::Args)]
struct CapacityArgs {
    /// Signal-to-noise ratio in dB.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    rho_db: f64,
    /// Number of simultaneously selected antennas.
    #[arg(long, default_value_t = 1)]
    nts: usize,
    /// Receive antennas.
    #[arg(long, default_value_t = 1)]
    nr: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a net file loads and is well-formed.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        capacity: CapacityArgs,
    },
    /// Execute a net and print its final marking.
    Simulate {
        file: PathBuf,
        /// `random`, `forward-first`, or `fixed:<t>:<fwd|rev>[,<t>:<fwd|rev>...]`.
        #[arg(long, default_value = "random")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Write the step trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        capacity: CapacityArgs,
    },
    /// Run the distributed antenna-selection experiment.
    AntennaExperiment {
        #[arg(long, default_value_t = 16)]
        nt: usize,
        #[arg(long, default_value_t = 4)]
        nr: usize,
        #[arg(long, default_value_t = 8)]
        nts: usize,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        rho_db: f64,
        #[arg(long, default_value_t = 1)]
        realizations: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        channel_seed: u64,
        #[arg(long, default_value_t = 0)]
        sched_seed: u64,
        /// Step limit per run; defaults to 50 * nt.
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = SchedulerArg::Random)]
        scheduler: SchedulerArg,
        /// Neighborhood width on the antenna ring.
        #[arg(long, default_value_t = 8)]
        window: usize,
        /// Offset between consecutive neighborhoods.
        #[arg(long, default_value_t = 4)]
        stride: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write each run's step trace to `<dir>/r<realization>_run<index>.csv`.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerArg {
    Random,
    ForwardFirst,
}

/// A failure with its exit code: 1 validation, 2 parse, 3 runtime.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(m: impl Display) -> Self {
        Self {
            code: 1,
            message: m.to_string(),
        }
    }
    fn parse(m: impl Display) -> Self {
        Self {
            code: 2,
            message: m.to_string(),
        }
    }
    fn runtime(m: impl Display) -> Self {
        Self {
            code: 3,
            message: m.to_string(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::ValidationFailed(v) => Failure::validation(format!(
                "net is not well-formed: {}",
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
            )),
            LoadError::Build(b) => Failure::validation(b),
            other => Failure::parse(other),
        }
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        Failure::runtime(e)
    }
}

impl From<AntennaError> for Failure {
    fn from(e: AntennaError) -> Self {
        match e {
            AntennaError::InvalidConfig(_) | AntennaError::InvalidTopology(_) => Failure::validation(e),
            other => Failure::runtime(other),
        }
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn load_net(file: &Path, c: &CapacityArgs) -> Result<Net, Failure> {
    if !c.rho_db.is_finite() || c.nts == 0 || c.nr == 0 {
        return Err(Failure::validation(
            "capacity parameters need a finite --rho-db and positive --nts, --nr",
        ));
    }
    let registry = capacity_registry(&CapacityParams::new(db_to_linear(c.rho_db), c.nts, c.nr));
    Ok(load(file, Arc::new(registry))?)
}

fn parse_policy(net: &Net, text: &str, seed: u64) -> Result<SchedulerPolicy, Failure> {
    match text {
        "random" => return Ok(SchedulerPolicy::RandomUniform(seed)),
        "forward-first" => return Ok(SchedulerPolicy::ForwardFirst(seed)),
        _ => {}
    }
    let Some(list) = text.strip_prefix("fixed:") else {
        return Err(Failure::parse(format!("unknown policy `{text}`")));
    };
    let steps = list
        .split(',')
        .map(|item| {
            let (name, dir) = item
                .rsplit_once(':')
                .ok_or_else(|| Failure::parse(format!("expected <transition>:<fwd|rev>, got `{item}`")))?;
            let t = net
                .transition_id(name)
                .ok_or_else(|| Failure::parse(format!("unknown transition `{name}`")))?;
            let d = match dir {
                "fwd" => Direction::Forward,
                "rev" => Direction::Reverse,
                _ => return Err(Failure::parse(format!("direction must be fwd or rev, got `{dir}`"))),
            };
            Ok((t, d))
        })
        .collect::<Result<_, _>>()?;
    Ok(SchedulerPolicy::FixedSequence(steps))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Stuck => "stuck",
        Termination::StepLimit => "step-limit",
        Termination::SequenceDone => "sequence-done",
        Termination::SequenceBlocked => "sequence-blocked",
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file, capacity } => {
            load_net(&file, &capacity)?;
            println!("{}: ok", file.display());
        }
        Command::Simulate {
            file,
            policy,
            seed,
            max_steps,
            trace,
            capacity,
        } => {
            let net = load_net(&file, &capacity)?;
            let policy = parse_policy(&net, &policy, seed)?;
            let start = Instant::now();
            let result = run(&net, &net.initial_state(), &policy, max_steps)?;
            if let Some(path) = trace {
                write(&path, &trace_csv(&net, &result.trace))?;
            }
            print!("{}", dump_marking(&net, &result.state.marking));
            eprintln!(
                "steps={} termination={} time={:.3}s",
                result.trace.len(),
                termination_name(result.termination),
                start.elapsed().as_secs_f64()
            );
        }
        Command::AntennaExperiment {
            nt,
            nr,
            nts,
            rho_db,
            realizations,
            runs,
            channel_seed,
            sched_seed,
            max_steps,
            scheduler,
            window,
            stride,
            out,
            trace_dir,
        } => {
            let mut cfg = ExperimentConfig::new(nt, nr, nts, db_to_linear(rho_db));
            cfg.realizations = realizations;
            cfg.runs = runs;
            cfg.channel_seed = channel_seed;
            cfg.sched_seed = sched_seed;
            cfg.max_steps = max_steps;
            cfg.window = window;
            cfg.stride = stride;
            cfg.scheduler = match scheduler {
                SchedulerArg::Random => Scheduler::RandomUniform,
                SchedulerArg::ForwardFirst => Scheduler::ForwardFirst,
            };
            let outcomes = run_experiment(&cfg)?;
            write(&out, &experiment_csv(&cfg, &outcomes))?;
            if let Some(dir) = trace_dir {
                fs::create_dir_all(&dir)
                    .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))?;
                for o in &outcomes {
                    for r in &o.runs {
                        let net = run_net(&cfg, &o.channel, &r.initial_on)?;
                        let path = dir.join(format!("r{}_run{}.csv", o.realization, r.run_index));
                        write(&path, &trace_csv(&net.net, &r.trace))?;
                    }
                }
            }
            let mean = |f: &dyn Fn(&RealizationOutcome) -> f64| {
                outcomes.iter().map(f).sum::<f64>() / outcomes.len().max(1) as f64
            };
            eprintln!(
                "realizations={} mean_best={:.6} mean_greedy={:.6}",
                outcomes.len(),
                mean(&|o| o.best_capacity()),
                mean(&|o| o.greedy.capacity)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message.replace('\n', "; "));
            ExitCode::from(f.code)
        }
    }
}
