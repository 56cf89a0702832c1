//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpn_core::antenna::{capacity_registry, run_net, AntennaNet, CapacityParams, ExperimentConfig};
use rpn_core::generate::{random_net, GenConfig};
use rpn_core::{load_str, Net};

const FIG1B: &str = include_str!("../../../nets/fig1b.rpn");

pub fn fig1b() -> Net {
    load_str(FIG1B, Arc::new(capacity_registry(&CapacityParams::new(10.0, 1, 1)))).expect("bundled net loads")
}

/// `n` seeded random nets of the default generator size.
pub fn random_nets(n: usize) -> Vec<Net> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..n).map(|_| random_net(&mut rng, &GenConfig::default())).collect()
}

/// The desk-scale selection setup: 16 antennas, 4 users, 8 selected, 10 dB.
pub fn desk_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(16, 4, 8, 10.0);
    cfg.channel_seed = 1;
    cfg.sched_seed = 2;
    cfg
}

pub fn desk_net() -> AntennaNet {
    let cfg = desk_config();
    run_net(&cfg, &cfg.channel(0), &cfg.run_setup(0, 0).0).expect("valid configuration")
}
