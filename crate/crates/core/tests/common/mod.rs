#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::pricing::DualPrices;
use tpossp::reduction::SubNetwork;
use tpossp::Instance;

/// Up to 8 hubs, 30 legs and 1 to 3 requests.
pub fn tiny_config(seed: u64) -> GeneratorConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    GeneratorConfig {
        hubs: rng.gen_range(2..=8),
        schedules: rng.gen_range(1..=10),
        legs_per_schedule: 3,
        requests: rng.gen_range(1..=3),
        chain_share: 0.8,
        window_slack: rng.gen_range(0..=240),
        horizon: 600,
        coordinates: rng.gen_bool(0.5),
        seed,
        ..GeneratorConfig::default()
    }
}

pub fn tiny_instance(seed: u64) -> Instance {
    generate(&tiny_config(seed)).expect("valid config")
}

/// Up to 40 legs and 10 requests, with tight capacities so that requests
/// compete for legs.
pub fn desk_config(seed: u64) -> GeneratorConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xde5c);
    GeneratorConfig {
        hubs: rng.gen_range(4..=8),
        schedules: rng.gen_range(8..=13),
        legs_per_schedule: 3,
        min_legs_per_schedule: 2,
        requests: rng.gen_range(5..=10),
        chain_share: 0.85,
        window_slack: rng.gen_range(30..=180),
        capacity_mix: vec![(20, 2), (25, 2), (30, 3)],
        horizon: 720,
        coordinates: true,
        seed,
        ..GeneratorConfig::default()
    }
}

pub fn desk_instance(seed: u64) -> Instance {
    generate(&desk_config(seed)).expect("valid config")
}

/// Non-positive capacity and linking duals, convexity duals of either sign.
pub fn random_duals(instance: &Instance, subs: &[SubNetwork], rng: &mut ChaCha8Rng) -> DualPrices {
    let mut d = DualPrices::zeros(instance);
    for p in &mut d.pi_c {
        if rng.gen_bool(0.4) {
            *p = -rng.gen_range(0.0..20_000.0);
        }
    }
    let mut pi_s = BTreeMap::new();
    for s in subs {
        for &l in &s.legs {
            if rng.gen_bool(0.3) {
                pi_s.insert((l, s.request), -rng.gen_range(0.0..200_000.0));
            }
        }
    }
    d.pi_s = pi_s;
    for p in &mut d.pi_r {
        *p = rng.gen_range(-100_000.0..1_000_000.0);
    }
    d
}
