//! Seeded random instances.
//!
//! Schedules are tours over random hubs: each leg leaves from where the
//! previous one arrived, after a random dwell. Most requests are cut from a
//! random chain of legs (possibly across schedules), so that a real path
//! exists; the rest connect random hubs in random windows and are often
//! served only by their dummy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Deci, Hub, HubId, Instance, Leg, LegId, Minutes, Request, RequestId, Schedule, ScheduleId, MAX_CAPACITY, VOLUMES,
};

/// Missing fields in a JSON config take their default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub hubs: usize,
    pub schedules: usize,
    /// Each schedule gets between `min_legs_per_schedule` and this many
    /// legs.
    pub legs_per_schedule: usize,
    pub min_legs_per_schedule: usize,
    pub requests: usize,
    /// Share of requests cut from an existing leg chain.
    pub chain_share: f64,
    /// Each side of a chain request's window gets up to this much slack.
    pub window_slack: Minutes,
    /// Added to every request window after sampling, half before the
    /// earliest time and half after the latest time.
    pub window_widen: Minutes,
    /// Weights of leg capacities `(capacity, weight)`.
    pub capacity_mix: Vec<(Deci, u32)>,
    /// Weights of the volumes 10, 15, 19 and 25.
    pub volume_mix: [u32; 4],
    /// Schedules start within `[0, horizon / 2]`.
    pub horizon: Minutes,
    /// Give hubs coordinates and derive leg miles from them.
    pub coordinates: bool,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            hubs: 8,
            schedules: 10,
            legs_per_schedule: 3,
            min_legs_per_schedule: 1,
            requests: 6,
            chain_share: 0.8,
            window_slack: 120,
            window_widen: 0,
            capacity_mix: vec![(20, 1), (25, 1), (30, 3)],
            volume_mix: [4, 2, 2, 2],
            horizon: 24 * 60,
            coordinates: true,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.hubs < 2 && (self.schedules > 0 || self.requests > 0) {
            return bad("legs and requests need at least two hubs");
        }
        if self.schedules > 0
            && (self.min_legs_per_schedule == 0 || self.min_legs_per_schedule > self.legs_per_schedule)
        {
            return bad("schedules need between 1 and legs_per_schedule legs");
        }
        if !(0.0..=1.0).contains(&self.chain_share) {
            return bad("chain share must lie in [0, 1]");
        }
        if self.window_slack < 0 || self.window_widen < 0 || self.horizon <= 0 {
            return bad("window slack, widening and horizon must be non-negative");
        }
        if self.capacity_mix.is_empty()
            || self.capacity_mix.iter().any(|&(c, _)| c <= 0 || c > MAX_CAPACITY)
            || self.capacity_mix.iter().all(|&(_, w)| w == 0)
        {
            return bad("capacity mix needs positive weights on capacities in (0, 30]");
        }
        if self.volume_mix.iter().all(|&w| w == 0) {
            return bad("volume mix needs a positive weight");
        }
        Ok(())
    }
}

fn weighted<T: Copy>(rng: &mut ChaCha8Rng, items: &[(T, u32)]) -> T {
    let total: u32 = items.iter().map(|&(_, w)| w).sum();
    let mut x = rng.gen_range(0..total);
    for &(t, w) in items {
        if x < w {
            return t;
        }
        x -= w;
    }
    unreachable!("weights sum to total")
}

/// A valid instance determined entirely by `config`.
pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hubs: Vec<Hub> = (0..config.hubs)
        .map(|i| {
            let (x, y) = if config.coordinates {
                (Some(rng.gen_range(0..=400)), Some(rng.gen_range(0..=400)))
            } else {
                (None, None)
            };
            Hub { id: HubId(i), x, y }
        })
        .collect();
    let miles = |rng: &mut ChaCha8Rng, a: usize, b: usize| -> i64 {
        match (hubs[a].x, hubs[a].y, hubs[b].x, hubs[b].y) {
            (Some(ax), Some(ay), Some(bx), Some(by)) => {
                let (dx, dy) = ((ax - bx) as f64, (ay - by) as f64);
                ((dx * dx + dy * dy).sqrt().round() as i64).max(10)
            }
            _ => rng.gen_range(20..=300),
        }
    };

    let mut schedules = Vec::with_capacity(config.schedules);
    let mut legs: Vec<Leg> = Vec::new();
    for s in 0..config.schedules {
        let n = rng.gen_range(config.min_legs_per_schedule..=config.legs_per_schedule);
        let mut at = rng.gen_range(0..config.hubs);
        let mut t = rng.gen_range(0..=config.horizon / 2);
        let mut total_miles = 0;
        for _ in 0..n {
            let mut next = rng.gen_range(0..config.hubs - 1);
            if next >= at {
                next += 1;
            }
            let m = miles(&mut rng, at, next);
            // about 50 mph plus a fixed hook-up time
            let travel = 30 + m * 6 / 5;
            legs.push(Leg {
                id: LegId(legs.len()),
                schedule: ScheduleId(s),
                origin: HubId(at),
                dest: HubId(next),
                depart: t,
                arrive: t + travel,
                miles: m,
                capacity: weighted(&mut rng, &config.capacity_mix),
                mile_rate: 1_000,
            });
            total_miles += m;
            t += travel + rng.gen_range(0..=90);
            at = next;
        }
        schedules.push(Schedule {
            id: ScheduleId(s),
            fixed_cost: 50_000 + 1_500 * total_miles,
            is_dummy: false,
            request: None,
        });
    }

    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); config.hubs];
    for l in &legs {
        outgoing[l.origin.0].push(l.id.0);
    }
    let volume_items: Vec<(Deci, u32)> = VOLUMES.iter().copied().zip(config.volume_mix).collect();
    let mut requests = Vec::with_capacity(config.requests);
    for r in 0..config.requests {
        let from_chain = !legs.is_empty() && rng.gen_bool(config.chain_share);
        let request = if from_chain {
            let mut chain = vec![rng.gen_range(0..legs.len())];
            let mut visited = vec![legs[chain[0]].origin.0, legs[chain[0]].dest.0];
            let extra = rng.gen_range(0..=2);
            for _ in 0..extra {
                let last = &legs[*chain.last().unwrap()];
                let next: Vec<usize> = outgoing[last.dest.0]
                    .iter()
                    .copied()
                    .filter(|&l| legs[l].depart >= last.arrive && !visited.contains(&legs[l].dest.0))
                    .collect();
                let Some(&l) = next.choose(&mut rng) else { break };
                visited.push(legs[l].dest.0);
                chain.push(l);
            }
            let (first, last) = (&legs[chain[0]], &legs[*chain.last().unwrap()]);
            let room = chain.iter().map(|&l| legs[l].capacity).min().unwrap();
            let fitting: Vec<(Deci, u32)> = volume_items.iter().copied().filter(|&(v, w)| v <= room && w > 0).collect();
            let volume =
                if fitting.is_empty() { weighted(&mut rng, &volume_items) } else { weighted(&mut rng, &fitting) };
            let earliest = first.depart - rng.gen_range(0..=config.window_slack);
            let latest = last.arrive + rng.gen_range(0..=config.window_slack);
            Request { id: RequestId(r), origin: first.origin, dest: last.dest, earliest, latest, volume }
        } else {
            let o = rng.gen_range(0..config.hubs);
            let mut d = rng.gen_range(0..config.hubs - 1);
            if d >= o {
                d += 1;
            }
            let earliest = rng.gen_range(0..=config.horizon / 2);
            let latest = earliest + rng.gen_range(60..=config.horizon / 2 + 60);
            let volume = weighted(&mut rng, &volume_items);
            Request { id: RequestId(r), origin: HubId(o), dest: HubId(d), earliest, latest, volume }
        };
        requests.push(request);
    }
    for r in &mut requests {
        r.earliest -= config.window_widen / 2;
        r.latest += config.window_widen - config.window_widen / 2;
    }
    Instance::new(hubs, schedules, legs, requests)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, write_instance};
    use crate::reduction::optimal_subnetwork;

    #[test]
    fn same_seed_same_bytes() {
        let cfg = GeneratorConfig { seed: 7, ..GeneratorConfig::default() };
        assert_eq!(write_instance(&generate(&cfg).unwrap()), write_instance(&generate(&cfg).unwrap()));
    }

    #[test]
    fn no_requests_still_valid() {
        let inst = generate(&GeneratorConfig { requests: 0, ..GeneratorConfig::default() }).unwrap();
        assert!(inst.requests().is_empty());
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..50 {
            let inst =
                generate(&GeneratorConfig { seed, coordinates: seed % 2 == 0, ..GeneratorConfig::default() }).unwrap();
            assert!(validate_instance(&inst).is_empty(), "seed {seed}: {:?}", validate_instance(&inst));
        }
    }

    #[test]
    fn widening_only_grows_subnetworks() {
        for seed in 0..20 {
            let base = GeneratorConfig { seed, ..GeneratorConfig::default() };
            let wide = GeneratorConfig { window_widen: 60, ..base.clone() };
            let (a, b) = (generate(&base).unwrap(), generate(&wide).unwrap());
            for r in a.requests() {
                let small = optimal_subnetwork(&a, r.id);
                let big = optimal_subnetwork(&b, r.id);
                assert!(small.legs.iter().all(|l| big.contains(*l)), "seed {seed} request {}", r.id);
            }
        }
    }

    #[test]
    fn legs_without_hubs_rejected() {
        assert!(generate(&GeneratorConfig { hubs: 1, ..GeneratorConfig::default() }).is_err());
    }
}
