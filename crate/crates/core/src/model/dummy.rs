use serde::{Deserialize, Serialize};

use super::{Instance, Leg, LegId, Money, Schedule, ScheduleId};

/// Pricing of the direct fallback schedules added for every request.
///
/// With hub coordinates the schedule costs
/// `base + 2 * per_mile * euclid_miles(origin, dest)` (out and back); without
/// them it costs `fallback_cost` and its leg is `fallback_miles` long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DummyConfig {
    pub base: Money,
    pub per_mile: Money,
    pub fallback_cost: Money,
    pub fallback_miles: i64,
    pub mile_rate: Money,
}

impl Default for DummyConfig {
    fn default() -> Self {
        DummyConfig { base: 1_000_000, per_mile: 4_000, fallback_cost: 5_000_000, fallback_miles: 0, mile_rate: 1_000 }
    }
}

/// Appends one dummy schedule per request that does not have one yet. The
/// dummy has a single leg from the request origin to its destination that
/// departs at the earliest time, arrives at the latest time and fits exactly
/// the request's volume. Existing entities keep their ids.
pub fn add_dummy_schedules(instance: &Instance, config: &DummyConfig) -> Instance {
    let covered: Vec<bool> = {
        let mut c = vec![false; instance.requests().len()];
        for s in instance.schedules() {
            if let (true, Some(r)) = (s.is_dummy, s.request) {
                c[r.0] = true;
            }
        }
        c
    };
    if covered.iter().all(|&c| c) {
        return instance.clone();
    }
    let new: Vec<(Schedule, Leg)> = instance
        .requests()
        .iter()
        .filter(|r| !covered[r.id.0])
        .enumerate()
        .map(|(k, r)| {
            let (miles, fixed_cost) = match instance.euclid_miles(r.origin, r.dest) {
                Some(m) => (m, config.base + 2 * config.per_mile * m),
                None => (config.fallback_miles, config.fallback_cost),
            };
            let sid = ScheduleId(instance.schedules().len() + k);
            let schedule = Schedule { id: sid, fixed_cost, is_dummy: true, request: Some(r.id) };
            let leg = Leg {
                id: LegId(instance.legs().len() + k),
                schedule: sid,
                origin: r.origin,
                dest: r.dest,
                depart: r.earliest,
                arrive: r.latest,
                miles,
                capacity: r.volume,
                mile_rate: config.mile_rate,
            };
            (schedule, leg)
        })
        .collect();
    let (hubs, mut schedules, mut legs, requests, base_plan) = instance.clone().into_parts();
    for (s, l) in new {
        schedules.push(s);
        legs.push(l);
    }
    Instance::with_base_plan(hubs, schedules, legs, requests, base_plan)
        .expect("dummy schedules reference existing hubs and requests")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, HubId, RequestId};
    use crate::samples::micro3;

    #[test]
    fn one_dummy_per_request() {
        let inst = add_dummy_schedules(&micro3(), &DummyConfig::default());
        assert_eq!(inst.schedules().len(), 3);
        assert_eq!(inst.legs().len(), 4);
        assert!(validate_instance(&inst).is_empty());
        let d = inst.leg(inst.dummy_leg(RequestId(0)).unwrap());
        assert_eq!((d.depart, d.arrive), (0, 250));
        assert_eq!((d.origin, d.dest), (HubId(0), HubId(2)));
        assert_eq!(d.capacity, 10);
    }

    #[test]
    fn idempotent() {
        let cfg = DummyConfig::default();
        let once = add_dummy_schedules(&micro3(), &cfg);
        assert_eq!(add_dummy_schedules(&once, &cfg), once);
    }

    #[test]
    fn no_requests_no_change() {
        let (h, s, l, _, _) = micro3().into_parts();
        let inst = Instance::new(h, s, l, vec![]).unwrap();
        assert_eq!(add_dummy_schedules(&inst, &DummyConfig::default()), inst);
    }

    #[test]
    fn coordinates_price_out_and_back() {
        let (mut h, s, l, r, _) = micro3().into_parts();
        for (i, hub) in h.iter_mut().enumerate() {
            hub.x = Some(0);
            hub.y = Some(100 * i as i64);
        }
        let inst = Instance::new(h, s, l, r).unwrap();
        let cfg = DummyConfig::default();
        let inst = add_dummy_schedules(&inst, &cfg);
        let d = inst.schedules().last().unwrap();
        assert_eq!(d.fixed_cost, cfg.base + 2 * cfg.per_mile * 200);
        assert_eq!(inst.leg(inst.dummy_leg(RequestId(0)).unwrap()).miles, 200);
    }
}
