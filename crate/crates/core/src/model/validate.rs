use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Instance, Metrics, Path, Solution, MAX_CAPACITY, VOLUMES};
use crate::error::Result;

/// Which rule a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    TravelTime,
    SelfLoop,
    Capacity,
    Volume,
    RequestWindow,
    ScheduleChain,
    DummyShape,
    EmptyPath,
    Origin,
    Destination,
    Chaining,
    Window,
    Cycle,
    LegUnusable,
    PathCost,
    PathCount,
    LegOverload,
    InactiveSchedule,
    ActiveLength,
    Metrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub message: String,
}

impl Violation {
    fn new(rule: Rule, message: impl Into<String>) -> Self {
        Violation { rule, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    for l in instance.legs() {
        if l.arrive <= l.depart {
            out.push(Violation::new(Rule::TravelTime, format!("leg {}: travel time must be strictly positive", l.id)));
        }
        if l.origin == l.dest {
            out.push(Violation::new(Rule::SelfLoop, format!("leg {}: origin and destination coincide", l.id)));
        }
        if l.capacity <= 0 || l.capacity > MAX_CAPACITY {
            out.push(Violation::new(
                Rule::Capacity,
                format!("leg {}: capacity {} outside (0, {MAX_CAPACITY}]", l.id, l.capacity),
            ));
        }
        if l.miles < 0 || l.mile_rate < 0 {
            out.push(Violation::new(Rule::Capacity, format!("leg {}: miles and mile rate must be non-negative", l.id)));
        }
    }
    for r in instance.requests() {
        if !VOLUMES.contains(&r.volume) {
            out.push(Violation::new(Rule::Volume, format!("request {}: volume not in {{10,15,19,25}}", r.id)));
        }
        if r.earliest >= r.latest {
            out.push(Violation::new(Rule::RequestWindow, format!("request {}: earliest must precede latest", r.id)));
        }
        if r.origin == r.dest {
            out.push(Violation::new(Rule::SelfLoop, format!("request {}: origin and destination coincide", r.id)));
        }
    }
    for s in instance.schedules() {
        if s.fixed_cost < 0 {
            out.push(Violation::new(Rule::ScheduleChain, format!("schedule {}: negative fixed cost", s.id)));
        }
        let legs = instance.schedule_legs(s.id);
        for w in legs.windows(2) {
            let (a, b) = (instance.leg(w[0]), instance.leg(w[1]));
            if b.depart < a.arrive || b.origin != a.dest {
                out.push(Violation::new(
                    Rule::ScheduleChain,
                    format!("schedule {}: legs {} and {} do not chain", s.id, a.id, b.id),
                ));
            }
        }
        if s.is_dummy {
            let ok = match (legs, s.request) {
                ([l], Some(r)) => {
                    let (l, r) = (instance.leg(*l), instance.request(r));
                    l.origin == r.origin && l.dest == r.dest
                }
                ([_], None) => true,
                _ => false,
            };
            if !ok {
                out.push(Violation::new(
                    Rule::DummyShape,
                    format!("schedule {}: dummy must be one direct leg for its request", s.id),
                ));
            }
        }
    }
    out
}

/// Checks the path-feasibility rules on an arbitrary leg chain: origin and
/// destination, hub chaining, departure-after-arrival at every transfer,
/// the request window, and per-leg usability. Hubs may repeat; see
/// [`validate_path`] for the simple-path check.
pub fn validate_walk(instance: &Instance, path: &Path) -> Result<Vec<Violation>> {
    let req = instance.try_request(path.request)?;
    for &l in &path.legs {
        instance.try_leg(l)?;
    }
    let mut out = Vec::new();
    let (Some(&first), Some(&last)) = (path.legs.first(), path.legs.last()) else {
        out.push(Violation::new(Rule::EmptyPath, format!("request {}: empty path", req.id)));
        return Ok(out);
    };
    let (first, last) = (instance.leg(first), instance.leg(last));
    if first.origin != req.origin {
        out.push(Violation::new(
            Rule::Origin,
            format!("path starts at hub {}, not the request origin {}", first.origin, req.origin),
        ));
    }
    if last.dest != req.dest {
        out.push(Violation::new(
            Rule::Destination,
            format!("path does not reach q_r: ends at hub {}, not {}", last.dest, req.dest),
        ));
    }
    if first.depart < req.earliest {
        out.push(Violation::new(
            Rule::Window,
            format!("leg {} departs at {} before earliest {}", first.id, first.depart, req.earliest),
        ));
    }
    if last.arrive > req.latest {
        out.push(Violation::new(
            Rule::Window,
            format!("leg {} arrives at {} after latest {}", last.id, last.arrive, req.latest),
        ));
    }
    for w in path.legs.windows(2) {
        let (a, b) = (instance.leg(w[0]), instance.leg(w[1]));
        if a.dest != b.origin {
            out.push(Violation::new(Rule::Chaining, format!("legs {} and {} do not share a hub", a.id, b.id)));
        }
        if b.depart < a.arrive {
            out.push(Violation::new(
                Rule::Chaining,
                format!("leg order: leg {} departs at {} before leg {} arrives at {}", b.id, b.depart, a.id, a.arrive),
            ));
        }
    }
    for &l in &path.legs {
        let leg = instance.leg(l);
        if leg.dest == req.origin {
            out.push(Violation::new(Rule::Origin, format!("leg {} re-enters the request origin", l)));
        }
        if leg.origin == req.dest {
            out.push(Violation::new(Rule::Destination, format!("leg {} leaves the request destination", l)));
        }
        if !instance.leg_usable_by(l, req.id) {
            out.push(Violation::new(Rule::LegUnusable, format!("leg {} cannot carry request {}", l, req.id)));
        }
    }
    let cost: i64 = path.legs.iter().map(|&l| instance.leg(l).mile_cost(req.volume)).sum();
    if cost != path.mile_cost {
        out.push(Violation::new(
            Rule::PathCost,
            format!("request {}: stored mile cost {} is inconsistent", req.id, path.mile_cost),
        ));
    }
    Ok(out)
}

/// [`validate_walk`] plus simplicity: no hub may be visited twice.
pub fn validate_path(instance: &Instance, path: &Path) -> Result<Vec<Violation>> {
    let mut out = validate_walk(instance, path)?;
    if let Some(&first) = path.legs.first() {
        let mut seen = HashSet::new();
        seen.insert(instance.leg(first).origin);
        for &l in &path.legs {
            let h = instance.leg(l).dest;
            if !seen.insert(h) {
                out.push(Violation::new(Rule::Cycle, format!("path visits hub {h} twice")));
            }
        }
    }
    Ok(out)
}

pub fn validate_solution(instance: &Instance, solution: &Solution) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.requests().len();
    if solution.paths.len() != n {
        out.push(Violation::new(Rule::PathCount, format!("{} paths for {} requests", solution.paths.len(), n)));
    }
    if solution.active.len() != instance.schedules().len() {
        out.push(Violation::new(
            Rule::ActiveLength,
            format!(
                "activation vector has {} entries for {} schedules",
                solution.active.len(),
                instance.schedules().len()
            ),
        ));
        return out;
    }
    let mut load = vec![0i64; instance.legs().len()];
    for (i, p) in solution.paths.iter().enumerate() {
        if p.request.0 != i {
            out.push(Violation::new(Rule::PathCount, format!("path {i} belongs to request {}", p.request)));
            continue;
        }
        match validate_path(instance, p) {
            Ok(v) => out.extend(v.into_iter().map(|mut v| {
                v.message = format!("request {i}: {}", v.message);
                v
            })),
            Err(e) => {
                out.push(Violation::new(Rule::LegUnusable, format!("request {i}: {e}")));
                continue;
            }
        }
        let vol = instance.request(p.request).volume;
        for &l in &p.legs {
            load[l.0] += vol;
        }
    }
    for l in instance.legs() {
        let used = load[l.id.0];
        if used > l.capacity {
            out.push(Violation::new(
                Rule::LegOverload,
                format!("leg capacity exceeded: {} > {} on leg {}", used, l.capacity, l.id),
            ));
        }
        if used > 0 && !solution.active[l.schedule.0] {
            out.push(Violation::new(
                Rule::InactiveSchedule,
                format!("schedule {} inactive but leg {} used", l.schedule, l.id),
            ));
        }
    }
    if out.is_empty() {
        let expected = Metrics::compute(instance, &solution.paths, &solution.active);
        if expected != solution.metrics {
            out.push(Violation::new(
                Rule::Metrics,
                format!("reported metrics {:?} differ from recomputed {:?}", solution.metrics, expected),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{HubId, LegId, RequestId, ScheduleId};
    use crate::samples::{micro3, micro3_with_window};

    fn rebuild(
        inst: &Instance,
        f: impl FnOnce(&mut Vec<super::super::Leg>, &mut Vec<super::super::Request>),
    ) -> Instance {
        let (h, s, mut l, mut r, _) = inst.clone().into_parts();
        f(&mut l, &mut r);
        Instance::new(h, s, l, r).unwrap()
    }

    #[test]
    fn micro3_is_well_formed() {
        assert!(validate_instance(&micro3()).is_empty());
    }

    #[test]
    fn zero_travel_time_rejected() {
        let inst = rebuild(&micro3(), |l, _| l[0].arrive = l[0].depart);
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "leg 0: travel time must be strictly positive");
    }

    #[test]
    fn odd_volume_rejected() {
        let inst = rebuild(&micro3(), |_, r| r[0].volume = 12);
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "request 0: volume not in {10,15,19,25}");
    }

    #[test]
    fn schedule_chain_checked() {
        // leg 1 departs before leg 0 arrives at the shared hub
        let inst = rebuild(&micro3(), |l, _| l[1].depart = 90);
        let v = validate_instance(&inst);
        assert!(v.iter().any(|v| v.rule == Rule::ScheduleChain), "{v:?}");
    }

    #[test]
    fn two_leg_path_is_feasible() {
        let inst = micro3();
        let p = Path::new(&inst, RequestId(0), vec![LegId(0), LegId(1)]).unwrap();
        assert!(validate_path(&inst, &p).unwrap().is_empty());
        assert_eq!(p.mile_cost, 80_000);
    }

    #[test]
    fn out_of_order_legs_rejected() {
        let inst = rebuild(&micro3(), |l, _| {
            l[1].depart = 60;
            l[1].arrive = 140;
        });
        let p = Path::new(&inst, RequestId(0), vec![LegId(0), LegId(1)]).unwrap();
        let v = validate_path(&inst, &p).unwrap();
        assert!(v.iter().any(|v| v.rule == Rule::Chaining && v.message.starts_with("leg order")));
    }

    #[test]
    fn path_must_reach_destination() {
        let inst = micro3();
        let p = Path::new(&inst, RequestId(0), vec![LegId(0)]).unwrap();
        let v = validate_path(&inst, &p).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Destination);
        assert!(v[0].message.starts_with("path does not reach q_r"));
    }

    #[test]
    fn window_violation_detected() {
        let inst = micro3_with_window(0, 160);
        let p = Path::new(&inst, RequestId(0), vec![LegId(0), LegId(1)]).unwrap();
        let v = validate_path(&inst, &p).unwrap();
        assert!(v.iter().any(|v| v.rule == Rule::Window));
    }

    #[test]
    fn unknown_leg_is_an_error() {
        let inst = micro3();
        let p = Path { request: RequestId(0), legs: vec![LegId(7)], mile_cost: 0 };
        assert!(validate_path(&inst, &p).is_err());
    }

    #[test]
    fn cycle_rejected_but_walk_accepted() {
        // A→B, B→A is impossible (legs into the origin), so build
        // A→B→D→B→C over a 4-hub network.
        use crate::model::{Hub, Leg, Request, Schedule};
        let hubs = (0..4).map(|i| Hub { id: HubId(i), x: None, y: None }).collect();
        let schedules = vec![Schedule { id: ScheduleId(0), fixed_cost: 1, is_dummy: false, request: None }];
        let mk = |id, o, d, t0, t1| Leg {
            id: LegId(id),
            schedule: ScheduleId(0),
            origin: HubId(o),
            dest: HubId(d),
            depart: t0,
            arrive: t1,
            miles: 1,
            capacity: 30,
            mile_rate: 1,
        };
        let legs = vec![mk(0, 0, 1, 0, 1), mk(1, 1, 3, 2, 3), mk(2, 3, 1, 4, 5), mk(3, 1, 2, 6, 7)];
        let requests =
            vec![Request { id: RequestId(0), origin: HubId(0), dest: HubId(2), earliest: 0, latest: 10, volume: 10 }];
        let inst = Instance::new(hubs, schedules, legs, requests).unwrap();
        let p = Path::new(&inst, RequestId(0), (0..4).map(LegId).collect()).unwrap();
        assert!(validate_walk(&inst, &p).unwrap().is_empty());
        let v = validate_path(&inst, &p).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Cycle);
    }

    #[test]
    fn overload_and_inactive_schedule_detected() {
        let inst = rebuild(&micro3(), |_, r| {
            r[0].volume = 25;
            let mut r1 = r[0].clone();
            r1.id = RequestId(1);
            r.push(r1);
        });
        let paths = vec![
            Path::new(&inst, RequestId(0), vec![LegId(2)]).unwrap(),
            Path::new(&inst, RequestId(1), vec![LegId(2)]).unwrap(),
        ];
        let sol = Solution::from_paths(&inst, paths.clone());
        let v = validate_solution(&inst, &sol);
        assert!(v.iter().any(|v| v.message.starts_with("leg capacity exceeded: 50 > 30")), "{v:?}");

        let mut sol = Solution::from_paths(&inst, paths[..1].to_vec());
        sol.paths.push(Path::new(&inst, RequestId(1), vec![LegId(0), LegId(1)]).unwrap());
        sol.metrics = Metrics::compute(&inst, &sol.paths, &sol.active);
        let v = validate_solution(&inst, &sol);
        assert!(v.iter().any(|v| v.message == "schedule 0 inactive but leg 0 used"), "{v:?}");
    }

    #[test]
    fn inconsistent_metrics_detected() {
        let inst = micro3();
        let mut sol = Solution::from_paths(&inst, vec![Path::new(&inst, RequestId(0), vec![LegId(2)]).unwrap()]);
        assert!(validate_solution(&inst, &sol).is_empty());
        sol.metrics.objective += 1;
        let v = validate_solution(&inst, &sol);
        assert_eq!(v[0].rule, Rule::Metrics);
    }
}
