//! Domain types for trailer routing over scheduled legs.
//!
//! Units are fixed-point integers throughout:
//!
//! * time in minutes from the horizon start,
//! * trailer volume and leg capacity in deci-trailers (a short 28' trailer
//!   is 10, a 45' is 15, a 48' is 19, a 53' is 25; a tractor carries ≤ 30),
//! * money in milli-units. `mile_rate` is milli-units per mile per short
//!   trailer.

mod dummy;
mod io;
mod metrics;
mod validate;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dummy::{add_dummy_schedules, DummyConfig};
pub use io::{read_instance, read_solution, write_instance, write_solution, PathRecord};
pub use metrics::{compute_metrics, Metrics};
pub use validate::{validate_instance, validate_path, validate_solution, validate_walk, Rule, Violation};

pub type Minutes = i64;
pub type Money = i64;
/// Volume or capacity in tenths of a short trailer.
pub type Deci = i64;

/// Admissible request volumes: short, 45', 48' and long trailers.
pub const VOLUMES: [Deci; 4] = [10, 15, 19, 25];
pub const MAX_CAPACITY: Deci = 30;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(HubId);
id_type!(LegId);
id_type!(ScheduleId);
id_type!(RequestId);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hub {
    pub id: HubId,
    /// Planar coordinates in miles, used only to price dummy schedules.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub id: ScheduleId,
    pub fixed_cost: Money,
    #[serde(default)]
    pub is_dummy: bool,
    /// The request a dummy schedule was created for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request: Option<RequestId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub id: LegId,
    pub schedule: ScheduleId,
    pub origin: HubId,
    pub dest: HubId,
    pub depart: Minutes,
    pub arrive: Minutes,
    pub miles: i64,
    pub capacity: Deci,
    pub mile_rate: Money,
}

impl Leg {
    /// Mile cost of carrying `volume` deci-trailers on this leg, rounded to
    /// the nearest milli-unit.
    #[inline]
    pub fn mile_cost(&self, volume: Deci) -> Money {
        (self.mile_rate * self.miles * volume + 5) / 10
    }

    #[inline]
    pub fn duration(&self) -> Minutes {
        self.arrive - self.depart
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    pub origin: HubId,
    pub dest: HubId,
    pub earliest: Minutes,
    pub latest: Minutes,
    pub volume: Deci,
}

/// A request routed over an ordered list of legs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub request: RequestId,
    pub legs: Vec<LegId>,
    pub mile_cost: Money,
}

impl Path {
    /// Builds a path and prices it. Fails on unknown ids.
    pub fn new(instance: &Instance, request: RequestId, legs: Vec<LegId>) -> Result<Self> {
        let req = instance.try_request(request)?;
        let mut mile_cost = 0;
        for &l in &legs {
            mile_cost += instance.try_leg(l)?.mile_cost(req.volume);
        }
        Ok(Path { request, legs, mile_cost })
    }
}

/// Complete problem input: immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    hubs: Vec<Hub>,
    schedules: Vec<Schedule>,
    legs: Vec<Leg>,
    requests: Vec<Request>,
    base_plan: Vec<PathRecord>,
    hub_in: Vec<Vec<LegId>>,
    hub_out: Vec<Vec<LegId>>,
    schedule_legs: Vec<Vec<LegId>>,
}

impl Instance {
    /// Assembles an instance and derives adjacency. Every id must equal its
    /// position and every cross reference must resolve; the remaining
    /// invariants are reported by [`validate_instance`].
    pub fn new(hubs: Vec<Hub>, schedules: Vec<Schedule>, legs: Vec<Leg>, requests: Vec<Request>) -> Result<Self> {
        Self::with_base_plan(hubs, schedules, legs, requests, Vec::new())
    }

    pub fn with_base_plan(
        hubs: Vec<Hub>,
        schedules: Vec<Schedule>,
        legs: Vec<Leg>,
        requests: Vec<Request>,
        base_plan: Vec<PathRecord>,
    ) -> Result<Self> {
        fn dense<T>(items: &[T], id: impl Fn(&T) -> usize, section: &str) -> Result<()> {
            for (i, item) in items.iter().enumerate() {
                if id(item) != i {
                    return Err(Error::Parse {
                        path: format!("{section}[{i}].id"),
                        message: format!("ids must be dense and ordered, found {}", id(item)),
                    });
                }
            }
            Ok(())
        }
        dense(&hubs, |h| h.id.0, "hubs")?;
        dense(&schedules, |s| s.id.0, "schedules")?;
        dense(&legs, |l| l.id.0, "legs")?;
        dense(&requests, |r| r.id.0, "requests")?;

        let dangling = |path: String, what: &str, id: usize, n: usize| Error::Parse {
            path,
            message: format!("dangling {what} ref {id} of {n}"),
        };
        for (i, l) in legs.iter().enumerate() {
            if l.schedule.0 >= schedules.len() {
                return Err(dangling(format!("legs[{i}].schedule"), "schedule", l.schedule.0, schedules.len()));
            }
            for (field, h) in [("origin", l.origin), ("dest", l.dest)] {
                if h.0 >= hubs.len() {
                    return Err(dangling(format!("legs[{i}].{field}"), "hub", h.0, hubs.len()));
                }
            }
        }
        for (i, r) in requests.iter().enumerate() {
            for (field, h) in [("origin", r.origin), ("dest", r.dest)] {
                if h.0 >= hubs.len() {
                    return Err(dangling(format!("requests[{i}].{field}"), "hub", h.0, hubs.len()));
                }
            }
        }
        for (i, s) in schedules.iter().enumerate() {
            if let Some(r) = s.request {
                if r.0 >= requests.len() {
                    return Err(dangling(format!("schedules[{i}].request"), "request", r.0, requests.len()));
                }
            }
        }
        for (i, p) in base_plan.iter().enumerate() {
            if p.request.0 >= requests.len() {
                return Err(dangling(format!("base_plan[{i}].request"), "request", p.request.0, requests.len()));
            }
            for (j, l) in p.legs.iter().enumerate() {
                if l.0 >= legs.len() {
                    return Err(dangling(format!("base_plan[{i}].legs[{j}]"), "leg", l.0, legs.len()));
                }
            }
        }

        let mut hub_in = vec![Vec::new(); hubs.len()];
        let mut hub_out = vec![Vec::new(); hubs.len()];
        let mut schedule_legs = vec![Vec::new(); schedules.len()];
        for l in &legs {
            hub_out[l.origin.0].push(l.id);
            hub_in[l.dest.0].push(l.id);
            schedule_legs[l.schedule.0].push(l.id);
        }
        for sl in &mut schedule_legs {
            sl.sort_by_key(|&l| (legs[l.0].depart, l));
        }
        Ok(Instance { hubs, schedules, legs, requests, base_plan, hub_in, hub_out, schedule_legs })
    }

    pub fn hubs(&self) -> &[Hub] {
        &self.hubs
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    /// Seed paths for existing requests, if the instance file carried any.
    pub fn base_plan(&self) -> &[PathRecord] {
        &self.base_plan
    }

    #[inline]
    pub fn leg(&self, id: LegId) -> &Leg {
        &self.legs[id.0]
    }

    #[inline]
    pub fn request(&self, id: RequestId) -> &Request {
        &self.requests[id.0]
    }

    #[inline]
    pub fn schedule(&self, id: ScheduleId) -> &Schedule {
        &self.schedules[id.0]
    }

    pub fn try_leg(&self, id: LegId) -> Result<&Leg> {
        self.legs.get(id.0).ok_or(Error::UnknownId { kind: "leg", id: id.0 })
    }

    pub fn try_request(&self, id: RequestId) -> Result<&Request> {
        self.requests.get(id.0).ok_or(Error::UnknownId { kind: "request", id: id.0 })
    }

    /// Legs arriving at `hub`.
    #[inline]
    pub fn incoming(&self, hub: HubId) -> &[LegId] {
        &self.hub_in[hub.0]
    }

    /// Legs departing from `hub`.
    #[inline]
    pub fn outgoing(&self, hub: HubId) -> &[LegId] {
        &self.hub_out[hub.0]
    }

    /// Legs of a schedule in departure order.
    #[inline]
    pub fn schedule_legs(&self, id: ScheduleId) -> &[LegId] {
        &self.schedule_legs[id.0]
    }

    pub fn num_hubs(&self) -> usize {
        self.hubs.len()
    }

    /// Whether `request` may ride on `leg` at all: the leg has room for the
    /// trailer and is not a dummy leg reserved for a different request.
    #[inline]
    pub fn leg_usable_by(&self, leg: LegId, request: RequestId) -> bool {
        let l = &self.legs[leg.0];
        if self.requests[request.0].volume > l.capacity {
            return false;
        }
        let s = &self.schedules[l.schedule.0];
        !(s.is_dummy && s.request.is_some_and(|r| r != request))
    }

    /// The dummy leg created for `request`, if any.
    pub fn dummy_leg(&self, request: RequestId) -> Option<LegId> {
        self.schedules
            .iter()
            .filter(|s| s.is_dummy && s.request == Some(request))
            .flat_map(|s| self.schedule_legs[s.id.0].iter().copied())
            .next()
    }

    /// Straight-line distance between two hubs when both carry coordinates.
    pub fn euclid_miles(&self, a: HubId, b: HubId) -> Option<i64> {
        let (ha, hb) = (&self.hubs[a.0], &self.hubs[b.0]);
        let (ax, ay, bx, by) = (ha.x?, ha.y?, hb.x?, hb.y?);
        let (dx, dy) = ((ax - bx) as f64, (ay - by) as f64);
        Some((dx * dx + dy * dy).sqrt().round() as i64)
    }

    /// Stable fingerprint of the legs, schedules and hubs. Two instances
    /// that differ only in their request lists share a fingerprint.
    pub fn network_fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hubs.hash(&mut h);
        self.schedules.hash(&mut h);
        self.legs.hash(&mut h);
        h.finish()
    }

    #[allow(clippy::type_complexity)]
    pub(crate) fn into_parts(self) -> (Vec<Hub>, Vec<Schedule>, Vec<Leg>, Vec<Request>, Vec<PathRecord>) {
        (self.hubs, self.schedules, self.legs, self.requests, self.base_plan)
    }
}

impl Hash for Hub {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.id, self.x, self.y).hash(state)
    }
}

impl Hash for Schedule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.id, self.fixed_cost, self.is_dummy, self.request).hash(state)
    }
}

impl Hash for Leg {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.id, self.schedule, self.origin, self.dest, self.depart, self.arrive).hash(state);
        (self.miles, self.capacity, self.mile_rate).hash(state);
    }
}

/// A routed plan: one path per request plus the schedule activation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// `paths[r]` is the path of request `r`.
    pub paths: Vec<Path>,
    pub active: Vec<bool>,
    pub metrics: Metrics,
}

impl Solution {
    /// Builds a solution whose active schedules are exactly those used by
    /// some path, with metrics computed from the paths.
    pub fn from_paths(instance: &Instance, paths: Vec<Path>) -> Self {
        let mut active = vec![false; instance.schedules().len()];
        for p in &paths {
            for &l in &p.legs {
                active[instance.leg(l).schedule.0] = true;
            }
        }
        let metrics = Metrics::compute(instance, &paths, &active);
        Solution { paths, active, metrics }
    }

    pub fn objective(&self) -> Money {
        self.metrics.objective
    }
}
