//! Small hand-checkable instances used by the examples and tests.

use crate::model::{Hub, HubId, Instance, Leg, LegId, Minutes, Request, RequestId, Schedule, ScheduleId};

/// Three hubs A=0, B=1, C=2. Schedule 0 runs A→B (leg 0, 0–100, 50 mi) then
/// B→C (leg 1, 120–200, 30 mi) at 100 000 milli; schedule 1 runs A→C
/// directly (leg 2, 10–150, 90 mi) at 40 000 milli. One short trailer goes
/// from A to C within [0, 250]. All legs carry up to 30 deci-trailers at
/// 1 000 milli per mile per short trailer.
pub fn micro3() -> Instance {
    micro3_with_window(0, 250)
}

/// [`micro3`] with a different request window.
pub fn micro3_with_window(earliest: Minutes, latest: Minutes) -> Instance {
    let hubs = (0..3).map(|i| Hub { id: HubId(i), x: None, y: None }).collect();
    let schedules = vec![
        Schedule { id: ScheduleId(0), fixed_cost: 100_000, is_dummy: false, request: None },
        Schedule { id: ScheduleId(1), fixed_cost: 40_000, is_dummy: false, request: None },
    ];
    let leg = |id, schedule, origin, dest, depart, arrive, miles| Leg {
        id: LegId(id),
        schedule: ScheduleId(schedule),
        origin: HubId(origin),
        dest: HubId(dest),
        depart,
        arrive,
        miles,
        capacity: 30,
        mile_rate: 1_000,
    };
    let legs = vec![leg(0, 0, 0, 1, 0, 100, 50), leg(1, 0, 1, 2, 120, 200, 30), leg(2, 1, 0, 2, 10, 150, 90)];
    let requests = vec![Request { id: RequestId(0), origin: HubId(0), dest: HubId(2), earliest, latest, volume: 10 }];
    Instance::new(hubs, schedules, legs, requests).expect("micro3 is well formed")
}
