//! Exact per-request network reduction.
//!
//! For a request, a leg survives iff the earliest arrival time at its
//! origin hub is no later than its departure and its arrival is no later
//! than the latest start time from its destination hub. Both label sets are
//! computed by a Dijkstra-style sweep: latest start times backwards from the
//! request destination, earliest arrival times forwards from the origin.
//! The surviving legs are exactly the legs lying on some time-feasible leg
//! chain for the request.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{HubId, Instance, LegId, Minutes, Request, RequestId};

/// Per-request labels and surviving legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubNetwork {
    pub request: RequestId,
    /// Earliest arrival time per hub; `None` is unreachable (+∞).
    pub eat: Vec<Option<Minutes>>,
    /// Latest start time per hub; `None` cannot reach the destination (−∞).
    pub lst: Vec<Option<Minutes>>,
    /// Leg realising `eat[h]`, for path reconstruction.
    pub eat_via: Vec<Option<LegId>>,
    /// Leg realising `lst[h]`, for path reconstruction.
    pub lst_via: Vec<Option<LegId>>,
    /// Surviving legs, sorted by id.
    pub legs: Vec<LegId>,
    /// Hubs touched by surviving legs, sorted.
    pub hubs: Vec<HubId>,
}

impl SubNetwork {
    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }

    pub fn contains(&self, leg: LegId) -> bool {
        self.legs.binary_search(&leg).is_ok()
    }

    /// Builds an explicit feasible leg chain through `leg`: the
    /// earliest-arrival chain into its origin, the leg itself, then the
    /// latest-start chain out of its destination. `None` if the leg did not
    /// survive.
    pub fn witness_path(&self, instance: &Instance, leg: LegId) -> Option<Vec<LegId>> {
        if !self.contains(leg) {
            return None;
        }
        let req = instance.request(self.request);
        let l = instance.leg(leg);
        let mut prefix = Vec::new();
        let mut h = l.origin;
        while h != req.origin {
            let via = self.eat_via[h.0]?;
            prefix.push(via);
            h = instance.leg(via).origin;
        }
        prefix.reverse();
        prefix.push(leg);
        let mut h = l.dest;
        while h != req.dest {
            let via = self.lst_via[h.0]?;
            prefix.push(via);
            h = instance.leg(via).dest;
        }
        Some(prefix)
    }
}

/// Legs request `request` could ever use: enough capacity, not reserved for
/// another request, not entering its origin or leaving its destination, and
/// inside its time window.
pub fn preprocess(instance: &Instance, request: RequestId) -> Vec<LegId> {
    let r = instance.request(request);
    instance
        .legs()
        .iter()
        .filter(|l| {
            instance.leg_usable_by(l.id, request)
                && l.dest != r.origin
                && l.origin != r.dest
                && l.depart >= r.earliest
                && l.arrive <= r.latest
        })
        .map(|l| l.id)
        .collect()
}

struct Adjacency {
    incoming: Vec<Vec<LegId>>,
    outgoing: Vec<Vec<LegId>>,
}

impl Adjacency {
    fn new(instance: &Instance, legs: &[LegId]) -> Self {
        let n = instance.num_hubs();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for &l in legs {
            let leg = instance.leg(l);
            outgoing[leg.origin.0].push(l);
            incoming[leg.dest.0].push(l);
        }
        Adjacency { incoming, outgoing }
    }
}

/// Latest start times: `lst[q] = latest`, and for any other hub the latest
/// departure of an outgoing leg whose arrival still meets the label of its
/// destination. Labels below the request's earliest time are recorded but
/// never expanded.
pub fn lsp(instance: &Instance, request: RequestId, filtered: &[LegId]) -> Vec<Option<Minutes>> {
    lsp_impl(instance, instance.request(request), &Adjacency::new(instance, filtered)).0
}

fn lsp_impl(instance: &Instance, req: &Request, adj: &Adjacency) -> (Vec<Option<Minutes>>, Vec<Option<LegId>>) {
    let n = instance.num_hubs();
    let mut lst: Vec<Option<Minutes>> = vec![None; n];
    let mut via = vec![None; n];
    let mut done = vec![false; n];
    lst[req.dest.0] = Some(req.latest);
    // max-heap on the label, smaller hub id first on ties
    let mut heap = BinaryHeap::new();
    heap.push((req.latest, Reverse(req.dest)));
    while let Some((t, Reverse(h))) = heap.pop() {
        if done[h.0] {
            continue;
        }
        done[h.0] = true;
        if t < req.earliest {
            continue;
        }
        for &l in &adj.incoming[h.0] {
            let leg = instance.leg(l);
            if leg.arrive > t {
                continue;
            }
            let o = leg.origin;
            if done[o.0] {
                continue;
            }
            if lst[o.0].is_none_or(|cur| leg.depart > cur) {
                lst[o.0] = Some(leg.depart);
                via[o.0] = Some(l);
                heap.push((leg.depart, Reverse(o)));
            }
        }
    }
    (lst, via)
}

/// Earliest arrival times: `eat[p] = earliest`, and for any other hub the
/// earliest arrival of an incoming leg that departs no earlier than the
/// label of its origin.
pub fn eap(instance: &Instance, request: RequestId, filtered: &[LegId]) -> Vec<Option<Minutes>> {
    eap_impl(instance, instance.request(request), &Adjacency::new(instance, filtered)).0
}

fn eap_impl(instance: &Instance, req: &Request, adj: &Adjacency) -> (Vec<Option<Minutes>>, Vec<Option<LegId>>) {
    let n = instance.num_hubs();
    let mut eat: Vec<Option<Minutes>> = vec![None; n];
    let mut via = vec![None; n];
    let mut done = vec![false; n];
    eat[req.origin.0] = Some(req.earliest);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((req.earliest, req.origin)));
    while let Some(Reverse((t, h))) = heap.pop() {
        if done[h.0] {
            continue;
        }
        done[h.0] = true;
        if t > req.latest {
            continue;
        }
        for &l in &adj.outgoing[h.0] {
            let leg = instance.leg(l);
            if leg.depart < t {
                continue;
            }
            let d = leg.dest;
            if done[d.0] {
                continue;
            }
            if eat[d.0].is_none_or(|cur| leg.arrive < cur) {
                eat[d.0] = Some(leg.arrive);
                via[d.0] = Some(l);
                heap.push(Reverse((leg.arrive, d)));
            }
        }
    }
    (eat, via)
}

/// The exact set of legs on some feasible leg chain for `request`.
pub fn optimal_subnetwork(instance: &Instance, request: RequestId) -> SubNetwork {
    let filtered = preprocess(instance, request);
    let req = instance.request(request);
    let adj = Adjacency::new(instance, &filtered);
    let (lst, lst_via) = lsp_impl(instance, req, &adj);
    let (eat, eat_via) = eap_impl(instance, req, &adj);
    let legs: Vec<LegId> = filtered
        .into_iter()
        .filter(|&l| {
            let leg = instance.leg(l);
            matches!(eat[leg.origin.0], Some(e) if e <= leg.depart)
                && matches!(lst[leg.dest.0], Some(s) if leg.arrive <= s)
        })
        .collect();
    let hubs = hubs_of(instance, &legs);
    SubNetwork { request, eat, lst, eat_via, lst_via, legs, hubs }
}

/// Same labels as [`optimal_subnetwork`] but keeps every preprocessed leg.
/// Used to measure what the reduction buys.
pub fn unreduced_subnetwork(instance: &Instance, request: RequestId) -> SubNetwork {
    let mut sub = optimal_subnetwork(instance, request);
    sub.legs = preprocess(instance, request);
    sub.hubs = hubs_of(instance, &sub.legs);
    sub
}

fn hubs_of(instance: &Instance, legs: &[LegId]) -> Vec<HubId> {
    let mut hubs: Vec<HubId> = legs.iter().flat_map(|&l| [instance.leg(l).origin, instance.leg(l).dest]).collect();
    hubs.sort_unstable();
    hubs.dedup();
    hubs
}

/// Sub-networks of all requests, indexed by request id. Requests are
/// processed independently in parallel.
pub fn reduce_all(instance: &Instance) -> Vec<SubNetwork> {
    (0..instance.requests().len()).into_par_iter().map(|r| optimal_subnetwork(instance, RequestId(r))).collect()
}

/// Per-request unreduced networks, for `--no-reduce` runs.
pub fn unreduced_all(instance: &Instance) -> Vec<SubNetwork> {
    (0..instance.requests().len()).into_par_iter().map(|r| unreduced_subnetwork(instance, RequestId(r))).collect()
}

/// Caches sub-networks by network fingerprint and request data, so that
/// adding requests to an unchanged network only labels the new ones.
#[derive(Debug, Default)]
pub struct SubNetworkCache {
    entries: HashMap<(u64, Request), SubNetwork>,
    hits: usize,
    misses: usize,
}

impl SubNetworkCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reduce_all(&mut self, instance: &Instance) -> Vec<SubNetwork> {
        let fp = instance.network_fingerprint();
        let missing: Vec<RequestId> = instance
            .requests()
            .iter()
            .filter(|&r| !self.entries.contains_key(&(fp, r.clone())))
            .map(|r| r.id)
            .collect();
        let fresh: Vec<SubNetwork> = missing.par_iter().map(|&r| optimal_subnetwork(instance, r)).collect();
        self.misses += fresh.len();
        self.hits += instance.requests().len() - fresh.len();
        for sub in fresh {
            let key = (fp, instance.request(sub.request).clone());
            self.entries.insert(key, sub);
        }
        instance
            .requests()
            .iter()
            .map(|r| {
                let mut sub = self.entries[&(fp, r.clone())].clone();
                sub.request = r.id;
                sub
            })
            .collect()
    }

    /// (hits, misses) since creation.
    pub fn stats(&self) -> (usize, usize) {
        (self.hits, self.misses)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionStats {
    pub legs_before: usize,
    pub legs_after: usize,
    pub pruned_pct: f64,
}

impl ReductionStats {
    /// Totals over all requests: legs before counts every leg once per
    /// request.
    pub fn of(instance: &Instance, subs: &[SubNetwork]) -> Self {
        let legs_before = instance.legs().len() * subs.len();
        let legs_after: usize = subs.iter().map(|s| s.legs.len()).sum();
        let pruned_pct =
            if legs_before == 0 { 0.0 } else { 100.0 * (legs_before - legs_after) as f64 / legs_before as f64 };
        ReductionStats { legs_before, legs_after, pruned_pct }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Hub, Leg, Schedule, ScheduleId};
    use crate::samples::{micro3, micro3_with_window};

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn legs(ids: &[usize]) -> Vec<LegId> {
        ids.iter().map(|&i| LegId(i)).collect()
    }

    #[test]
    fn preprocess_keeps_all_micro3_legs() {
        assert_eq!(preprocess(&micro3(), RequestId(0)), legs(&[0, 1, 2]));
    }

    #[test]
    fn preprocess_drops_small_and_early_legs() {
        let (h, s, mut l, mut r, _) = micro3().into_parts();
        l[0].capacity = 10;
        r[0].volume = 25;
        let inst = Instance::new(h.clone(), s.clone(), l.clone(), r).unwrap();
        assert_eq!(preprocess(&inst, RequestId(0)), legs(&[1, 2]));

        l[0].capacity = 30;
        l[2].depart = -5;
        let r = micro3().requests().to_vec();
        let inst = Instance::new(h, s, l, r).unwrap();
        assert_eq!(preprocess(&inst, RequestId(0)), legs(&[0, 1]));
    }

    #[test]
    fn micro3_labels() {
        let inst = micro3();
        let f = preprocess(&inst, RequestId(0));
        assert_eq!(lsp(&inst, RequestId(0), &f), vec![Some(10), Some(120), Some(250)]);
        assert_eq!(eap(&inst, RequestId(0), &f), vec![Some(0), Some(100), Some(150)]);
    }

    #[test]
    fn no_leg_into_destination() {
        let inst = micro3();
        let f = preprocess(&inst, RequestId(0));
        let only_first: Vec<LegId> = f.into_iter().filter(|&l| l == LegId(0)).collect();
        let lst = lsp(&inst, RequestId(0), &only_first);
        assert_eq!(lst, vec![None, None, Some(250)]);
    }

    #[test]
    fn single_direct_leg() {
        let inst = micro3();
        let lst = lsp(&inst, RequestId(0), &legs(&[2]));
        assert_eq!(lst[A], Some(10));
        let eat = eap(&inst, RequestId(0), &legs(&[2]));
        assert_eq!(eat[B], None);
    }

    #[test]
    fn eap_ignores_legs_leaving_too_early() {
        // leg 1 leaves B at 120; make leg 0 arrive at B only at 130
        let (h, s, mut l, r, _) = micro3().into_parts();
        l[0].arrive = 130;
        let inst = Instance::new(h, s, l, r).unwrap();
        let eat = eap(&inst, RequestId(0), &legs(&[0, 1, 2]));
        assert_eq!(eat[B], Some(130));
        assert_eq!(eat[C], Some(150));
        let sub = optimal_subnetwork(&inst, RequestId(0));
        assert_eq!(sub.legs, legs(&[2]));
    }

    #[test]
    fn micro3_subnetworks() {
        assert_eq!(optimal_subnetwork(&micro3(), RequestId(0)).legs, legs(&[0, 1, 2]));
        assert_eq!(optimal_subnetwork(&micro3_with_window(0, 160), RequestId(0)).legs, legs(&[2]));
        let empty = optimal_subnetwork(&micro3_with_window(0, 50), RequestId(0));
        assert!(empty.is_empty());
        assert!(empty.hubs.is_empty());
    }

    #[test]
    fn witness_paths_in_micro3() {
        let inst = micro3();
        let sub = optimal_subnetwork(&inst, RequestId(0));
        assert_eq!(sub.witness_path(&inst, LegId(0)), Some(legs(&[0, 1])));
        assert_eq!(sub.witness_path(&inst, LegId(1)), Some(legs(&[0, 1])));
        assert_eq!(sub.witness_path(&inst, LegId(2)), Some(legs(&[2])));
    }

    #[test]
    fn reduce_all_cases() {
        let subs = reduce_all(&micro3());
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].legs, legs(&[0, 1, 2]));

        let (h, s, l, mut r, _) = micro3().into_parts();
        let none = Instance::new(h.clone(), s.clone(), l.clone(), vec![]).unwrap();
        assert!(reduce_all(&none).is_empty());

        let mut twin = r[0].clone();
        twin.id = RequestId(1);
        r.push(twin);
        let inst = Instance::new(h, s, l, r).unwrap();
        let subs = reduce_all(&inst);
        assert_eq!(subs[0].legs, subs[1].legs);
        assert_eq!(subs[0].eat, subs[1].eat);
    }

    #[test]
    fn cache_only_labels_new_requests() {
        let mut cache = SubNetworkCache::new();
        let inst = micro3();
        let first = cache.reduce_all(&inst);
        assert_eq!(cache.stats(), (0, 1));
        let (h, s, l, mut r, _) = inst.into_parts();
        let mut extra = r[0].clone();
        extra.id = RequestId(1);
        extra.latest = 160;
        r.push(extra);
        let grown = Instance::new(h, s, l, r).unwrap();
        let second = cache.reduce_all(&grown);
        assert_eq!(cache.stats(), (1, 2));
        assert_eq!(second[0], first[0]);
        assert_eq!(second[1].legs, legs(&[2]));
    }

    #[test]
    fn walk_only_leg_survives() {
        // p=0 → a=1 → i=2 → j=3 → a=1 → q=4: leg 2→3 lies only on a walk
        // that revisits hub 1.
        let hubs = (0..5).map(|i| Hub { id: HubId(i), x: None, y: None }).collect();
        let schedules = vec![Schedule { id: ScheduleId(0), fixed_cost: 0, is_dummy: false, request: None }];
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
        let l = vec![
            mk(0, 0, 1, 0, 10),
            mk(1, 1, 2, 15, 20),
            mk(2, 2, 3, 30, 40),
            mk(3, 3, 1, 50, 60),
            mk(4, 1, 4, 70, 80),
        ];
        let r =
            vec![Request { id: RequestId(0), origin: HubId(0), dest: HubId(4), earliest: 0, latest: 100, volume: 10 }];
        let inst = Instance::new(hubs, schedules, l, r).unwrap();
        let sub = optimal_subnetwork(&inst, RequestId(0));
        assert_eq!(sub.legs, legs(&[0, 1, 2, 3, 4]));
        assert_eq!(sub.witness_path(&inst, LegId(2)), Some(legs(&[0, 1, 2, 3, 4])));
    }
}
