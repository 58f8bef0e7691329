//! Pricing: the time-dependent shortest path over dual-adjusted leg costs.
//!
//! For a request `r` and duals from the restricted master, leg `l` costs
//! `alpha = mile_cost(l, v_r) - (pi_c[l] * v_r + pi_s[l, r])`, which is
//! non-negative because capacity and linking rows are `<=` rows of a
//! minimisation. `zeta[l]` is the cheapest cost of a feasible chain that
//! starts with `l` and ends at the request destination; it is computed in a
//! single sweep over legs by decreasing departure time, keeping for every hub
//! the lower envelope `f_h(t)` = cheapest `zeta` over legs leaving `h` at or
//! after `t`. Legs where `f_h` steps are critical; an optimal path using only
//! critical legs always exists.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{HubId, Instance, LegId, Minutes, Money, Path, RequestId};
use crate::reduction::SubNetwork;

/// Duals of the restricted master: capacity rows per leg, linking rows per
/// (leg, request) and convexity rows per request. Absent linking rows have
/// a zero dual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPrices {
    pub pi_c: Vec<f64>,
    pub pi_s: BTreeMap<(LegId, RequestId), f64>,
    pub pi_r: Vec<f64>,
    pub snapshot: u64,
}

impl DualPrices {
    pub fn zeros(instance: &Instance) -> Self {
        DualPrices {
            pi_c: vec![0.0; instance.legs().len()],
            pi_s: BTreeMap::new(),
            pi_r: vec![0.0; instance.requests().len()],
            snapshot: 0,
        }
    }

    #[inline]
    pub fn linking(&self, leg: LegId, request: RequestId) -> f64 {
        self.pi_s.get(&(leg, request)).copied().unwrap_or(0.0)
    }

    /// `a * self + b * other`, componentwise over the union of entries.
    pub fn combine(&self, a: f64, other: &DualPrices, b: f64) -> DualPrices {
        let lin = |x: f64, y: f64| a * x + b * y;
        let pi_c = self.pi_c.iter().zip(&other.pi_c).map(|(&x, &y)| lin(x, y)).collect();
        let pi_r = self.pi_r.iter().zip(&other.pi_r).map(|(&x, &y)| lin(x, y)).collect();
        let mut pi_s = BTreeMap::new();
        for &k in self.pi_s.keys().chain(other.pi_s.keys()) {
            pi_s.entry(k).or_insert_with(|| {
                lin(self.pi_s.get(&k).copied().unwrap_or(0.0), other.pi_s.get(&k).copied().unwrap_or(0.0))
            });
        }
        DualPrices { pi_c, pi_s, pi_r, snapshot: self.snapshot.max(other.snapshot) }
    }
}

/// Dual values above this are treated as sign violations rather than noise.
pub const DUAL_SIGN_TOL: f64 = 1e-6;

/// Integer leg costs of one request over the legs of its sub-network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingCosts {
    pub request: RequestId,
    /// Sorted by id.
    pub legs: Vec<LegId>,
    /// `alpha[i]` is the cost of `legs[i]`.
    pub alpha: Vec<Money>,
    /// Convexity dual, rounded to milli-units.
    pub pi_r: Money,
    pub snapshot: u64,
}

impl PricingCosts {
    /// Costs given directly, e.g. Lagrangian leg costs. `legs` must be sorted.
    pub fn from_parts(request: RequestId, legs: Vec<LegId>, alpha: Vec<Money>, pi_r: Money) -> Self {
        debug_assert!(legs.windows(2).all(|w| w[0] < w[1]));
        PricingCosts { request, legs, alpha, pi_r, snapshot: 0 }
    }

    pub fn alpha_of(&self, leg: LegId) -> Option<Money> {
        self.legs.binary_search(&leg).ok().map(|i| self.alpha[i])
    }

    /// Keeps only the listed legs (sorted).
    pub fn restricted_to(&self, keep: &[LegId]) -> PricingCosts {
        let mut legs = Vec::with_capacity(keep.len());
        let mut alpha = Vec::with_capacity(keep.len());
        for &l in keep {
            if let Some(a) = self.alpha_of(l) {
                legs.push(l);
                alpha.push(a);
            }
        }
        PricingCosts { request: self.request, legs, alpha, pi_r: self.pi_r, snapshot: self.snapshot }
    }

    /// Reduced cost of a path: its summed leg costs minus the convexity dual.
    /// `None` if the path uses a leg outside these costs.
    pub fn reduced_cost(&self, path: &[LegId]) -> Option<Money> {
        let mut total = 0;
        for &l in path {
            total += self.alpha_of(l)?;
        }
        Some(total - self.pi_r)
    }
}

/// Leg costs of `subnetwork.request` under `duals`. Fails if a capacity or
/// linking dual is positive beyond [`DUAL_SIGN_TOL`].
pub fn leg_costs(instance: &Instance, subnetwork: &SubNetwork, duals: &DualPrices) -> Result<PricingCosts> {
    let r = subnetwork.request;
    let v = instance.request(r).volume;
    let mut alpha = Vec::with_capacity(subnetwork.legs.len());
    for &l in &subnetwork.legs {
        let pc = duals.pi_c[l.0];
        let ps = duals.linking(l, r);
        if pc > DUAL_SIGN_TOL || ps > DUAL_SIGN_TOL {
            return Err(Error::DualSign(format!("leg {l}, request {r}: pi_c = {pc}, pi_s = {ps}")));
        }
        let a = instance.leg(l).mile_cost(v) as f64 - (pc.min(0.0) * v as f64 + ps.min(0.0));
        alpha.push(a.round() as Money);
    }
    Ok(PricingCosts {
        request: r,
        legs: subnetwork.legs.clone(),
        alpha,
        pi_r: duals.pi_r[r.0].round() as Money,
        snapshot: duals.snapshot,
    })
}

/// A priced path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PricedPath {
    #[serde(skip)]
    pub path: Path,
    pub legs: Vec<LegId>,
    pub reduced_cost: Money,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingResult {
    pub request: RequestId,
    /// Sorted by reduced cost, ascending.
    pub paths: Vec<PricedPath>,
    /// Minimum reduced cost; `None` when no feasible path exists.
    pub best_reduced_cost: Option<Money>,
    /// `zeta` per leg of the priced network, `None` where the destination
    /// cannot be reached.
    pub zeta: Vec<(LegId, Option<Money>)>,
}

impl PricingResult {
    pub fn zeta_of(&self, leg: LegId) -> Option<Money> {
        self.zeta.binary_search_by_key(&leg, |z| z.0).ok().and_then(|i| self.zeta[i].1)
    }
}

#[derive(Clone, Copy)]
struct Step {
    depart: Minutes,
    best: Money,
    via: usize,
}

/// Per-hub lower envelopes built while sweeping legs by decreasing
/// departure. `steps[h]` is ordered by decreasing departure and `best` is
/// the running minimum, so the entry of the last step departing at or after
/// `t` gives `f_h(t)`.
struct Envelopes {
    steps: Vec<Vec<Step>>,
}

impl Envelopes {
    fn new(hubs: usize) -> Self {
        Envelopes { steps: vec![Vec::new(); hubs] }
    }

    fn push(&mut self, hub: HubId, depart: Minutes, zeta: Money, via: usize) {
        let s = &mut self.steps[hub.0];
        match s.last() {
            Some(top) if top.best <= zeta => {
                let top = *top;
                s.push(Step { depart, ..top });
            }
            _ => s.push(Step { depart, best: zeta, via }),
        }
    }

    /// `(f_h(t), local index of the leg realising it)`.
    fn query(&self, hub: HubId, t: Minutes) -> Option<(Money, usize)> {
        let s = &self.steps[hub.0];
        let k = s.partition_point(|st| st.depart >= t);
        (k > 0).then(|| (s[k - 1].best, s[k - 1].via))
    }
}

struct Sweep {
    zeta: Vec<Option<Money>>,
    env: Envelopes,
}

fn sweep(instance: &Instance, costs: &PricingCosts) -> Sweep {
    let dest = instance.request(costs.request).dest;
    let mut order: Vec<usize> = (0..costs.legs.len()).collect();
    order.sort_by_key(|&i| (Reverse(instance.leg(costs.legs[i]).depart), costs.legs[i]));
    let mut zeta = vec![None; costs.legs.len()];
    let mut env = Envelopes::new(instance.num_hubs());
    for i in order {
        let leg = instance.leg(costs.legs[i]);
        let z = if leg.dest == dest {
            Some(costs.alpha[i])
        } else {
            env.query(leg.dest, leg.arrive).map(|(best, _)| costs.alpha[i] + best)
        };
        zeta[i] = z;
        if let Some(z) = z {
            env.push(leg.origin, leg.depart, z, i);
        }
    }
    Sweep { zeta, env }
}

/// Removes hub revisits from a leg chain. Each removed loop starts and ends
/// at the same hub, so the remaining chain stays time-feasible.
pub(crate) fn shortcut_cycles(instance: &Instance, legs: Vec<LegId>) -> Vec<LegId> {
    let Some(&first) = legs.first() else { return legs };
    let mut hubs = vec![instance.leg(first).origin];
    let mut out: Vec<LegId> = Vec::with_capacity(legs.len());
    for l in legs {
        let d = instance.leg(l).dest;
        if let Some(pos) = hubs.iter().position(|&h| h == d) {
            out.truncate(pos);
            hubs.truncate(pos + 1);
        } else {
            out.push(l);
            hubs.push(d);
        }
    }
    out
}

/// Cheapest feasible path for the request of `costs`, over the legs listed
/// in `costs`. Returns the best path even if its reduced cost is
/// non-negative.
pub fn tdspp(instance: &Instance, costs: &PricingCosts) -> PricingResult {
    let req = instance.request(costs.request);
    let sw = sweep(instance, costs);
    let zeta: Vec<(LegId, Option<Money>)> = costs.legs.iter().copied().zip(sw.zeta.iter().copied()).collect();
    let Some((best, start)) = sw.env.query(req.origin, req.earliest) else {
        return PricingResult { request: costs.request, paths: Vec::new(), best_reduced_cost: None, zeta };
    };
    let mut chain = vec![costs.legs[start]];
    let mut cur = start;
    while instance.leg(costs.legs[cur]).dest != req.dest {
        let leg = instance.leg(costs.legs[cur]);
        let (_, next) = sw.env.query(leg.dest, leg.arrive).expect("finite zeta has a successor");
        chain.push(costs.legs[next]);
        cur = next;
    }
    let chain = shortcut_cycles(instance, chain);
    let path = Path::new(instance, costs.request, chain).expect("legs come from the instance");
    let reduced_cost = costs.reduced_cost(&path.legs).expect("legs are priced");
    debug_assert!(reduced_cost <= best - costs.pi_r);
    PricingResult {
        request: costs.request,
        paths: vec![PricedPath { legs: path.legs.clone(), path, reduced_cost }],
        best_reduced_cost: Some(best - costs.pi_r),
        zeta,
    }
}

/// Critical legs per hub: legs whose cost realises the envelope `f_h` at
/// their own departure time while every later departure is strictly more
/// expensive. Hubs without critical legs are omitted.
pub fn critical_legs(instance: &Instance, zeta: &[(LegId, Option<Money>)]) -> BTreeMap<HubId, Vec<LegId>> {
    let mut by_hub: BTreeMap<HubId, Vec<(Minutes, Money, LegId)>> = BTreeMap::new();
    for &(l, z) in zeta {
        if let Some(z) = z {
            let leg = instance.leg(l);
            by_hub.entry(leg.origin).or_default().push((leg.depart, z, l));
        }
    }
    let mut out = BTreeMap::new();
    for (hub, mut legs) in by_hub {
        legs.sort_by_key(|&(t, z, l)| (Reverse(t), z, l));
        let mut later_min: Option<Money> = None;
        let mut crit = Vec::new();
        let mut i = 0;
        while i < legs.len() {
            let t = legs[i].0;
            let group_min = legs[i].1;
            let mut j = i;
            while j < legs.len() && legs[j].0 == t {
                if legs[j].1 == group_min && later_min.is_none_or(|m| group_min < m) {
                    crit.push(legs[j].2);
                }
                j += 1;
            }
            later_min = Some(later_min.map_or(group_min, |m| m.min(group_min)));
            i = j;
        }
        crit.sort_unstable();
        out.insert(hub, crit);
    }
    out
}

/// Steps of `f_h` for one hub, for debugging dumps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubEnvelope {
    pub hub: HubId,
    /// `(t, f_h(t))` at every critical point, by increasing time.
    pub steps: Vec<(Minutes, Money)>,
}

pub fn envelopes(instance: &Instance, zeta: &[(LegId, Option<Money>)]) -> Vec<HubEnvelope> {
    critical_legs(instance, zeta)
        .into_iter()
        .map(|(hub, legs)| {
            let mut steps: Vec<(Minutes, Money)> = legs
                .iter()
                .map(|&l| {
                    let z = zeta[zeta.binary_search_by_key(&l, |z| z.0).unwrap()].1.unwrap();
                    (instance.leg(l).depart, z)
                })
                .collect();
            steps.sort_unstable();
            steps.dedup();
            HubEnvelope { hub, steps }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PricingOptions {
    /// Maximum number of paths returned.
    pub paths_limit: usize,
    /// Paths may cost at most this much more than the cheapest one;
    /// `None` is unbounded and `Some(0)` keeps optimal-cost paths only.
    pub max_cost_slack: Option<Money>,
    /// Also return paths with non-negative reduced cost.
    pub diagnostic: bool,
    /// Enumerate over critical legs only; otherwise over the whole
    /// sub-network.
    pub critical_only: bool,
}

impl Default for PricingOptions {
    fn default() -> Self {
        PricingOptions { paths_limit: 50, max_cost_slack: Some(0), diagnostic: false, critical_only: true }
    }
}

#[derive(PartialEq, Eq)]
struct Partial {
    key: Money,
    seq: usize,
    prefix_cost: Money,
    legs: Vec<usize>,
}

impl Ord for Partial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp(&self.key).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Partial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Prices one request: leg costs, the full sweep, restriction to critical
/// legs, then best-first enumeration of up to `paths_limit` distinct simple
/// paths on the critical legs, cheapest first.
///
/// A partial path ending with leg `l` is keyed by the cost of its legs
/// before `l` plus `zeta[l]`, a lower bound on any completion, so complete
/// paths come off the queue in non-decreasing cost. At each extension only
/// the `paths_limit` cheapest successors are branched on, and the search
/// stops after `4 * paths_limit * max(1, |hubs|)` pops.
pub fn price_request(
    instance: &Instance,
    subnetwork: &SubNetwork,
    duals: &DualPrices,
    options: &PricingOptions,
) -> Result<PricingResult> {
    let costs = leg_costs(instance, subnetwork, duals)?;
    Ok(price_with_costs(instance, subnetwork, &costs, options))
}

/// [`price_request`] on precomputed leg costs.
pub fn price_with_costs(
    instance: &Instance,
    subnetwork: &SubNetwork,
    costs: &PricingCosts,
    options: &PricingOptions,
) -> PricingResult {
    let full = tdspp(instance, costs);
    let Some(best_rc) = full.best_reduced_cost else {
        return full;
    };
    let critical: Vec<LegId> = {
        let mut c: Vec<LegId> = critical_legs(instance, &full.zeta).into_values().flatten().collect();
        c.sort_unstable();
        c
    };
    let crit_costs = if options.critical_only { costs.restricted_to(&critical) } else { costs.clone() };
    let sw = sweep(instance, &crit_costs);
    let req = instance.request(costs.request);

    let best_cost = best_rc + costs.pi_r;
    let cost_cap = options.max_cost_slack.map(|s| best_cost + s);
    let improving_cap = (!options.diagnostic).then_some(costs.pi_r - 1);
    let cap = match (cost_cap, improving_cap) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };

    // outgoing critical legs per hub, by departure
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); instance.num_hubs()];
    for (i, &l) in crit_costs.legs.iter().enumerate() {
        if sw.zeta[i].is_some() {
            out[instance.leg(l).origin.0].push(i);
        }
    }
    for v in &mut out {
        v.sort_by_key(|&i| (instance.leg(crit_costs.legs[i]).depart, crit_costs.legs[i]));
    }
    let successors = |i: usize| -> Vec<usize> {
        let leg = instance.leg(crit_costs.legs[i]);
        let cands = &out[leg.dest.0];
        let from = cands.partition_point(|&j| instance.leg(crit_costs.legs[j]).depart < leg.arrive);
        let mut s: Vec<usize> = cands[from..].to_vec();
        s.sort_by_key(|&j| (sw.zeta[j].unwrap(), Reverse(instance.leg(crit_costs.legs[j]).depart), crit_costs.legs[j]));
        s.truncate(options.paths_limit.max(1));
        s
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let origin = &out[req.origin.0];
    let from = origin.partition_point(|&j| instance.leg(crit_costs.legs[j]).depart < req.earliest);
    for &j in &origin[from..] {
        heap.push(Partial { key: sw.zeta[j].unwrap(), seq, prefix_cost: 0, legs: vec![j] });
        seq += 1;
    }

    let budget = 4 * options.paths_limit.max(1) * subnetwork.hubs.len().max(1);
    let mut pops = 0;
    let mut paths = Vec::new();
    let mut seen: HashSet<Vec<LegId>> = HashSet::new();
    while let Some(p) = heap.pop() {
        if paths.len() >= options.paths_limit || pops >= budget {
            break;
        }
        if cap.is_some_and(|c| p.key > c) {
            break;
        }
        pops += 1;
        let last = *p.legs.last().unwrap();
        let leg = instance.leg(crit_costs.legs[last]);
        if leg.dest == req.dest {
            let legs: Vec<LegId> = p.legs.iter().map(|&i| crit_costs.legs[i]).collect();
            if seen.insert(legs.clone()) {
                let path = Path::new(instance, costs.request, legs.clone()).expect("known legs");
                paths.push(PricedPath { path, legs, reduced_cost: p.key - costs.pi_r });
            }
            continue;
        }
        let prefix_cost = p.prefix_cost + crit_costs.alpha[last];
        let visited: Vec<HubId> = std::iter::once(instance.leg(crit_costs.legs[p.legs[0]]).origin)
            .chain(p.legs.iter().map(|&i| instance.leg(crit_costs.legs[i]).dest))
            .collect();
        for j in successors(last) {
            let d = instance.leg(crit_costs.legs[j]).dest;
            if visited.contains(&d) {
                continue;
            }
            let mut legs = p.legs.clone();
            legs.push(j);
            heap.push(Partial { key: prefix_cost + sw.zeta[j].unwrap(), seq, prefix_cost, legs });
            seq += 1;
        }
    }

    PricingResult { request: costs.request, paths, best_reduced_cost: Some(best_rc), zeta: full.zeta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::optimal_subnetwork;
    use crate::samples::micro3;

    fn micro3_costs(pi_r: Money) -> (Instance, SubNetwork, PricingCosts) {
        let inst = micro3();
        let sub = optimal_subnetwork(&inst, RequestId(0));
        let mut duals = DualPrices::zeros(&inst);
        duals.pi_r[0] = pi_r as f64;
        let costs = leg_costs(&inst, &sub, &duals).unwrap();
        (inst, sub, costs)
    }

    #[test]
    fn alpha_is_mile_cost_at_zero_duals() {
        let (_, _, costs) = micro3_costs(0);
        assert_eq!(costs.alpha, vec![50_000, 30_000, 90_000]);
    }

    #[test]
    fn negative_capacity_dual_raises_alpha() {
        let inst = micro3();
        let sub = optimal_subnetwork(&inst, RequestId(0));
        let mut duals = DualPrices::zeros(&inst);
        // -200 milli per deci-trailer on a 10-deci request: +2 000
        duals.pi_c[0] = -200.0;
        let costs = leg_costs(&inst, &sub, &duals).unwrap();
        assert_eq!(costs.alpha[0], 52_000);

        duals.pi_s.insert((LegId(2), RequestId(0)), -40_000.0);
        let costs = leg_costs(&inst, &sub, &duals).unwrap();
        assert_eq!(costs.alpha[2], 130_000);
        assert!(costs.alpha.iter().all(|&a| a > 0));
    }

    #[test]
    fn positive_duals_rejected() {
        let inst = micro3();
        let sub = optimal_subnetwork(&inst, RequestId(0));
        let mut duals = DualPrices::zeros(&inst);
        duals.pi_c[1] = 3.0;
        assert!(matches!(leg_costs(&inst, &sub, &duals), Err(Error::DualSign(_))));
    }

    #[test]
    fn micro3_best_path() {
        let (inst, _, costs) = micro3_costs(0);
        let res = tdspp(&inst, &costs);
        assert_eq!(res.paths[0].legs, vec![LegId(0), LegId(1)]);
        assert_eq!(res.best_reduced_cost, Some(80_000));
        assert_eq!(res.zeta_of(LegId(0)), Some(80_000));
        assert_eq!(res.zeta_of(LegId(2)), Some(90_000));

        let (inst, _, costs) = micro3_costs(100_000);
        assert_eq!(tdspp(&inst, &costs).best_reduced_cost, Some(-20_000));
    }

    #[test]
    fn single_leg_network() {
        let (inst, _, costs) = micro3_costs(0);
        let one = costs.restricted_to(&[LegId(2)]);
        let res = tdspp(&inst, &one);
        assert_eq!(res.paths[0].legs, vec![LegId(2)]);
        assert_eq!(res.zeta, vec![(LegId(2), Some(90_000))]);
    }

    #[test]
    fn empty_network_has_no_path() {
        let (inst, _, costs) = micro3_costs(0);
        let none = costs.restricted_to(&[]);
        let res = tdspp(&inst, &none);
        assert!(res.paths.is_empty());
        assert_eq!(res.best_reduced_cost, None);
    }

    #[test]
    fn equal_cost_earlier_leg_is_not_critical() {
        let inst = micro3();
        // legs 0 and 2 both leave hub A (at 0 and 10)
        let zeta = vec![(LegId(0), Some(5)), (LegId(2), Some(5))];
        let crit = critical_legs(&inst, &zeta);
        assert_eq!(crit[&HubId(0)], vec![LegId(2)]);
    }

    #[test]
    fn decreasing_costs_are_all_critical() {
        let inst = micro3();
        let zeta = vec![(LegId(0), Some(9)), (LegId(2), Some(5))];
        assert_eq!(critical_legs(&inst, &zeta)[&HubId(0)], vec![LegId(2)]);
        let zeta = vec![(LegId(0), Some(4)), (LegId(2), Some(5))];
        assert_eq!(critical_legs(&inst, &zeta)[&HubId(0)], vec![LegId(0), LegId(2)]);
        let zeta = vec![(LegId(1), Some(4))];
        assert_eq!(critical_legs(&inst, &zeta)[&HubId(1)], vec![LegId(1)]);
    }

    #[test]
    fn price_request_limits_and_slack() {
        let (inst, sub, costs) = micro3_costs(100_000);
        let both = price_with_costs(
            &inst,
            &sub,
            &costs,
            &PricingOptions { paths_limit: 2, max_cost_slack: None, diagnostic: false, critical_only: true },
        );
        let got: Vec<_> = both.paths.iter().map(|p| (p.path.mile_cost, p.reduced_cost)).collect();
        assert_eq!(got, vec![(80_000, -20_000), (90_000, -10_000)]);

        let one = price_with_costs(
            &inst,
            &sub,
            &costs,
            &PricingOptions { paths_limit: 1, max_cost_slack: None, diagnostic: false, critical_only: true },
        );
        assert_eq!(one.paths.len(), 1);
        assert_eq!(one.paths[0].legs, vec![LegId(0), LegId(1)]);

        let tight = price_with_costs(
            &inst,
            &sub,
            &costs,
            &PricingOptions { paths_limit: 50, max_cost_slack: Some(0), diagnostic: false, critical_only: true },
        );
        assert_eq!(tight.paths.len(), 1);
        assert_eq!(tight.paths[0].path.mile_cost, 80_000);
    }

    #[test]
    fn non_improving_paths_filtered_unless_diagnostic() {
        let (inst, sub, costs) = micro3_costs(85_000);
        let opts = PricingOptions { paths_limit: 5, max_cost_slack: None, diagnostic: false, critical_only: true };
        let res = price_with_costs(&inst, &sub, &costs, &opts);
        assert_eq!(res.paths.len(), 1);
        let res = price_with_costs(&inst, &sub, &costs, &PricingOptions { diagnostic: true, ..opts });
        assert_eq!(res.paths.len(), 2);
    }

    #[test]
    fn envelope_dump() {
        let (inst, _, costs) = micro3_costs(0);
        let res = tdspp(&inst, &costs);
        let env = envelopes(&inst, &res.zeta);
        assert_eq!(env[0], HubEnvelope { hub: HubId(0), steps: vec![(0, 80_000), (10, 90_000)] });
    }

    #[test]
    fn duals_combine_over_union() {
        let inst = micro3();
        let mut a = DualPrices::zeros(&inst);
        let mut b = DualPrices::zeros(&inst);
        a.pi_c[0] = -4.0;
        b.pi_c[0] = -2.0;
        a.pi_s.insert((LegId(1), RequestId(0)), -6.0);
        let c = b.combine(0.5, &a, 0.5);
        assert_eq!(c.pi_c[0], -3.0);
        assert_eq!(c.linking(LegId(1), RequestId(0)), -3.0);
    }
}
