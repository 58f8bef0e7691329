//! Brute-force ground truth for small instances.
//!
//! [`enumerate_paths`] lists every feasible simple path of a request by
//! depth-first search over time-chainable legs; [`enumerate_walks`] lists
//! every feasible leg chain, hubs allowed to repeat. [`solve_exact`] then
//! picks one path per request, exactly minimising schedule plus mile cost
//! under leg capacities.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Deci, Instance, LegId, Money, Path, RequestId, ScheduleId, Solution};

/// Default limit on enumerated paths and on search nodes.
pub const DEFAULT_CAP: usize = 1_000_000;

fn too_large(what: &str, cap: usize) -> Error {
    Error::OracleLimit(format!("more than {cap} {what}"))
}

/// Depth-first enumeration of the feasible leg chains of `request`.
fn dfs_chains(instance: &Instance, request: RequestId, simple: bool, cap: usize) -> Result<Vec<Vec<LegId>>> {
    let r = instance.try_request(request)?;
    let allowed = |l: LegId| {
        let leg = instance.leg(l);
        instance.leg_usable_by(l, request)
            && leg.dest != r.origin
            && leg.origin != r.dest
            && leg.depart >= r.earliest
            && leg.arrive <= r.latest
    };
    let mut out = Vec::new();
    let mut stack: Vec<LegId> = Vec::new();
    let mut on_path = vec![false; instance.num_hubs()];
    on_path[r.origin.0] = true;

    #[allow(clippy::too_many_arguments)]
    fn go(
        instance: &Instance,
        allowed: &dyn Fn(LegId) -> bool,
        dest: crate::model::HubId,
        simple: bool,
        cap: usize,
        stack: &mut Vec<LegId>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<LegId>>,
        hub: crate::model::HubId,
        ready: i64,
    ) -> Result<()> {
        for &l in instance.outgoing(hub) {
            let leg = instance.leg(l);
            if leg.depart < ready || !allowed(l) || (simple && on_path[leg.dest.0]) {
                continue;
            }
            stack.push(l);
            if leg.dest == dest {
                if out.len() >= cap {
                    return Err(too_large("paths", cap));
                }
                out.push(stack.clone());
            } else {
                on_path[leg.dest.0] = true;
                go(instance, allowed, dest, simple, cap, stack, on_path, out, leg.dest, leg.arrive)?;
                on_path[leg.dest.0] = false;
            }
            stack.pop();
        }
        Ok(())
    }

    go(instance, &allowed, r.dest, simple, cap, &mut stack, &mut on_path, &mut out, r.origin, r.earliest)?;
    out.sort();
    Ok(out)
}

/// All feasible simple paths of `request`, sorted by leg ids.
pub fn enumerate_paths(instance: &Instance, request: RequestId, cap: usize) -> Result<Vec<Path>> {
    dfs_chains(instance, request, true, cap)?.into_iter().map(|legs| Path::new(instance, request, legs)).collect()
}

/// All feasible leg chains of `request`, hubs other than the origin allowed
/// to repeat, sorted by leg ids.
pub fn enumerate_walks(instance: &Instance, request: RequestId, cap: usize) -> Result<Vec<Vec<LegId>>> {
    dfs_chains(instance, request, false, cap)
}

/// Every request's feasible simple paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCatalog {
    pub paths: Vec<Vec<Path>>,
}

impl PathCatalog {
    pub fn build(instance: &Instance, cap: usize) -> Result<Self> {
        let mut total = 0;
        let mut paths = Vec::with_capacity(instance.requests().len());
        for r in instance.requests() {
            let p = enumerate_paths(instance, r.id, cap.saturating_sub(total))?;
            total += p.len();
            paths.push(p);
        }
        Ok(PathCatalog { paths })
    }

    /// Legs on some path of `request`, sorted.
    pub fn leg_union(&self, request: RequestId) -> Vec<LegId> {
        let mut legs: Vec<LegId> = self.paths[request.0].iter().flat_map(|p| p.legs.iter().copied()).collect();
        legs.sort_unstable();
        legs.dedup();
        legs
    }
}

/// Whether one path per request respects every leg capacity.
pub fn capacities_respected(instance: &Instance, paths: &[Path]) -> bool {
    let mut load: BTreeMap<LegId, Deci> = BTreeMap::new();
    for p in paths {
        let v = instance.request(p.request).volume;
        for &l in &p.legs {
            *load.entry(l).or_default() += v;
        }
    }
    load.iter().all(|(&l, &v)| v <= instance.leg(l).capacity)
}

/// Every capacity-feasible combination of catalog paths, in lexicographic
/// order of path indices.
pub fn enumerate_solutions(instance: &Instance, cap: usize) -> Result<Vec<Solution>> {
    let catalog = PathCatalog::build(instance, cap)?;
    let n = instance.requests().len();
    let mut out = Vec::new();
    if catalog.paths.iter().any(|p| p.is_empty()) {
        return Ok(out);
    }
    let mut idx = vec![0usize; n];
    loop {
        let paths: Vec<Path> = (0..n).map(|r| catalog.paths[r][idx[r]].clone()).collect();
        if capacities_respected(instance, &paths) {
            if out.len() >= cap {
                return Err(too_large("solutions", cap));
            }
            out.push(Solution::from_paths(instance, paths));
        }
        let mut r = n;
        loop {
            if r == 0 {
                return Ok(out);
            }
            r -= 1;
            idx[r] += 1;
            if idx[r] < catalog.paths[r].len() {
                break;
            }
            idx[r] = 0;
        }
    }
}

struct Search<'a> {
    instance: &'a Instance,
    order: Vec<RequestId>,
    paths: Vec<Vec<Path>>,
    path_schedules: Vec<Vec<Vec<ScheduleId>>>,
    /// `share[d][s]`: fixed cost of `s` split over the requests from depth
    /// `d` on that have a path through `s`.
    share: Vec<BTreeMap<ScheduleId, Money>>,
    load: Vec<Deci>,
    uses: Vec<u32>,
    choice: Vec<usize>,
    best: Option<(Money, Vec<Vec<LegId>>, Vec<usize>)>,
    /// Only assignments costing at most this are accepted.
    limit: Option<Money>,
    nodes: usize,
    cap: usize,
}

impl Search<'_> {
    fn threshold(&self) -> Option<Money> {
        self.best.as_ref().map(|b| b.0).or(self.limit)
    }

    fn marginal(&self, d: usize, k: usize) -> Money {
        let p = &self.paths[d][k];
        p.mile_cost
            + self.path_schedules[d][k]
                .iter()
                .filter(|s| self.uses[s.0] == 0)
                .map(|s| self.instance.schedule(*s).fixed_cost)
                .sum::<Money>()
    }

    fn lower_bound(&self, d: usize) -> Money {
        (d..self.order.len())
            .map(|e| {
                (0..self.paths[e].len())
                    .map(|k| {
                        self.paths[e][k].mile_cost
                            + self.path_schedules[e][k]
                                .iter()
                                .filter(|s| self.uses[s.0] == 0)
                                .map(|s| self.share[d][s])
                                .sum::<Money>()
                    })
                    .min()
                    .unwrap_or(0)
            })
            .sum()
    }

    fn fits(&self, d: usize, k: usize) -> bool {
        let v = self.instance.request(self.order[d]).volume;
        self.paths[d][k].legs.iter().all(|&l| self.load[l.0] + v <= self.instance.leg(l).capacity)
    }

    fn apply(&mut self, d: usize, k: usize, sign: i64) {
        let v = self.instance.request(self.order[d]).volume;
        for &l in &self.paths[d][k].legs {
            self.load[l.0] += sign * v;
        }
        for s in &self.path_schedules[d][k] {
            self.uses[s.0] = (self.uses[s.0] as i64 + sign) as u32;
        }
    }

    /// Leg lists in request id order, the tie-breaking key.
    fn key(&self) -> Vec<Vec<LegId>> {
        let mut key = vec![Vec::new(); self.order.len()];
        for (d, &r) in self.order.iter().enumerate() {
            key[r.0] = self.paths[d][self.choice[d]].legs.clone();
        }
        key
    }

    fn go(&mut self, d: usize, cost: Money) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(too_large("search nodes", self.cap));
        }
        if d == self.order.len() {
            if self.limit.is_some_and(|l| cost > l) {
                return Ok(());
            }
            let key = self.key();
            let better = match &self.best {
                None => true,
                Some((c, k, _)) => cost < *c || (cost == *c && key < *k),
            };
            if better {
                self.best = Some((cost, key, self.choice.clone()));
            }
            return Ok(());
        }
        if let Some(c) = self.threshold() {
            if cost + self.lower_bound(d) > c {
                return Ok(());
            }
        }
        let mut cands: Vec<(Money, usize)> =
            (0..self.paths[d].len()).filter(|&k| self.fits(d, k)).map(|k| (self.marginal(d, k), k)).collect();
        cands.sort();
        for (m, k) in cands {
            if self.threshold().is_some_and(|c| cost + m > c) {
                break;
            }
            self.apply(d, k, 1);
            self.choice.push(k);
            let r = self.go(d + 1, cost + m);
            self.choice.pop();
            self.apply(d, k, -1);
            r?;
        }
        Ok(())
    }
}

/// Result of [`best_assignment`].
#[derive(Debug, Clone)]
pub struct AssignmentSearch {
    /// Cheapest assignment found, one path per request in id order.
    pub best: Option<(Money, Vec<Path>)>,
    /// The node cap stopped the search, so `best` may not be optimal.
    pub capped: bool,
    pub nodes: usize,
}

/// Cheapest capacity-feasible choice of one path per request among
/// `candidates[r]`, schedules active iff used. Requests are fixed in
/// decreasing volume order and a depth-first search prunes with the
/// committed cost plus, per remaining request, its cheapest candidate with
/// each inactive schedule's cost split among the remaining requests that
/// could use it. Ties go to the lexicographically smallest leg lists in
/// request order. With `limit`, only assignments costing at most `limit`
/// count. At most `cap` nodes are visited.
pub fn best_assignment(
    instance: &Instance,
    candidates: &[Vec<Path>],
    cap: usize,
    limit: Option<Money>,
) -> AssignmentSearch {
    let mut order: Vec<RequestId> = instance.requests().iter().map(|r| r.id).collect();
    order.sort_by_key(|&r| (std::cmp::Reverse(instance.request(r).volume), r));
    let paths: Vec<Vec<Path>> = order.iter().map(|r| candidates[r.0].clone()).collect();
    let path_schedules: Vec<Vec<Vec<ScheduleId>>> = paths
        .iter()
        .map(|ps| {
            ps.iter()
                .map(|p| {
                    let mut s: Vec<ScheduleId> = p.legs.iter().map(|&l| instance.leg(l).schedule).collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect()
        })
        .collect();
    let n = order.len();
    let mut share = vec![BTreeMap::new(); n + 1];
    for (d, sh) in share.iter_mut().enumerate().take(n) {
        let mut users: BTreeMap<ScheduleId, Money> = BTreeMap::new();
        for ps in &path_schedules[d..n] {
            let mut seen: Vec<ScheduleId> = ps.iter().flatten().copied().collect();
            seen.sort_unstable();
            seen.dedup();
            for s in seen {
                *users.entry(s).or_default() += 1;
            }
        }
        *sh = users.into_iter().map(|(s, k)| (s, instance.schedule(s).fixed_cost / k)).collect();
    }
    let mut search = Search {
        instance,
        order,
        paths,
        path_schedules,
        share,
        load: vec![0; instance.legs().len()],
        uses: vec![0; instance.schedules().len()],
        choice: Vec::new(),
        best: None,
        limit,
        nodes: 0,
        cap,
    };
    let capped = search.go(0, 0).is_err();
    let best = search.best.take().map(|(cost, _, choice)| {
        let mut chosen = vec![None; n];
        for (d, &r) in search.order.iter().enumerate() {
            chosen[r.0] = Some(search.paths[d][choice[d]].clone());
        }
        (cost, chosen.into_iter().map(|p| p.expect("every request chosen")).collect())
    });
    AssignmentSearch { best, capped, nodes: search.nodes }
}

/// Exact optimum over one-simple-path-per-request assignments, schedules
/// active iff used: [`best_assignment`] over every feasible path. `cap`
/// bounds both enumerated paths and search nodes.
pub fn solve_exact(instance: &Instance, cap: usize) -> Result<Solution> {
    let catalog = PathCatalog::build(instance, cap)?;
    if let Some(r) = catalog.paths.iter().position(|p| p.is_empty()) {
        return Err(Error::NoFeasiblePath(r));
    }
    let res = best_assignment(instance, &catalog.paths, cap, None);
    if res.capped {
        return Err(too_large("search nodes", cap));
    }
    let (_, paths) = res.best.ok_or_else(|| Error::OracleLimit("no capacity-feasible assignment".into()))?;
    Ok(Solution::from_paths(instance, paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{add_dummy_schedules, validate_solution, DummyConfig, Instance};
    use crate::samples::{micro3, micro3_with_window};

    fn legs(ids: &[usize]) -> Vec<LegId> {
        ids.iter().map(|&i| LegId(i)).collect()
    }

    #[test]
    fn micro3_paths() {
        let ps = enumerate_paths(&micro3(), RequestId(0), DEFAULT_CAP).unwrap();
        let got: Vec<Vec<LegId>> = ps.iter().map(|p| p.legs.clone()).collect();
        assert_eq!(got, vec![legs(&[0, 1]), legs(&[2])]);
        assert_eq!(ps[0].mile_cost, 80_000);
    }

    #[test]
    fn infeasible_request_has_no_paths() {
        assert!(enumerate_paths(&micro3_with_window(0, 50), RequestId(0), DEFAULT_CAP).unwrap().is_empty());
    }

    #[test]
    fn dummy_may_be_the_only_path() {
        let inst = add_dummy_schedules(&micro3_with_window(0, 50), &DummyConfig::default());
        let ps = enumerate_paths(&inst, RequestId(0), DEFAULT_CAP).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].legs, legs(&[3]));
        let sol = solve_exact(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(sol.objective(), DummyConfig::default().fallback_cost);
    }

    #[test]
    fn cap_exceeded_is_reported() {
        let err = enumerate_paths(&micro3(), RequestId(0), 1).unwrap_err();
        assert!(err.to_string().starts_with("instance too large for oracle"));
    }

    #[test]
    fn micro3_optimum() {
        let sol = solve_exact(&micro3(), DEFAULT_CAP).unwrap();
        assert_eq!(sol.objective(), 130_000);
        assert_eq!(sol.paths[0].legs, legs(&[2]));
        assert!(validate_solution(&micro3(), &sol).is_empty());
    }

    #[test]
    fn two_short_trailers_share_a_leg() {
        let (h, mut s, mut l, mut r, _) = micro3().into_parts();
        l[2].capacity = 20;
        s[1].fixed_cost = 40_000;
        let mut twin = r[0].clone();
        twin.id = RequestId(1);
        r.push(twin);
        let inst = Instance::new(h, s, l, r).unwrap();
        let sol = solve_exact(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(sol.paths[0].legs, legs(&[2]));
        assert_eq!(sol.paths[1].legs, legs(&[2]));
        assert_eq!(sol.active.iter().filter(|&&a| a).count(), 1);
        assert_eq!(sol.objective(), 40_000 + 2 * 90_000);
    }

    #[test]
    fn walks_include_paths() {
        let inst = micro3();
        let walks = enumerate_walks(&inst, RequestId(0), DEFAULT_CAP).unwrap();
        assert_eq!(walks, vec![legs(&[0, 1]), legs(&[2])]);
    }

    #[test]
    fn solutions_enumerated() {
        let sols = enumerate_solutions(&micro3(), DEFAULT_CAP).unwrap();
        let objs: Vec<Money> = sols.iter().map(|s| s.objective()).collect();
        assert_eq!(objs, vec![180_000, 130_000]);
    }
}
