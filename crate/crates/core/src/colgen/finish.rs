use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Column, Master};
use crate::error::{Error, Result};
use crate::model::{validate_solution, Deci, Instance, Money, Path, RequestId, ScheduleId, Solution};
use crate::oracle::best_assignment;
use crate::simplex::{warm_start, Basis, LinearProgram, LpSolution};

const INTEGRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinishReport {
    /// LP relaxations solved.
    pub nodes: usize,
    /// Nodes that were split on a fractional schedule.
    pub branched: usize,
    /// Best master objective with binary `y` and continuous `lambda`.
    pub mip_value: Option<f64>,
    /// Integer objective minus `mip_value`: the price of rounding `lambda`.
    pub rounding_delta: Option<f64>,
    pub lp_bound: f64,
    /// `(objective - lp_bound) / lp_bound`.
    pub gap: Option<f64>,
    pub budget_exhausted: bool,
    pub time_limit_hit: bool,
    /// No node was solved and every request rides its dummy.
    pub dummy_fallback: bool,
    /// Nodes of the final search over the column pool.
    pub polish_nodes: usize,
    /// Cost removed by that search.
    pub polish_gain: Money,
}

#[derive(Debug, Clone)]
pub struct Finish {
    pub solution: Solution,
    pub report: FinishReport,
}

struct Node {
    bound: f64,
    seq: usize,
    fixings: Vec<(usize, f64)>,
    sol: LpSolution,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn solve_node(lp: &mut LinearProgram, y_vars: &[usize], fixings: &[(usize, f64)], basis: &Basis) -> LpSolution {
    for &v in y_vars {
        lp.set_bounds(v, 0.0, 1.0);
    }
    for &(v, val) in fixings {
        lp.set_bounds(v, val, val);
    }
    warm_start(lp, basis)
}

/// Makes the schedule variables of the master binary by best-bound
/// branch-and-bound, branching on the most fractional `y` (ties to the
/// lowest schedule id), and turns master solutions into one path per
/// request with [`round_columns`]. Every solved node is rounded; `lambda`
/// is never branched on. The cheapest rounded solution is then improved,
/// if possible, by a depth-first search for the cheapest capacity-feasible
/// choice of one pool column per request, capped at `node_budget` nodes.
///
/// With `node_budget = 0` nothing is solved and every request takes its
/// dummy path.
pub fn finish_integer(
    instance: &Instance,
    master: &Master,
    lp_bound: f64,
    node_budget: usize,
    time_limit: Option<f64>,
) -> Result<Finish> {
    let start = Instant::now();
    let mut report = FinishReport {
        nodes: 0,
        branched: 0,
        mip_value: None,
        rounding_delta: None,
        lp_bound,
        gap: None,
        budget_exhausted: false,
        time_limit_hit: false,
        dummy_fallback: false,
        polish_nodes: 0,
        polish_gain: 0,
    };
    let mut incumbent: Option<Solution> = None;
    let mut lp = master.lp().clone();
    let y: Vec<(ScheduleId, usize)> = master.y_vars().iter().map(|(&s, &v)| (s, v)).collect();
    let y_vars: Vec<usize> = y.iter().map(|&(_, v)| v).collect();
    let mut heap = BinaryHeap::new();
    let mut seq = 0;

    let consider = |sol: &LpSolution, report: &mut FinishReport, incumbent: &mut Option<Solution>| -> Result<bool> {
        let lambda = master.lambda(&sol.x);
        let s = round_columns(instance, master, &lambda)?;
        if incumbent.as_ref().is_none_or(|i| s.objective() < i.objective()) {
            *incumbent = Some(s);
        }
        let integral = y_vars.iter().all(|&v| (sol.x[v] - sol.x[v].round()).abs() <= INTEGRAL_TOL);
        if integral && report.mip_value.is_none_or(|m| sol.objective < m) {
            report.mip_value = Some(sol.objective);
        }
        Ok(integral)
    };

    if node_budget > 0 {
        let root = solve_node(&mut lp, &y_vars, &[], master.basis().unwrap_or(&Basis::default()));
        report.nodes += 1;
        if root.is_optimal() {
            consider(&root, &mut report, &mut incumbent)?;
            heap.push(Node { bound: root.objective, seq, fixings: Vec::new(), sol: root });
            seq += 1;
        }
    }

    while let Some(node) = heap.pop() {
        let prune_at = incumbent.as_ref().map(|i| i.objective() as f64 - 1e-6 * (i.objective() as f64).abs().max(1.0));
        if prune_at.is_some_and(|p| node.bound >= p) {
            continue;
        }
        let frac = y
            .iter()
            .map(|&(s, v)| (s, v, node.sol.x[v]))
            .filter(|&(_, _, val)| (val - val.round()).abs() > INTEGRAL_TOL)
            .min_by(|a, b| (a.2 - 0.5).abs().total_cmp(&(b.2 - 0.5).abs()).then(a.0.cmp(&b.0)));
        let Some((_, var, _)) = frac else {
            continue;
        };
        report.branched += 1;
        for val in [1.0, 0.0] {
            if report.nodes >= node_budget {
                report.budget_exhausted = true;
                break;
            }
            if time_limit.is_some_and(|t| start.elapsed().as_secs_f64() > t) {
                report.time_limit_hit = true;
                break;
            }
            let mut fixings = node.fixings.clone();
            fixings.push((var, val));
            let sol = solve_node(&mut lp, &y_vars, &fixings, &node.sol.basis);
            report.nodes += 1;
            if !sol.is_optimal() {
                continue;
            }
            let integral = consider(&sol, &mut report, &mut incumbent)?;
            if !integral {
                heap.push(Node { bound: sol.objective, seq, fixings, sol });
                seq += 1;
            }
        }
        if report.budget_exhausted || report.time_limit_hit {
            break;
        }
    }

    if let Some(inc) = &incumbent {
        if !time_limit.is_some_and(|t| start.elapsed().as_secs_f64() > t) {
            let mut candidates = vec![Vec::new(); instance.requests().len()];
            for c in master.columns() {
                candidates[c.request.0].push(c.to_path());
            }
            let res = best_assignment(instance, &candidates, node_budget, Some(inc.objective() - 1));
            report.polish_nodes = res.nodes;
            if let Some((cost, paths)) = res.best {
                report.polish_gain = inc.objective() - cost;
                incumbent = Some(Solution::from_paths(instance, paths));
            }
        }
    }

    let solution = match incumbent {
        Some(s) => s,
        None => {
            report.dummy_fallback = true;
            dummy_solution(instance)?
        }
    };
    report.rounding_delta = report.mip_value.map(|m| solution.objective() as f64 - m);
    if lp_bound.is_finite() && lp_bound > 0.0 {
        report.gap = Some((solution.objective() as f64 - lp_bound) / lp_bound);
    }
    Ok(Finish { solution, report })
}

/// Every request on its dummy leg.
pub fn dummy_solution(instance: &Instance) -> Result<Solution> {
    let paths = instance
        .requests()
        .iter()
        .map(|r| {
            let l = instance.dummy_leg(r.id).ok_or(Error::NoFeasiblePath(r.id.0))?;
            Path::new(instance, r.id, vec![l])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Solution::from_paths(instance, paths))
}

/// Incremental view of an assignment of one column per request.
struct Assignment<'a> {
    instance: &'a Instance,
    columns: &'a [Column],
    schedules: Vec<Vec<ScheduleId>>,
    choice: Vec<usize>,
    load: Vec<Deci>,
    uses: Vec<u32>,
}

impl<'a> Assignment<'a> {
    fn new(instance: &'a Instance, columns: &'a [Column], choice: Vec<usize>) -> Self {
        let schedules = columns
            .iter()
            .map(|c| {
                let s: BTreeSet<ScheduleId> = c.legs.iter().map(|&l| instance.leg(l).schedule).collect();
                s.into_iter().collect()
            })
            .collect();
        let mut a = Assignment {
            instance,
            columns,
            schedules,
            choice: Vec::new(),
            load: vec![0; instance.legs().len()],
            uses: vec![0; instance.schedules().len()],
        };
        for &k in &choice {
            a.apply(k, 1);
        }
        a.choice = choice;
        a
    }

    fn volume(&self, k: usize) -> Deci {
        self.instance.request(self.columns[k].request).volume
    }

    fn apply(&mut self, k: usize, sign: i64) {
        let v = self.volume(k);
        for &l in &self.columns[k].legs {
            self.load[l.0] += sign * v;
        }
        for &s in &self.schedules[k] {
            self.uses[s.0] = (self.uses[s.0] as i64 + sign) as u32;
        }
    }

    /// Whether column `k` fits once the request's current column is removed.
    fn fits(&self, k: usize) -> bool {
        let r = self.columns[k].request.0;
        let cur = &self.columns[self.choice[r]];
        let v = self.volume(k);
        self.columns[k].legs.iter().all(|&l| {
            let own = if cur.legs.contains(&l) { v } else { 0 };
            self.load[l.0] - own + v <= self.instance.leg(l).capacity
        })
    }

    /// Objective change of switching the request of `k` to column `k`.
    fn delta(&self, k: usize) -> Money {
        let r = self.columns[k].request.0;
        let cur = self.choice[r];
        let mut d = self.columns[k].mile_cost - self.columns[cur].mile_cost;
        for &s in &self.schedules[cur] {
            if self.uses[s.0] == 1 && !self.schedules[k].contains(&s) {
                d -= self.instance.schedule(s).fixed_cost;
            }
        }
        for &s in &self.schedules[k] {
            if self.uses[s.0] == 0 {
                d += self.instance.schedule(s).fixed_cost;
            }
        }
        d
    }

    fn switch(&mut self, k: usize) {
        let r = self.columns[k].request.0;
        let cur = self.choice[r];
        self.apply(cur, -1);
        self.apply(k, 1);
        self.choice[r] = k;
    }

    fn overloaded_leg(&self) -> Option<usize> {
        (0..self.load.len()).find(|&l| self.load[l] > self.instance.leg(crate::model::LegId(l)).capacity)
    }
}

/// One path per request from master values `lambda` (by column index).
///
/// Each request starts on its heaviest column (ties to the cheaper path).
/// While a leg is overloaded, the smallest-volume request on it moves to
/// the cheapest column that fits, counting newly activated schedules; the
/// dummy always fits. A descent then moves single requests to cheaper
/// fitting columns until no move improves the objective.
pub fn round_columns(instance: &Instance, master: &Master, lambda: &[f64]) -> Result<Solution> {
    let columns = master.columns();
    let mut choice = Vec::with_capacity(instance.requests().len());
    for r in instance.requests() {
        let ks = master.columns_of(r.id);
        let best = ks
            .iter()
            .copied()
            .min_by(|&a, &b| {
                lambda[b].total_cmp(&lambda[a]).then(columns[a].mile_cost.cmp(&columns[b].mile_cost)).then(a.cmp(&b))
            })
            .ok_or(Error::MissingColumn(r.id.0))?;
        choice.push(best);
    }
    let mut a = Assignment::new(instance, columns, choice);

    while let Some(l) = a.overloaded_leg() {
        let leg = crate::model::LegId(l);
        let victim = (0..a.choice.len())
            .filter(|&r| columns[a.choice[r]].legs.contains(&leg))
            .min_by_key(|&r| (instance.request(RequestId(r)).volume, r))
            .expect("an overloaded leg carries requests");
        let cur = a.choice[victim];
        let next = master
            .columns_of(RequestId(victim))
            .iter()
            .copied()
            .filter(|&k| k != cur && !columns[k].legs.contains(&leg) && a.fits(k))
            .min_by_key(|&k| (a.delta(k), k));
        match next {
            Some(k) => a.switch(k),
            None => return Err(Error::NoFeasiblePath(victim)),
        }
    }

    loop {
        let mut improved = false;
        for r in 0..a.choice.len() {
            let best = master
                .columns_of(RequestId(r))
                .iter()
                .copied()
                .filter(|&k| k != a.choice[r] && a.fits(k))
                .map(|k| (a.delta(k), k))
                .min();
            if let Some((d, k)) = best {
                if d < 0 {
                    a.switch(k);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }

    let paths = a.choice.iter().map(|&k| columns[k].to_path()).collect();
    let sol = Solution::from_paths(instance, paths);
    let violations = validate_solution(instance, &sol);
    if !violations.is_empty() {
        return Err(Error::InvalidSolution(violations));
    }
    Ok(sol)
}
