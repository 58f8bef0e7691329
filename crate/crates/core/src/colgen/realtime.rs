use std::time::Instant;

use serde::Serialize;

use super::{enrich_pool, finish_integer, run_colgen, CgParams, FinishReport, IterationLog, Mode, StopReason};
use crate::error::{Error, Result};
use crate::model::{add_dummy_schedules, validate_solution, Instance, Money, Path, Request, RequestId, Solution};
use crate::reduction::{reduce_all, unreduced_all, ReductionStats};

/// Wall-clock seconds per stage. Not serialised, so that reports of
/// identical runs are byte-identical.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub reduce: f64,
    pub colgen: f64,
    pub finish: f64,
}

impl Timings {
    pub fn total(&self) -> f64 {
        self.reduce + self.colgen + self.finish
    }
}

/// Everything a solve run reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgReport {
    pub mode: Mode,
    pub params: CgParams,
    pub reduction: ReductionStats,
    pub iterations: Vec<IterationLog>,
    pub stop: StopReason,
    pub converged: bool,
    /// Objective of the last master solve.
    pub lp_bound: f64,
    pub columns: usize,
    /// Columns added after generation, see [`CgParams::pool_paths`].
    pub pooled_columns: usize,
    pub finish: FinishReport,
    pub integer_objective: Money,
    /// Relative gap of the integer objective to the master bound.
    pub gap_vs_lp: Option<f64>,
    /// A Lagrangian bound, when one was supplied.
    pub lagrangian_bound: Option<Money>,
    pub gap_vs_lagrangian: Option<f64>,
    #[serde(skip)]
    pub timings: Timings,
}

impl CgReport {
    /// Records an external lower bound and the gap against it.
    pub fn with_lagrangian_bound(mut self, bound: Money) -> Self {
        self.lagrangian_bound = Some(bound);
        self.gap_vs_lagrangian = (bound > 0).then(|| (self.integer_objective - bound) as f64 / bound as f64);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// The input plus dummy schedules; the solution refers to it.
    pub instance: Instance,
    pub solution: Solution,
    pub report: CgReport,
}

/// Full heuristic pipeline: dummy schedules, reduction, column generation
/// and integer finishing.
pub fn solve(instance: &Instance, params: &CgParams) -> Result<SolveOutcome> {
    params.check()?;
    let inst = add_dummy_schedules(instance, &params.dummy);
    let t0 = Instant::now();
    let subs = if params.reduce { reduce_all(&inst) } else { unreduced_all(&inst) };
    let reduce = t0.elapsed().as_secs_f64();
    if let Some(s) = subs.iter().find(|s| s.is_empty()) {
        return Err(Error::NoFeasiblePath(s.request.0));
    }
    let mut cg = run_colgen(&inst, &subs, params)?;
    let t1 = Instant::now();
    let pooled = enrich_pool(&inst, &mut cg.master, &subs, &cg.duals, params.pool_paths)?;
    let remaining = params.time_limit.map(|t| (t - reduce - cg.seconds).max(0.0));
    let fin = finish_integer(&inst, &cg.master, cg.lp_bound, params.node_budget, remaining)?;
    let finish = t1.elapsed().as_secs_f64();
    let objective = fin.solution.objective();
    let report = CgReport {
        mode: params.mode,
        params: *params,
        reduction: ReductionStats::of(&inst, &subs),
        converged: cg.converged(),
        stop: cg.stop.clone(),
        lp_bound: cg.lp_bound,
        columns: cg.master.columns().len(),
        pooled_columns: pooled,
        iterations: cg.iterations,
        gap_vs_lp: fin.report.gap,
        finish: fin.report,
        integer_objective: objective,
        lagrangian_bound: None,
        gap_vs_lagrangian: None,
        timings: Timings { reduce, colgen: cg.seconds, finish },
    };
    Ok(SolveOutcome { instance: inst, solution: fin.solution, report })
}

/// The network left for new requests: every leg loses the volume the base
/// solution puts on it, schedules active in the base cost nothing, dummy
/// legs of existing requests are closed, and the requests are exactly
/// `new_requests`, renumbered from 0. Leg and schedule ids are unchanged.
/// `instance` must already carry its dummy schedules.
pub fn residual_instance(instance: &Instance, base: &Solution, new_requests: &[Request]) -> Result<Instance> {
    let mut load = vec![0; instance.legs().len()];
    for p in &base.paths {
        let v = instance.try_request(p.request)?.volume;
        for &l in &p.legs {
            load[instance.try_leg(l)?.id.0] += v;
        }
    }
    let (hubs, mut schedules, mut legs, _, _) = instance.clone().into_parts();
    for s in &mut schedules {
        if base.active.get(s.id.0).copied().unwrap_or(false) {
            s.fixed_cost = 0;
        }
    }
    for l in &mut legs {
        let s = &mut schedules[l.schedule.0];
        if s.is_dummy && s.request.is_some() {
            l.capacity = 0;
        } else {
            l.capacity = (l.capacity - load[l.id.0]).max(0);
        }
    }
    for s in &mut schedules {
        if s.is_dummy {
            s.request = None;
        }
    }
    let requests = new_requests.iter().enumerate().map(|(i, r)| Request { id: RequestId(i), ..r.clone() }).collect();
    Instance::new(hubs, schedules, legs, requests)
}

#[derive(Debug, Clone)]
pub struct Insertion {
    /// Original network, old requests followed by the new ones, with dummy
    /// schedules for all of them.
    pub instance: Instance,
    /// Base paths unchanged plus paths for the new requests.
    pub solution: Solution,
    /// Objective increase over the base solution.
    pub marginal_cost: Money,
    /// Report of the residual solve; `None` when there was nothing to add.
    pub report: Option<CgReport>,
}

/// Routes `new_requests` on top of `base` without moving existing paths.
/// The residual network ([`residual_instance`]) is solved with the full
/// pipeline and the result is merged and validated against the combined
/// instance.
pub fn insert_realtime(
    instance: &Instance,
    base: &Solution,
    new_requests: &[Request],
    params: &CgParams,
) -> Result<Insertion> {
    let inst0 = add_dummy_schedules(instance, &params.dummy);
    if base.paths.len() != inst0.requests().len() {
        return Err(Error::Config(format!(
            "base solution has {} paths for {} requests",
            base.paths.len(),
            inst0.requests().len()
        )));
    }
    let base_paths =
        base.paths.iter().map(|p| Path::new(&inst0, p.request, p.legs.clone())).collect::<Result<Vec<_>>>()?;
    if new_requests.is_empty() {
        return Ok(Insertion { instance: inst0, solution: base.clone(), marginal_cost: 0, report: None });
    }

    let old = inst0.requests().len();
    let combined = {
        let (hubs, schedules, legs, mut requests, base_plan) = inst0.clone().into_parts();
        for (i, r) in new_requests.iter().enumerate() {
            requests.push(Request { id: RequestId(old + i), ..r.clone() });
        }
        add_dummy_schedules(&Instance::with_base_plan(hubs, schedules, legs, requests, base_plan)?, &params.dummy)
    };
    let residual = residual_instance(&inst0, base, new_requests)?;
    let out = solve(&residual, params)?;

    let mut paths = base_paths;
    for p in &out.solution.paths {
        paths.push(Path::new(&combined, RequestId(old + p.request.0), p.legs.clone())?);
    }
    let solution = Solution::from_paths(&combined, paths);
    let violations = validate_solution(&combined, &solution);
    if !violations.is_empty() {
        return Err(Error::InvalidSolution(violations));
    }
    let base_objective = Solution::from_paths(&inst0, base.paths.clone()).objective();
    Ok(Insertion {
        marginal_cost: solution.objective() - base_objective,
        instance: combined,
        solution,
        report: Some(out.report),
    })
}
