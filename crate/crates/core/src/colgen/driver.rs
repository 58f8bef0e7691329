use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{initial_columns, CgParams, Column, DualPrices, Master, Mode};
use crate::error::{Error, Result};
use crate::model::{Instance, Money};
use crate::pricing::{leg_costs, price_request, PricingOptions, PricingResult};
use crate::reduction::SubNetwork;

/// Weighted Dantzig-Wolfe state. Pricing uses
/// `(1/w) pi + ((w-1)/w) best_adjusted`, where `best_adjusted` are the
/// pricing duals that gave the best Lagrangian bound so far and
/// `w = min(1 + streak, max_weight)` grows with consecutive improvements.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationState {
    pub best_adjusted: Option<DualPrices>,
    pub best_bound: Option<f64>,
    pub streak: u32,
    pub weight: u32,
    pub max_weight: u32,
    last_priced: Option<DualPrices>,
}

impl StabilizationState {
    pub fn new(max_weight: u32) -> Self {
        StabilizationState {
            best_adjusted: None,
            best_bound: None,
            streak: 0,
            weight: 1,
            max_weight: max_weight.max(1),
            last_priced: None,
        }
    }

    /// Records the Lagrangian bound reached by `priced` and updates streak
    /// and weight. Returns whether the best bound improved.
    pub fn record(&mut self, priced: &DualPrices, bound: f64) -> bool {
        let improved = self.best_bound.is_none_or(|b| bound > b);
        if improved {
            self.best_bound = Some(bound);
            self.best_adjusted = Some(priced.clone());
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        self.weight = (1 + self.streak).min(self.max_weight);
        improved
    }

    /// Pricing duals for `duals` at the current weight.
    pub fn adjusted(&self, duals: &DualPrices) -> DualPrices {
        match (&self.best_adjusted, self.weight) {
            (Some(best), w) if w > 1 => {
                let w = w as f64;
                duals.combine(1.0 / w, best, (w - 1.0) / w)
            }
            _ => duals.clone(),
        }
    }
}

/// One stabilisation step: credits `last_bound` (the bound of the duals
/// returned by the previous call) to the state, then blends `new_duals`
/// with the best duals at the resulting weight.
pub fn adjust_duals(state: &mut StabilizationState, new_duals: &DualPrices, last_bound: Option<f64>) -> DualPrices {
    if let (Some(b), Some(prev)) = (last_bound, state.last_priced.take()) {
        state.record(&prev, b);
    }
    let adj = state.adjusted(new_duals);
    state.last_priced = Some(adj.clone());
    adj
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub lp_objective: f64,
    pub lp_pivots: usize,
    pub columns_added: usize,
    /// Smallest reduced cost over requests under the pricing duals.
    pub min_reduced_cost: Option<Money>,
    /// Lagrangian bound implied by the pricing duals.
    pub lagrangian_bound: Option<f64>,
    pub weight: u32,
    /// Adjusted duals found nothing and the round was repeated with the
    /// master duals.
    pub repriced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    IterationLimit,
    TimeLimit,
    LpFailure(String),
}

/// Result of [`run_colgen`].
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub master: Master,
    /// Master duals of the last solve.
    pub duals: DualPrices,
    pub iterations: Vec<IterationLog>,
    pub stop: StopReason,
    /// Objective of the last master solve.
    pub lp_bound: f64,
    pub seconds: f64,
}

impl CgOutcome {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn columns(&self) -> &[Column] {
        self.master.columns()
    }
}

struct Round {
    results: Vec<PricingResult>,
    bound: Option<f64>,
    min_rc: Option<Money>,
}

fn price_all(
    instance: &Instance,
    master: &Master,
    subnetworks: &[SubNetwork],
    duals: &DualPrices,
    options: &PricingOptions,
) -> Result<Round> {
    let results: Vec<PricingResult> =
        subnetworks.par_iter().map(|sub| price_request(instance, sub, duals, options)).collect::<Result<_>>()?;
    let mut path_part = 0.0;
    let mut complete = true;
    let mut min_rc: Option<Money> = None;
    for (res, sub) in results.iter().zip(subnetworks) {
        match res.best_reduced_cost {
            Some(rc) => {
                path_part += (rc + duals.pi_r[sub.request.0].round() as Money) as f64;
                min_rc = Some(min_rc.map_or(rc, |m| m.min(rc)));
            }
            None => complete = false,
        }
    }
    let bound = complete.then(|| path_part + master.schedule_part(instance, duals));
    Ok(Round { results, bound, min_rc })
}

/// Columns of `round` that improve the master under `actual` duals.
fn improving(
    instance: &Instance,
    subnetworks: &[SubNetwork],
    round: &Round,
    actual: &DualPrices,
    same_duals: bool,
) -> Result<Vec<Column>> {
    let mut out = Vec::new();
    for (res, sub) in round.results.iter().zip(subnetworks) {
        if res.paths.is_empty() {
            continue;
        }
        let costs = if same_duals { None } else { Some(leg_costs(instance, sub, actual)?) };
        for p in &res.paths {
            let rc = match &costs {
                None => p.reduced_cost,
                Some(c) => c.reduced_cost(&p.legs).expect("priced legs lie in the sub-network"),
            };
            if rc <= -1 {
                out.push(Column::from_path(&p.path));
            }
        }
    }
    Ok(out)
}

/// Adds up to `paths` cheapest paths per request under `duals`, searched
/// over the whole sub-network and kept whatever their reduced cost.
/// Returns the number of new columns.
pub fn enrich_pool(
    instance: &Instance,
    master: &mut Master,
    subnetworks: &[SubNetwork],
    duals: &DualPrices,
    paths: usize,
) -> Result<usize> {
    if paths == 0 {
        return Ok(0);
    }
    let options = PricingOptions { paths_limit: paths, max_cost_slack: None, diagnostic: true, critical_only: false };
    let results: Vec<PricingResult> =
        subnetworks.par_iter().map(|sub| price_request(instance, sub, duals, &options)).collect::<Result<_>>()?;
    let mut added = 0;
    for res in &results {
        for p in &res.paths {
            added += master.add_column(instance, Column::from_path(&p.path)) as usize;
        }
    }
    Ok(added)
}

/// Runs column generation on `instance`, which must contain a dummy
/// schedule for every request. `subnetworks[r]` is the pricing network of
/// request `r`.
///
/// Each round solves the master, prices every request in parallel and adds
/// the paths whose reduced cost under the master duals is at most `-1`.
/// The run stops when a round adds nothing, after `num_iterations` rounds,
/// or at the time limit. In stabilised mode a round that finds nothing with
/// blended duals is repeated with the master duals before stopping.
pub fn run_colgen(instance: &Instance, subnetworks: &[SubNetwork], params: &CgParams) -> Result<CgOutcome> {
    params.check()?;
    let start = Instant::now();
    let mut master = super::build_rmp(instance, &initial_columns(instance))?;
    let options = PricingOptions {
        paths_limit: params.paths,
        max_cost_slack: params.max_cost,
        diagnostic: false,
        critical_only: true,
    };
    let mut stab = StabilizationState::new(match params.mode {
        Mode::Standard => 1,
        Mode::Stabilized => params.max_weight,
    });
    let mut last_bound: Option<f64> = None;
    let mut log = Vec::new();
    let mut duals = DualPrices::zeros(instance);
    let mut lp_bound = f64::NAN;
    let mut k = 0;
    let stop = loop {
        let sol = master.solve();
        if !sol.is_optimal() {
            let msg = format!("{:?} in round {k}: {}", sol.status, sol.message);
            if k == 0 {
                return Err(Error::Lp(msg));
            }
            break StopReason::LpFailure(msg);
        }
        lp_bound = sol.objective;
        duals = master.duals(instance, &sol, k as u64);
        let mut entry = IterationLog {
            iteration: k,
            lp_objective: sol.objective,
            lp_pivots: sol.iterations,
            columns_added: 0,
            min_reduced_cost: None,
            lagrangian_bound: None,
            weight: stab.weight,
            repriced: false,
        };
        if k == params.num_iterations {
            log.push(entry);
            break StopReason::IterationLimit;
        }
        if params.time_limit.is_some_and(|t| start.elapsed().as_secs_f64() > t) {
            log.push(entry);
            break StopReason::TimeLimit;
        }

        let pricing_duals = match params.mode {
            Mode::Standard => duals.clone(),
            Mode::Stabilized => adjust_duals(&mut stab, &duals, last_bound),
        };
        entry.weight = stab.weight;
        let same = stab.weight == 1 || params.mode == Mode::Standard;
        let mut round = price_all(instance, &master, subnetworks, &pricing_duals, &options)?;
        let mut found = improving(instance, subnetworks, &round, &duals, same)?;
        if found.is_empty() && !same {
            entry.repriced = true;
            round = price_all(instance, &master, subnetworks, &duals, &options)?;
            found = improving(instance, subnetworks, &round, &duals, true)?;
            stab.last_priced = Some(duals.clone());
        }
        last_bound = round.bound;
        entry.min_reduced_cost = round.min_rc;
        entry.lagrangian_bound = round.bound;
        for c in found {
            if master.add_column(instance, c) {
                entry.columns_added += 1;
            }
        }
        let added = entry.columns_added;
        log.push(entry);
        if added == 0 {
            break StopReason::Converged;
        }
        k += 1;
    };
    Ok(CgOutcome { master, duals, iterations: log, stop, lp_bound, seconds: start.elapsed().as_secs_f64() })
}
