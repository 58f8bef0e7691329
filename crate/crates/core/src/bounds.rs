//! Lagrangian lower bounds.
//!
//! Dualising the capacity rows `sum_r v_r x_lr <= c_l y_s` with `kappa_c_l`
//! and the linking rows `x_lr <= y_s` with `kappa_s_lr` leaves one
//! shortest-path problem per request on leg costs
//! `mile_l(v_r) + kappa_c_l * v_r + kappa_s_lr`, plus an independent choice
//! of every `y_s` with coefficient
//! `sigma_s - sum_{l in s} (kappa_c_l * c_l + sum_r kappa_s_lr)`.
//! Multipliers are integers in milli-units, so every bound is exact.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, LegId, Money, Path};
use crate::pricing::{tdspp, PricingCosts};
use crate::reduction::SubNetwork;

/// Non-negative multipliers. `kappa_s[r][i]` belongs to leg
/// `subnetworks[r].legs[i]`; pairs outside a request's sub-network are
/// implicitly zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangeMultipliers {
    pub kappa_c: Vec<Money>,
    pub kappa_s: Vec<Vec<Money>>,
}

impl LagrangeMultipliers {
    pub fn zeros(instance: &Instance, subnetworks: &[SubNetwork]) -> Self {
        LagrangeMultipliers {
            kappa_c: vec![0; instance.legs().len()],
            kappa_s: subnetworks.iter().map(|s| vec![0; s.legs.len()]).collect(),
        }
    }

    fn check(&self, instance: &Instance, subnetworks: &[SubNetwork]) -> Result<()> {
        if self.kappa_c.len() != instance.legs().len()
            || self.kappa_s.len() != subnetworks.len()
            || self.kappa_s.iter().zip(subnetworks).any(|(k, s)| k.len() != s.legs.len())
        {
            return Err(Error::Config("multiplier dimensions do not match the instance".into()));
        }
        if let Some((l, k)) = self.kappa_c.iter().enumerate().find(|(_, k)| **k < 0) {
            return Err(Error::NegativeMultiplier(format!("kappa_c[{l}] = {k}")));
        }
        for (r, ks) in self.kappa_s.iter().enumerate() {
            if let Some((i, k)) = ks.iter().enumerate().find(|(_, k)| **k < 0) {
                return Err(Error::NegativeMultiplier(format!("kappa_s[{}, {r}] = {k}", subnetworks[r].legs[i])));
            }
        }
        Ok(())
    }

    /// `kappa_s` of one pair, zero outside the sub-network.
    pub fn kappa_s_of(&self, subnetworks: &[SubNetwork], leg: LegId, request: usize) -> Money {
        match subnetworks[request].legs.binary_search(&leg) {
            Ok(i) => self.kappa_s[request][i],
            Err(_) => 0,
        }
    }
}

/// Optimal solution of the relaxation at fixed multipliers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrSolution {
    pub bound: Money,
    pub paths: Vec<Path>,
    /// Cost of each path under the Lagrangian leg costs.
    pub path_costs: Vec<Money>,
    pub y: Vec<bool>,
    /// Sum of the negative schedule coefficients.
    pub schedule_part: Money,
}

fn request_costs(instance: &Instance, sub: &SubNetwork, kappa: &LagrangeMultipliers) -> PricingCosts {
    let r = sub.request;
    let v = instance.request(r).volume;
    let alpha = sub
        .legs
        .iter()
        .zip(&kappa.kappa_s[r.0])
        .map(|(&l, &ks)| instance.leg(l).mile_cost(v) + kappa.kappa_c[l.0] * v + ks)
        .collect();
    PricingCosts::from_parts(r, sub.legs.clone(), alpha, 0)
}

fn solve_request(instance: &Instance, sub: &SubNetwork, kappa: &LagrangeMultipliers) -> Result<(Path, Money)> {
    let costs = request_costs(instance, sub, kappa);
    let res = tdspp(instance, &costs);
    match (res.best_reduced_cost, res.paths.into_iter().next()) {
        (Some(c), Some(p)) => Ok((p.path, c)),
        _ => Err(Error::NoFeasiblePath(sub.request.0)),
    }
}

fn schedule_part(instance: &Instance, subnetworks: &[SubNetwork], kappa: &LagrangeMultipliers) -> (Vec<bool>, Money) {
    let mut coef: Vec<Money> = instance.schedules().iter().map(|s| s.fixed_cost).collect();
    for l in instance.legs() {
        coef[l.schedule.0] -= kappa.kappa_c[l.id.0] * l.capacity;
    }
    for (sub, ks) in subnetworks.iter().zip(&kappa.kappa_s) {
        for (&l, &k) in sub.legs.iter().zip(ks) {
            coef[instance.leg(l).schedule.0] -= k;
        }
    }
    let y: Vec<bool> = coef.iter().map(|&c| c < 0).collect();
    (y, coef.iter().filter(|&&c| c < 0).sum())
}

/// Solves the relaxation at `kappa`. `subnetworks[r]` must belong to
/// request `r`; the instance should carry dummy schedules so that every
/// request has a path.
pub fn eval_lr(instance: &Instance, subnetworks: &[SubNetwork], kappa: &LagrangeMultipliers) -> Result<LrSolution> {
    if subnetworks.len() != instance.requests().len() || subnetworks.iter().enumerate().any(|(r, s)| s.request.0 != r) {
        return Err(Error::Config("one sub-network per request, in request order".into()));
    }
    kappa.check(instance, subnetworks)?;
    let solved = subnetworks.par_iter().map(|sub| solve_request(instance, sub, kappa)).collect::<Result<Vec<_>>>()?;
    let (paths, path_costs): (Vec<Path>, Vec<Money>) = solved.into_iter().unzip();
    let (y, schedule_part) = schedule_part(instance, subnetworks, kappa);
    Ok(LrSolution { bound: path_costs.iter().sum::<Money>() + schedule_part, paths, path_costs, y, schedule_part })
}

/// Settings of the dual ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualSchedule {
    pub max_iterations: usize,
    /// Stop after this many iterations without a better bound.
    pub patience: usize,
    /// Objective of a known feasible solution; the dummy-only cost if `None`.
    pub target: Option<Money>,
    pub beta0: f64,
    /// Halve the step factor after this many full evaluations without a
    /// better bound.
    pub halve_after: usize,
    /// Requests re-solved per surrogate iteration.
    pub block_size: usize,
    /// Every this many iterations all requests are re-solved.
    pub full_every: usize,
}

impl Default for DualSchedule {
    fn default() -> Self {
        DualSchedule {
            max_iterations: 1_000,
            patience: 50,
            target: None,
            beta0: 1.0,
            halve_after: 5,
            block_size: 16,
            full_every: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Lagrangian value of the iteration; a valid bound only when `full`.
    pub value: Money,
    pub full: bool,
    pub best_bound: Money,
    pub step: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualResult {
    pub best_bound: Money,
    pub multipliers: LagrangeMultipliers,
    pub trace: Vec<TracePoint>,
}

/// Cost of serving every request by its dummy schedule alone.
pub fn dummy_only_cost(instance: &Instance) -> Option<Money> {
    instance
        .requests()
        .iter()
        .map(|r| {
            let l = instance.leg(instance.dummy_leg(r.id)?);
            Some(instance.schedule(l.schedule).fixed_cost + l.mile_cost(r.volume))
        })
        .sum()
}

/// Current relaxed solution, possibly mixing requests solved at older
/// multipliers (surrogate iterations).
struct Relaxed {
    paths: Vec<Path>,
    y: Vec<bool>,
}

impl Relaxed {
    fn value(&self, instance: &Instance, subnetworks: &[SubNetwork], kappa: &LagrangeMultipliers) -> Money {
        let paths: Money = self
            .paths
            .iter()
            .map(|p| {
                let costs = request_costs(instance, &subnetworks[p.request.0], kappa);
                costs.reduced_cost(&p.legs).expect("paths stay inside their sub-network")
            })
            .sum();
        let (_, part) = schedule_part(instance, subnetworks, kappa);
        paths + part
    }

    /// Residuals of the dualised rows: `(capacity per leg, linking per
    /// request and sub-network leg)`.
    fn subgradient(&self, instance: &Instance, subnetworks: &[SubNetwork]) -> (Vec<Money>, Vec<Vec<Money>>) {
        let mut gc: Vec<Money> =
            instance.legs().iter().map(|l| if self.y[l.schedule.0] { -l.capacity } else { 0 }).collect();
        let mut gs: Vec<Vec<Money>> = subnetworks
            .iter()
            .map(|s| s.legs.iter().map(|&l| if self.y[instance.leg(l).schedule.0] { -1 } else { 0 }).collect())
            .collect();
        for p in &self.paths {
            let v = instance.request(p.request).volume;
            let sub = &subnetworks[p.request.0];
            for &l in &p.legs {
                gc[l.0] += v;
                let i = sub.legs.binary_search(&l).expect("path inside sub-network");
                gs[p.request.0][i] += 1;
            }
        }
        (gc, gs)
    }
}

/// Projected subgradient ascent on the Lagrangian dual with Polyak steps
/// `beta * (target - value) / |g|^2`.
///
/// With more requests than `block_size`, ordinary iterations re-solve one
/// block of requests (round-robin in id order) and keep the other paths;
/// every `full_every`-th iteration, and any iteration where the block
/// solution fails to lower the surrogate value, re-solves everything. Only
/// full evaluations count as bounds.
pub fn solve_dual(instance: &Instance, subnetworks: &[SubNetwork], schedule: &DualSchedule) -> Result<DualResult> {
    let mut kappa = LagrangeMultipliers::zeros(instance, subnetworks);
    let first = eval_lr(instance, subnetworks, &kappa)?;
    let target = schedule.target.or_else(|| dummy_only_cost(instance)).unwrap_or(first.bound);
    let mut best_bound = first.bound;
    let mut best_kappa = kappa.clone();
    let mut beta = schedule.beta0;
    let mut trace = vec![TracePoint { iteration: 0, value: first.bound, full: true, best_bound, step: 0.0, beta }];
    let mut value = first.bound;
    let mut cur = Relaxed { paths: first.paths, y: first.y };
    let block = schedule.block_size.max(1);
    let blocks = subnetworks.len().div_ceil(block).max(1);
    let (mut since_best, mut fulls_since_best) = (0, 0);

    // Ascent state in f64; capacity rows are scaled by 1/c_l so that their
    // residuals are on the scale of the linking rows.
    let scale: Vec<f64> = instance.legs().iter().map(|l| l.capacity.max(1) as f64).collect();
    let mut mu_c = vec![0.0; kappa.kappa_c.len()];
    let mut mu_s: Vec<Vec<f64>> = kappa.kappa_s.iter().map(|k| vec![0.0; k.len()]).collect();

    for k in 1..=schedule.max_iterations {
        let (gc, gs) = cur.subgradient(instance, subnetworks);
        let gc: Vec<f64> = gc.iter().zip(&scale).map(|(&g, &c)| g as f64 / c).collect();
        let norm2: f64 =
            gc.iter().map(|g| g * g).sum::<f64>() + gs.iter().flatten().map(|&g| (g * g) as f64).sum::<f64>();
        if norm2 == 0.0 {
            break;
        }
        let step = beta * ((target - value).max(1) as f64) / norm2;
        for (((m, g), kc), c) in mu_c.iter_mut().zip(&gc).zip(&mut kappa.kappa_c).zip(&scale) {
            *m = (*m + step * g).max(0.0);
            *kc = (*m / c).round() as Money;
        }
        for ((m, g), ks) in mu_s.iter_mut().flatten().zip(gs.iter().flatten()).zip(kappa.kappa_s.iter_mut().flatten()) {
            *m = (*m + step * *g as f64).max(0.0);
            *ks = m.round() as Money;
        }

        let mut full = blocks == 1 || k % schedule.full_every.max(1) == 0;
        if !full {
            let b = (k - 1) % blocks;
            let range = b * block..((b + 1) * block).min(subnetworks.len());
            let old = cur.value(instance, subnetworks, &kappa);
            let mut trial = Relaxed { paths: cur.paths.clone(), y: schedule_part(instance, subnetworks, &kappa).0 };
            for r in range {
                trial.paths[r] = solve_request(instance, &subnetworks[r], &kappa)?.0;
            }
            let new = trial.value(instance, subnetworks, &kappa);
            if new <= old {
                cur = trial;
                value = new;
            } else {
                full = true;
            }
        }
        let mut improved = false;
        if full {
            let sol = eval_lr(instance, subnetworks, &kappa)?;
            value = sol.bound;
            cur = Relaxed { paths: sol.paths, y: sol.y };
            if value > best_bound {
                best_bound = value;
                best_kappa = kappa.clone();
                improved = true;
                fulls_since_best = 0;
            } else {
                fulls_since_best += 1;
                if fulls_since_best >= schedule.halve_after {
                    beta /= 2.0;
                    fulls_since_best = 0;
                }
            }
        }
        since_best = if improved { 0 } else { since_best + 1 };
        trace.push(TracePoint { iteration: k, value, full, best_bound, step, beta });
        if since_best >= schedule.patience || best_bound >= target {
            break;
        }
    }
    Ok(DualResult { best_bound, multipliers: best_kappa, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{add_dummy_schedules, DummyConfig, RequestId};
    use crate::reduction::reduce_all;
    use crate::samples::micro3;

    // Without dummies: a zero-mile dummy leg would price the request at 0.
    fn setup() -> (Instance, Vec<SubNetwork>) {
        let inst = micro3();
        let subs = reduce_all(&inst);
        (inst, subs)
    }

    #[test]
    fn zero_multipliers_give_cheapest_path() {
        let (inst, subs) = setup();
        let sol = eval_lr(&inst, &subs, &LagrangeMultipliers::zeros(&inst, &subs)).unwrap();
        assert_eq!(sol.bound, 80_000);
        assert_eq!(sol.paths[0].legs, vec![LegId(0), LegId(1)]);
        assert!(sol.y.iter().all(|y| !y));
    }

    #[test]
    fn capacity_price_moves_the_path_and_opens_a_schedule() {
        let (inst, subs) = setup();
        let mut k = LagrangeMultipliers::zeros(&inst, &subs);
        k.kappa_c[0] = 10_000;
        let sol = eval_lr(&inst, &subs, &k).unwrap();
        assert_eq!(sol.paths[0].legs, vec![LegId(2)]);
        // sigma_0 - 30 * 10_000 < 0
        assert!(sol.y[0]);
        assert_eq!(sol.schedule_part, 100_000 - 300_000);
        assert_eq!(sol.bound, 90_000 - 200_000);
    }

    #[test]
    fn negative_multiplier_rejected() {
        let (inst, subs) = setup();
        let mut k = LagrangeMultipliers::zeros(&inst, &subs);
        k.kappa_s[0][0] = -1;
        assert!(matches!(eval_lr(&inst, &subs, &k), Err(Error::NegativeMultiplier(_))));
    }

    #[test]
    fn empty_subnetwork_uses_the_dummy() {
        let inst = add_dummy_schedules(&crate::samples::micro3_with_window(0, 60), &DummyConfig::default());
        let subs = reduce_all(&inst);
        let sol = eval_lr(&inst, &subs, &LagrangeMultipliers::zeros(&inst, &subs)).unwrap();
        assert_eq!(Some(sol.paths[0].legs[0]), inst.dummy_leg(RequestId(0)));
    }

    #[test]
    fn ascent_closes_micro3() {
        let (inst, subs) = setup();
        let res = solve_dual(&inst, &subs, &DualSchedule { target: Some(130_000), ..Default::default() }).unwrap();
        assert!(res.best_bound <= 130_000);
        assert!(res.best_bound as f64 >= 0.99 * 130_000.0, "{}", res.best_bound);
        assert!(res.trace.windows(2).all(|w| w[0].best_bound <= w[1].best_bound));
        assert_eq!(eval_lr(&inst, &subs, &res.multipliers).unwrap().bound, res.best_bound);
    }

    #[test]
    fn ascent_with_dummies_closes_micro3() {
        let inst = add_dummy_schedules(&micro3(), &DummyConfig::default());
        let subs = reduce_all(&inst);
        let res = solve_dual(&inst, &subs, &DualSchedule { target: Some(130_000), ..Default::default() }).unwrap();
        assert!(res.best_bound <= 130_000);
        assert!(res.best_bound as f64 >= 0.99 * 130_000.0, "{}", res.best_bound);
    }

    #[test]
    fn ascent_without_target_stays_valid() {
        let (inst, subs) = setup();
        let res = solve_dual(&inst, &subs, &DualSchedule::default()).unwrap();
        assert!((80_000..=130_000).contains(&res.best_bound), "{}", res.best_bound);
    }

    #[test]
    fn zero_iterations_return_the_start() {
        let (inst, subs) = setup();
        let res = solve_dual(&inst, &subs, &DualSchedule { max_iterations: 0, ..Default::default() }).unwrap();
        assert_eq!(res.best_bound, 80_000);
        assert_eq!(res.trace.len(), 1);
    }
}
