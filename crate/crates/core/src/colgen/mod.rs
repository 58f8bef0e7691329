//! Column generation over request paths.
//!
//! The restricted master chooses, per request, a convex combination of
//! known paths (`lambda`) and a fractional activation `y` per schedule:
//!
//! ```text
//! min  sum_s sigma_s y_s + sum_p cost_p lambda_p
//!      sum_{p uses l} v_r lambda_p - c_l y_s(l) <= 0     per leg
//!      sum_{p of r uses l} lambda_p - y_s(l)     <= 0     per (leg, request)
//!      sum_{p of r} lambda_p                     =  1     per request
//! ```
//!
//! Rows exist only for legs and (leg, request) pairs that appear in some
//! column; absent rows would have no support and a zero dual. New paths
//! come from [`crate::pricing`]; [`finish_integer`] then makes `y` binary
//! and rounds to one path per request.

mod driver;
mod finish;
mod realtime;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DummyConfig, Instance, LegId, Money, Path, RequestId, ScheduleId};
use crate::simplex::{warm_start, Basis, LinearProgram, LpSolution, Sense};

pub use crate::pricing::DualPrices;
pub use driver::{adjust_duals, enrich_pool, run_colgen, CgOutcome, IterationLog, StabilizationState, StopReason};
pub use finish::{finish_integer, round_columns, Finish, FinishReport};
pub use realtime::{insert_realtime, residual_instance, solve, CgReport, Insertion, SolveOutcome, Timings};

/// A request path offered to the master.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Column {
    pub request: RequestId,
    pub legs: Vec<LegId>,
    pub mile_cost: Money,
}

impl Column {
    pub fn from_path(path: &Path) -> Self {
        Column { request: path.request, legs: path.legs.clone(), mile_cost: path.mile_cost }
    }

    pub fn to_path(&self) -> Path {
        Path { request: self.request, legs: self.legs.clone(), mile_cost: self.mile_cost }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Plain Dantzig-Wolfe: price with the master duals.
    Standard,
    /// Weighted Dantzig-Wolfe: price with a blend of the current duals and
    /// the best duals seen so far.
    Stabilized,
}

/// Column generation and finishing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgParams {
    /// Paths generated per request and iteration.
    pub paths: usize,
    /// Pricing rounds; `0` solves the master over the initial columns only.
    pub num_iterations: usize,
    /// Generated paths cost at most this much above the request's cheapest
    /// path; `None` is unbounded.
    pub max_cost: Option<Money>,
    pub mode: Mode,
    /// Cap on the stabilisation weight; `1` makes both modes identical.
    pub max_weight: u32,
    /// Price on the reduced sub-networks rather than all usable legs.
    pub reduce: bool,
    /// Before finishing, add this many cheapest paths per request under the
    /// final duals to the master, improving or not.
    pub pool_paths: usize,
    /// LP relaxations solved by the finishing branch-and-bound.
    pub node_budget: usize,
    /// Wall-clock limit in seconds for generation plus finishing.
    pub time_limit: Option<f64>,
    /// Recorded in reports; the pipeline itself is deterministic.
    pub seed: u64,
    pub dummy: DummyConfig,
}

impl Default for CgParams {
    fn default() -> Self {
        CgParams {
            paths: 50,
            num_iterations: 50,
            max_cost: Some(0),
            mode: Mode::Standard,
            max_weight: 10,
            reduce: true,
            pool_paths: 20,
            node_budget: 100_000,
            time_limit: None,
            seed: 0,
            dummy: DummyConfig::default(),
        }
    }
}

impl CgParams {
    pub fn check(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::Config("paths must be at least 1".into()));
        }
        if self.max_cost.is_some_and(|c| c < 0) {
            return Err(Error::Config("max cost must be non-negative".into()));
        }
        if self.max_weight == 0 {
            return Err(Error::Config("max weight must be at least 1".into()));
        }
        if self.time_limit.is_some_and(|t| t.is_nan() || t < 0.0) {
            return Err(Error::Config("time limit must be non-negative".into()));
        }
        Ok(())
    }
}

/// The restricted master, grown column by column. The previous optimal
/// basis is kept so that every re-solve starts warm.
#[derive(Debug, Clone)]
pub struct Master {
    lp: LinearProgram,
    columns: Vec<Column>,
    column_var: Vec<usize>,
    by_request: Vec<Vec<usize>>,
    y_var: BTreeMap<ScheduleId, usize>,
    capacity_row: BTreeMap<LegId, usize>,
    linking_row: BTreeMap<(LegId, RequestId), usize>,
    convexity_row: Vec<usize>,
    pool: HashSet<Column>,
    basis: Option<Basis>,
}

impl Master {
    /// An empty master with one convexity row per request.
    pub fn new(instance: &Instance) -> Self {
        let mut lp = LinearProgram::new();
        let convexity_row = instance
            .requests()
            .iter()
            .map(|r| lp.add_named_row(format!("conv_r{}", r.id), Vec::new(), Sense::Eq, 1.0))
            .collect();
        Master {
            lp,
            columns: Vec::new(),
            column_var: Vec::new(),
            by_request: vec![Vec::new(); instance.requests().len()],
            y_var: BTreeMap::new(),
            capacity_row: BTreeMap::new(),
            linking_row: BTreeMap::new(),
            convexity_row,
            pool: HashSet::new(),
            basis: None,
        }
    }

    /// Adds a column unless an identical one is already present.
    pub fn add_column(&mut self, instance: &Instance, column: Column) -> bool {
        if self.pool.contains(&column) {
            return false;
        }
        let r = column.request;
        let v = instance.request(r).volume as f64;
        let k = self.columns.len();
        let var = self.lp.add_named_var(format!("lam{k}_r{r}"), column.mile_cost as f64, 0.0, f64::INFINITY);
        for &l in &column.legs {
            let leg = instance.leg(l);
            let s = leg.schedule;
            let y = *self.y_var.entry(s).or_insert_with(|| {
                self.lp.add_named_var(format!("y_s{s}"), instance.schedule(s).fixed_cost as f64, 0.0, 1.0)
            });
            let lp = &mut self.lp;
            let cap = *self.capacity_row.entry(l).or_insert_with(|| {
                lp.add_named_row(format!("cap_l{l}"), vec![(y, -(leg.capacity as f64))], Sense::Le, 0.0)
            });
            lp.add_coef(cap, var, v);
            let link = *self
                .linking_row
                .entry((l, r))
                .or_insert_with(|| lp.add_named_row(format!("link_l{l}_r{r}"), vec![(y, -1.0)], Sense::Le, 0.0));
            lp.add_coef(link, var, 1.0);
        }
        self.lp.add_coef(self.convexity_row[r.0], var, 1.0);
        self.column_var.push(var);
        self.by_request[r.0].push(k);
        self.pool.insert(column.clone());
        self.columns.push(column);
        true
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Column indices of `request`.
    pub fn columns_of(&self, request: RequestId) -> &[usize] {
        &self.by_request[request.0]
    }

    pub fn column_var(&self, k: usize) -> usize {
        self.column_var[k]
    }

    /// LP variable of each schedule appearing in some column.
    pub fn y_vars(&self) -> &BTreeMap<ScheduleId, usize> {
        &self.y_var
    }

    pub fn basis(&self) -> Option<&Basis> {
        self.basis.as_ref()
    }

    /// Solves the master, warm-started from the last optimal basis.
    pub fn solve(&mut self) -> LpSolution {
        let sol = warm_start(&self.lp, self.basis.as_ref().unwrap_or(&Basis::default()));
        if sol.is_optimal() {
            self.basis = Some(sol.basis.clone());
        }
        sol
    }

    /// Maps LP row duals back to capacity, linking and convexity prices.
    pub fn duals(&self, instance: &Instance, sol: &LpSolution, snapshot: u64) -> DualPrices {
        let mut d = DualPrices::zeros(instance);
        d.snapshot = snapshot;
        for (&l, &row) in &self.capacity_row {
            d.pi_c[l.0] = sol.duals[row];
        }
        for (&key, &row) in &self.linking_row {
            d.pi_s.insert(key, sol.duals[row]);
        }
        for (r, &row) in self.convexity_row.iter().enumerate() {
            d.pi_r[r] = sol.duals[row];
        }
        d
    }

    /// `lambda` of every column, by column index.
    pub fn lambda(&self, x: &[f64]) -> Vec<f64> {
        self.column_var.iter().map(|&v| x[v]).collect()
    }

    /// Lagrangian value of the schedule part at `duals`: every schedule of
    /// the master contributes `min(0, sigma_s + sum_l c_l pi_c[l] +
    /// sum pi_s[l, r])` over its rows.
    pub fn schedule_part(&self, instance: &Instance, duals: &DualPrices) -> f64 {
        let mut coef: BTreeMap<ScheduleId, f64> =
            self.y_var.keys().map(|&s| (s, instance.schedule(s).fixed_cost as f64)).collect();
        for &l in self.capacity_row.keys() {
            let leg = instance.leg(l);
            *coef.get_mut(&leg.schedule).unwrap() += leg.capacity as f64 * duals.pi_c[l.0];
        }
        for &(l, r) in self.linking_row.keys() {
            *coef.get_mut(&instance.leg(l).schedule).unwrap() += duals.linking(l, r);
        }
        coef.values().map(|&c| c.min(0.0)).sum()
    }
}

/// The master over `columns`. Every request needs at least one column.
pub fn build_rmp(instance: &Instance, columns: &[Column]) -> Result<Master> {
    let mut m = Master::new(instance);
    for c in columns {
        m.add_column(instance, c.clone());
    }
    if let Some(r) = m.by_request.iter().position(|c| c.is_empty()) {
        return Err(Error::MissingColumn(r));
    }
    Ok(m)
}

/// Columns every run starts from: each request's dummy path, then any
/// valid base-plan paths.
pub fn initial_columns(instance: &Instance) -> Vec<Column> {
    let mut cols = Vec::new();
    for r in instance.requests() {
        if let Some(l) = instance.dummy_leg(r.id) {
            if let Ok(p) = Path::new(instance, r.id, vec![l]) {
                cols.push(Column::from_path(&p));
            }
        }
    }
    for rec in instance.base_plan() {
        if let Ok(p) = Path::new(instance, rec.request, rec.legs.clone()) {
            if crate::model::validate_path(instance, &p).is_ok_and(|v| v.is_empty()) {
                cols.push(Column::from_path(&p));
            }
        }
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::add_dummy_schedules;
    use crate::samples::micro3;
    use crate::simplex::LpStatus;

    fn micro3_columns() -> (Instance, Vec<Column>) {
        let inst = add_dummy_schedules(&micro3(), &DummyConfig::default());
        let p = |legs: &[usize]| {
            Column::from_path(&Path::new(&inst, RequestId(0), legs.iter().map(|&l| LegId(l)).collect()).unwrap())
        };
        let cols = vec![p(&[0, 1]), p(&[2]), p(&[3])];
        (inst, cols)
    }

    #[test]
    fn micro3_master_structure() {
        let (inst, cols) = micro3_columns();
        let m = build_rmp(&inst, &cols).unwrap();
        assert_eq!(m.columns().len(), 3);
        assert_eq!(m.y_vars().len(), 3);
        // 4 capacity rows, 4 linking rows, 1 convexity row
        assert_eq!(m.lp().num_rows(), 9);
        assert_eq!(m.lp().num_vars(), 6);
    }

    #[test]
    fn micro3_master_optimum() {
        let (inst, cols) = micro3_columns();
        let mut m = build_rmp(&inst, &cols).unwrap();
        let sol = m.solve();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 130_000.0).abs() < 1e-6, "{}", sol.objective);
        let y1 = m.y_vars()[&ScheduleId(1)];
        assert!((sol.x[y1] - 1.0).abs() < 1e-9);
        assert_eq!(sol.basis.vars[y1], crate::simplex::VarStatus::Basic);
    }

    #[test]
    fn dummy_only_master_costs_the_dummies() {
        let (inst, cols) = micro3_columns();
        let mut m = build_rmp(&inst, &cols[2..]).unwrap();
        let sol = m.solve();
        let dummy = inst.schedules().last().unwrap().fixed_cost as f64;
        assert!((sol.objective - dummy - cols[2].mile_cost as f64).abs() < 1e-6);
    }

    #[test]
    fn missing_column_is_an_error() {
        let (inst, _) = micro3_columns();
        assert!(matches!(build_rmp(&inst, &[]), Err(Error::MissingColumn(0))));
    }

    #[test]
    fn duplicate_columns_are_ignored() {
        let (inst, cols) = micro3_columns();
        let mut m = build_rmp(&inst, &cols).unwrap();
        assert!(!m.add_column(&inst, cols[0].clone()));
        assert_eq!(m.columns().len(), 3);
    }

    #[test]
    fn master_duals_have_pricing_signs() {
        let (inst, cols) = micro3_columns();
        let mut m = build_rmp(&inst, &cols).unwrap();
        let sol = m.solve();
        let d = m.duals(&inst, &sol, 1);
        assert!(d.pi_c.iter().all(|&p| p <= 1e-9));
        assert!(d.pi_s.values().all(|&p| p <= 1e-9));
        // the chosen column prices out at zero
        let rc = 90_000.0 - (d.pi_c[2] * 10.0 + d.linking(LegId(2), RequestId(0))) - d.pi_r[0];
        assert!(rc.abs() < 1e-6, "{rc}");
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CgParams { paths: 0, ..CgParams::default() }.check().is_err());
        assert!(CgParams { max_weight: 0, ..CgParams::default() }.check().is_err());
        assert!(CgParams::default().check().is_ok());
    }
}
