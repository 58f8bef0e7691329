//! Plot-ready tables: one summary row per solved instance and a per-schedule
//! cost breakdown. Both serialise to JSON and CSV with a fixed column order.

use serde::Serialize;

use crate::colgen::CgReport;
use crate::error::{Error, Result};
use crate::model::{compute_metrics, Instance, Money, Solution};

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub schema_version: u32,
    pub label: String,
    pub requests: usize,
    pub schedules: usize,
    pub legs: usize,
    pub objective: Money,
    pub schedule_cost: Money,
    pub mile_cost: Money,
    pub empty_miles: i64,
    pub dummy_count: usize,
    pub active_schedules: usize,
    pub lp_bound: Option<f64>,
    pub gap_vs_lp: Option<f64>,
    pub lagrangian_bound: Option<Money>,
    pub gap_vs_lagrangian: Option<f64>,
    pub cg_iterations: Option<usize>,
    pub columns: Option<usize>,
    pub converged: Option<bool>,
    pub rounding_delta: Option<f64>,
    pub legs_after_reduction: Option<usize>,
    pub pruned_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleRow {
    pub schema_version: u32,
    pub schedule: usize,
    pub is_dummy: bool,
    pub active: bool,
    pub fixed_cost: Money,
    /// Mile cost of all requests on this schedule's legs.
    pub mile_cost: Money,
    pub legs: usize,
    pub loaded_legs: usize,
    pub empty_miles: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub summary: SummaryRow,
    pub schedules: Vec<ScheduleRow>,
}

fn gap(objective: Money, bound: f64) -> Option<f64> {
    (bound > 0.0).then(|| (objective as f64 - bound) / bound)
}

/// Builds the tables for a valid solution. Totals come from
/// [`compute_metrics`]; the schedule rows add up to them.
pub fn build_report(
    label: &str,
    instance: &Instance,
    solution: &Solution,
    cg: Option<&CgReport>,
    lagrangian_bound: Option<Money>,
) -> Result<Report> {
    let m = compute_metrics(instance, solution)?;
    let mut rows: Vec<ScheduleRow> = instance
        .schedules()
        .iter()
        .map(|s| ScheduleRow {
            schema_version: SCHEMA_VERSION,
            schedule: s.id.0,
            is_dummy: s.is_dummy,
            active: solution.active[s.id.0],
            fixed_cost: if solution.active[s.id.0] { s.fixed_cost } else { 0 },
            mile_cost: 0,
            legs: instance.schedule_legs(s.id).len(),
            loaded_legs: 0,
            empty_miles: 0,
        })
        .collect();
    let mut loaded = vec![false; instance.legs().len()];
    for p in &solution.paths {
        let v = instance.request(p.request).volume;
        for &l in &p.legs {
            let leg = instance.leg(l);
            rows[leg.schedule.0].mile_cost += leg.mile_cost(v);
            loaded[l.0] = true;
        }
    }
    for row in &mut rows {
        let legs = instance.schedule_legs(crate::model::ScheduleId(row.schedule));
        row.loaded_legs = legs.iter().filter(|l| loaded[l.0]).count();
        if row.active && !row.is_dummy {
            row.empty_miles = legs.iter().filter(|l| !loaded[l.0]).map(|&l| instance.leg(l).miles).sum();
        }
    }
    let lp_bound = cg.map(|c| c.lp_bound);
    let lagrangian_bound = lagrangian_bound.or(cg.and_then(|c| c.lagrangian_bound));
    let summary = SummaryRow {
        schema_version: SCHEMA_VERSION,
        label: label.to_string(),
        requests: instance.requests().len(),
        schedules: instance.schedules().len(),
        legs: instance.legs().len(),
        objective: m.objective,
        schedule_cost: m.schedule_cost,
        mile_cost: m.mile_cost,
        empty_miles: m.empty_miles,
        dummy_count: m.dummy_count,
        active_schedules: solution.active.iter().filter(|a| **a).count(),
        lp_bound,
        gap_vs_lp: lp_bound.and_then(|b| gap(m.objective, b)),
        lagrangian_bound,
        gap_vs_lagrangian: lagrangian_bound.and_then(|b| gap(m.objective, b as f64)),
        cg_iterations: cg.map(|c| c.iterations.len()),
        columns: cg.map(|c| c.columns),
        converged: cg.map(|c| c.converged),
        rounding_delta: cg.and_then(|c| c.finish.rounding_delta),
        legs_after_reduction: cg.map(|c| c.reduction.legs_after),
        pruned_pct: cg.map(|c| c.reduction.pruned_pct),
    };
    Ok(Report { schema_version: SCHEMA_VERSION, summary, schedules: rows })
}

/// Pretty JSON, newline terminated.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serialises");
    bytes.push(b'\n');
    bytes
}

/// CSV with a header row; `None` cells are empty.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
}
