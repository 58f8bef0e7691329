use serde::{Deserialize, Serialize};

use super::{validate_solution, Instance, Money, Path, Solution};
use crate::error::{Error, Result};

/// Cost breakdown of a solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub objective: Money,
    pub schedule_cost: Money,
    pub mile_cost: Money,
    /// Miles driven by legs of active non-dummy schedules that carry nothing.
    pub empty_miles: i64,
    pub dummy_count: usize,
}

impl Metrics {
    /// Recomputes the breakdown without validating the solution.
    pub fn compute(instance: &Instance, paths: &[Path], active: &[bool]) -> Self {
        let mut loaded = vec![false; instance.legs().len()];
        for p in paths {
            for &l in &p.legs {
                loaded[l.0] = true;
            }
        }
        let mut m = Metrics::default();
        for s in instance.schedules() {
            if !active.get(s.id.0).copied().unwrap_or(false) {
                continue;
            }
            m.schedule_cost += s.fixed_cost;
            if s.is_dummy {
                m.dummy_count += 1;
            } else {
                m.empty_miles += instance
                    .schedule_legs(s.id)
                    .iter()
                    .filter(|l| !loaded[l.0])
                    .map(|&l| instance.leg(l).miles)
                    .sum::<i64>();
            }
        }
        m.mile_cost = paths.iter().map(|p| p.mile_cost).sum();
        m.objective = m.schedule_cost + m.mile_cost;
        m
    }
}

/// Metrics of a valid solution; invalid solutions are rejected.
pub fn compute_metrics(instance: &Instance, solution: &Solution) -> Result<Metrics> {
    let mut probe = solution.clone();
    probe.metrics = Metrics::compute(instance, &solution.paths, &solution.active);
    let violations = validate_solution(instance, &probe);
    if !violations.is_empty() {
        return Err(Error::InvalidSolution(violations));
    }
    Ok(probe.metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{add_dummy_schedules, DummyConfig, LegId, RequestId};
    use crate::samples::micro3;

    #[test]
    fn optimum_has_no_empty_miles() {
        let inst = micro3();
        let sol = Solution::from_paths(&inst, vec![Path::new(&inst, RequestId(0), vec![LegId(2)]).unwrap()]);
        let m = compute_metrics(&inst, &sol).unwrap();
        assert_eq!(m.empty_miles, 0);
        assert_eq!(m.schedule_cost, 40_000);
        assert_eq!(m.mile_cost, 90_000);
        assert_eq!(m.objective, 130_000);
    }

    #[test]
    fn unloaded_active_leg_counts_as_empty() {
        // schedule 0 active with only its first leg loaded: leg 1 (30 mi) runs empty
        let inst = micro3();
        let paths = vec![Path::new(&inst, RequestId(0), vec![LegId(0)]).unwrap()];
        let active = vec![true, false];
        let m = Metrics::compute(&inst, &paths, &active);
        assert_eq!(m.empty_miles, 30);
        assert_eq!(m.schedule_cost, 100_000);
        assert_eq!(m.objective, m.schedule_cost + m.mile_cost);
    }

    #[test]
    fn all_dummy_solution() {
        let inst = add_dummy_schedules(&micro3(), &DummyConfig::default());
        let d = inst.dummy_leg(RequestId(0)).unwrap();
        let sol = Solution::from_paths(&inst, vec![Path::new(&inst, RequestId(0), vec![d]).unwrap()]);
        let m = compute_metrics(&inst, &sol).unwrap();
        assert_eq!(m.empty_miles, 0);
        assert_eq!(m.dummy_count, inst.requests().len());
    }

    #[test]
    fn invalid_solution_is_an_error() {
        let inst = micro3();
        let sol = Solution::from_paths(&inst, vec![Path::new(&inst, RequestId(0), vec![LegId(0)]).unwrap()]);
        assert!(compute_metrics(&inst, &sol).is_err());
    }
}
