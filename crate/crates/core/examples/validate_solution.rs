//! Check hand-built solutions on the three-hub sample and read their metrics.

use tpossp::samples::micro3;
use tpossp::{compute_metrics, validate_solution, LegId, Path, RequestId, Solution};

fn main() -> tpossp::Result<()> {
    let inst = micro3();

    for legs in [vec![LegId(0), LegId(1)], vec![LegId(2)]] {
        let path = Path::new(&inst, RequestId(0), legs.clone())?;
        let sol = Solution::from_paths(&inst, vec![path]);
        let m = compute_metrics(&inst, &sol)?;
        println!(
            "legs {:?}: objective {} = schedules {} + miles {}, empty miles {}",
            legs.iter().map(|l| l.0).collect::<Vec<_>>(),
            m.objective,
            m.schedule_cost,
            m.mile_cost,
            m.empty_miles
        );
    }

    // Leg 1 leaves B before leg 0 could get there in this window.
    let late = tpossp::samples::micro3_with_window(0, 150);
    let path = Path::new(&late, RequestId(0), vec![LegId(0), LegId(1)])?;
    let sol = Solution::from_paths(&late, vec![path]);
    for v in validate_solution(&late, &sol) {
        println!("violation: {v}");
    }
    Ok(())
}
