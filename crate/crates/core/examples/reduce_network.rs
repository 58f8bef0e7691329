//! Per-request network reduction: keep only legs on some time-feasible path.

use tpossp::generator::{generate, GeneratorConfig};
use tpossp::model::validate_walk;
use tpossp::reduction::{reduce_all, ReductionStats};

fn main() -> tpossp::Result<()> {
    let cfg =
        GeneratorConfig { hubs: 30, schedules: 200, legs_per_schedule: 5, requests: 20, seed: 3, ..Default::default() };
    let inst = generate(&cfg)?;
    let subs = reduce_all(&inst);
    let stats = ReductionStats::of(&inst, &subs);
    println!(
        "{} request-leg pairs before, {} after ({:.1}% pruned)",
        stats.legs_before, stats.legs_after, stats.pruned_pct
    );

    for sub in subs.iter().filter(|s| s.legs.len() > 1).take(5) {
        let r = inst.request(sub.request);
        print!("request {}: {} legs over {} hubs", r.id.0, sub.legs.len(), sub.hubs.len());
        if let Some(&leg) = sub.legs.last() {
            let legs = sub.witness_path(&inst, leg).expect("surviving leg has a witness");
            let path = tpossp::Path::new(&inst, sub.request, legs.clone())?;
            let ok = validate_walk(&inst, &path)?.is_empty();
            print!(", witness through leg {}: {:?} valid {ok}", leg.0, legs.iter().map(|l| l.0).collect::<Vec<_>>());
        }
        println!();
    }
    Ok(())
}
