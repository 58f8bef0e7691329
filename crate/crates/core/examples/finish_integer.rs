//! Drive the solver stages by hand: reduction, column generation, pool
//! enrichment and the integer finish.

use tpossp::colgen::{enrich_pool, finish_integer, run_colgen, CgParams};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::reduction::reduce_all;
use tpossp::{add_dummy_schedules, DummyConfig};

fn main() -> tpossp::Result<()> {
    let cfg = GeneratorConfig {
        hubs: 8,
        schedules: 30,
        legs_per_schedule: 3,
        requests: 20,
        capacity_mix: vec![(20, 1), (25, 1)],
        seed: 11,
        ..Default::default()
    };
    let inst = add_dummy_schedules(&generate(&cfg)?, &DummyConfig::default());
    let subs = reduce_all(&inst);
    let params = CgParams::default();

    let mut cg = run_colgen(&inst, &subs, &params)?;
    println!("column generation: {:?} after {} rounds, LP {:.1}", cg.stop, cg.iterations.len(), cg.lp_bound);
    let pooled = enrich_pool(&inst, &mut cg.master, &subs, &cg.duals, params.pool_paths)?;
    println!("pool: {} columns, {pooled} added under the final duals", cg.master.columns().len());

    for budget in [0, 10, params.node_budget] {
        let fin = finish_integer(&inst, &cg.master, cg.lp_bound, budget, None)?;
        let r = &fin.report;
        println!(
            "budget {budget:>6}: objective {:>9}, {} nodes, {} branched, rounding delta {:?}, polish gain {}{}",
            fin.solution.objective(),
            r.nodes,
            r.branched,
            r.rounding_delta,
            r.polish_gain,
            if r.dummy_fallback { ", all dummies" } else { "" }
        );
    }
    Ok(())
}
