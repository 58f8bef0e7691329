//! Lower bounds from the Lagrangian relaxation and its subgradient ascent.

use tpossp::bounds::{eval_lr, solve_dual, DualSchedule, LagrangeMultipliers};
use tpossp::colgen::{solve, CgParams};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::reduction::reduce_all;
use tpossp::samples::micro3;

fn main() -> tpossp::Result<()> {
    // Three-hub sample: zero multipliers ignore schedule costs entirely.
    let inst = micro3();
    let subs = reduce_all(&inst);
    let lr = eval_lr(&inst, &subs, &LagrangeMultipliers::zeros(&inst, &subs))?;
    println!("micro3 at zero multipliers: {}", lr.bound);
    let dual = solve_dual(&inst, &subs, &DualSchedule { target: Some(130_000), ..Default::default() })?;
    println!("micro3 after {} steps: {}", dual.trace.len(), dual.best_bound);

    let cfg =
        GeneratorConfig { hubs: 10, schedules: 40, legs_per_schedule: 3, requests: 20, seed: 5, ..Default::default() };
    let inst = generate(&cfg)?;
    let out = solve(&inst, &CgParams::default())?;
    let subs = reduce_all(&out.instance);
    let dual = solve_dual(&out.instance, &subs, &DualSchedule::default())?;
    for p in dual.trace.iter().filter(|p| p.full).step_by(5) {
        println!(
            "  iteration {:>4}: value {:>10}  best {:>10}  beta {:.4}",
            p.iteration, p.value, p.best_bound, p.beta
        );
    }
    let obj = out.report.integer_objective;
    println!("Lagrangian bound {} <= LP bound {:.1} <= objective {obj}", dual.best_bound, out.report.lp_bound);
    Ok(())
}
